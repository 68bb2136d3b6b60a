"""
Data models for the teleportation simulator.

Numeric carriers (operators, vectors, superoperators, coefficient matrices)
are plain complex numpy arrays; the types below wrap them where an invariant
has to hold.
"""
import math
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import Config

OperatorMatrix = NDArray[np.complex128]
HsVector = NDArray[np.complex128]
SuperOperator = NDArray[np.complex128]
CoefficientMatrix = NDArray[np.complex128]

# JSON encoding: a complex entry is a number or a [re, im] pair
ComplexEntry = Union[float, List[float]]
MatrixRows = List[List[ComplexEntry]]


def _frozen(value: Any, dtype=complex) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def density_defects(matrix: np.ndarray) -> Dict[str, float]:
    """Hermiticity defect, minimum eigenvalue and trace defect of a candidate state."""
    herm = _max_abs(matrix - matrix.conj().T)
    eigs = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)
    return {
        "hermiticity": herm,
        "min_eigenvalue": float(eigs[0]),
        "trace": abs(complex(np.trace(matrix)) - 1.0),
    }


def _check_density(matrix: np.ndarray, tol: float) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"state must be a square matrix, got shape {matrix.shape}")
    d = density_defects(matrix)
    if d["hermiticity"] > tol:
        raise ValueError(f"state is not Hermitian (defect {d['hermiticity']:.3g})")
    if d["min_eigenvalue"] < -tol:
        raise ValueError(f"state is not positive semidefinite (eigenvalue {d['min_eigenvalue']:.3g})")
    if d["trace"] > tol:
        raise ValueError(f"state does not have unit trace (defect {d['trace']:.3g})")


def decode_matrix(rows: MatrixRows) -> np.ndarray:
    """Decode row-major nested lists with [re, im] entries into a complex array."""
    if not rows or not isinstance(rows, list):
        raise ValueError("matrix must be a non-empty list of rows")
    width = len(rows[0])
    if width == 0 or any(len(row) != width for row in rows):
        raise ValueError("matrix is not rectangular")
    out = np.zeros((len(rows), width), dtype=complex)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise ValueError(f"complex entry at ({i}, {j}) must be [re, im]")
                out[i, j] = complex(float(entry[0]), float(entry[1]))
            else:
                out[i, j] = float(entry)
    return out


def encode_matrix(matrix: np.ndarray) -> List[List[List[float]]]:
    """Encode a complex matrix as row-major nested [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


# --------------------------------------------------------------------------
# Domain types
# --------------------------------------------------------------------------


class OperatorBasis(BaseModel):
    """Ordered family of n x n operators, meant to be Hilbert-Schmidt orthonormal."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    elements: np.ndarray

    @field_validator("elements", mode="before")
    @classmethod
    def coerce_elements(cls, v):
        arr = _frozen(v)
        if arr.ndim != 3 or arr.shape[0] == 0 or arr.shape[1] == 0 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"basis elements must be a stack of square matrices, got shape {arr.shape}")
        return arr

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __getitem__(self, index: int) -> OperatorMatrix:
        return self.elements[index]

    def gram(self) -> np.ndarray:
        """G_ab = tr(f_a* f_b)."""
        flat = self.elements.reshape(len(self), -1)
        return flat.conj() @ flat.T

    def orthonormality_defect(self) -> float:
        return _max_abs(self.gram() - np.eye(len(self)))


class CpMapSpec(BaseModel):
    """Canonical form of a CP map: Theta(A) = sum_a weights[a] f_a A f_a*."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray
    basis: OperatorBasis

    @field_validator("weights", mode="before")
    @classmethod
    def coerce_weights(cls, v):
        arr = _frozen(v, dtype=float)
        if arr.ndim != 1:
            raise ValueError("weights must be a flat list")
        if np.any(arr < 0):
            raise ValueError(f"weights must be non-negative, got minimum {arr.min():.3g}")
        if abs(arr.sum() - 1.0) > Config.ROUNDTRIP_TOLERANCE:
            raise ValueError(f"weights must sum to 1, got {arr.sum():.15g}")
        return arr

    @model_validator(mode="after")
    def check_basis(self):
        n = self.basis.dim
        if len(self.basis) != n * n or len(self.weights) != n * n:
            raise ValueError(f"expected {n * n} weights and basis elements, got {len(self.weights)} and {len(self.basis)}")
        defect = self.basis.orthonormality_defect()
        if defect > Config.STRUCTURAL_TOLERANCE:
            raise ValueError(f"resource basis is not orthonormal (Gram defect {defect:.3g})")
        return self

    @property
    def dim(self) -> int:
        return self.basis.dim


class PureResource(BaseModel):
    """Pure resource Theta(.) = f . f* with tr(f* f) = 1."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    f: np.ndarray

    @field_validator("f", mode="before")
    @classmethod
    def coerce_f(cls, v):
        arr = _frozen(v)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError(f"resource operator must be square, got shape {arr.shape}")
        norm = float(np.vdot(arr, arr).real)
        if abs(norm - 1.0) > Config.ROUNDTRIP_TOLERANCE:
            raise ValueError(f"resource operator is not normalized: tr(f*f) = {norm:.12g}")
        return arr

    @property
    def dim(self) -> int:
        return self.f.shape[0]


Resource = Union[CpMapSpec, PureResource]


class InputState(BaseModel):
    """Alice's unknown state rho."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def check_state(cls, v):
        arr = _frozen(v)
        _check_density(arr, Config.STRUCTURAL_TOLERANCE)
        return arr

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


class BipartiteState(BaseModel):
    """Density matrix on H (x) H, dimension n^2."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int = Field(ge=1)
    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def check_state(cls, v):
        arr = _frozen(v)
        _check_density(arr, Config.STRUCTURAL_TOLERANCE)
        return arr

    @model_validator(mode="after")
    def check_size(self):
        if self.matrix.shape[0] != self.dim ** 2:
            raise ValueError(f"bipartite state for n={self.dim} must be {self.dim ** 2}x{self.dim ** 2}")
        return self


class ProjectorFamily(BaseModel):
    """n^2 mutually orthogonal projectors on H (x) H resolving the identity."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int = Field(ge=1)
    projectors: np.ndarray

    @field_validator("projectors", mode="before")
    @classmethod
    def coerce_projectors(cls, v):
        return _frozen(v)

    @model_validator(mode="after")
    def check_axioms(self):
        n2 = self.dim ** 2
        P = self.projectors
        if P.shape != (n2, n2, n2):
            raise ValueError(f"expected {n2} projectors of size {n2}x{n2}, got shape {P.shape}")
        tol = Config.STRUCTURAL_TOLERANCE
        if _max_abs(P - P.conj().transpose(0, 2, 1)) > tol:
            raise ValueError("projector family contains a non-Hermitian element")
        products = np.einsum("aij,bjk->abik", P, P)
        expected = np.einsum("ab,aik->abik", np.eye(n2), P)
        if _max_abs(products - expected) > tol:
            raise ValueError("projector family is not idempotent and mutually orthogonal")
        if _max_abs(P.sum(axis=0) - np.eye(n2)) > tol:
            raise ValueError("projector family does not sum to the identity")
        return self

    def __len__(self) -> int:
        return self.projectors.shape[0]

    def __getitem__(self, index: int) -> SuperOperator:
        return self.projectors[index]


class Protocol(BaseModel):
    """Alice's measurement basis {g_a} and the resource Theta (or pure f)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    alice_basis: OperatorBasis
    resource: Resource

    @model_validator(mode="after")
    def check_consistency(self):
        n = self.alice_basis.dim
        if len(self.alice_basis) != n * n:
            raise ValueError(f"Alice basis for n={n} needs {n * n} elements, got {len(self.alice_basis)}")
        defect = self.alice_basis.orthonormality_defect()
        if defect > Config.STRUCTURAL_TOLERANCE:
            raise ValueError(f"Alice basis is not orthonormal (Gram defect {defect:.3g})")
        if self.resource.dim != n:
            raise ValueError(f"resource dimension {self.resource.dim} does not match Alice basis dimension {n}")
        return self

    @property
    def dim(self) -> int:
        return self.alice_basis.dim

    @property
    def is_pure(self) -> bool:
        return isinstance(self.resource, PureResource)


class OutcomeResult(BaseModel):
    """Per-outcome data of one protocol run."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    outcome_index: int
    probability: float
    raw_state: np.ndarray
    status: str = "OK"
    channel_state: Optional[np.ndarray] = None
    recovered_state: Optional[np.ndarray] = None
    recovery_error: Optional[float] = None
    key: Optional[np.ndarray] = None
    key_unitarity_defect: Optional[float] = None
    post_measurement_defect: Optional[float] = None
    diagnostic: Optional[str] = None

    @model_validator(mode="after")
    def check_invariants(self):
        tol = Config.STRUCTURAL_TOLERANCE
        trace = complex(np.trace(self.raw_state)).real
        if abs(self.probability - trace) > tol:
            raise ValueError(f"probability {self.probability:.12g} differs from tr(raw_state) {trace:.12g}")
        if self.recovered_state is not None:
            rec = self.recovered_state
            if _max_abs(rec - rec.conj().T) > tol:
                raise ValueError("recovered state is not Hermitian")
            if abs(complex(np.trace(rec)) - 1.0) > tol:
                raise ValueError("recovered state does not have unit trace")
        return self

    @property
    def failed(self) -> bool:
        return self.status == "FAILED"


class RotationAngles(BaseModel):
    """Angles of the three plane rotations R01, R02, R03 (radians)."""
    model_config = ConfigDict(frozen=True)

    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = 0.0


class OrthogonalMatrix4(BaseModel):
    """Real orthogonal transformation of R^4 acting on the spin-basis coordinates."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def check_orthogonal(cls, v):
        arr = np.array(v)
        if np.iscomplexobj(arr):
            if _max_abs(arr.imag) > 0:
                raise ValueError("orthogonal matrix must be real")
            arr = arr.real
        arr = _frozen(arr, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
        defect = _max_abs(arr.T @ arr - np.eye(4))
        if defect > Config.ROUNDTRIP_TOLERANCE:
            raise ValueError(f"matrix is not orthogonal (C^T C defect {defect:.3g})")
        return arr


class ElementProfile(BaseModel):
    """Rank and entanglement data of one basis element f_a."""
    alpha: int
    determinant: float
    full_rank: bool
    maximally_entangled: bool
    entropy_bits: float
    inequality_predicts_nonmaximal: bool


# --------------------------------------------------------------------------
# Experiment documents
# --------------------------------------------------------------------------

BASIS_PRESETS = ("spin", "matrix_units", "simple_theta", "rotation", "random", "explicit")


class BasisSpec(BaseModel):
    """Operator basis named by preset, angles or explicit matrices."""
    preset: Literal["spin", "matrix_units", "simple_theta", "rotation", "random", "explicit"]
    theta1: Optional[float] = None
    theta2: Optional[float] = None
    theta3: Optional[float] = None
    seed: Optional[int] = None
    matrices: Optional[List[MatrixRows]] = None

    @model_validator(mode="before")
    @classmethod
    def expand_shorthand(cls, v):
        """Accept "spin" for {"preset": "spin"} and bare {"matrices": [...]}."""
        if isinstance(v, str):
            return {"preset": v}
        if isinstance(v, dict) and "preset" not in v and "matrices" in v:
            return {**v, "preset": "explicit"}
        return v

    @field_validator("theta1", "theta2", "theta3")
    @classmethod
    def finite_angle(cls, v):
        if v is not None and not math.isfinite(v):
            raise ValueError("angles must be finite")
        return v

    @model_validator(mode="after")
    def check_preset(self):
        if self.preset == "explicit":
            if not self.matrices:
                raise ValueError("explicit basis requires 'matrices'")
            shapes = {decode_matrix(m).shape for m in self.matrices}
            if len(shapes) != 1:
                raise ValueError(f"explicit basis matrices have mixed shapes {sorted(shapes)}")
            (rows, cols), = shapes
            if rows != cols:
                raise ValueError(f"explicit basis matrices must be square, got {rows}x{cols}")
        if self.preset == "simple_theta" and self.theta1 is None:
            raise ValueError("simple_theta basis requires theta1")
        return self

    def required_dim(self) -> Optional[int]:
        """Dimension forced by the preset, if any."""
        if self.preset in ("spin", "simple_theta", "rotation"):
            return 2
        if self.preset == "explicit":
            return len(self.matrices[0])
        return None

    def decoded(self) -> List[np.ndarray]:
        return [decode_matrix(m) for m in self.matrices or []]


class ResourceSpec(BaseModel):
    """Pure resource f (angle, explicit matrix or basis element) or mixed Theta."""
    kind: Literal["pure", "mixed"]
    theta: Optional[float] = None
    matrix: Optional[MatrixRows] = None
    basis: Optional[BasisSpec] = None
    index: int = 0
    weights: Optional[List[float]] = None

    @model_validator(mode="before")
    @classmethod
    def expand_shorthand(cls, v):
        """Map the document forms {pure_theta}, {pure}, {pure_basis}, {mixed} onto fields."""
        if not isinstance(v, dict) or "kind" in v:
            return v
        if "pure_theta" in v:
            return {"kind": "pure", "theta": v["pure_theta"]}
        if "pure" in v:
            return {"kind": "pure", "matrix": v["pure"]}
        if "pure_basis" in v:
            return {"kind": "pure", "basis": v["pure_basis"], "index": v.get("index", 0)}
        if "mixed" in v and isinstance(v["mixed"], dict):
            return {"kind": "mixed", **v["mixed"]}
        raise ValueError("resource must be one of pure_theta, pure, pure_basis or mixed")

    @field_validator("theta")
    @classmethod
    def finite_angle(cls, v):
        if v is not None and not math.isfinite(v):
            raise ValueError("angles must be finite")
        return v

    @model_validator(mode="after")
    def check_resource(self):
        tol = 1e-9
        if self.kind == "pure":
            given = [x is not None for x in (self.theta, self.matrix, self.basis)]
            if sum(given) != 1:
                raise ValueError("pure resource needs exactly one of theta, matrix or basis")
            if self.matrix is not None:
                f = decode_matrix(self.matrix)
                if f.shape[0] != f.shape[1]:
                    raise ValueError(f"resource operator must be square, got {f.shape[0]}x{f.shape[1]}")
                norm = float(np.vdot(f, f).real)
                if abs(norm - 1.0) > tol:
                    raise ValueError(f"resource operator is not normalized: tr(f*f) = {norm:.12g}")
            if self.index < 0:
                raise ValueError("basis index must be non-negative")
        else:
            if self.weights is None or self.basis is None:
                raise ValueError("mixed resource requires weights and basis")
            if any(w < 0 for w in self.weights):
                raise ValueError(f"weights must be non-negative, got {self.weights}")
            total = sum(self.weights)
            if abs(total - 1.0) > tol:
                raise ValueError(f"weights sum to {total:.12g}, expected 1")
        return self

    def required_dim(self) -> Optional[int]:
        if self.theta is not None:
            return 2
        if self.matrix is not None:
            return len(self.matrix)
        if self.basis is not None:
            return self.basis.required_dim()
        return None


class InputSpec(BaseModel):
    """Explicit input states or a count of seeded random ones."""
    random: Optional[int] = Field(default=None, ge=0)
    matrices: Optional[List[MatrixRows]] = None

    @model_validator(mode="before")
    @classmethod
    def expand_shorthand(cls, v):
        if isinstance(v, int):
            return {"random": v}
        return v

    @model_validator(mode="after")
    def check_inputs(self):
        if self.random is None and not self.matrices:
            self.random = 10
        for k, rows in enumerate(self.matrices or []):
            try:
                _check_density(decode_matrix(rows), Config.STRUCTURAL_TOLERANCE)
            except ValueError as e:
                raise ValueError(f"input state {k}: {e}") from e
        return self


class Tolerances(BaseModel):
    structural: float = Field(default_factory=lambda: Config.STRUCTURAL_TOLERANCE, gt=0)
    recovery: float = Field(default_factory=lambda: Config.RECOVERY_TOLERANCE, gt=0)


class ExperimentConfig(BaseModel):
    """A validated experiment document."""
    dim: int = Field(ge=1, le=Config.TRIPARTITE_MAX_DIM)
    alice: BasisSpec
    resource: ResourceSpec
    inputs: InputSpec = Field(default_factory=InputSpec)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    seed: int = 0
    oracle: bool = False

    @model_validator(mode="after")
    def check_dimensions(self):
        n = self.dim
        alice_dim = self.alice.required_dim()
        if alice_dim is not None and alice_dim != n:
            raise ValueError(f"alice basis '{self.alice.preset}' has dimension {alice_dim}, config dim is {n}")
        if self.alice.preset == "explicit" and len(self.alice.matrices) != n * n:
            raise ValueError(f"explicit alice basis needs {n * n} matrices, got {len(self.alice.matrices)}")
        resource_dim = self.resource.required_dim()
        if resource_dim is not None and resource_dim != n:
            raise ValueError(f"resource has dimension {resource_dim}, config dim is {n}")
        if self.resource.kind == "mixed" and len(self.resource.weights) != n * n:
            raise ValueError(f"mixed resource needs {n * n} weights, got {len(self.resource.weights)}")
        for k, rows in enumerate(self.inputs.matrices or []):
            if len(rows) != n:
                raise ValueError(f"input state {k} has dimension {len(rows)}, config dim is {n}")
        return self


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------


class OutcomeRecord(BaseModel):
    """Serializable per-outcome line of a run report."""
    input_index: int
    outcome: int
    status: str
    probability: float
    recovery_error: Optional[float] = None
    key_unitarity_defect: Optional[float] = None
    post_measurement_defect: Optional[float] = None
    diagnostic: Optional[str] = None


class ResourceDiagnostics(BaseModel):
    """Entanglement and rank diagnostics of the resource and Alice's basis."""
    kind: str
    schmidt_values: Optional[List[float]] = None
    entropy_bits: Optional[float] = None
    maximally_entangled: Optional[bool] = None
    min_singular_value_f: Optional[float] = None
    min_singular_values_alice: List[float] = Field(default_factory=list)
    choi_spectrum: List[float] = Field(default_factory=list)


class AggregateSummary(BaseModel):
    max_recovery_error: Optional[float] = None
    max_probability_sum_defect: float = 0.0
    max_key_unitarity_defect: Optional[float] = None
    max_post_measurement_defect: Optional[float] = None
    failed_outcomes: int = 0
    passed: bool = False


class RunReport(BaseModel):
    """Machine-readable result of one experiment."""
    config: Dict[str, Any]
    resource: Optional[ResourceDiagnostics] = None
    outcomes: List[OutcomeRecord] = Field(default_factory=list)
    aggregate: AggregateSummary = Field(default_factory=AggregateSummary)
    oracle_defect: Optional[float] = None
    sampled_outcomes: Optional[List[int]] = None
    errors: List[str] = Field(default_factory=list)


class VerificationReport(BaseModel):
    """Result of a randomized property sweep."""
    dim: int
    trials: int
    seed: int
    defects: Dict[str, float] = Field(default_factory=dict)
    thresholds: Dict[str, float] = Field(default_factory=dict)
    failures: List[str] = Field(default_factory=list)
    passed: bool = False
