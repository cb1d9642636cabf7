"""Dense complex linear algebra: states, operators, tensor products, metrics.

Conventions fixed here and used everywhere else:

- tensor products put the FIRST factor on the slow (most significant) index,
  so ``tensor_state(a, b)`` stores amplitude ``a[i] * b[j]`` at ``i*b.dim + j``;
- fidelity is the squared magnitude of the inner product of unit vectors;
- operator closeness is the phase-invariant trace metric
  ``d(A, B) = sqrt(max(0, 1 − |tr(A†B)|/dim))``, which is zero exactly when
  the operators differ only by a global phase.

All types are immutable after construction (backing arrays are frozen) and
safe to share across concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import CapacityError, ContractError, InputError


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitude vector over a computational basis."""

    amps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.amps, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise ContractError("state amplitudes must form a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ContractError("state amplitudes must be finite")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > config.NORM_TOL:
            raise ContractError(f"state norm {norm!r} deviates from 1 beyond NORM_TOL")
        arr.setflags(write=False)
        object.__setattr__(self, "amps", arr)

    @property
    def dim(self) -> int:
        return int(self.amps.shape[0])

    @classmethod
    def normalized(cls, amps) -> "StateVector":
        """Build a state from arbitrary nonzero amplitudes, rescaled to unit norm."""
        arr = np.asarray(amps, dtype=complex)
        norm = float(np.linalg.norm(arr))
        if not np.isfinite(norm) or norm == 0.0:
            raise ContractError("cannot normalize a zero or non-finite amplitude vector")
        return cls(arr / norm)


@dataclass(frozen=True, eq=False)
class Operator:
    """Complex square matrix carrying a unitarity certificate.

    ``unitary_residual`` is the max-entry magnitude of ``A†A − I``, computed
    once at construction; the operator counts as unitary when the residual is
    at most UNITARY_TOL.
    """

    entries: np.ndarray
    unitary_residual: float = field(init=False)

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ContractError("operator entries must form a non-empty square matrix")
        if not np.all(np.isfinite(arr)):
            raise ContractError("operator entries must be finite")
        arr.setflags(write=False)
        residual = float(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))))
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "unitary_residual", residual)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def is_unitary(self) -> bool:
        return self.unitary_residual <= config.UNITARY_TOL

    def is_unitary_within(self, tol: float) -> bool:
        return self.unitary_residual <= tol


def basis_state(dim: int, index: int) -> StateVector:
    """The ``index``-th standard unit vector in ``dim`` dimensions."""
    if dim < 1:
        raise ContractError(f"dimension must be positive, got {dim}")
    if not 0 <= index < dim:
        raise ContractError(f"basis index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def identity(dim: int) -> Operator:
    if dim < 1:
        raise ContractError(f"dimension must be positive, got {dim}")
    return Operator(np.eye(dim, dtype=complex))


def _check_capacity(dim: int, what: str) -> None:
    limit = config.max_dim()
    if dim > limit:
        raise CapacityError(f"{what} needs {dim} amplitudes, exceeding MAX_DIM={limit}")


def tensor_state(a: StateVector, b: StateVector) -> StateVector:
    """Product state with ``a`` on the slow index: index = i*b.dim + j."""
    _check_capacity(a.dim * b.dim, "tensor product state")
    return StateVector(np.kron(a.amps, b.amps))


def tensor_op(a: Operator, b: Operator) -> Operator:
    """Kronecker product, compatible with tensor_state ordering."""
    _check_capacity(a.dim * b.dim, "tensor product operator")
    return Operator(np.kron(a.entries, b.entries))


def apply(op: Operator, state: StateVector) -> StateVector:
    """Matrix-vector product; the result must again be a unit vector."""
    if op.dim != state.dim:
        raise ContractError(f"operator dim {op.dim} does not match state dim {state.dim}")
    return StateVector(op.entries @ state.amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared magnitude of the inner product; 1 means equal up to phase."""
    if a.dim != b.dim:
        raise ContractError(f"state dims differ: {a.dim} vs {b.dim}")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def phase_invariant_distance(a: Operator, b: Operator) -> float:
    """Trace-based distance, insensitive to a global phase on either operator.

    The square root amplifies rounding near zero, so values below ~1.5e-8
    (sqrt of double-precision eps) are numerically indistinguishable from 0.
    """
    if a.dim != b.dim:
        raise ContractError(f"operator dims differ: {a.dim} vs {b.dim}")
    if not a.is_unitary or not b.is_unitary:
        raise ContractError("phase_invariant_distance requires unitary operators")
    overlap = abs(np.trace(a.entries.conj().T @ b.entries)) / a.dim
    return float(np.sqrt(max(0.0, 1.0 - overlap)))


def random_unitary(dim: int, rng: np.random.Generator) -> Operator:
    """Haar-distributed unitary via QR of a complex Gaussian matrix.

    The R-factor's diagonal phases are normalized so the distribution does
    not depend on the QR implementation's sign conventions.
    """
    if dim < 1:
        raise ContractError(f"dimension must be positive, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    lam = np.diag(r)
    q = q * (lam / np.abs(lam))
    return Operator(q)


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    if dim < 1:
        raise ContractError(f"dimension must be positive, got {dim}")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.normalized(z)


# -- JSON wire format ---------------------------------------------------------
#
# A complex number is a two-element array [re, im]; a state is
# {"dim": n, "amps": [[re, im], ...]}; an operator is
# {"dim": n, "rows": [[[re, im], ...], ...]}.


def _require_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _complex_from_json(value, where: str) -> complex:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InputError(f"{where}: expected an [re, im] pair, got {value!r}")
    return complex(_require_number(value[0], where), _require_number(value[1], where))


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def state_to_json(state: StateVector) -> dict:
    return {"dim": state.dim, "amps": [_pair(z) for z in state.amps]}


def state_from_json(obj) -> StateVector:
    if not isinstance(obj, dict):
        raise InputError(f"state: expected a JSON object, got {type(obj).__name__}")
    if "dim" not in obj or "amps" not in obj:
        raise InputError("state: missing required keys 'dim' and 'amps'")
    dim = obj["dim"]
    amps = obj["amps"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"state.dim: expected a positive integer, got {dim!r}")
    if not isinstance(amps, list) or len(amps) != dim:
        raise InputError(f"state.amps: expected a list of {dim} amplitude pairs")
    values = [_complex_from_json(v, f"state.amps[{i}]") for i, v in enumerate(amps)]
    return StateVector(np.array(values, dtype=complex))


def operator_to_json(op: Operator) -> dict:
    return {"dim": op.dim, "rows": [[_pair(z) for z in row] for row in op.entries]}


def operator_from_json(obj) -> Operator:
    if not isinstance(obj, dict):
        raise InputError(f"operator: expected a JSON object, got {type(obj).__name__}")
    if "dim" not in obj or "rows" not in obj:
        raise InputError("operator: missing required keys 'dim' and 'rows'")
    dim = obj["dim"]
    rows = obj["rows"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"operator.dim: expected a positive integer, got {dim!r}")
    if not isinstance(rows, list) or len(rows) != dim:
        raise InputError(f"operator.rows: expected {dim} rows")
    matrix = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise InputError(f"operator.rows[{i}]: expected {dim} entries")
        for j, value in enumerate(row):
            matrix[i, j] = _complex_from_json(value, f"operator.rows[{i}][{j}]")
    return Operator(matrix)
