"""Dense linear algebra for small tensor-factored Hilbert spaces.

Factor ordering follows the usual Kronecker convention: the leftmost factor
is the slowest-varying index, so a basis label ``(i_0, i_1, ..., i_{n-1})``
maps to the flat index ``sum_k i_k * prod_{j>k} d_j``.  The friends protocol
uses the order (particle, Bub, Laloe).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

ATOL = 1e-12
EIG_ATOL = 1e-10
NORM_FLOOR = 1e-14
MAX_DIM = 4096

__all__ = [
    "ATOL",
    "EIG_ATOL",
    "NORM_FLOOR",
    "MAX_DIM",
    "AnnihilatedStateError",
    "DimensionError",
    "InvariantError",
    "Ket",
    "Operator",
    "DensityMatrix",
    "basis",
    "identity",
    "tensor",
    "partial_trace",
    "reduced_state",
    "purity",
    "normalize",
    "expectation",
    "projector",
    "random_pure_state",
    "random_unitary",
]


class DimensionError(ValueError):
    """Operands live on incompatible spaces."""


class InvariantError(ValueError):
    """A state or operator violates one of its defining invariants."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class AnnihilatedStateError(ValueError):
    """Normalization of a (nearly) zero vector was requested."""


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"dims must be positive integers, got {dims}")
    total = int(np.prod(dims))
    if total > MAX_DIM:
        raise DimensionError(f"total dimension {total} exceeds cap {MAX_DIM}")
    return dims


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """State vector on ``prod(dims)`` complex dimensions (not necessarily normalized)."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != int(np.prod(dims)):
            raise DimensionError(
                f"{amps.size} amplitudes do not match dims {dims} (product {int(np.prod(dims))})"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, *labels: int) -> complex:
        """Amplitude of the product basis vector with the given factor labels."""
        return complex(self.amplitudes[np.ravel_multi_index(labels, self.dims)])

    def dm(self) -> "DensityMatrix":
        """Projector ``|psi><psi|`` of the normalized ket."""
        psi = normalize(self).amplitudes
        return DensityMatrix(self.dims, np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False)
class Operator:
    """Square matrix acting on ``prod(dims)`` dimensions."""

    dims: tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        m = _frozen(self.entries)
        n = int(np.prod(dims))
        if m.shape != (n, n):
            raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def H(self) -> "Operator":
        return Operator(self.dims, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        if other.dims != self.dims:
            raise DimensionError(f"dims {self.dims} vs {other.dims}")
        return Operator(self.dims, self.entries @ other.entries)

    def __add__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        if other.dims != self.dims:
            raise DimensionError(f"dims {self.dims} vs {other.dims}")
        return Operator(self.dims, self.entries + other.entries)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.dims, self.entries * scalar)

    __rmul__ = __mul__


class DensityMatrix(Operator):
    """Hermitian, unit-trace, positive semidefinite operator.

    Construction validates all three invariants and raises
    :class:`InvariantError` carrying the measured residual.
    """

    def __post_init__(self):
        super().__post_init__()
        m = self.entries
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > ATOL:
            raise InvariantError(f"not Hermitian: residual {herm:.3g}", herm)
        tr = np.trace(m)
        resid = float(abs(tr - 1.0))
        if resid > ATOL:
            raise InvariantError(f"trace residual {resid:.6g}", resid)
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -EIG_ATOL:
            raise InvariantError(f"negative eigenvalue {lo:.3g}", -lo)

    @classmethod
    def from_operator(cls, op: Operator) -> "DensityMatrix":
        return cls(op.dims, op.entries)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def basis(dim: int, index: int, dims: Sequence[int] | None = None) -> Ket:
    """Computational basis ket ``|index>`` in ``dim`` dimensions."""
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return Ket(tuple(dims) if dims is not None else (dim,), v)


def identity(dims: Sequence[int] | int) -> Operator:
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    return Operator(dims, np.eye(int(np.prod(dims)), dtype=complex))


def projector(psi: Ket) -> Operator:
    """Rank-1 projector onto the normalized direction of ``psi``."""
    v = normalize(psi).amplitudes
    return Operator(psi.dims, np.outer(v, v.conj()))


KetOrOperator = Union[Ket, Operator]


def tensor(*factors: KetOrOperator) -> KetOrOperator:
    """Tensor product of kets or of operators, leftmost factor slowest.

    Density matrices combine into a :class:`DensityMatrix`.
    """
    if not factors:
        raise ValueError("tensor needs at least one factor")
    if len(factors) == 1:
        return factors[0]
    if all(isinstance(f, Ket) for f in factors):
        amps = reduce(np.kron, (f.amplitudes for f in factors))
        return Ket(sum((f.dims for f in factors), ()), amps)
    if all(isinstance(f, Operator) for f in factors):
        m = reduce(np.kron, (f.entries for f in factors))
        dims = sum((f.dims for f in factors), ())
        if all(isinstance(f, DensityMatrix) for f in factors):
            return DensityMatrix(dims, _hermitize(m))
        return Operator(dims, m)
    raise TypeError("cannot mix kets and operators in a tensor product")


def partial_trace(rho: Operator, keep: Iterable[int]) -> DensityMatrix | Operator:
    """Trace out every factor not listed in ``keep``.

    Kept factors retain their original relative order.  A scalar trace is
    available as ``rho.trace()``; an empty ``keep`` is rejected.
    """
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one factor; use .trace() for the scalar")
    if keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"factor indices {keep} out of range for {n} factors")
    drop = [k for k in range(n) if k not in keep]
    t = rho.entries.reshape(rho.dims + rho.dims)
    # contract each dropped ket axis with its bra axis, highest first so indices stay valid
    for k in reversed(drop):
        t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    kdims = tuple(rho.dims[k] for k in keep)
    d = int(np.prod(kdims))
    m = t.reshape(d, d)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(kdims, _hermitize(m))
    return Operator(kdims, m)


def reduced_state(psi: Ket, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix of a pure state, contracted directly on the ket.

    Same result as ``partial_trace(psi.dm(), keep)`` without forming the
    full projector.
    """
    n = len(psi.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"factor indices {keep} out of range for {n} factors")
    drop = [k for k in range(n) if k not in keep]
    t = normalize(psi).amplitudes.reshape(psi.dims)
    m = np.tensordot(t, t.conj(), axes=(drop, drop))
    kdims = tuple(psi.dims[k] for k in keep)
    d = int(np.prod(kdims))
    return DensityMatrix(kdims, _hermitize(m.reshape(d, d)))


def purity(rho: DensityMatrix) -> float:
    """``Tr(rho^2)``, computed as the squared Frobenius norm."""
    return float(np.sum(np.abs(rho.entries) ** 2))


def normalize(psi: Ket) -> Ket:
    norm = np.linalg.norm(psi.amplitudes)
    if norm <= NORM_FLOOR:
        raise AnnihilatedStateError(f"annihilated state: norm {norm:.3g}")
    return Ket(psi.dims, psi.amplitudes / norm)


def expectation(op: Operator, rho: Operator) -> complex:
    """``Tr(op @ rho)``."""
    if op.dims != rho.dims:
        raise DimensionError(f"operator dims {op.dims} vs state dims {rho.dims}")
    # Tr(AB) = sum_ij A_ij B_ji
    return complex(np.sum(op.entries * rho.entries.T))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> Ket:
    """Haar-random pure state from a normalized complex-normal vector."""
    dims = _check_dims(dims)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return normalize(Ket(dims, v))
