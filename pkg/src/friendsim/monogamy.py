"""Entanglement measures and monogamy (CKW) reports for particle/room states.

Factor order is (particle, Bub, Laloe).  Three pairwise measures are
available:

``PurityConcurrence``
    ``C^2 = 2 (1 - Tr rho^2)``.  Exact for the reduction of a pure state,
    but on a mixed pairwise state it measures mixedness, not entanglement.
``WoottersConcurrence``
    Two-qubit spin-flip concurrence; requires qubit rooms.
``Negativity``
    Reported on the concurrence scale as ``(2 N)^2`` so a two-qubit Bell
    state gives 1.

One-vs-rest terms always use the purity form, which is exact for pure
global states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .qstate import (
    DensityMatrix,
    DimensionError,
    Ket,
    normalize,
    purity,
    reduced_state,
)

__all__ = [
    "Measure",
    "MonogamyReport",
    "SLACK",
    "concurrence_purity",
    "concurrence_wootters",
    "negativity",
    "partial_transpose",
    "ckw_check",
    "ghz_state",
    "w_state",
    "monogamy_scan",
    "monogamy_table",
    "scan_to_csv",
    "CONSTRUCTIONS",
]

SLACK = 1e-10
_ZERO_EIG = 1e-14


class Measure(str, enum.Enum):
    PurityConcurrence = "PurityConcurrence"
    WoottersConcurrence = "WoottersConcurrence"
    Negativity = "Negativity"


def concurrence_purity(rho: DensityMatrix) -> float:
    """``sqrt(2 (1 - Tr rho^2))``."""
    return math.sqrt(max(0.0, 2.0 * (1.0 - purity(rho))))


_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.where(w > _ZERO_EIG, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence_wootters(rho: DensityMatrix) -> float:
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of
    ``rho (Y(x)Y) rho* (Y(x)Y)``, obtained here as singular values of
    ``sqrt(rho) (Y(x)Y) sqrt(rho)*`` to avoid amplifying roundoff through
    the square root.
    """
    if rho.dims != (2, 2):
        raise DimensionError(f"Wootters concurrence needs dims (2, 2), got {rho.dims}")
    s = _psd_sqrt(rho.entries)
    lam = np.linalg.svd(s @ _YY @ s.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _split(dims: tuple[int, ...], split: Iterable[int]) -> list[int]:
    a = sorted(set(int(k) for k in split))
    n = len(dims)
    if not a or len(a) >= n or a[0] < 0 or a[-1] >= n:
        raise ValueError(f"split {a} must be a non-empty proper subset of factors 0..{n - 1}")
    return a


def partial_transpose(rho: DensityMatrix, split: Iterable[int]) -> np.ndarray:
    """Matrix of ``rho`` transposed on the factors listed in ``split``."""
    a = _split(rho.dims, split)
    n = len(rho.dims)
    t = rho.entries.reshape(rho.dims + rho.dims)
    perm = list(range(2 * n))
    for k in a:
        perm[k], perm[k + n] = perm[k + n], perm[k]
    return t.transpose(perm).reshape(rho.dim, rho.dim)


def negativity(rho: DensityMatrix, split: Iterable[int] = (0,)) -> float:
    """``(||rho^{T_A}||_1 - 1) / 2`` with ``A`` the factors in ``split``."""
    ev = np.linalg.eigvalsh(partial_transpose(rho, split))
    return float(max(0.0, (np.sum(np.abs(ev)) - 1.0) / 2.0))


def _pairwise_sq(rho: DensityMatrix, measure: Measure) -> float:
    if measure is Measure.WoottersConcurrence:
        return concurrence_wootters(rho) ** 2
    if measure is Measure.Negativity:
        return (2.0 * negativity(rho, (0,))) ** 2
    return 2.0 * (1.0 - purity(rho))


def _one_vs_rest_sq(rho: DensityMatrix) -> float:
    return max(0.0, 2.0 * (1.0 - purity(rho)))


@dataclass
class MonogamyReport:
    """Squared pairwise and one-vs-rest terms of a tripartite pure state.

    ``lhs``/``rhs`` are the particle-focused inequality
    ``C2(pB) + C2(pL) <= C2(p|BL)``.  ``lines`` holds every checked line
    as ``(lhs, rhs, holds)``: the three focus-specific inequalities and the
    two lines pairing ``C2(BL)`` against the particle's one-vs-rest term.
    ``satisfied`` covers the three focus-specific lines only.
    """

    c2_pB: float
    c2_pL: float
    c2_BL: float
    c2_p_BL: float
    c2_B_pL: float
    c2_L_pB: float
    lhs: float
    rhs: float
    satisfied: bool
    measure_id: Measure
    lines: dict[str, tuple[float, float, bool]] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("c2_pB", "c2_pL", "c2_BL", "c2_p_BL", "c2_B_pL", "c2_L_pB"):
            if getattr(self, name) < -SLACK:
                raise ValueError(f"{name} is negative")


FOCUS_LINES = ("pB+pL<=p|BL", "pB+BL<=B|pL", "pL+BL<=L|pB")
PARTICLE_RHS_LINES = ("pB+BL<=p|BL", "pL+BL<=p|BL")


def ckw_check(psi: Ket, measure_id: Measure | str = Measure.WoottersConcurrence) -> MonogamyReport:
    """Monogamy report for a pure state on (particle, Bub, Laloe) = (2, dB, dL)."""
    measure = Measure(measure_id)
    if len(psi.dims) != 3 or psi.dims[0] != 2:
        raise DimensionError(f"expected dims (2, dB, dL), got {psi.dims}")
    if measure is Measure.WoottersConcurrence and psi.dims != (2, 2, 2):
        raise DimensionError(f"Wootters pairwise terms need qubit rooms, got dims {psi.dims}")
    if abs(psi.norm - 1.0) > SLACK:
        raise ValueError(f"state norm {psi.norm!r} is not 1")
    psi = normalize(psi)

    c2_pB = _pairwise_sq(reduced_state(psi, (0, 1)), measure)
    c2_pL = _pairwise_sq(reduced_state(psi, (0, 2)), measure)
    c2_BL = _pairwise_sq(reduced_state(psi, (1, 2)), measure)
    c2_p = _one_vs_rest_sq(reduced_state(psi, (0,)))
    c2_B = _one_vs_rest_sq(reduced_state(psi, (1,)))
    c2_L = _one_vs_rest_sq(reduced_state(psi, (2,)))

    sides = {
        "pB+pL<=p|BL": (c2_pB + c2_pL, c2_p),
        "pB+BL<=B|pL": (c2_pB + c2_BL, c2_B),
        "pL+BL<=L|pB": (c2_pL + c2_BL, c2_L),
        "pB+BL<=p|BL": (c2_pB + c2_BL, c2_p),
        "pL+BL<=p|BL": (c2_pL + c2_BL, c2_p),
    }
    lines = {k: (l, r, bool(l <= r + SLACK)) for k, (l, r) in sides.items()}
    return MonogamyReport(
        c2_pB, c2_pL, c2_BL, c2_p, c2_B, c2_L,
        lhs=c2_pB + c2_pL,
        rhs=c2_p,
        satisfied=all(lines[k][2] for k in FOCUS_LINES),
        measure_id=measure,
        lines=lines,
    )


def ghz_state() -> Ket:
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1.0 / math.sqrt(2.0)
    return Ket((2, 2, 2), v)


def w_state() -> Ket:
    v = np.zeros(8, dtype=complex)
    v[[1, 2, 4]] = 1.0 / math.sqrt(3.0)
    return Ket((2, 2, 2), v)


def _detached(d: int) -> Ket:
    # |up>_p (x) sum_k |k>_B |k>_L / sqrt(d)
    t = np.zeros((2, d, d), dtype=complex)
    t[1] = np.eye(d) / math.sqrt(d)
    return Ket((2, d, d), t.ravel())


def _swapped(d: int) -> Ket:
    # (|down>_p |0>_B + |up>_p |1>_B) / sqrt(2) (x) |0>_L
    t = np.zeros((2, d, d), dtype=complex)
    t[0, 0, 0] = t[1, 1, 0] = 1.0 / math.sqrt(2.0)
    return Ket((2, d, d), t.ravel())


CONSTRUCTIONS = {"detached": _detached, "swapped": _swapped}


def monogamy_scan(d: int, construction_id: str = "detached") -> dict:
    """One scan row for room dimension ``d``.

    ``c2_BL`` is the purity-form squared concurrence of Laloe's room
    against the rest (equal to the Bub-Laloe entanglement whenever the
    particle is detached), ``proxy_pB`` the particle-Bub negativity and
    ``c2_p_BL`` the particle's one-vs-rest term.
    """
    if not 2 <= int(d) <= 32:
        raise ValueError(f"room dimension d must lie in [2, 32], got {d}")
    if construction_id not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction {construction_id!r}; choose one of {sorted(CONSTRUCTIONS)}")
    psi = CONSTRUCTIONS[construction_id](int(d))
    return {
        "d": int(d),
        "c2_BL": _one_vs_rest_sq(reduced_state(psi, (2,))),
        "proxy_pB": negativity(reduced_state(psi, (0, 1)), (0,)),
        "c2_p_BL": _one_vs_rest_sq(reduced_state(psi, (0,))),
    }


def monogamy_table(d_max: int, construction_id: str = "detached", d_min: int = 2) -> list[dict]:
    return [monogamy_scan(d, construction_id) for d in range(d_min, d_max + 1)]


def scan_to_csv(rows: list[dict], meta: dict | None = None) -> str:
    lines = [f"# {k}={v}" for k, v in (meta or {}).items()]
    lines.append("d,c2_BL,proxy_pB,c2_p_BL")
    for r in rows:
        lines.append(f"{r['d']},{r['c2_BL']!r},{r['proxy_pB']!r},{r['c2_p_BL']!r}")
    return "\n".join(lines) + "\n"
