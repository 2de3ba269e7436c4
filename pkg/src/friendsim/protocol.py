"""Two-friend conditional-probability protocol.

Basis conventions: the particle factor uses ``DOWN = 0`` and ``UP = 1``;
Bub's instrument uses ``|0>_B`` (particle seen down) and ``|1>_B`` (seen
up).  Laloe's detector state ``|0>_L`` overlaps Bub's basis as
``<0_L|0_B> = rho`` and ``<0_L|1_B> = exp(i phi) sqrt(1 - rho^2)``.

Two independent routes give the spin-down probability:

* :func:`prob_spin_down_closed` evaluates the closed-form ratio in the
  moduli ``|alpha|, |alpha~|, ...`` (valid for real non-negative
  amplitudes);
* :func:`prob_spin_down_pipeline` builds the joint ket, contracts it with
  Laloe's bra, normalizes and applies the Born rule.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qstate import (
    ATOL,
    NORM_FLOOR,
    AnnihilatedStateError,
    DensityMatrix,
    Ket,
    basis,
    expectation,
    normalize,
    projector,
)

__all__ = [
    "DOWN",
    "UP",
    "ProtocolParams",
    "SweepTable",
    "prepare_joint_prior",
    "laloe_bra",
    "conditional_posterior",
    "normalization_closed_form",
    "prob_spin_down",
    "prob_spin_down_closed",
    "prob_spin_down_pipeline",
    "sample_spin_down",
    "fig1_sweep",
    "bub_purity_check",
    "bell_projection_coeffs",
    "synchronized_pair_state",
    "is_fully_entangled_pair",
]

DOWN, UP = 0, 1

CANONICAL_ALPHA = math.sqrt(1.0 / 3.0)
CANONICAL_BETA = math.sqrt(2.0 / 3.0)
CANONICAL_TILDE = math.sqrt(0.5)


@dataclass(frozen=True)
class ProtocolParams:
    """Particle amplitudes, Bub's tilded branch, detector overlap and phase.

    Defaults are the canonical sweep values with ``rho = 1/sqrt(2)`` and
    ``phi = 0``.
    """

    alpha: complex = CANONICAL_ALPHA
    beta: complex = CANONICAL_BETA
    alpha_t: complex = CANONICAL_TILDE
    beta_t: complex = CANONICAL_TILDE
    rho_overlap: float = 1.0 / math.sqrt(2.0)
    phi: float = 0.0

    def __post_init__(self):
        n1 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(n1 - 1.0) > ATOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {n1!r}, expected 1")
        n2 = abs(self.alpha_t) ** 2 + abs(self.beta_t) ** 2
        if abs(n2 - 1.0) > ATOL:
            raise ValueError(f"|alpha_t|^2 + |beta_t|^2 = {n2!r}, expected 1")
        if isinstance(self.rho_overlap, complex) or not -1.0 <= self.rho_overlap <= 1.0:
            raise ValueError(f"rho_overlap must be real in [-1, 1], got {self.rho_overlap!r}")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")

    def replace(self, **changes) -> "ProtocolParams":
        return dataclasses.replace(self, **changes)

    @property
    def real_nonnegative(self) -> bool:
        """True when all four amplitudes are real and non-negative."""
        amps = (self.alpha, self.beta, self.alpha_t, self.beta_t)
        return all(complex(a).imag == 0.0 and complex(a).real >= 0.0 for a in amps)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def prepare_joint_prior(p: ProtocolParams) -> Ket:
    """Joint (particle, Bub) ket: Bub's ``|0>`` branch carries ``(alpha, beta)``,
    the ``|1>`` branch ``(alpha_t, beta_t)``, each weighted ``1/sqrt(2)``."""
    amps = np.zeros((2, 2), dtype=complex)
    amps[DOWN, 0] = p.alpha
    amps[UP, 0] = p.beta
    amps[DOWN, 1] = p.alpha_t
    amps[UP, 1] = p.beta_t
    return Ket((2, 2), amps.ravel() / math.sqrt(2.0))


def laloe_bra(p: ProtocolParams) -> np.ndarray:
    """Components ``(<0_L|0_B>, <0_L|1_B>)`` of Laloe's bra in Bub's basis."""
    s = math.sqrt(max(0.0, 1.0 - p.rho_overlap**2))
    return np.array([p.rho_overlap, np.exp(1j * p.phi) * s], dtype=complex)


def conditional_posterior(p: ProtocolParams) -> tuple[Ket, float]:
    """Particle state conditioned on Laloe's detector reading ``0``.

    Returns the normalized posterior ket and the normalization ``A`` (the
    squared norm of the unnormalized conditional state).  Raises
    :class:`AnnihilatedStateError` when ``A <= 1e-14``.
    """
    joint = prepare_joint_prior(p).amplitudes.reshape(2, 2)
    cond = joint @ laloe_bra(p)
    a = float(np.vdot(cond, cond).real)
    if a <= NORM_FLOOR:
        raise AnnihilatedStateError(f"annihilated posterior: A = {a:.3g}")
    return normalize(Ket((2,), cond)), a


def _overlap_terms(p: ProtocolParams):
    s = math.sqrt(max(0.0, 1.0 - p.rho_overlap**2))
    cross = p.rho_overlap * s * math.cos(p.phi)
    return s, cross


def normalization_closed_form(p: ProtocolParams) -> float:
    """``A = (1 + 2 (|a||a~| + |b||b~|) rho sqrt(1-rho^2) cos phi) / 2``."""
    _, cross = _overlap_terms(p)
    k = abs(p.alpha) * abs(p.alpha_t) + abs(p.beta) * abs(p.beta_t)
    return 0.5 * (1.0 + 2.0 * k * cross)


def prob_spin_down_closed(p: ProtocolParams) -> float:
    s, cross = _overlap_terms(p)
    a, at = abs(p.alpha), abs(p.alpha_t)
    k = a * at + abs(p.beta) * abs(p.beta_t)
    denom = 1.0 + 2.0 * k * cross
    if 0.5 * denom <= NORM_FLOOR:
        raise AnnihilatedStateError(f"annihilated posterior: A = {0.5 * denom:.3g}")
    num = a * a * p.rho_overlap**2 + 2.0 * a * at * cross + at * at * s * s
    return num / denom


_P_DOWN = projector(basis(2, DOWN))


def prob_spin_down_pipeline(p: ProtocolParams) -> float:
    post, _ = conditional_posterior(p)
    return float(expectation(_P_DOWN, post.dm()).real)


def prob_spin_down(p: ProtocolParams, method: str = "auto") -> float:
    """Probability that the conditioned particle is found spin-down.

    ``method="auto"`` uses the closed form for real non-negative
    amplitudes and the linear-algebra pipeline otherwise.
    """
    if method == "auto":
        method = "closed" if p.real_nonnegative else "pipeline"
    if method == "closed":
        return prob_spin_down_closed(p)
    if method == "pipeline":
        return prob_spin_down_pipeline(p)
    raise ValueError(f"unknown method {method!r}")


def sample_spin_down(p: ProtocolParams, n_samples: int, seed: int | np.random.Generator) -> int:
    """Number of spin-down outcomes in ``n_samples`` Born-rule draws from the posterior."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    post, _ = conditional_posterior(p)
    probs = np.abs(post.amplitudes) ** 2
    outcomes = rng.choice(2, size=int(n_samples), p=probs / probs.sum())
    return int(np.count_nonzero(outcomes == DOWN))


@dataclass(frozen=True, eq=False)
class SweepTable:
    phi_grid: np.ndarray
    p_down: np.ndarray
    flags: np.ndarray
    params: ProtocolParams

    def __post_init__(self):
        ok = ~self.flags
        if np.any((self.p_down[ok] < -ATOL) | (self.p_down[ok] > 1 + ATOL)):
            raise ValueError("p_down outside [0, 1]")

    def to_csv(self, meta: dict | None = None) -> str:
        fields = dict(meta or {})
        params = self.params.as_dict()
        params.pop("phi")
        fields.update(params)
        fields["phi_points"] = self.phi_grid.size
        lines = []
        for k, v in fields.items():
            lines.append(f"# {k}={v}")
        lines.append("phi,p_down,flag")
        for phi, pd, flag in zip(self.phi_grid, self.p_down, self.flags):
            cell = "" if flag else repr(float(pd))
            lines.append(f"{float(phi)!r},{cell},{int(flag)}")
        return "\n".join(lines) + "\n"


def fig1_sweep(
    p: ProtocolParams | None = None, phi_points: int = 401, phi_max: float = 4.0 * math.pi
) -> SweepTable:
    """Spin-down probability on a uniform phase grid over ``[0, phi_max]``.

    Points where the conditional state is annihilated are flagged and left
    as NaN rather than aborting the sweep.
    """
    if phi_points < 2:
        raise ValueError("phi_points must be at least 2")
    p = p or ProtocolParams()
    grid = np.linspace(0.0, phi_max, int(phi_points))
    out = np.full(grid.size, np.nan)
    flags = np.zeros(grid.size, dtype=bool)
    for i, phi in enumerate(grid):
        try:
            out[i] = prob_spin_down(p.replace(phi=float(phi)))
        except AnnihilatedStateError:
            flags[i] = True
    return SweepTable(grid, out, flags, p.replace(phi=0.0))


def bub_purity_check(overlap_h: complex, overlap_t: complex) -> float:
    """``(|<up|h>|^2 + |<down|t>|^2) / 2``; equals 1 only for unit-modulus overlaps."""
    for name, z in (("overlap_h", overlap_h), ("overlap_t", overlap_t)):
        if abs(z) > 1.0 + ATOL:
            raise ValueError(f"|{name}| = {abs(z)!r} exceeds 1")
    return 0.5 * (abs(overlap_h) ** 2 + abs(overlap_t) ** 2)


def _check_pair(basis_pair: Sequence[np.ndarray], d: int) -> tuple[np.ndarray, np.ndarray]:
    u0, u1 = (np.asarray(u, dtype=complex).ravel() for u in basis_pair)
    if u0.size != d or u1.size != d:
        raise ValueError(f"basis vectors must have length {d}")
    gram = np.array([[np.vdot(a, b) for b in (u0, u1)] for a in (u0, u1)])
    if np.max(np.abs(gram - np.eye(2))) > ATOL:
        raise ValueError("basis pair is not orthonormal")
    return u0, u1


def bell_projection_coeffs(
    joint: DensityMatrix, basis_pair: Sequence[np.ndarray] | None = None
) -> tuple[complex, complex]:
    """Coefficients of ``|0><1| (x) |1><0|`` and ``|1><0| (x) |0><1|`` in ``joint``.

    ``joint`` lives on (Bub, Laloe) with equal room dimensions; the pair
    ``(|0>, |1>)`` spans the two-dimensional subspace (computational
    ``|0>, |1>`` by default).
    """
    if len(joint.dims) != 2 or joint.dims[0] != joint.dims[1]:
        raise ValueError(f"joint state must be on two equal factors, got dims {joint.dims}")
    d = joint.dims[0]
    if basis_pair is None:
        basis_pair = (np.eye(d)[0], np.eye(d)[1])
    u0, u1 = _check_pair(basis_pair, d)
    v01 = np.kron(u0, u1)
    v10 = np.kron(u1, u0)
    m = joint.entries
    p01 = complex(np.vdot(v01, m @ v10))
    p10 = complex(np.vdot(v10, m @ v01))
    return p01, p10


def synchronized_pair_state(d: int, i: int = 0, k: int = 1, phase: float = 0.0) -> DensityMatrix:
    """``(|i k> + e^{i phase} |k i>) / sqrt(2)`` on two rooms of dimension ``d``.

    Each room's record is the other's swapped, the coherence pattern
    ``|i><k| (x) |k><i|`` of synchronized readings.
    """
    if i == k:
        raise ValueError("i and k must differ")
    v = np.zeros(d * d, dtype=complex)
    v[i * d + k] += 1.0
    v[k * d + i] += np.exp(1j * phase)
    return Ket((d, d), v).dm()


def is_fully_entangled_pair(joint: DensityMatrix, basis_pair=None, atol: float = ATOL) -> bool:
    p01, p10 = bell_projection_coeffs(joint, basis_pair)
    return abs(abs(p01) - 0.5) <= atol and abs(abs(p10) - 0.5) <= atol
