"""Projector-valued measurement processes driven by stopping times."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .qstate import ATOL, DensityMatrix, DimensionError, Operator, expectation, random_unitary
from .stopping import StoppingTimeSequence, counting_process
from .textio import load_operator_file

__all__ = [
    "PROJ_ATOL",
    "IMPOSSIBLE_FLOOR",
    "PartitionError",
    "OutcomeImpossibleError",
    "MeasurementProcess",
    "MeasurementRecord",
    "build_kosher_process",
    "partition_residual",
    "process_value",
    "window_value",
    "active_projector",
    "born_update",
    "outcome_probabilities",
    "sample_measurement",
    "random_partition",
    "load_manifest",
]

PROJ_ATOL = 1e-10
IMPOSSIBLE_FLOOR = 1e-14


class PartitionError(ValueError):
    """Projector family fails a partition-of-unity requirement."""


class OutcomeImpossibleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MeasurementProcess:
    """Ordered orthogonal projectors, one per stopping time.

    Build through :func:`build_kosher_process`, which validates the family.
    """

    projectors: tuple[Operator, ...]
    taus: StoppingTimeSequence

    @property
    def horizon(self) -> float:
        return self.taus.horizon

    @property
    def dims(self) -> tuple[int, ...]:
        return self.projectors[0].dims

    def __len__(self):
        return len(self.projectors)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    outcome_index: int
    probability: float
    post_state: DensityMatrix
    at_tau: float

    def __post_init__(self):
        if not -ATOL <= self.probability <= 1 + ATOL:
            raise ValueError(f"probability {self.probability} outside [0, 1]")


def partition_residual(projectors: Sequence[Operator]) -> float:
    """``max |sum_i P_i - I|`` over matrix entries."""
    total = sum(p.entries for p in projectors)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def build_kosher_process(
    projectors: Sequence[Operator],
    taus: StoppingTimeSequence | Sequence[float],
    horizon: float | None = None,
) -> MeasurementProcess:
    """Validate a projector family and attach it to stopping times.

    Raises :class:`PartitionError` unless every operator is a Hermitian
    idempotent, distinct operators are mutually orthogonal (both within
    ``1e-10``) and the family sums to the identity within ``1e-12``.
    """
    projectors = tuple(projectors)
    if not projectors:
        raise PartitionError("projector list is empty")
    dims = projectors[0].dims
    for k, p in enumerate(projectors):
        if p.dims != dims:
            raise DimensionError(f"projector {k} has dims {p.dims}, expected {dims}")
    for k, p in enumerate(projectors):
        m = p.entries
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > PROJ_ATOL:
            raise PartitionError(f"projector {k} not Hermitian: residual {herm:.3g}")
        idem = float(np.max(np.abs(m @ m - m)))
        if idem > PROJ_ATOL:
            raise PartitionError(f"projector {k} not idempotent: residual {idem:.3g}")
    for i in range(len(projectors)):
        for j in range(i + 1, len(projectors)):
            ortho = float(np.max(np.abs(projectors[i].entries @ projectors[j].entries)))
            if ortho > PROJ_ATOL:
                raise PartitionError(f"projectors {i} and {j} not orthogonal: residual {ortho:.3g}")
    resid = partition_residual(projectors)
    if resid > ATOL:
        raise PartitionError(f"not a partition of unity: residual {resid:.3g}")

    if not isinstance(taus, StoppingTimeSequence):
        taus = StoppingTimeSequence(tuple(taus), math.inf if horizon is None else horizon)
    elif horizon is not None:
        taus = StoppingTimeSequence(taus.taus, horizon)
    if len(taus) != len(projectors):
        raise ValueError(f"{len(projectors)} projectors but {len(taus)} stopping times")
    return MeasurementProcess(projectors, taus)


def _check_time(mp: MeasurementProcess, t: float):
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t >= mp.horizon:
        raise ValueError(f"t = {t} is not below the horizon {mp.horizon}")


def process_value(mp: MeasurementProcess, t: float, path_counting=None) -> Operator:
    """Running average of the projectors whose stopping times have passed.

    Zero before the first stopping time, otherwise
    ``I(t)^{-1} * sum_{tau_i <= t} P_i`` where ``I`` is the counting
    process (``path_counting(t)`` if given).  This is an average, not in
    general a projector.
    """
    _check_time(mp, t)
    count = counting_process(mp.taus, t) if path_counting is None else int(path_counting(t))
    zero = np.zeros_like(mp.projectors[0].entries)
    if count == 0:
        return Operator(mp.dims, zero)
    acc = zero.copy()
    for p, tau in zip(mp.projectors, mp.taus.taus):
        if tau <= t:
            acc = acc + p.entries
    return Operator(mp.dims, acc / count)


def window_value(mp: MeasurementProcess, i: int, t: float) -> Operator:
    """``process_value`` restricted to the window ``[tau_i, tau_{i+1})`` (0-based ``i``)."""
    _check_time(mp, t)
    taus = mp.taus.taus
    upper = taus[i + 1] if i + 1 < len(taus) else mp.horizon
    if taus[i] <= t < upper:
        return process_value(mp, t)
    return Operator(mp.dims, np.zeros_like(mp.projectors[0].entries))


def active_projector(mp: MeasurementProcess, t: float) -> Operator:
    """Projector of the window containing ``t``: ``P_{I(t)}``, or 0 before ``tau_1``."""
    _check_time(mp, t)
    count = counting_process(mp.taus, t)
    if count == 0:
        return Operator(mp.dims, np.zeros_like(mp.projectors[0].entries))
    return mp.projectors[count - 1]


def born_update(
    rho: DensityMatrix, m: Operator, *, outcome_index: int = -1, at_tau: float = math.nan
) -> MeasurementRecord:
    """Condition ``rho`` on the operator ``m``.

    Returns the probability ``Tr(m^dag rho m)`` and the post-measurement
    state ``m^dag rho m / Tr(m^dag rho m)``.
    """
    if m.dims != rho.dims:
        raise DimensionError(f"operator dims {m.dims} vs state dims {rho.dims}")
    mm = m.entries
    out = mm.conj().T @ rho.entries @ mm
    prob = float(np.trace(out).real)
    if prob <= IMPOSSIBLE_FLOOR:
        raise OutcomeImpossibleError(f"outcome impossible: Tr(M^dag rho M) = {prob:.3g}")
    out = out / prob
    out = 0.5 * (out + out.conj().T)
    return MeasurementRecord(outcome_index, prob, DensityMatrix(rho.dims, out), at_tau)


def outcome_probabilities(rho: DensityMatrix, mp: MeasurementProcess) -> np.ndarray:
    probs = np.array([expectation(p, rho).real for p in mp.projectors])
    return np.clip(probs, 0.0, None)


def sample_measurement(
    rho: DensityMatrix,
    mp: MeasurementProcess,
    seed: int | np.random.Generator,
    *,
    at_tau: float | None = None,
) -> MeasurementRecord:
    """Draw one outcome with probability ``Tr(P_i rho)`` and condition on it.

    ``at_tau`` defaults to the final stopping time of the process.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = outcome_probabilities(rho, mp)
    # roundoff-level outcomes are never drawn
    probs = np.where(probs > IMPOSSIBLE_FLOOR, probs, 0.0)
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    k = min(int(np.searchsorted(cdf, u, side="right")), len(probs) - 1)
    while probs[k] == 0.0:
        k -= 1
    tau = mp.taus.taus[-1] if at_tau is None else at_tau
    return born_update(rho, mp.projectors[k], outcome_index=k, at_tau=tau)


def random_partition(dim: int, ranks: Sequence[int], rng: np.random.Generator) -> list[Operator]:
    """Orthogonal projectors of the given ranks built from one Haar unitary."""
    if sum(ranks) != dim or min(ranks) < 1:
        raise ValueError(f"ranks {list(ranks)} must be positive and sum to {dim}")
    u = random_unitary(dim, rng)
    out = []
    start = 0
    for r in ranks:
        cols = u[:, start : start + r]
        out.append(Operator((dim,), cols @ cols.conj().T))
        start += r
    return out


def load_manifest(path: str | os.PathLike) -> MeasurementProcess:
    """Read a projector manifest.

    Each non-comment line is ``FILE TAU`` with ``FILE`` relative to the
    manifest; an optional ``horizon: T`` line sets the horizon.
    """
    path = Path(path)
    projectors, taus = [], []
    horizon = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("horizon:"):
            horizon = float(line.split(":", 1)[1])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'FILE TAU', got {raw.strip()!r}")
        try:
            tau = float(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad stopping time {parts[1]!r}") from None
        projectors.append(load_operator_file(path.parent / parts[0]))
        taus.append(tau)
    return build_kosher_process(projectors, taus, horizon)
