"""Sample paths, stopping times and synchronization experiments.

Random numbers come from numpy's PCG64.  Trial ``i`` of an experiment
seeded with ``s`` draws from ``PCG64(SeedSequence(s, spawn_key=(i,)))``,
so any single trial can be regenerated with :func:`simulate_path` and
reports do not depend on how trials are batched.

Both path models live on the grid ``t_k = k * step**2``:

* ``SimpleRandomWalk`` moves ``+step`` or ``-step`` with probability 1/2
  per grid step, so ``Var X_t = t`` (diffusive scaling).
* ``TwoStateMarkov`` takes values in ``{+1, -1}``, starts at ``+1`` and
  flips with probability ``flip_prob`` per grid step.

Stopping times are successive band exits: ``tau_1`` is the first grid
time where ``|X_t - X_0| >= level`` and ``tau_{k+1}`` the first time after
``tau_k`` where ``|X_t - X_{tau_k}| >= level``.  Each is decided from the
path up to that time only.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels

__all__ = [
    "Model",
    "SamplePath",
    "StoppingTimeSequence",
    "StoppingPair",
    "DeviceChain",
    "ConvergenceReport",
    "DeviceSyncReport",
    "BaxterChaconConfig",
    "DeviceSyncConfig",
    "TEST_FUNCTIONS",
    "DEVICE_MAPS",
    "trial_seed_sequence",
    "simulate_path",
    "band_exit_times",
    "counting_process",
    "make_stopping_pairs",
    "baxter_chacon_experiment",
    "device_sync_experiment",
    "binomial_halfwidth",
    "load_config",
]

DEFAULT_SEED = 0xF2F2
_SEED_LIMIT = 2**64


class Model(str, enum.Enum):
    SimpleRandomWalk = "SimpleRandomWalk"
    TwoStateMarkov = "TwoStateMarkov"


def _model(model_id) -> Model:
    try:
        return Model(model_id)
    except ValueError:
        raise ValueError(
            f"unknown model {model_id!r}; choose one of {[m.value for m in Model]}"
        ) from None


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def trial_seed_sequence(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(_check_seed(seed), spawn_key=(int(trial),))


def _grid(horizon: float, step: float) -> tuple[float, int]:
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    dt = step * step
    n_steps = int(math.floor(horizon / dt + 1e-9))
    if n_steps < 1:
        raise ValueError(f"horizon {horizon} shorter than one grid step {dt}")
    return dt, n_steps


def _walk_words(seed: int, trials: Iterable[int], n_steps: int) -> np.ndarray:
    n_words = (n_steps + 63) // 64
    trials = list(trials)
    out = np.empty((len(trials), n_words), dtype=np.uint64)
    for row, trial in enumerate(trials):
        out[row] = np.random.PCG64(trial_seed_sequence(seed, trial)).random_raw(n_words)
    return out


def _markov_flips(seed: int, trial: int, n_steps: int, flip_prob: float) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(trial_seed_sequence(seed, trial)))
    return rng.random(n_steps) < flip_prob


def _markov_values(flips: np.ndarray) -> np.ndarray:
    parity = np.concatenate(([0], np.cumsum(flips, dtype=np.int64))) & 1
    return 1.0 - 2.0 * parity


@dataclass(frozen=True, eq=False)
class SamplePath:
    times: np.ndarray
    values: np.ndarray
    model_id: Model
    seed: int
    trial: int = 0

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have the same length")
        if np.any(np.diff(self.times) <= 0) or self.times[0] < 0:
            raise ValueError("times must be non-negative and strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("path values must be finite")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def simulate_path(
    model_id,
    horizon: float,
    step: float,
    seed: int,
    *,
    trial: int = 0,
    x0: float = 0.0,
    flip_prob: float = 0.1,
) -> SamplePath:
    """Generate one path on the grid ``0, step**2, ..., horizon``.

    ``trial`` selects the per-trial stream, so ``simulate_path(..., seed=s,
    trial=i)`` is exactly the path seen by trial ``i`` of an experiment
    seeded with ``s``.
    """
    model = _model(model_id)
    dt, n_steps = _grid(horizon, step)
    times = np.arange(n_steps + 1) * dt
    if model is Model.SimpleRandomWalk:
        words = _walk_words(seed, [trial], n_steps)[0]
        values = x0 + step * kernels.lattice_positions(words, n_steps).astype(float)
    else:
        if not 0.0 <= flip_prob <= 1.0:
            raise ValueError(f"flip_prob must lie in [0, 1], got {flip_prob}")
        values = _markov_values(_markov_flips(seed, trial, n_steps, flip_prob))
    return SamplePath(times, values, model, _check_seed(seed), int(trial))


@dataclass(frozen=True)
class StoppingTimeSequence:
    taus: tuple[float, ...]
    horizon: float = math.inf

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        if any(t < 0 for t in taus):
            raise ValueError("stopping times must be non-negative")
        if any(b < a for a, b in zip(taus, taus[1:])):
            raise ValueError("stopping times must be non-decreasing")
        if taus and taus[-1] >= self.horizon:
            raise ValueError(f"stopping time {taus[-1]} not below horizon {self.horizon}")
        object.__setattr__(self, "taus", taus)

    def __len__(self):
        return len(self.taus)


def counting_process(taus: StoppingTimeSequence | Sequence[float], t: float) -> int:
    """Number of stopping times at or before ``t`` (right-closed steps)."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    seq = taus.taus if isinstance(taus, StoppingTimeSequence) else tuple(taus)
    horizon = taus.horizon if isinstance(taus, StoppingTimeSequence) else math.inf
    return sum(1 for tau in seq if tau <= t and tau < horizon)


def band_exit_times(path: SamplePath, level: float, k_max: int) -> StoppingTimeSequence:
    """First ``k_max`` successive band exits of ``path`` (fewer if the horizon ends)."""
    if not level > 0:
        raise ValueError("level must be positive")
    idx = _band_exit_indices(path.values, level, k_max)
    horizon = float(path.times[-1]) + path.dt
    return StoppingTimeSequence(tuple(float(path.times[i]) for i in idx if i >= 0), horizon)


def _band_exit_indices(values: np.ndarray, level: float, k_max: int) -> list[int]:
    out = []
    start = 0
    tol = 1e-12 * max(1.0, level)
    for _ in range(k_max):
        hit = np.flatnonzero(np.abs(values[start:] - values[start]) >= level - tol)
        if hit.size == 0:
            break
        start += int(hit[0])
        out.append(start)
    return out


@dataclass(frozen=True)
class StoppingPair:
    n: int
    T: float
    U: float
    truncated: bool


GAP_RULES = ("ceil", "offset", "exact")


def _steps_per_tick(n: int, dt: float) -> int:
    m = 1.0 / (n * dt)
    mi = int(round(m))
    if mi < 1 or abs(m - mi) > 1e-9 * m:
        raise ValueError(f"1/n = 1/{n} is not a whole number of grid steps (dt = {dt})")
    return mi


def _second_index(t_idx: np.ndarray, n: int, dt: float, gap_rule: str) -> np.ndarray:
    if gap_rule == "exact":
        return t_idx.copy()
    m = _steps_per_tick(n, dt)
    if gap_rule == "ceil":
        u = -(-t_idx // m) * m
    elif gap_rule == "offset":
        u = t_idx + m
    else:
        raise ValueError(f"unknown gap_rule {gap_rule!r}; choose one of {GAP_RULES}")
    return np.where(t_idx < 0, -1, u)


def make_stopping_pairs(
    path: SamplePath, n_values: int | Iterable[int], *, level: float = 1.0, gap_rule: str = "ceil"
) -> list[StoppingPair]:
    """Paired stopping times ``(T(n), U(n))`` on one path.

    ``T`` is the first band exit of ``path``.  ``U`` is ``T`` rounded up to
    the next multiple of ``1/n`` (``gap_rule="ceil"``, so ``0 <= U - T <
    1/n``), ``T + 1/n`` (``"offset"``) or ``T`` itself (``"exact"``).  Pairs
    whose ``T`` or ``U`` falls beyond the path are flagged ``truncated``.
    """
    ns = list(range(1, int(n_values) + 1)) if isinstance(n_values, int) else list(n_values)
    if not ns or min(ns) < 1:
        raise ValueError("n values must be positive")
    idx = _band_exit_indices(path.values, level, 1)
    t_idx = np.array([idx[0] if idx else -1])
    last = path.times.size - 1
    pairs = []
    for n in ns:
        u_idx = int(_second_index(t_idx, n, path.dt, gap_rule)[0])
        truncated = t_idx[0] < 0 or u_idx > last
        T = float(path.times[t_idx[0]]) if t_idx[0] >= 0 else math.inf
        U = float(u_idx * path.dt) if t_idx[0] >= 0 else math.inf
        pairs.append(StoppingPair(n, T, U, bool(truncated)))
    return pairs


# ------------------------------------------------------------------ batches


class _WalkBatch:
    def __init__(self, seed, n_trials, n_steps, x0, step):
        self.n_steps = n_steps
        self.x0 = x0
        self.step = step
        self.words = _walk_words(seed, range(n_trials), n_steps)

    def exits(self, level, k_max):
        h = level / self.step
        hi = int(round(h))
        if abs(h - hi) > 1e-9 * h or hi < 1:
            raise ValueError(f"level {level} must be a whole number of steps {self.step}")
        return kernels.exit_indices(self.words, self.n_steps, hi, k_max)

    def values_at(self, idx):
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        pos = kernels.positions_at(self.words, self.n_steps, idx)
        bad = pos == np.iinfo(np.int64).min
        out = self.x0 + self.step * pos.astype(float)
        out[bad] = np.nan
        return out


class _MarkovBatch:
    def __init__(self, seed, n_trials, n_steps, flip_prob):
        self.n_steps = n_steps
        self.packed = np.stack(
            [np.packbits(_markov_flips(seed, t, n_steps, flip_prob)) for t in range(n_trials)]
        ) if n_trials else np.zeros((0, 0), np.uint8)

    def _values(self, t):
        return _markov_values(np.unpackbits(self.packed[t])[: self.n_steps].astype(bool))

    def exits(self, level, k_max):
        out = np.full((self.packed.shape[0], k_max), -1, dtype=np.int64)
        for t in range(out.shape[0]):
            idx = _band_exit_indices(self._values(t), level, k_max)
            out[t, : len(idx)] = idx
        return out

    def values_at(self, idx):
        out = np.full(idx.shape, np.nan)
        for t in range(idx.shape[0]):
            v = self._values(t)
            ok = (idx[t] >= 0) & (idx[t] <= self.n_steps)
            out[t, ok] = v[idx[t][ok]]
        return out


def _batch(model, seed, n_trials, horizon, step, x0, flip_prob):
    dt, n_steps = _grid(horizon, step)
    if _model(model) is Model.SimpleRandomWalk:
        return dt, _WalkBatch(seed, n_trials, n_steps, x0, step)
    return dt, _MarkovBatch(seed, n_trials, n_steps, flip_prob)


# --------------------------------------------------------------- experiments


def binomial_halfwidth(p: np.ndarray | float, n: np.ndarray | int, z: float = 1.96):
    """Normal-approximation 95% half-width ``z * sqrt(p (1 - p) / n)``."""
    p = np.asarray(p, dtype=float)
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        hw = z * np.sqrt(p * (1.0 - p) / n)
    return np.where(n > 0, hw, np.nan)


TEST_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "identity": lambda x: x,
    "inverse": lambda x: 1.0 / x,
    "square": lambda x: x * x,
    "tanh": np.tanh,
    "constant": lambda x: np.ones_like(x),
}

DISTANCES: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "abs": lambda a, b: np.abs(a - b),
    "squared": lambda a, b: (a - b) ** 2,
}


@dataclass
class BaxterChaconConfig:
    """Settings for :func:`baxter_chacon_experiment`.

    ``statistic="value"`` scores ``|f(X_T) - f(X_U)|``.  ``"adjunct"``
    compares two measurement processes on the same path, each normalized
    by the path value at its own first stopping time (``M_t = X_t /
    X_{tau_1}``), read at their second stopping times through
    ``distance``.
    """

    model: str = "SimpleRandomWalk"
    f: str = "identity"
    epsilon: float = 0.5
    n_list: tuple[int, ...] = (4, 16, 64)
    n_trials: int = 10_000
    seed: int = DEFAULT_SEED
    statistic: str = "value"
    distance: str = "abs"
    gap_rule: str = "ceil"
    level: float = 1.0
    x0: float = 4.0
    step: float = 1.0 / 64
    horizon: float = 8.0
    flip_prob: float = 0.1

    def validate(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        n_list = tuple(int(n) for n in self.n_list)
        if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])) or n_list[0] < 1:
            raise ValueError(f"n_list must be non-empty and strictly increasing, got {n_list}")
        self.n_list = n_list
        if self.n_trials < 100:
            raise ValueError(f"n_trials must be at least 100, got {self.n_trials}")
        if self.f not in TEST_FUNCTIONS:
            raise ValueError(f"unknown f {self.f!r}; choose one of {sorted(TEST_FUNCTIONS)}")
        if self.distance not in DISTANCES:
            raise ValueError(f"unknown distance {self.distance!r}")
        if self.statistic not in ("value", "adjunct"):
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.gap_rule not in GAP_RULES:
            raise ValueError(f"unknown gap_rule {self.gap_rule!r}")
        _model(self.model)
        _check_seed(self.seed)
        return self


@dataclass
class ConvergenceReport:
    n_values: list[int]
    exceedance_probs: np.ndarray
    epsilon: float
    n_trials: int
    ci_halfwidth: np.ndarray
    valid_trials: np.ndarray
    truncated: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.exceedance_probs)
        if np.any((p < 0) | (p > 1)):
            raise ValueError("exceedance probabilities must lie in [0, 1]")

    def is_non_increasing(self) -> bool:
        p, ci = self.exceedance_probs, self.ci_halfwidth
        return bool(np.all(p[1:] <= p[:-1] + ci[:-1] + ci[1:]))

    def to_csv(self) -> str:
        lines = ["n,exceedance,ci_halfwidth,trials"]
        for n, p, ci, v in zip(self.n_values, self.exceedance_probs, self.ci_halfwidth, self.valid_trials):
            lines.append(f"{n},{float(p)!r},{float(ci)!r},{int(v)}")
        return "\n".join(lines) + "\n"


def baxter_chacon_experiment(config: BaxterChaconConfig | None = None, **overrides) -> ConvergenceReport:
    """Estimate ``P[stat(n) > epsilon]`` for each ``n`` in ``n_list``.

    Trials whose stopping times fall past the horizon are excluded and
    counted in ``truncated``.
    """
    cfg = dataclasses.replace(config or BaxterChaconConfig(), **overrides).validate()
    dt, batch = _batch(cfg.model, cfg.seed, cfg.n_trials, cfg.horizon, cfg.step, cfg.x0, cfg.flip_prob)
    k_max = 1 if cfg.statistic == "value" else 2
    exits = batch.exits(cfg.level, k_max)
    seconds = [
        np.stack([_second_index(exits[:, k], n, dt, cfg.gap_rule) for k in range(k_max)], axis=1)
        for n in cfg.n_list
    ]
    vals = batch.values_at(np.concatenate([exits] + seconds, axis=1))
    x_t = vals[:, :k_max]
    f = TEST_FUNCTIONS[cfg.f]
    dist = DISTANCES[cfg.distance]

    probs, valid, trunc = [], [], []
    for j in range(len(cfg.n_list)):
        x_u = vals[:, k_max * (j + 1) : k_max * (j + 2)]
        ok = np.all(np.isfinite(x_t), axis=1) & np.all(np.isfinite(x_u), axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            if cfg.statistic == "value":
                stat = dist(f(x_t[:, 0]), f(x_u[:, 0]))
            else:
                stat = dist(x_t[:, 1] / x_t[:, 0], x_u[:, 1] / x_u[:, 0])
        hits = int(np.count_nonzero(stat[ok] > cfg.epsilon))
        nv = int(ok.sum())
        probs.append(hits / nv if nv else 0.0)
        valid.append(nv)
        trunc.append(cfg.n_trials - nv)
    probs = np.array(probs)
    valid = np.array(valid)
    return ConvergenceReport(
        list(cfg.n_list), probs, cfg.epsilon, cfg.n_trials,
        binomial_halfwidth(probs, valid), valid, np.array(trunc),
    )


# ----------------------------------------------------------- device readings


def _sign(x):
    return np.sign(x)


def _neg_sign(x):
    return -np.sign(x)


def _above_start(x, x0=0.0):
    return (x >= x0).astype(float)


# name -> (reading map, canonical relabeling back to the reference alphabet)
DEVICE_MAPS: dict[str, tuple[Callable, Callable]] = {
    "sign": (_sign, lambda r: r),
    "neg_sign": (_neg_sign, lambda r: -r),
    "above_start": (_above_start, lambda r: r),
}


@dataclass
class DeviceChain:
    """Readings of one device at a sequence of stopping times."""

    states: tuple[float, ...]
    readings: np.ndarray

    def __post_init__(self):
        bad = set(np.unique(self.readings[np.isfinite(self.readings)]).tolist()) - set(self.states)
        if bad:
            raise ValueError(f"readings {sorted(bad)} outside alphabet {self.states}")


@dataclass
class DeviceSyncConfig:
    """Settings for :func:`device_sync_experiment`.

    Device 1 reads at the band exits ``tau_m``; device 2 reads at the
    paired times given by ``gap_rule`` (``"offset"``: ``tau_m + 1/n``,
    ``"exact"``: ``tau_m``).  The start ``x0 = 0.5`` keeps every band exit
    off zero so sign readings at the stopping times are never 0.
    """

    model: str = "SimpleRandomWalk"
    device1: str = "sign"
    device2: str = "sign"
    n_list: tuple[int, ...] = (4, 64)
    n_trials: int = 10_000
    seed: int = DEFAULT_SEED
    gap_rule: str = "offset"
    level: float = 1.0
    x0: float = 0.5
    step: float = 1.0 / 64
    horizon: float = 4.0
    k_max: int = 32
    flip_prob: float = 0.1

    def validate(self):
        for name in (self.device1, self.device2):
            if name not in DEVICE_MAPS:
                raise ValueError(f"unknown device map {name!r}; choose one of {sorted(DEVICE_MAPS)}")
        self.n_list = tuple(int(n) for n in self.n_list)
        if not self.n_list or min(self.n_list) < 1:
            raise ValueError("n_list must contain positive integers")
        if self.n_trials < 1:
            raise ValueError("n_trials must be positive")
        if self.gap_rule not in GAP_RULES:
            raise ValueError(f"unknown gap_rule {self.gap_rule!r}")
        _model(self.model)
        _check_seed(self.seed)
        return self


@dataclass
class DeviceSyncReport:
    """Empirical joint transition frequencies per ``n``.

    ``tensors[j][i, k, a, b]`` is the frequency with which device 1 moved
    ``alphabet[i] -> alphabet[k]`` while device 2 moved ``alphabet[a] ->
    alphabet[b]`` between consecutive stopping times.
    """

    n_values: list[int]
    alphabet: tuple[float, ...]
    tensors: list[np.ndarray]
    disagreement: np.ndarray
    ci_halfwidth: np.ndarray
    transitions: np.ndarray
    discarded_trials: np.ndarray

    def to_csv(self) -> str:
        lines = ["n,disagreement,ci_halfwidth,transitions,discarded"]
        for row in zip(self.n_values, self.disagreement, self.ci_halfwidth, self.transitions, self.discarded_trials):
            n, d, ci, t, disc = row
            lines.append(f"{n},{float(d)!r},{float(ci)!r},{int(t)},{int(disc)}")
        return "\n".join(lines) + "\n"


def device_sync_experiment(config: DeviceSyncConfig | None = None, **overrides) -> DeviceSyncReport:
    """Joint transition statistics of two devices reading one path.

    A trial with fewer than two usable synchronized stopping times is
    discarded and counted.  Disagreement mass is the total frequency of
    transitions where the devices' relabeled readings differ at either end.
    """
    cfg = dataclasses.replace(config or DeviceSyncConfig(), **overrides).validate()
    dt, batch = _batch(cfg.model, cfg.seed, cfg.n_trials, cfg.horizon, cfg.step, cfg.x0, cfg.flip_prob)
    exits = batch.exits(cfg.level, cfg.k_max)
    map1, canon1 = DEVICE_MAPS[cfg.device1]
    map2, canon2 = DEVICE_MAPS[cfg.device2]

    reads = [exits] + [_second_index(exits, n, dt, cfg.gap_rule) for n in cfg.n_list]
    vals = batch.values_at(np.concatenate(reads, axis=1))
    k = cfg.k_max
    r1 = canon1(map1(vals[:, :k]))

    per_n = []
    symbols: set[float] = set()
    for j in range(len(cfg.n_list)):
        r2 = canon2(map2(vals[:, k * (j + 1) : k * (j + 2)]))
        ok = np.isfinite(r1) & np.isfinite(r2)
        # keep only the leading run of usable stopping times
        ok = np.cumprod(ok, axis=1).astype(bool)
        pair = ok[:, :-1] & ok[:, 1:]
        per_n.append((r2, pair))
        symbols.update(np.unique(r1[ok]).tolist())
        symbols.update(np.unique(r2[ok]).tolist())
    alphabet = tuple(sorted(symbols))
    lookup = {s: i for i, s in enumerate(alphabet)}
    a = len(alphabet)

    def codes(r):
        out = np.zeros(r.shape, dtype=np.int64)
        for s, i in lookup.items():
            out[r == s] = i
        return out

    c1 = codes(np.nan_to_num(r1, nan=alphabet[0] if alphabet else 0.0))
    tensors, mass, n_trans, discarded = [], [], [], []
    for r2, pair in per_n:
        c2 = codes(np.nan_to_num(r2, nan=alphabet[0] if alphabet else 0.0))
        flat = (
            ((c1[:, :-1] * a + c1[:, 1:]) * a + c2[:, :-1]) * a + c2[:, 1:]
        )[pair]
        counts = np.bincount(flat, minlength=a**4).reshape(a, a, a, a)
        total = int(counts.sum())
        agree = int(sum(counts[i, kk, i, kk] for i in range(a) for kk in range(a)))
        tensors.append(counts / total if total else counts.astype(float))
        mass.append((total - agree) / total if total else 0.0)
        n_trans.append(total)
        discarded.append(int(np.count_nonzero(~pair.any(axis=1))))
    mass = np.array(mass)
    n_trans = np.array(n_trans)
    return DeviceSyncReport(
        list(cfg.n_list), alphabet, tensors, mass,
        binomial_halfwidth(mass, n_trans), n_trans, np.array(discarded),
    )


# ------------------------------------------------------------------- configs


def _coerce(value: str, default):
    if isinstance(default, bool):
        return value.strip().lower() in {"1", "true", "yes", "on"}
    if isinstance(default, int):
        return int(value, 0)
    if isinstance(default, float):
        return float(value)
    if isinstance(default, tuple):
        return tuple(int(v, 0) for v in value.replace(" ", "").split(",") if v)
    return value.strip()


def parse_config_text(text: str, cls):
    """Build ``cls`` from flat ``key=value`` lines (``#`` starts a comment)."""
    names = {f.name: f for f in dataclasses.fields(cls)}
    base = cls()
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in names:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            kwargs[key] = _coerce(value, getattr(base, key))
        except ValueError:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {value!r}") from None
    return cls(**kwargs)


def load_config(path: str | os.PathLike, cls):
    with open(path) as fh:
        return parse_config_text(fh.read(), cls)
