"""Hot loops for bit-packed random walks.

A walk with ``n_steps`` steps is stored as ``ceil(n_steps / 64)`` raw
64-bit words; bit ``j`` of word ``w`` (least significant first) is the
direction of step ``64 * w + j`` (1 = up).  Positions are integer lattice
coordinates ``2 * (#up steps) - k`` so both backends agree bit for bit.

Every public function exists twice: a numba build (``*_jit``) and a
pure-numpy build (``*_np``).  The unsuffixed name is bound to whichever
backend :mod:`friendsim._jit` selected.
"""

import numpy as np

from ._jit import USE_NUMBA, njit

__all__ = [
    "unpack_steps",
    "lattice_positions",
    "exit_indices",
    "positions_at",
    "exit_indices_np",
    "positions_at_np",
    "exit_indices_jit",
    "positions_at_jit",
]


def unpack_steps(words, n_steps):
    """Direction bits (0/1, uint8) of the first ``n_steps`` steps."""
    w = np.ascontiguousarray(words, dtype="<u8")
    bits = np.unpackbits(w.view(np.uint8), axis=-1, bitorder="little")
    return bits[..., :n_steps]


def lattice_positions(words, n_steps):
    """Positions at grid indices ``0..n_steps`` (length ``n_steps + 1``)."""
    bits = unpack_steps(words, n_steps).astype(np.int64)
    pos = np.zeros(bits.shape[:-1] + (n_steps + 1,), dtype=np.int64)
    pos[..., 1:] = np.cumsum(2 * bits - 1, axis=-1)
    return pos


# ---------------------------------------------------------------- numpy path


def exit_indices_np(words, n_steps, half_width, k_max):
    """Successive band-exit times of each walk.

    The first exit is the first grid index where the position has moved
    ``half_width`` lattice units away from its start; each later exit is
    measured from the position at the previous exit.  Returns an
    ``(n_trials, k_max)`` int64 array, ``-1`` where the horizon ran out.
    """
    n_trials = words.shape[0]
    out = np.full((n_trials, k_max), -1, dtype=np.int64)
    for t in range(n_trials):
        pos = lattice_positions(words[t], n_steps)
        start = 0
        for k in range(k_max):
            seg = np.abs(pos[start:] - pos[start]) >= half_width
            hit = np.flatnonzero(seg)
            if hit.size == 0:
                break
            start = start + int(hit[0])
            out[t, k] = start
    return out


def positions_at_np(words, n_steps, idx):
    """Lattice positions at the grid indices ``idx`` (shape ``(n_trials, m)``).

    Entries with ``idx < 0`` or ``idx > n_steps`` are returned as
    ``np.iinfo(np.int64).min``.
    """
    n_trials, m = idx.shape
    bad = np.iinfo(np.int64).min
    out = np.full((n_trials, m), bad, dtype=np.int64)
    for t in range(n_trials):
        row = idx[t]
        ok = (row >= 0) & (row <= n_steps)
        if not ok.any():
            continue
        top = int(row[ok].max())
        bits = unpack_steps(words[t], top).astype(np.int64)
        pos = np.concatenate(([0], np.cumsum(2 * bits - 1)))
        out[t, ok] = pos[row[ok]]
    return out


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def exit_indices_jit(words, n_steps, half_width, k_max):
    n_trials = words.shape[0]
    out = np.full((n_trials, k_max), -1, dtype=np.int64)
    for t in range(n_trials):
        pos = 0
        anchor = 0
        k = 0
        step = 0
        while step < n_steps and k < k_max:
            w = words[t, step >> 6]
            bit = (w >> np.uint64(step & 63)) & np.uint64(1)
            if bit:
                pos += 1
            else:
                pos -= 1
            step += 1
            if abs(pos - anchor) >= half_width:
                out[t, k] = step
                anchor = pos
                k += 1
    return out


@njit(cache=True)
def positions_at_jit(words, n_steps, idx):
    n_trials, m = idx.shape
    bad = np.iinfo(np.int64).min
    out = np.full((n_trials, m), bad, dtype=np.int64)
    for t in range(n_trials):
        top = -1
        for j in range(m):
            if idx[t, j] <= n_steps and idx[t, j] > top:
                top = idx[t, j]
        if top < 0:
            continue
        order = np.argsort(idx[t])
        pos = 0
        step = 0
        for jj in range(m):
            j = order[jj]
            target = idx[t, j]
            if target < 0 or target > n_steps:
                continue
            while step < target:
                w = words[t, step >> 6]
                bit = (w >> np.uint64(step & 63)) & np.uint64(1)
                if bit:
                    pos += 1
                else:
                    pos -= 1
                step += 1
            out[t, j] = pos
    return out


if USE_NUMBA:
    exit_indices = exit_indices_jit
    positions_at = positions_at_jit
else:
    exit_indices = exit_indices_np
    positions_at = positions_at_np
