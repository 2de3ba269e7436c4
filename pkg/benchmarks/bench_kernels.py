"""Time the numba and numpy builds of the random-walk kernels.

Run with ``python3 benchmarks/bench_kernels.py [--trials N] [--steps N]``.
With ``FRIENDSIM_DISABLE_JIT=1`` the ``*_jit`` functions run as plain
Python, which shows the cost of the interpreter loop.
"""

import argparse
from timeit import timeit

import numpy as np

from friendsim._jit import backend_name
from friendsim.kernels import exit_indices_jit, exit_indices_np, positions_at_jit, positions_at_np
from friendsim.stopping import _walk_words


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--steps", type=int, default=4096)
    parser.add_argument("--half-width", type=int, default=8)
    parser.add_argument("--k-max", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    words = _walk_words(0xF2F2, range(args.trials), args.steps)
    exits = {}
    for name, fn in (("numpy", exit_indices_np), ("jit", exit_indices_jit)):
        fn(words[:2], args.steps, args.half_width, args.k_max)  # compile / warm up
        exits[name] = fn(words, args.steps, args.half_width, args.k_max)
    assert np.array_equal(exits["numpy"], exits["jit"])

    idx = np.where(exits["numpy"] < 0, args.steps, exits["numpy"])
    pos = {}
    for name, fn in (("numpy", positions_at_np), ("jit", positions_at_jit)):
        fn(words[:2], args.steps, idx[:2])
        pos[name] = fn(words, args.steps, idx)
    assert np.array_equal(pos["numpy"], pos["jit"])

    print(f"backend={backend_name()} trials={args.trials} steps={args.steps}")
    for label, np_fn, jit_fn, extra in (
        ("exit_indices", exit_indices_np, exit_indices_jit, (args.half_width, args.k_max)),
        ("positions_at", positions_at_np, positions_at_jit, (idx,)),
    ):
        t_np = timeit(lambda: np_fn(words, args.steps, *extra), number=args.repeat) / args.repeat
        t_jit = timeit(lambda: jit_fn(words, args.steps, *extra), number=args.repeat) / args.repeat
        print(f"{label:13s} numpy {t_np * 1e3:9.2f} ms   jit {t_jit * 1e3:9.2f} ms   ratio {t_np / t_jit:7.1f}x")


if __name__ == "__main__":
    main()
