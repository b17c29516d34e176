"""Compare the compiled and pure-numpy coin kernels on state vectors.

Usage: python3 benchmarks/bench_apply.py [--cells N] [--dim D] [--reps R]

Times `apply_coin_blocks` over many applications of one packed coin layer,
once through the numba path (when available) and once through the numpy
fallback, then reports the per-call times.  The same comparison can be
forced package-wide with SHIFTCOIN_NO_NUMBA=1.
"""

import argparse
import time

import numpy as np

import shiftcoin as sc
from shiftcoin import _kernels


def time_kernel(fn, packed, offsets, state, reps):
    out = np.empty_like(state)
    fn(packed, offsets, state, out)  # warm up (JIT compile, caches)
    start = time.perf_counter()
    for _ in range(reps):
        fn(packed, offsets, state, out)
    return (time.perf_counter() - start) / reps, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cells", type=int, default=4096)
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--reps", type=int, default=200)
    args = parser.parse_args()

    cs = sc.CellStructure((args.dim,) * args.cells)
    rng = np.random.default_rng(0)
    coins = {x: sc.haar_unitary(args.dim, rng) for x in range(args.cells)}
    packed = _kernels.pack_coin_blocks(cs.offsets, coins)
    state = rng.standard_normal(cs.total_dim) + 1j * rng.standard_normal(
        cs.total_dim
    )

    print(
        f"coin layer on {args.cells} cells of dim {args.dim} "
        f"({cs.total_dim} amplitudes), {args.reps} reps"
    )
    t_np, out_np = time_kernel(
        _kernels._apply_coin_blocks_numpy, packed, cs.offsets, state, args.reps
    )
    print(f"numpy fallback: {t_np * 1e6:9.1f} us/call")

    if _kernels.HAS_NUMBA:
        t_nb, out_nb = time_kernel(
            _kernels._apply_coin_blocks_numba, packed, cs.offsets, state, args.reps
        )
        dev = np.abs(out_nb - out_np).max()
        print(f"numba kernel:   {t_nb * 1e6:9.1f} us/call")
        print(f"speedup: {t_np / t_nb:.1f}x, paths agree to {dev:.1e}")
    else:
        print("numba kernel:   unavailable (SHIFTCOIN_NO_NUMBA set or not installed)")


if __name__ == "__main__":
    main()
