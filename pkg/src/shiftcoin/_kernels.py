"""State-vector kernels for coin layers.

The coin layer is the hot loop when a protocol is applied to many state
vectors, so it gets a compiled path.  Set SHIFTCOIN_NO_NUMBA=1 to force the
pure-numpy fallback; shifts are plain permutations and stay in numpy either
way.
"""

from __future__ import annotations

import os

import numpy as np

try:
    if os.environ.get("SHIFTCOIN_NO_NUMBA"):
        raise ImportError("disabled by SHIFTCOIN_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def pack_coin_blocks(offsets: np.ndarray, coins: dict[int, np.ndarray]) -> np.ndarray:
    """Concatenate per-cell blocks row-major into one flat complex array.

    Cells absent from `coins` contribute identity blocks, so the packed form
    always covers the whole ring.
    """
    num_cells = len(offsets) - 1
    total = sum(
        int(offsets[x + 1] - offsets[x]) ** 2 for x in range(num_cells)
    )
    packed = np.empty(total, dtype=np.complex128)
    pos = 0
    for x in range(num_cells):
        d = int(offsets[x + 1] - offsets[x])
        block = coins.get(x)
        if block is None:
            block = np.eye(d, dtype=np.complex128)
        packed[pos : pos + d * d] = np.asarray(block, dtype=np.complex128).ravel()
        pos += d * d
    return packed


def _apply_coin_blocks_numpy(
    packed: np.ndarray, offsets: np.ndarray, state: np.ndarray, out: np.ndarray
) -> None:
    pos = 0
    for x in range(len(offsets) - 1):
        lo = int(offsets[x])
        hi = int(offsets[x + 1])
        d = hi - lo
        block = packed[pos : pos + d * d].reshape(d, d)
        out[lo:hi] = block @ state[lo:hi]
        pos += d * d


if HAS_NUMBA:

    @njit(cache=True)
    def _apply_coin_blocks_numba(packed, offsets, state, out):  # pragma: no cover
        pos = 0
        for x in range(len(offsets) - 1):
            lo = offsets[x]
            hi = offsets[x + 1]
            d = hi - lo
            for i in range(d):
                acc = 0.0 + 0.0j
                row = pos + i * d
                for j in range(d):
                    acc += packed[row + j] * state[lo + j]
                out[lo + i] = acc
            pos += d * d

    apply_coin_blocks = _apply_coin_blocks_numba
else:
    apply_coin_blocks = _apply_coin_blocks_numpy


def apply_shift_level1(
    offsets: np.ndarray, power: int, state: np.ndarray, out: np.ndarray
) -> None:
    """Move the level-1 amplitude of every cell `power` cells rightward."""
    num_cells = len(offsets) - 1
    out[:] = state
    src = np.asarray([offsets[x] for x in range(num_cells)])
    dst = np.asarray([offsets[(x + power) % num_cells] for x in range(num_cells)])
    out[dst] = state[src]
