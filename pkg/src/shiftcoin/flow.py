"""Transport index of a banded unitary, measured as net probability flow.

Summing |amplitude|^2 over all matrix elements that carry weight rightward
across a fixed cut, minus those carrying it leftward, gives an integer for
any banded unitary.  It is invariant under the cut position, additive under
products, zero for coins, and +1 for the conditional shift, so it counts the
net number of conditional shifts a factorization must contain.
"""

from __future__ import annotations

import numpy as np

from .errors import NonIntegerFlowError
from .walks import BandedUnitary

INDEX_TOL = 1e-6


def crossing_flow(walk: BandedUnitary, cut: int, radius: int | None = None) -> float:
    """Net rightward probability flow across the cut between `cut` and `cut`+1.

    Sums over source cells in the `radius` cells left of the cut (inclusive)
    and target cells in the `radius` cells right of it.  `radius` must cover
    the bandwidth and leave at least one cell of the ring outside the two
    arcs, otherwise wrapped transport is miscounted.
    """
    cs = walk.structure
    m = cs.num_cells
    if radius is None:
        radius = max(1, walk.bandwidth)
    if radius < walk.bandwidth:
        raise ValueError(
            f"radius {radius} below bandwidth {walk.bandwidth}"
        )
    if 2 * radius + 1 > m:
        raise ValueError(
            f"radius {radius} too large for {m} cells: the two arcs would wrap"
        )
    left = np.concatenate(
        [cs.cell_indices(cut - k) for k in range(radius)]
    )
    right = np.concatenate(
        [cs.cell_indices(cut + 1 + k) for k in range(radius)]
    )
    w = walk.matrix
    rightward = np.abs(w[np.ix_(right, left)]) ** 2
    leftward = np.abs(w[np.ix_(left, right)]) ** 2
    return float(rightward.sum() - leftward.sum())


def walk_index(
    walk: BandedUnitary,
    cut: int = 0,
    radius: int | None = None,
    tol: float = INDEX_TOL,
) -> int:
    """Integer transport index, with the near-integer check enforced."""
    flow = crossing_flow(walk, cut, radius)
    rounded = round(flow)
    if abs(flow - rounded) > tol:
        raise NonIntegerFlowError(
            f"crossing flow {flow!r} is not an integer to within {tol:g}; "
            "this signals a non-unitary input or a band that wraps the ring"
        )
    return int(rounded)
