"""Cell structures on a finite ring and flat-index bookkeeping.

A structure is a ring of M cells, cell x carrying a local space of dimension
d_x >= 2.  Operators live on the direct sum of the cell spaces; the flat basis
is ordered cell-major with level 1 first, so cell 0 occupies flat indices
0..d_0-1, cell 1 starts at d_0, and so on around the ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np


class SiteLabel(NamedTuple):
    """A single basis element, addressed as (cell, level) with 1-based level."""

    cell: int
    level: int


@dataclass(frozen=True)
class CellStructure:
    """Ring of cells with per-cell dimensions.

    Immutable; hashable through the dims tuple.  All cell arithmetic is
    modulo the number of cells.
    """

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2:
            raise ValueError(f"need at least 2 cells, got {len(dims)}")
        bad = [d for d in dims if d < 2]
        if bad:
            raise ValueError(f"cell dimensions must all be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)
        offsets = np.concatenate(([0], np.cumsum(dims))).astype(np.int64)
        offsets.setflags(write=False)
        object.__setattr__(self, "_offsets", offsets)

    @property
    def num_cells(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(self._offsets[-1])

    @property
    def offsets(self) -> np.ndarray:
        """Flat start index of each cell; length num_cells + 1."""
        return self._offsets

    def wrap(self, cell: int) -> int:
        return int(cell) % self.num_cells

    def cell_dim(self, cell: int) -> int:
        return self.dims[self.wrap(cell)]

    def cell_slice(self, cell: int) -> slice:
        x = self.wrap(cell)
        return slice(int(self._offsets[x]), int(self._offsets[x + 1]))

    def cell_indices(self, cell: int) -> np.ndarray:
        s = self.cell_slice(cell)
        return np.arange(s.start, s.stop, dtype=np.int64)

    def flat_index(self, site: SiteLabel | tuple[int, int]) -> int:
        """Flat position of a (cell, level) label.  Levels are 1-based."""
        cell, level = site
        x = self.wrap(cell)
        if not 1 <= level <= self.dims[x]:
            raise ValueError(
                f"level {level} out of range 1..{self.dims[x]} at cell {x}"
            )
        return int(self._offsets[x]) + level - 1

    def site_label(self, n: int) -> SiteLabel:
        """Inverse of flat_index."""
        n = int(n)
        if not 0 <= n < self.total_dim:
            raise ValueError(f"flat index {n} out of range 0..{self.total_dim - 1}")
        x = int(np.searchsorted(self._offsets, n, side="right")) - 1
        return SiteLabel(x, n - int(self._offsets[x]) + 1)

    def ring_distance(self, x: int, y: int) -> int:
        """Shorter arc length between two cells."""
        m = self.num_cells
        d = (x - y) % m
        return min(d, m - d)

    def ring_displacement(self, x: int, y: int) -> int:
        """Minimal-magnitude representative of y - x modulo the ring.

        Ties at half the ring are resolved toward the positive direction.
        """
        m = self.num_cells
        d = (y - x) % m
        return d if d <= m - d else d - m

    def distance_matrix(self) -> np.ndarray:
        """num_cells x num_cells matrix of ring distances."""
        m = self.num_cells
        idx = np.arange(m)
        d = (idx[:, None] - idx[None, :]) % m
        return np.minimum(d, m - d)
