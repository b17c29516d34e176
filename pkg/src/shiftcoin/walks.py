"""Banded unitaries on a cell ring, plus the standard operator builders.

The bandwidth of an operator is the largest ring distance between cells it
couples.  The conditional shift moves the level-1 component of every cell one
cell to the right and leaves all other levels in place; coins act cell-wise.
"""

from __future__ import annotations

import numpy as np

from .cells import CellStructure
from .errors import NonUnitaryError

BAND_TOL = 1e-12
UNITARITY_TOL = 1e-10

GROVER_COIN = np.array(
    [[-1.0, 2.0, 2.0], [2.0, -1.0, 2.0], [2.0, 2.0, -1.0]]
) / 3.0
GROVER_COIN.setflags(write=False)


def measure_bandwidth(
    matrix: np.ndarray, structure: CellStructure, tol: float = BAND_TOL
) -> int:
    """Smallest L such that all blocks between cells farther than L vanish.

    A block counts as zero when every entry has modulus <= tol.
    """
    n = structure.total_dim
    if matrix.shape != (n, n):
        raise ValueError(f"matrix shape {matrix.shape} does not match dim {n}")
    # reduce to per-cell-pair maxima, then take the largest flagged distance
    absmax = np.maximum.reduceat(np.abs(matrix), structure.offsets[:-1], axis=0)
    absmax = np.maximum.reduceat(absmax, structure.offsets[:-1], axis=1)
    flagged = absmax > tol
    if not flagged.any():
        return 0
    return int(structure.distance_matrix()[flagged].max())


class BandedUnitary:
    """A unitary on a cell ring together with its measured bandwidth.

    The matrix is validated for unitarity on construction and frozen
    afterwards; the bandwidth is measured lazily and cached.
    """

    def __init__(
        self,
        structure: CellStructure,
        matrix: np.ndarray,
        *,
        tol: float = UNITARITY_TOL,
    ):
        matrix = np.array(matrix, dtype=np.complex128, order="C")
        n = structure.total_dim
        if matrix.shape != (n, n):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match total dim {n}"
            )
        dev = np.abs(matrix.conj().T @ matrix - np.eye(n)).max()
        if dev > tol:
            raise NonUnitaryError(f"matrix is not unitary: deviation {dev:.3e}")
        matrix.setflags(write=False)
        self.structure = structure
        self.matrix = matrix
        self._bandwidth: int | None = None

    @property
    def bandwidth(self) -> int:
        if self._bandwidth is None:
            self._bandwidth = measure_bandwidth(self.matrix, self.structure)
        return self._bandwidth

    @property
    def total_dim(self) -> int:
        return self.structure.total_dim

    def __repr__(self) -> str:
        return (
            f"BandedUnitary(cells={self.structure.num_cells}, "
            f"dim={self.total_dim}, bandwidth={self.bandwidth})"
        )


def regroup(walk: BandedUnitary, new_dims) -> BandedUnitary:
    """Rebracket the same operator over a different cell structure.

    The flat space is untouched, entries are carried over unchanged; only the
    cell boundaries move, so the measured bandwidth generally changes.
    """
    new_structure = (
        new_dims if isinstance(new_dims, CellStructure) else CellStructure(tuple(new_dims))
    )
    if new_structure.total_dim != walk.total_dim:
        raise ValueError(
            f"total dimension changed: {walk.total_dim} -> {new_structure.total_dim}"
        )
    return BandedUnitary(new_structure, walk.matrix)


def _shift_permutation(structure: CellStructure, level: int, by: int) -> np.ndarray:
    """Target flat index for each source index when one level shifts by `by` cells."""
    n = structure.total_dim
    target = np.arange(n, dtype=np.int64)
    for x in range(structure.num_cells):
        src = structure.flat_index((x, level))
        target[src] = structure.flat_index((x + by, level))
    return target


def _permutation_matrix(target: np.ndarray) -> np.ndarray:
    n = len(target)
    mat = np.zeros((n, n), dtype=np.complex128)
    mat[target, np.arange(n)] = 1.0
    return mat


def shift_power_matrix(structure: CellStructure, power: int) -> np.ndarray:
    """Dense matrix of the conditional shift raised to an integer power."""
    return _permutation_matrix(_shift_permutation(structure, 1, power))


def shift_operator(structure: CellStructure) -> BandedUnitary:
    """The conditional shift: |x,1> -> |x+1,1>, all other levels fixed."""
    return BandedUnitary(structure, shift_power_matrix(structure, 1))


def build_partial_shift(
    structure: CellStructure, level: int, direction: int = 1
) -> BandedUnitary:
    """Shift one level by one cell, leaving every other level in place.

    direction +1 moves the level rightward, -1 leftward.  Every cell must
    have the level for the permutation to close around the ring.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if any(d < level for d in structure.dims):
        raise ValueError(
            f"level {level} missing from some cells (dims {structure.dims})"
        )
    if level < 1:
        raise ValueError("levels are 1-based")
    perm = _shift_permutation(structure, level, direction)
    return BandedUnitary(structure, _permutation_matrix(perm))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the standard phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_coin_layer(structure: CellStructure, rng: np.random.Generator) -> np.ndarray:
    """Block-diagonal matrix of independent Haar coins, one per cell."""
    n = structure.total_dim
    mat = np.zeros((n, n), dtype=np.complex128)
    for x in range(structure.num_cells):
        s = structure.cell_slice(x)
        mat[s, s] = haar_unitary(structure.dims[x], rng)
    return mat


def random_banded_unitary(
    structure: CellStructure,
    bandwidth: int,
    net_shift: int = 0,
    seed: int = 0,
) -> BandedUnitary:
    """Seeded random walk with bandwidth <= `bandwidth` and index `net_shift`.

    Construction: a Haar coin layer followed by `bandwidth` rounds of
    shift-conjugated coin layers (each round S C S^-1 C'), finally multiplied
    by the conditional shift to the power `net_shift`.  Each round widens the
    reachable band by exactly one cell in both directions, so the rounds pin
    the bandwidth while the Haar coins keep the band generically full.
    """
    if bandwidth < 1:
        raise ValueError("bandwidth must be >= 1")
    if structure.num_cells < 4:
        raise ValueError("need at least 4 cells for a generic band")
    rng = np.random.default_rng(seed)
    s = shift_power_matrix(structure, 1)
    s_inv = s.conj().T
    mat = random_coin_layer(structure, rng)
    for _ in range(bandwidth):
        mat = s @ random_coin_layer(structure, rng) @ s_inv @ random_coin_layer(
            structure, rng
        ) @ mat
    if net_shift:
        mat = shift_power_matrix(structure, net_shift) @ mat
    return BandedUnitary(structure, mat)


def build_coin_walk(structure: CellStructure, coins: dict[int, np.ndarray]) -> BandedUnitary:
    """Purely cell-local walk from a cell -> unitary mapping (bandwidth 0)."""
    n = structure.total_dim
    mat = np.eye(n, dtype=np.complex128)
    for cell, coin in coins.items():
        s = structure.cell_slice(cell)
        d = structure.cell_dim(cell)
        coin = np.asarray(coin, dtype=np.complex128)
        if coin.shape != (d, d):
            raise ValueError(f"coin at cell {cell} has shape {coin.shape}, need ({d},{d})")
        mat[s, s] = coin
    return BandedUnitary(structure, mat)


def build_three_state_walk(num_cells: int, coin: np.ndarray | None = None) -> BandedUnitary:
    """Walk on three-level cells: shift level 1 right, level 3 left, then coin.

    The default coin is the Grover matrix.  Regrouping the result onto
    two-level cells (2 cells -> 3 cells of the halved dimension) yields
    bandwidth 2, the standard compilation testbed.
    """
    structure = CellStructure((3,) * num_cells)
    coin = GROVER_COIN if coin is None else np.asarray(coin, dtype=np.complex128)
    layer = build_coin_walk(structure, {x: coin for x in range(num_cells)})
    s1 = _permutation_matrix(_shift_permutation(structure, 1, 1))
    s3_dag = _permutation_matrix(_shift_permutation(structure, 3, 1)).conj().T
    return BandedUnitary(structure, s1 @ s3_dag @ layer.matrix)
