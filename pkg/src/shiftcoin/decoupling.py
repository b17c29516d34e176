"""Split a zero-index banded unitary W into W = V^dag U.

V is a single layer of unitaries acting on disjoint windows of cells, each
window straddling one cut.  U = V W then has no matrix elements crossing any
cut, so it falls apart into independent blocks on the arcs between
consecutive cuts.  Protocols for V and for the blocks of U can afterwards be
compiled separately.

Two window layouts are used.  When the ring length is a multiple of twice
the bandwidth (and holds at least two such windows) the cuts sit on a fixed
grid and the windows tile the ring.  Otherwise windows are measured from the
actual transition support of the walk around each candidate cut, and a
deterministic greedy scan picks the largest family of cuts with disjoint
windows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import CellStructure, SiteLabel
from .errors import RankMismatchError, StageError
from .flow import walk_index
from .walks import BandedUnitary

DECOUPLE_TOL = 1e-10
SUPPORT_TOL = 1e-11


@dataclass(frozen=True)
class Window:
    """A unitary acting on a run of consecutive cells.

    The matrix is indexed cell-major in the order of `cells`, which may wrap
    past cell 0 on the ring.
    """

    cells: tuple[int, ...]
    dims: tuple[int, ...]
    matrix: np.ndarray

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def site_of(self, flat: int) -> SiteLabel:
        """Map a local matrix index to its global (cell, level) site."""
        if flat < 0 or flat >= self.total_dim:
            raise IndexError(f"local index {flat} out of range")
        for pos, d in enumerate(self.dims):
            if flat < d:
                return SiteLabel(self.cells[pos], flat + 1)
            flat -= d
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class DecoupleResult:
    """Outcome of a decoupling pass: W = rotation^dag @ blocks."""

    structure: CellStructure
    cuts: tuple[int, ...]
    rotations: tuple[Window, ...]
    arc_blocks: tuple[Window, ...]
    rotation_matrix: np.ndarray
    block_matrix: np.ndarray


def _window_flat(cs: CellStructure, cells: tuple[int, ...]) -> np.ndarray:
    return np.concatenate([cs.cell_indices(c) for c in cells])


def _cut_transfer(
    walk: BandedUnitary, cut: int, window_cells: tuple[int, ...], arc_len: int
) -> tuple[np.ndarray, np.ndarray]:
    """Restriction to the window of W P W^dag, P the arc right of the cut."""
    cs = walk.structure
    win_flat = _window_flat(cs, window_cells)
    arc_flat = np.concatenate(
        [cs.cell_indices(cut + 1 + k) for k in range(arc_len)]
    )
    w_sub = walk.matrix[np.ix_(win_flat, arc_flat)]
    return w_sub @ w_sub.conj().T, win_flat

def _right_mask(cs: CellStructure, cut: int, window_cells: tuple[int, ...]) -> np.ndarray:
    """Per-local-index indicator of the window cells strictly right of the cut."""
    m = cs.num_cells
    parts = []
    for c in window_cells:
        rel = (c - cut) % m
        if rel > m // 2:
            rel -= m
        parts.append(np.full(cs.cell_dim(c), rel >= 1, dtype=bool))
    return np.concatenate(parts)


def _split_projector_basis(q: np.ndarray) -> tuple[np.ndarray, int]:
    """Orthonormal basis with range(q) first, null(q) second.

    Columns are picked by pivoted Gram-Schmidt on the columns of q and of
    1-q, so the result is deterministic and a diagonal 0/1 projector yields
    the standard basis in ascending position order (eigensolvers would mix
    the degenerate eigenspaces arbitrarily instead).
    """
    n = q.shape[0]
    rank = int(round(np.trace(q).real))
    basis = np.zeros((n, n), dtype=np.complex128)
    count = 0
    for source, take in ((q, rank), (np.eye(n) - q, n - rank)):
        work = source.copy()
        if count:
            chosen = basis[:, :count]
            work -= chosen @ (chosen.conj().T @ work)
        for _ in range(take):
            norms = np.linalg.norm(work, axis=0)
            # near-ties go to the lowest column so the pick is stable
            pivot = int(np.argmax(norms >= norms.max() * (1.0 - 1e-9)))
            v = work[:, pivot] / norms[pivot]
            basis[:, count] = v
            count += 1
            work -= np.outer(v, v.conj() @ work)
    return basis, rank


def _window_rotation(
    q: np.ndarray, right_mask: np.ndarray, tol: float
) -> np.ndarray | None:
    """Unitary on the window taking range(q) onto the right-of-cut levels.

    Returns None when q fails to be a projector of the matching rank, which
    marks the cut as unusable.
    """
    dev = np.abs(q @ q - q).max()
    if dev > tol:
        return None
    basis, rank = _split_projector_basis(q)
    target_rank = int(right_mask.sum())
    if rank != target_rank:
        return None
    n = q.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    b_right = eye[:, right_mask]
    b_left = eye[:, ~right_mask]
    return b_right @ basis[:, :rank].conj().T + b_left @ basis[:, rank:].conj().T


def _grid_cuts(num_cells: int, radius: int) -> list[int]:
    # anchor at radius-1 so the windows tile [0, 2r-1], [2r, 4r-1], ...
    return [radius - 1 + 2 * radius * k for k in range(num_cells // (2 * radius))]


def _measured_window(
    walk: BandedUnitary, cut: int, radius: int
) -> tuple[int, ...]:
    """Window around one cut, read off the walk's actual transition support.

    The support is where W P W^dag deviates from P itself (P projecting on
    the half ring right of the cut); cells of that support within `radius`
    of the cut set the window edges.  The window always contains the two
    cells adjacent to the cut.
    """
    cs = walk.structure
    m = cs.num_cells
    half = m // 2
    arc_flat = np.concatenate(
        [cs.cell_indices(cut + 1 + k) for k in range(half)]
    )
    w_arc = walk.matrix[:, arc_flat]
    q_full = w_arc @ w_arc.conj().T
    resid = q_full.copy()
    resid[arc_flat, arc_flat] -= 1.0
    bmax = np.maximum.reduceat(np.abs(resid), cs.offsets[:-1], axis=0)
    bmax = np.maximum.reduceat(bmax, cs.offsets[:-1], axis=1)
    involved = np.where(
        (bmax.max(axis=0) > SUPPORT_TOL) | (bmax.max(axis=1) > SUPPORT_TOL)
    )[0]
    rels = []
    for s in involved:
        rel = (int(s) - cut) % m
        if rel > m // 2:
            rel -= m
        if -(radius - 1) <= rel <= radius:
            rels.append(rel)
    lo = min(0, min(rels, default=0))
    hi = max(1, max(rels, default=1))
    return tuple(cs.wrap(cut + r) for r in range(lo, hi + 1))


def _greedy_cut_family(
    windows: dict[int, tuple[int, ...]], num_cells: int
) -> list[int]:
    """Largest family of cuts with pairwise disjoint windows.

    Scans every anchor cut in order and extends greedily around the ring;
    the first anchor reaching the best count wins, so the choice is
    deterministic.
    """
    best: list[int] = []
    for anchor in sorted(windows):
        chosen = [anchor]
        covered = set(windows[anchor])
        for step in range(1, num_cells):
            c = (anchor + step) % num_cells
            win = windows.get(c)
            if win is not None and covered.isdisjoint(win):
                chosen.append(c)
                covered.update(win)
        if len(chosen) > len(best):
            best = chosen
    return sorted(best)


def _arc_cells(cs: CellStructure, cuts: list[int]) -> list[tuple[int, ...]]:
    arcs = []
    for i, c in enumerate(cuts):
        nxt = cuts[(i + 1) % len(cuts)]
        length = (nxt - c) % cs.num_cells
        if length == 0:
            length = cs.num_cells
        arcs.append(tuple(cs.wrap(c + 1 + k) for k in range(length)))
    return arcs


def _window_of(cs: CellStructure, cells: tuple[int, ...], matrix: np.ndarray) -> Window:
    return Window(
        cells=cells,
        dims=tuple(cs.cell_dim(c) for c in cells),
        matrix=matrix,
    )


def decouple(
    walk: BandedUnitary, radius: int | None = None, tol: float = DECOUPLE_TOL
) -> DecoupleResult:
    """Factor W = rotation^dag @ blocks with blocks confined to ring arcs.

    Requires zero transport index; a walk with net transport has no such
    factorization and raises RankMismatchError.  `radius` defaults to the
    bandwidth (minimum 1).
    """
    cs = walk.structure
    m = cs.num_cells
    if radius is None:
        radius = max(1, walk.bandwidth)
    try:
        net = walk_index(walk)
    except ValueError:
        net = None
    if net not in (None, 0):
        raise RankMismatchError(
            f"net transport index {net} != 0; factor out conditional shifts first"
        )

    if m % (2 * radius) == 0 and m >= 4 * radius:
        cuts = _grid_cuts(m, radius)
        windows = {
            c: tuple(cs.wrap(c - radius + 1 + k) for k in range(2 * radius))
            for c in cuts
        }
        arc_len = 2 * radius
        strict = True
    else:
        candidates: dict[int, tuple[int, ...]] = {}
        for c in range(m):
            win = _measured_window(walk, c, radius)
            q, _ = _cut_transfer(walk, c, win, m // 2)
            if _window_rotation(q, _right_mask(cs, c, win), tol) is not None:
                candidates[c] = win
        cuts = _greedy_cut_family(candidates, m)
        if len(cuts) < 2:
            # no usable cut family: keep the walk as one block on the ring
            full = tuple(range(m))
            return DecoupleResult(
                structure=cs,
                cuts=(),
                rotations=(),
                arc_blocks=(_window_of(cs, full, walk.matrix.copy()),),
                rotation_matrix=np.eye(cs.total_dim, dtype=np.complex128),
                block_matrix=walk.matrix.copy(),
            )
        windows = {c: candidates[c] for c in cuts}
        arc_len = m // 2
        strict = False

    n = cs.total_dim
    v = np.eye(n, dtype=np.complex128)
    rotations = []
    for c in cuts:
        win = windows[c]
        q, win_flat = _cut_transfer(walk, c, win, arc_len)
        mask = _right_mask(cs, c, win)
        v_win = _window_rotation(q, mask, tol)
        if v_win is None:
            dev = np.abs(q @ q - q).max()
            if dev > tol:
                raise StageError(
                    "decouple",
                    f"window transfer at cut {c} is not a projector "
                    f"(deviation {dev:.3e})",
                )
            raise RankMismatchError(
                f"rank mismatch at cut {c}: local transport is not balanced"
            )
        v[np.ix_(win_flat, win_flat)] = v_win
        rotations.append(_window_of(cs, win, v_win))

    u = v @ walk.matrix
    arcs = _arc_cells(cs, cuts)
    arc_of = np.empty(m, dtype=np.int64)
    for i, cells in enumerate(arcs):
        for c in cells:
            arc_of[c] = i
    col_arc = np.repeat(arc_of, cs.dims)
    off_mask = col_arc[:, None] != col_arc[None, :]
    residual = np.abs(u)[off_mask].max() if off_mask.any() else 0.0
    if strict and residual > tol:
        raise StageError(
            "decouple",
            f"residual coupling {residual:.3e} across cuts after rotation",
        )
    if not strict and residual > tol:
        raise StageError(
            "decouple",
            f"measured windows left residual coupling {residual:.3e}; "
            "no exact cut family exists for this walk",
        )

    blocks = []
    for cells in arcs:
        flat = _window_flat(cs, cells)
        blocks.append(_window_of(cs, cells, u[np.ix_(flat, flat)].copy()))

    return DecoupleResult(
        structure=cs,
        cuts=tuple(cuts),
        rotations=tuple(rotations),
        arc_blocks=tuple(blocks),
        rotation_matrix=v,
        block_matrix=u,
    )
