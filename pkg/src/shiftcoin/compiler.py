"""Compile a banded unitary into a shift-and-coin protocol.

Pipeline: measure the transport index and factor out that many conditional
shifts; decouple the remainder into window rotations and arc blocks; factor
every block into two-level rotations; lower each rotation to a coin-shift
fragment.  Blocks whose windows have the same cell-dimension signature are
lowered together, sharing one pair of shifts per rotation step, which keeps
the shift count independent of the ring length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import CellStructure, SiteLabel
from .decoupling import DecoupleResult, Window, decouple
from .errors import ShiftCoinError, SkeletonMismatchError, StageError
from .flow import walk_index
from .protocol import CoinItem, Protocol, ProtocolItem, ShiftItem
from .twolevel import TwoLevelDecomposition, decompose_block
from .walks import BandedUnitary, shift_power_matrix

PHASE_TOL = 1e-12


def _transposition(dim: int, a: int, b: int) -> np.ndarray:
    """Permutation coin swapping 1-based levels a and b."""
    mat = np.eye(dim, dtype=np.complex128)
    mat[[a - 1, b - 1], :] = mat[[b - 1, a - 1], :]
    return mat


def _embed_pair(dim: int, a: int, b: int, core: np.ndarray) -> np.ndarray:
    """Coin acting with `core` on 1-based levels (a, b) of one cell."""
    mat = np.eye(dim, dtype=np.complex128)
    mat[a - 1, a - 1] = core[0, 0]
    mat[a - 1, b - 1] = core[0, 1]
    mat[b - 1, a - 1] = core[1, 0]
    mat[b - 1, b - 1] = core[1, 1]
    return mat


def _local_site(dims: tuple[int, ...], flat: int) -> tuple[int, int]:
    """(cell position, 1-based level) for a local window index."""
    for pos, d in enumerate(dims):
        if flat < d:
            return pos, flat + 1
        flat -= d
    raise IndexError("local index out of range")


def _minimal_hop(offset: int, num_cells: int) -> int:
    """Shift power with the smallest magnitude realizing a cell offset."""
    d = offset % num_cells
    return d if d <= num_cells - d else d - num_cells


def embed_site_pair(
    structure: CellStructure,
    site_a: SiteLabel,
    site_b: SiteLabel,
    core: np.ndarray,
) -> np.ndarray:
    """Dense unitary acting with `core` on two sites, identity elsewhere."""
    fa = structure.flat_index(site_a)
    fb = structure.flat_index(site_b)
    mat = np.eye(structure.total_dim, dtype=np.complex128)
    mat[fa, fa] = core[0, 0]
    mat[fa, fb] = core[0, 1]
    mat[fb, fa] = core[1, 0]
    mat[fb, fb] = core[1, 1]
    return mat


def lower_site_pair(
    structure: CellStructure,
    site_a: SiteLabel,
    site_b: SiteLabel,
    core: np.ndarray,
) -> list[ProtocolItem]:
    """Items realizing a rotation between two sites with cell-local coins.

    Same-cell pairs need a single coin.  Cross-cell pairs become the
    five-item sandwich: swap the sites onto levels 1 and 2, ride the
    conditional shift so both meet in one cell, rotate there, then undo.
    """
    site_a, site_b = SiteLabel(*site_a), SiteLabel(*site_b)
    x = structure.wrap(site_a.cell)
    y = structure.wrap(site_b.cell)
    if x == y:
        if site_a.level == site_b.level:
            raise ValueError("need two distinct sites")
        coin = _embed_pair(
            structure.cell_dim(x), site_a.level, site_b.level, core
        )
        return [CoinItem({x: coin})]
    hop = _minimal_hop(y - x, structure.num_cells)
    swaps: dict[int, np.ndarray] = {}
    if site_a.level != 1:
        swaps[x] = _transposition(structure.cell_dim(x), site_a.level, 1)
    if site_b.level != 2:
        swaps[y] = _transposition(structure.cell_dim(y), site_b.level, 2)
    meet = _embed_pair(structure.cell_dim(y), 1, 2, core)
    return [
        CoinItem(dict(swaps)),
        ShiftItem(-hop),
        CoinItem({y: meet}),
        ShiftItem(hop),
        CoinItem(dict(swaps)),
    ]


@dataclass(frozen=True)
class FragmentStep:
    """One merged two-level step across all members of a class.

    `cores` maps member position to its 2x2 rotation; members without a
    rotation at this step simply sit out the layer.
    """

    pair: tuple[int, int]
    cores: dict[int, np.ndarray]


def _class_skeleton(
    signature: tuple[int, ...],
    decomps: tuple[TwoLevelDecomposition, ...],
) -> list[FragmentStep]:
    pairs = sorted({(f.i, f.j) for dec in decomps for f in dec.factors})
    order = {p: t for t, p in enumerate(pairs)}
    steps = [FragmentStep(p, {}) for p in pairs]
    for member, dec in enumerate(decomps):
        last = -1
        for f in dec.factors:
            t = order[(f.i, f.j)]
            if t <= last:
                raise SkeletonMismatchError(
                    f"member {member} emits pair {(f.i, f.j)} out of "
                    "canonical elimination order; cannot share shifts"
                )
            last = t
            steps[t].cores[member] = f.core
    return steps


def compile_class(
    structure: CellStructure,
    windows: tuple[Window, ...],
    decomps: tuple[TwoLevelDecomposition, ...],
) -> list[ProtocolItem]:
    """Lower same-signature windows to one shared item sequence.

    Every step of the shared skeleton becomes either one coin layer (both
    levels in the same cell) or the five-item sandwich
    coin / shift / coin / shift / coin, with all members riding the same
    pair of shifts.  A final diagonal coin layer carries the residual
    phases.
    """
    signature = windows[0].dims
    m = structure.num_cells
    items: list[ProtocolItem] = []

    for step in _class_skeleton(signature, decomps):
        i_flat, j_flat = step.pair
        pos_a, lvl_a = _local_site(signature, i_flat)
        pos_b, lvl_b = _local_site(signature, j_flat)
        if pos_a == pos_b:
            coins = {}
            for member, core in step.cores.items():
                cell = windows[member].cells[pos_a]
                coins[cell] = _embed_pair(
                    structure.cell_dim(cell), lvl_a, lvl_b, core
                )
            items.append(CoinItem(coins))
            continue

        hop = _minimal_hop(pos_b - pos_a, m)
        swaps: dict[int, np.ndarray] = {}
        cores: dict[int, np.ndarray] = {}
        for member, core in step.cores.items():
            win = windows[member]
            x, y = win.cells[pos_a], win.cells[pos_b]
            if lvl_a != 1:
                swaps[x] = _transposition(structure.cell_dim(x), lvl_a, 1)
            if lvl_b != 2:
                swaps[y] = _transposition(structure.cell_dim(y), lvl_b, 2)
            cores[y] = _embed_pair(structure.cell_dim(y), 1, 2, core)
        # the swap layer is its own inverse, so it closes the sandwich too
        if swaps:
            items.append(CoinItem(dict(swaps)))
        items.append(ShiftItem(-hop))
        items.append(CoinItem(cores))
        items.append(ShiftItem(hop))
        if swaps:
            items.append(CoinItem(dict(swaps)))

    tail: dict[int, np.ndarray] = {}
    for member, dec in enumerate(decomps):
        win = windows[member]
        if np.abs(dec.phases - 1.0).max() <= PHASE_TOL:
            continue
        offset = 0
        for pos, d in enumerate(win.dims):
            part = dec.phases[offset : offset + d]
            offset += d
            if np.abs(part - 1.0).max() <= PHASE_TOL:
                continue
            tail[win.cells[pos]] = np.diag(part)
    if tail:
        items.append(CoinItem(tail))
    return items


def _group_by_signature(
    windows: tuple[Window, ...],
) -> list[tuple[tuple[int, ...], list[int]]]:
    groups: dict[tuple[int, ...], list[int]] = {}
    for idx, win in enumerate(windows):
        groups.setdefault(win.dims, []).append(idx)
    return [(sig, groups[sig]) for sig in groups]


def _lower_layer(
    structure: CellStructure, windows: tuple[Window, ...], matrices: list[np.ndarray]
) -> list[ProtocolItem]:
    items: list[ProtocolItem] = []
    decomps = tuple(decompose_block(mat) for mat in matrices)
    for _, member_idx in _group_by_signature(windows):
        group_windows = tuple(windows[i] for i in member_idx)
        group_decomps = tuple(decomps[i] for i in member_idx)
        items.extend(compile_class(structure, group_windows, group_decomps))
    return items


@dataclass(frozen=True)
class CompileResult:
    protocol: Protocol
    raw_protocol: Protocol
    net_shift: int
    decoupling: DecoupleResult


def compile_walk(
    walk: BandedUnitary,
    radius: int | None = None,
    optimize: bool = True,
) -> CompileResult:
    """Full pipeline from a banded unitary to an executable protocol."""
    cs = walk.structure

    try:
        net = walk_index(walk)
    except ShiftCoinError:
        raise
    except ValueError:
        # band saturates the ring, so the net transport is ambiguous
        # (S^k and S^(k-M) agree); compile without stripping shifts
        net = 0

    try:
        if net:
            stripped = BandedUnitary(
                cs, shift_power_matrix(cs, -net) @ walk.matrix
            )
        else:
            stripped = walk
    except ShiftCoinError as exc:
        raise StageError("strip", str(exc)) from exc

    try:
        dec = decouple(stripped, radius=radius)
    except StageError:
        raise
    except ShiftCoinError as exc:
        raise StageError("decouple", str(exc)) from exc

    try:
        items: list[ProtocolItem] = []
        if net:
            items.append(ShiftItem(net))
        if dec.rotations:
            items.extend(
                _lower_layer(
                    cs,
                    dec.rotations,
                    [win.matrix.conj().T for win in dec.rotations],
                )
            )
        items.extend(
            _lower_layer(
                cs,
                dec.arc_blocks,
                [win.matrix for win in dec.arc_blocks],
            )
        )
    except StageError:
        raise
    except ShiftCoinError as exc:
        raise StageError("lower", str(exc)) from exc

    raw = Protocol(cs, tuple(items))
    final = raw.optimize() if optimize else raw
    return CompileResult(
        protocol=final,
        raw_protocol=raw,
        net_shift=net,
        decoupling=dec,
    )
