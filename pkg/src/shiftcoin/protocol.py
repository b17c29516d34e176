"""Instruction-level representation of a shift-and-coin protocol.

A protocol is a sequence of items, each either a power of the conditional
shift or a single layer of cell-local coins.  Items are listed in operator
product order: the full operator is the matrix product of the items as
listed, so the LAST item is the first to act on a state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import CellStructure
from .walks import shift_power_matrix

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class ShiftItem:
    """The conditional shift raised to an integer power."""

    power: int


@dataclass(frozen=True)
class CoinItem:
    """One layer of cell-local unitaries; absent cells act as identity."""

    coins: dict[int, np.ndarray]


ProtocolItem = ShiftItem | CoinItem


def _coin_matrix(structure: CellStructure, item: CoinItem) -> np.ndarray:
    mat = np.eye(structure.total_dim, dtype=np.complex128)
    for cell, block in item.coins.items():
        s = structure.cell_slice(cell)
        mat[s, s] = block
    return mat


def item_matrix(structure: CellStructure, item: ProtocolItem) -> np.ndarray:
    if isinstance(item, ShiftItem):
        return shift_power_matrix(structure, item.power)
    return _coin_matrix(structure, item)


def _pruned_coins(
    coins: dict[int, np.ndarray], tol: float
) -> dict[int, np.ndarray]:
    kept = {}
    for cell, block in sorted(coins.items()):
        d = block.shape[0]
        if np.abs(block - np.eye(d)).max() > tol:
            kept[cell] = block
    return kept


@dataclass(frozen=True)
class Protocol:
    structure: CellStructure
    items: tuple[ProtocolItem, ...]

    @property
    def shift_count(self) -> int:
        return sum(1 for it in self.items if isinstance(it, ShiftItem))

    @property
    def coin_count(self) -> int:
        return sum(1 for it in self.items if isinstance(it, CoinItem))

    @property
    def net_shift(self) -> int:
        return sum(it.power for it in self.items if isinstance(it, ShiftItem))

    def optimize(self, tol: float = IDENTITY_TOL) -> "Protocol":
        """Fuse adjacent items of the same kind and drop identity items.

        Adjacent shifts add their powers; adjacent coin layers multiply
        cellwise.  Runs to a fixed point.  The evaluated operator is
        unchanged up to roundoff.
        """
        items = list(self.items)
        changed = True
        while changed:
            changed = False
            fused: list[ProtocolItem] = []
            for it in items:
                prev = fused[-1] if fused else None
                if isinstance(it, ShiftItem) and isinstance(prev, ShiftItem):
                    fused[-1] = ShiftItem(prev.power + it.power)
                    changed = True
                elif isinstance(it, CoinItem) and isinstance(prev, CoinItem):
                    merged = dict(prev.coins)
                    # prev acts after it, so prev's block multiplies from the left
                    for cell, block in it.coins.items():
                        if cell in merged:
                            merged[cell] = merged[cell] @ block
                        else:
                            merged[cell] = block
                    fused[-1] = CoinItem(merged)
                    changed = True
                else:
                    fused.append(it)
            kept: list[ProtocolItem] = []
            for it in fused:
                if isinstance(it, ShiftItem) and it.power == 0:
                    changed = True
                    continue
                if isinstance(it, CoinItem):
                    pruned = _pruned_coins(it.coins, tol)
                    if not pruned:
                        changed = True
                        continue
                    if len(pruned) != len(it.coins):
                        changed = True
                    it = CoinItem(pruned)
                kept.append(it)
            items = kept
        return Protocol(self.structure, tuple(items))

    def __len__(self) -> int:
        return len(self.items)


def protocol_stats(protocol: Protocol) -> dict[str, int]:
    """Size summary: item count, shift count, total hop distance, coin layers."""
    return {
        "num_items": len(protocol.items),
        "num_shifts": protocol.shift_count,
        "total_shift_distance": sum(
            abs(it.power) for it in protocol.items if isinstance(it, ShiftItem)
        ),
        "num_coin_layers": protocol.coin_count,
    }
