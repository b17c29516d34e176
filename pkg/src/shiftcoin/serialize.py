"""JSON interchange for walks and protocols.

Complex entries are [re, im] pairs.  Walk files carry a dense "matrix"
(row-major); a "sparse" list of [row, col, re, im] entries is accepted on
input.  Protocol files list items in operator product order, matching the
in-memory convention: the last item acts first.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .cells import CellStructure
from .protocol import CoinItem, Protocol, ProtocolItem, ShiftItem
from .walks import BandedUnitary


def _encode_complex_matrix(mat: np.ndarray) -> list:
    out = np.empty(mat.shape + (2,), dtype=np.float64)
    out[..., 0] = mat.real
    out[..., 1] = mat.imag
    return out.tolist()


def _decode_complex_matrix(rows: Any, what: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(f"{what}: expected [[re, im], ...] rows")
    return arr[..., 0] + 1j * arr[..., 1]


def _decode_dims(obj: Any) -> CellStructure:
    dims = obj.get("dims")
    if not isinstance(dims, list) or not dims:
        raise ValueError('missing or empty "dims" list')
    if not all(isinstance(d, int) and d >= 2 for d in dims):
        raise ValueError('"dims" entries must be integers >= 2')
    return CellStructure(tuple(dims))


def walk_to_json(walk: BandedUnitary) -> dict:
    return {
        "dims": list(walk.structure.dims),
        "matrix": _encode_complex_matrix(walk.matrix),
    }


def walk_from_json(obj: Any) -> BandedUnitary:
    if not isinstance(obj, dict):
        raise ValueError("walk file must hold a JSON object")
    cs = _decode_dims(obj)
    n = cs.total_dim
    if "matrix" in obj:
        mat = _decode_complex_matrix(obj["matrix"], '"matrix"')
        if mat.shape != (n, n):
            raise ValueError(
                f'"matrix" is {mat.shape[0]}x{mat.shape[1]}, dims require {n}x{n}'
            )
    elif "sparse" in obj:
        mat = np.zeros((n, n), dtype=np.complex128)
        entries = obj["sparse"]
        if not isinstance(entries, list):
            raise ValueError('"sparse" must be a list of [row, col, re, im]')
        for entry in entries:
            if not (isinstance(entry, list) and len(entry) == 4):
                raise ValueError('"sparse" entries must be [row, col, re, im]')
            r, c = int(entry[0]), int(entry[1])
            if not (0 <= r < n and 0 <= c < n):
                raise ValueError(f"sparse entry ({r}, {c}) outside {n}x{n}")
            mat[r, c] = float(entry[2]) + 1j * float(entry[3])
    else:
        raise ValueError('walk file needs a "matrix" or "sparse" field')
    return BandedUnitary(cs, mat)


def protocol_to_json(protocol: Protocol) -> dict:
    items = []
    for item in protocol.items:
        if isinstance(item, ShiftItem):
            items.append({"shift": item.power})
        else:
            items.append(
                {
                    "coins": {
                        str(cell): _encode_complex_matrix(block)
                        for cell, block in sorted(item.coins.items())
                    }
                }
            )
    return {"dims": list(protocol.structure.dims), "items": items}


def protocol_from_json(obj: Any) -> Protocol:
    if not isinstance(obj, dict):
        raise ValueError("protocol file must hold a JSON object")
    cs = _decode_dims(obj)
    raw_items = obj.get("items")
    if not isinstance(raw_items, list):
        raise ValueError('missing "items" list')
    items: list[ProtocolItem] = []
    for pos, raw in enumerate(raw_items):
        if not isinstance(raw, dict):
            raise ValueError(f"item {pos}: expected an object")
        if "shift" in raw:
            if not isinstance(raw["shift"], int):
                raise ValueError(f'item {pos}: "shift" must be an integer')
            items.append(ShiftItem(raw["shift"]))
        elif "coins" in raw:
            coins = {}
            if not isinstance(raw["coins"], dict):
                raise ValueError(f'item {pos}: "coins" must be an object')
            for key, rows in raw["coins"].items():
                try:
                    cell = int(key)
                except ValueError as exc:
                    raise ValueError(
                        f"item {pos}: coin key {key!r} is not a cell number"
                    ) from exc
                if not (0 <= cell < cs.num_cells):
                    raise ValueError(
                        f"item {pos}: cell {cell} outside ring of {cs.num_cells}"
                    )
                block = _decode_complex_matrix(rows, f"item {pos} coin {key}")
                d = cs.cell_dim(cell)
                if block.shape != (d, d):
                    raise ValueError(
                        f"item {pos}: coin at cell {cell} is "
                        f"{block.shape[0]}x{block.shape[1]}, cell has dim {d}"
                    )
                coins[cell] = block
            items.append(CoinItem(coins))
        else:
            raise ValueError(f'item {pos}: needs a "shift" or "coins" field')
    return Protocol(cs, tuple(items))


def read_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def write_json(path: str | Path | None, obj: Any) -> None:
    text = json.dumps(obj)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")
