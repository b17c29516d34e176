"""Execution of protocols: dense evaluation, state application, checking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .protocol import CoinItem, Protocol, ShiftItem, item_matrix
from .walks import BandedUnitary, _shift_permutation

VERIFY_TOL_PER_DIM = 1e-9


def evaluate(protocol: Protocol) -> np.ndarray:
    """Dense matrix of the protocol: the product of its items as listed."""
    acc = np.eye(protocol.structure.total_dim, dtype=np.complex128)
    for item in protocol.items:
        acc = acc @ item_matrix(protocol.structure, item)
    return acc


class ProtocolRunner:
    """Applies a protocol to state vectors without building dense matrices.

    Shift items become index permutations; coin layers go through the
    compiled block kernel (or its numpy fallback).
    """

    def __init__(self, protocol: Protocol):
        cs = protocol.structure
        self.structure = cs
        self._offsets = np.ascontiguousarray(cs.offsets, dtype=np.int64)
        self._ops: list[tuple[str, np.ndarray]] = []
        # reversed: the last listed item acts first
        for item in reversed(protocol.items):
            if isinstance(item, ShiftItem):
                self._ops.append(("shift", _shift_permutation(cs, 1, item.power)))
            else:
                packed = _kernels.pack_coin_blocks(self._offsets, item.coins)
                self._ops.append(("coin", packed))

    def apply(self, state: np.ndarray) -> np.ndarray:
        state = np.asarray(state, dtype=np.complex128)
        if state.shape != (self.structure.total_dim,):
            raise ValueError(
                f"state shape {state.shape} does not match dim "
                f"{self.structure.total_dim}"
            )
        cur = state.copy()
        out = np.empty_like(cur)
        for kind, data in self._ops:
            if kind == "shift":
                out[data] = cur
            else:
                _kernels.apply_coin_blocks(data, self._offsets, cur, out)
            cur, out = out, cur
        return cur


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    error: float
    tol: float
    item_count: int
    shift_count: int
    coin_count: int
    net_shift: int

    def summary(self) -> str:
        status = "OK" if self.ok else "MISMATCH"
        return (
            f"{status}: |protocol - walk|_F = {self.error:.3e} "
            f"(tol {self.tol:.3e}), {self.item_count} items "
            f"({self.shift_count} shifts, {self.coin_count} coin layers, "
            f"net shift {self.net_shift})"
        )


def verify(
    protocol: Protocol, walk: BandedUnitary, tol: float | None = None
) -> VerifyReport:
    """Compare the evaluated protocol against a target walk in Frobenius norm."""
    if protocol.structure.dims != walk.structure.dims:
        raise ValueError(
            f"cell structure mismatch: protocol {protocol.structure.dims} "
            f"vs walk {walk.structure.dims}"
        )
    if tol is None:
        tol = VERIFY_TOL_PER_DIM * np.sqrt(walk.total_dim)
    error = float(np.linalg.norm(evaluate(protocol) - walk.matrix))
    return VerifyReport(
        ok=error <= tol,
        error=error,
        tol=float(tol),
        item_count=len(protocol),
        shift_count=protocol.shift_count,
        coin_count=protocol.coin_count,
        net_shift=protocol.net_shift,
    )
