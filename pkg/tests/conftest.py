"""Shared fixtures: the randomized walk corpus and protocol helpers."""

from dataclasses import dataclass

import numpy as np
import pytest

import shiftcoin as sc


@dataclass(frozen=True)
class CorpusEntry:
    walk: sc.BandedUnitary
    cell_dim: int
    num_cells: int
    band: int
    net: int
    seed: int

    def label(self) -> str:
        return (
            f"d{self.cell_dim}-m{self.num_cells}-L{self.band}"
            f"-n{self.net}-s{self.seed}"
        )


def corpus_params():
    """Parameter grid for the shared walk corpus.

    Constraints: the ring must hold at least two decoupling windows on the
    fixed grid (m divisible by 2L, m >= 4L) and leave room to measure the
    index of the shifted walk (m >= 4(L + |n|)).
    """
    params = []
    for cell_dim in (2, 3, 4):
        for num_cells in range(4, 13):
            for band in (1, 2):
                if num_cells % (2 * band):
                    continue
                for net in range(-2, 3):
                    if num_cells < 4 * (band + abs(net)):
                        continue
                    for seed in range(5):
                        params.append((cell_dim, num_cells, band, net, seed))
    return params


@pytest.fixture(scope="session")
def corpus():
    entries = []
    for idx, (cell_dim, num_cells, band, net, seed) in enumerate(corpus_params()):
        structure = sc.CellStructure((cell_dim,) * num_cells)
        walk = sc.random_banded_unitary(
            structure, band, net_shift=net, seed=7000 + idx
        )
        entries.append(
            CorpusEntry(walk, cell_dim, num_cells, band, net, seed)
        )
    return entries


@pytest.fixture(scope="session")
def compiled_corpus(corpus):
    """Corpus entries with their compile results and verification reports."""
    out = []
    for entry in corpus:
        result = sc.compile_walk(entry.walk)
        report = sc.verify(result.protocol, entry.walk)
        out.append((entry, result, report))
    return out


def make_random_protocol(
    structure: sc.CellStructure,
    rng: np.random.Generator,
    num_items: int = 6,
    max_shifts: int = 3,
) -> sc.Protocol:
    """Random mix of small shifts and Haar coin layers."""
    items = []
    shifts_left = max_shifts
    for _ in range(num_items):
        if shifts_left and rng.random() < 0.4:
            items.append(sc.ShiftItem(int(rng.choice([-1, 1]))))
            shifts_left -= 1
        else:
            cells = rng.choice(
                structure.num_cells,
                size=rng.integers(1, structure.num_cells + 1),
                replace=False,
            )
            coins = {
                int(x): sc.haar_unitary(structure.cell_dim(int(x)), rng)
                for x in cells
            }
            items.append(sc.CoinItem(coins))
    return sc.Protocol(structure, tuple(items))


def items_equal(a, b, tol: float = 0.0) -> bool:
    """Structural equality of item tuples (kind, power, coin cells, blocks)."""
    if len(a) != len(b):
        return False
    for left, right in zip(a, b):
        if type(left) is not type(right):
            return False
        if isinstance(left, sc.ShiftItem):
            if left.power != right.power:
                return False
        else:
            if sorted(left.coins) != sorted(right.coins):
                return False
            for cell in left.coins:
                if np.abs(left.coins[cell] - right.coins[cell]).max() > tol:
                    return False
    return True
