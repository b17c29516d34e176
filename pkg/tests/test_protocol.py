import numpy as np
import pytest

import shiftcoin as sc
from shiftcoin.protocol import item_matrix
from shiftcoin.walks import shift_power_matrix

from conftest import items_equal, make_random_protocol


def test_item_matrix_shift():
    cs = sc.CellStructure((2, 3, 2))
    np.testing.assert_allclose(
        item_matrix(cs, sc.ShiftItem(2)), shift_power_matrix(cs, 2)
    )


def test_item_matrix_coin_fills_identity():
    cs = sc.CellStructure((2, 2, 2))
    u = sc.haar_unitary(2, np.random.default_rng(0))
    mat = item_matrix(cs, sc.CoinItem({1: u}))
    expect = np.eye(6, dtype=complex)
    expect[2:4, 2:4] = u
    np.testing.assert_allclose(mat, expect)


def test_coin_item_rejects_bad_block():
    cs = sc.CellStructure((2, 3))
    with pytest.raises(ValueError):
        item_matrix(cs, sc.CoinItem({1: np.eye(2)}))


def test_last_item_acts_first():
    cs = sc.CellStructure((2, 2))
    u = sc.haar_unitary(2, np.random.default_rng(1))
    proto = sc.Protocol(cs, (sc.CoinItem({0: u}), sc.ShiftItem(1)))
    got = sc.evaluate(proto)
    expect = item_matrix(cs, sc.CoinItem({0: u})) @ shift_power_matrix(cs, 1)
    np.testing.assert_allclose(got, expect)


def test_counts_and_net_shift():
    cs = sc.CellStructure((2,) * 4)
    proto = sc.Protocol(
        cs,
        (
            sc.ShiftItem(7),
            sc.CoinItem({0: np.eye(2, dtype=complex)}),
            sc.ShiftItem(-1),
        ),
    )
    assert len(proto) == 3
    assert proto.shift_count == 2
    assert proto.coin_count == 1
    # arithmetic sum, deliberately not reduced mod the ring size
    assert proto.net_shift == 6


def test_optimize_cancels_shifts():
    cs = sc.CellStructure((2,) * 4)
    proto = sc.Protocol(cs, (sc.ShiftItem(1), sc.ShiftItem(-1)))
    assert proto.optimize().items == ()


def test_optimize_merges_shift_runs():
    cs = sc.CellStructure((2,) * 4)
    proto = sc.Protocol(cs, (sc.ShiftItem(1), sc.ShiftItem(2), sc.ShiftItem(-1)))
    assert proto.optimize().items == (sc.ShiftItem(2),)


def test_optimize_merges_adjacent_coins():
    cs = sc.CellStructure((2, 2))
    rng = np.random.default_rng(2)
    a, b = sc.haar_unitary(2, rng), sc.haar_unitary(2, rng)
    proto = sc.Protocol(cs, (sc.CoinItem({0: a}), sc.CoinItem({0: b, 1: b})))
    merged = proto.optimize()
    assert len(merged) == 1
    coins = merged.items[0].coins
    np.testing.assert_allclose(coins[0], a @ b, atol=1e-14)
    np.testing.assert_allclose(coins[1], b, atol=1e-14)


def test_optimize_drops_identity_coins():
    cs = sc.CellStructure((2, 2))
    u = sc.haar_unitary(2, np.random.default_rng(3))
    proto = sc.Protocol(
        cs,
        (
            sc.CoinItem({0: u}),
            sc.CoinItem({0: u.conj().T, 1: np.eye(2, dtype=complex)}),
        ),
    )
    assert proto.optimize().items == ()


def test_optimize_preserves_evaluation():
    cs = sc.CellStructure((2, 3, 2, 3))
    rng = np.random.default_rng(4)
    for _ in range(10):
        proto = make_random_protocol(cs, rng)
        slim = proto.optimize()
        np.testing.assert_allclose(
            sc.evaluate(slim), sc.evaluate(proto), atol=1e-12
        )
        assert slim.net_shift == proto.net_shift


def test_optimize_is_idempotent():
    cs = sc.CellStructure((2, 2, 2, 2))
    rng = np.random.default_rng(5)
    for _ in range(10):
        once = make_random_protocol(cs, rng).optimize()
        twice = once.optimize()
        assert items_equal(once.items, twice.items)


def test_protocol_stats():
    cs = sc.CellStructure((2,) * 4)
    proto = sc.Protocol(
        cs,
        (
            sc.ShiftItem(2),
            sc.CoinItem({0: np.eye(2, dtype=complex)}),
            sc.ShiftItem(-3),
        ),
    )
    assert sc.protocol_stats(proto) == {
        "num_items": 3,
        "num_shifts": 2,
        "total_shift_distance": 5,
        "num_coin_layers": 1,
    }


def test_protocol_is_frozen():
    cs = sc.CellStructure((2, 2))
    proto = sc.Protocol(cs, (sc.ShiftItem(1),))
    with pytest.raises(AttributeError):
        proto.items = ()
