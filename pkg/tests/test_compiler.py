import numpy as np
import pytest

import shiftcoin as sc
from shiftcoin.decoupling import Window


SWAP2 = np.array([[0, 1], [1, 0]], dtype=complex)


def _random_core(rng):
    return sc.haar_unitary(2, rng)


def test_embed_site_pair_layout():
    cs = sc.CellStructure((2, 3))
    core = np.array([[0, 1j], [1j, 0]], dtype=complex)
    mat = sc.embed_site_pair(cs, sc.SiteLabel(0, 2), sc.SiteLabel(1, 3), core)
    fa, fb = cs.flat_index((0, 2)), cs.flat_index((1, 3))
    assert mat[fa, fb] == 1j and mat[fb, fa] == 1j
    assert mat[fa, fa] == 0 and mat[fb, fb] == 0
    others = [k for k in range(5) if k not in (fa, fb)]
    np.testing.assert_array_equal(mat[np.ix_(others, others)], np.eye(3))


def test_same_cell_pair_is_one_coin():
    cs = sc.CellStructure((3,) * 4)
    core = _random_core(np.random.default_rng(40))
    items = sc.lower_site_pair(cs, sc.SiteLabel(2, 1), sc.SiteLabel(2, 3), core)
    assert len(items) == 1
    assert isinstance(items[0], sc.CoinItem)
    assert set(items[0].coins) == {2}
    got = sc.evaluate(sc.Protocol(cs, tuple(items)))
    want = sc.embed_site_pair(cs, sc.SiteLabel(2, 1), sc.SiteLabel(2, 3), core)
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_cross_cell_fragment_golden():
    cs = sc.CellStructure((2, 2))
    core = _random_core(np.random.default_rng(41))
    items = sc.lower_site_pair(cs, sc.SiteLabel(0, 1), sc.SiteLabel(1, 1), core)
    assert len(items) == 5
    swap, down, meet, up, swap2 = items
    np.testing.assert_array_equal(swap.coins[1], SWAP2)
    assert list(swap.coins) == [1]
    assert down == sc.ShiftItem(-1)
    np.testing.assert_allclose(meet.coins[1], core)
    assert up == sc.ShiftItem(1)
    np.testing.assert_array_equal(swap2.coins[1], SWAP2)


def test_cross_cell_fragment_wraps_short_way():
    cs = sc.CellStructure((2,) * 6)
    core = _random_core(np.random.default_rng(42))
    items = sc.lower_site_pair(cs, sc.SiteLabel(0, 2), sc.SiteLabel(5, 2), core)
    shifts = [it.power for it in items if isinstance(it, sc.ShiftItem)]
    assert sorted(shifts) == [-1, 1]
    got = sc.evaluate(sc.Protocol(cs, tuple(items)))
    want = sc.embed_site_pair(cs, sc.SiteLabel(0, 2), sc.SiteLabel(5, 2), core)
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_identical_sites_rejected():
    cs = sc.CellStructure((2, 2))
    with pytest.raises(ValueError):
        sc.lower_site_pair(cs, sc.SiteLabel(0, 1), sc.SiteLabel(2, 1), np.eye(2))


def test_fragment_matches_embedding_randomized():
    rng = np.random.default_rng(43)
    for _ in range(20):
        m = int(rng.integers(4, 9))
        dims = tuple(int(d) for d in rng.integers(2, 5, size=m))
        cs = sc.CellStructure(dims)
        x = int(rng.integers(m))
        y = int((x + rng.integers(1, m)) % m)
        a = sc.SiteLabel(x, int(rng.integers(1, cs.cell_dim(x) + 1)))
        b = sc.SiteLabel(y, int(rng.integers(1, cs.cell_dim(y) + 1)))
        core = _random_core(rng)
        got = sc.evaluate(sc.Protocol(cs, tuple(sc.lower_site_pair(cs, a, b, core))))
        want = sc.embed_site_pair(cs, a, b, core)
        np.testing.assert_allclose(got, want, atol=1e-12)


def _disjoint_windows(cs, cells_a, cells_b, rng):
    dims = tuple(cs.cell_dim(c) for c in cells_a)
    total = sum(dims)
    wa = Window(cells_a, dims, sc.haar_unitary(total, rng))
    wb = Window(cells_b, dims, sc.haar_unitary(total, rng))
    return wa, wb


def test_compile_class_merges_disjoint_windows():
    cs = sc.CellStructure((2,) * 6)
    rng = np.random.default_rng(44)
    wa, wb = _disjoint_windows(cs, (0, 1), (3, 4), rng)
    decomps = (sc.decompose_block(wa.matrix), sc.decompose_block(wb.matrix))
    items = sc.compile_class(cs, (wa, wb), decomps)
    got = sc.evaluate(sc.Protocol(cs, tuple(items)))

    want = np.eye(cs.total_dim, dtype=complex)
    for win in (wa, wb):
        flat = np.concatenate([cs.cell_indices(c) for c in win.cells])
        want[np.ix_(flat, flat)] = win.matrix
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_compile_class_member_can_sit_out():
    # one member is the identity: it contributes no rotations, and the
    # shared shifts must leave its cells untouched
    cs = sc.CellStructure((2,) * 6)
    rng = np.random.default_rng(45)
    dims = (2, 2)
    wa = Window((0, 1), dims, sc.haar_unitary(4, rng))
    wb = Window((3, 4), dims, np.eye(4, dtype=complex))
    decomps = (sc.decompose_block(wa.matrix), sc.decompose_block(wb.matrix))
    items = sc.compile_class(cs, (wa, wb), decomps)
    got = sc.evaluate(sc.Protocol(cs, tuple(items)))
    want = np.eye(cs.total_dim, dtype=complex)
    flat = np.concatenate([cs.cell_indices(c) for c in wa.cells])
    want[np.ix_(flat, flat)] = wa.matrix
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_out_of_order_member_rejected():
    cs = sc.CellStructure((2,) * 6)
    rng = np.random.default_rng(46)
    wa, wb = _disjoint_windows(cs, (0, 1), (3, 4), rng)
    f = lambda i, j: sc.TwoLevelFactor(i, j, sc.haar_unitary(2, rng))
    good = sc.TwoLevelDecomposition(4, (f(0, 1), f(1, 2)), np.ones(4))
    bad = sc.TwoLevelDecomposition(4, (f(1, 2), f(0, 1)), np.ones(4))
    with pytest.raises(sc.SkeletonMismatchError):
        sc.compile_class(cs, (wa, wb), (good, bad))


def test_compile_walk_reconstructs():
    cs = sc.CellStructure((2,) * 6)
    walk = sc.random_banded_unitary(cs, 1, seed=47)
    result = sc.compile_walk(walk)
    report = sc.verify(result.protocol, walk)
    assert report.ok, report.summary()
    raw = sc.verify(result.raw_protocol, walk)
    assert raw.ok, raw.summary()
    assert result.net_shift == 0
    assert len(result.protocol) <= len(result.raw_protocol)


def test_compile_walk_strips_net_shift():
    cs = sc.CellStructure((2,) * 12)
    walk = sc.random_banded_unitary(cs, 1, net_shift=2, seed=48)
    result = sc.compile_walk(walk)
    assert result.net_shift == 2
    assert result.raw_protocol.items[0] == sc.ShiftItem(2)
    assert sc.verify(result.protocol, walk).ok


def test_compile_walk_negative_shift():
    cs = sc.CellStructure((2,) * 12)
    walk = sc.random_banded_unitary(cs, 1, net_shift=-1, seed=49)
    result = sc.compile_walk(walk)
    assert result.net_shift == -1
    assert sc.verify(result.protocol, walk).ok


def test_compile_walk_saturated_band_falls_back():
    cs = sc.CellStructure((2,) * 4)
    walk = sc.random_banded_unitary(cs, 2, seed=50)
    result = sc.compile_walk(walk)
    assert result.net_shift == 0
    assert result.decoupling.cuts == ()
    assert sc.verify(result.protocol, walk).ok


def test_compile_walk_mixed_dims():
    cs = sc.CellStructure((2, 3, 2, 4, 2, 3))
    walk = sc.random_banded_unitary(cs, 1, seed=51)
    result = sc.compile_walk(walk)
    assert sc.verify(result.protocol, walk).ok


def test_compile_walk_without_optimize():
    cs = sc.CellStructure((2,) * 6)
    walk = sc.random_banded_unitary(cs, 1, seed=52)
    result = sc.compile_walk(walk, optimize=False)
    from conftest import items_equal

    assert items_equal(result.protocol.items, result.raw_protocol.items)


def test_stage_error_carries_stage():
    err = sc.StageError("decouple", "window ranks disagree")
    assert err.stage == "decouple"
    assert "decouple" in str(err)
