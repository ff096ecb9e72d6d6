import math

import numpy as np
import pytest

from rsma_harq.channel import ChannelDraw
from rsma_harq.rsma import (Case, Interval, all_decodable, alpha_bounds, classify, cond1_holds, cond2_holds,
                            region_case, sinr_components)


def grid_set(pred, step=1e-4):
    """Brute-force feasible set of a predicate on an alpha grid."""
    pts = [a for a in np.linspace(0.0, 1.0, int(round(1 / step)) + 1) if pred(float(a))]
    return (pts[0], pts[-1]) if pts else None


def test_sinr_components_examples():
    s = sinr_components(ChannelDraw(4.0, 1.0), 0.5)
    assert (s.s11, s.s2, s.s12) == pytest.approx((0.5, 1 / 3, 2.0))
    s = sinr_components(ChannelDraw(7.0, 0.0), 1.0)
    assert (s.s11, s.s2, s.s12) == (7.0, 0.0, 0.0)
    s = sinr_components(ChannelDraw(3.0, 2.0), 0.0)
    assert (s.s11, s.s2, s.s12) == pytest.approx((0.0, 0.5, 3.0))
    with pytest.raises(ValueError):
        sinr_components(ChannelDraw(1.0, 1.0), 1.5)


def test_all_decodable_examples():
    d = ChannelDraw(4.0, 1.0)
    assert all_decodable(d, 1.0, 1.0, 1.0)
    assert all_decodable(ChannelDraw(0.3, 0.1), 0.4, 0.0, 0.0)
    assert not any(all_decodable(d, a, 3.0, 1.0) for a in np.linspace(0, 1, 1001))


def test_alpha_bounds_example_s_is_one_point():
    b = alpha_bounds(ChannelDraw(4.0, 1.0), 1.0, 1.0)
    assert b.alpha_l == pytest.approx(1.0)
    assert b.alpha_h == pytest.approx(1.125)
    assert b.s_set == Interval(1.0, 1.0)
    lo, hi = grid_set(lambda a: all_decodable(ChannelDraw(4.0, 1.0), a, 1.0, 1.0))
    assert lo == hi == 1.0


def test_alpha_bounds_sign_flip_example():
    b = alpha_bounds(ChannelDraw(4.0, 1.0), 3.0, 1.0)
    assert b.alpha_h == pytest.approx(2.25)
    assert b.cond1_feasible_set is None
    assert grid_set(lambda a: cond1_holds(4.0, 1.0, a, 3.0)) is None


def test_zero_rate_makes_cond2_vacuous():
    b = alpha_bounds(ChannelDraw(0.5, 0.01), 2.0, 0.0)
    assert b.cond2_feasible_set == Interval(0.0, 1.0)


@pytest.mark.parametrize("seed", range(30))
def test_feasible_sets_match_grid(seed):
    rng = np.random.default_rng(seed)
    g1, g2 = rng.exponential(100.0), rng.exponential(31.6)
    r1, r2 = rng.uniform(0.5, 8.0), rng.uniform(0.5, 8.0)
    b = alpha_bounds(ChannelDraw(g1, g2), r1, r2)
    for got, pred in ((b.cond1_set, lambda a: cond1_holds(g1, g2, a, r1)),
                      (b.cond2_set, lambda a: cond2_holds(g1, g2, a, r2))):
        want = grid_set(pred)
        if want is None:
            # an interval narrower than the grid step may still exist
            assert got is None or got.hi - got.lo < 1e-4
            continue
        assert got is not None
        assert got.lo <= want[0] + 1e-12 and got.hi >= want[1] - 1e-12
        assert want[0] - got.lo <= 1e-4 and got.hi - want[1] <= 1e-4
        assert pred(got.lo) and pred(got.hi)


def test_region_case_table():
    assert region_case(True, True) == Case.NO_RETX
    assert region_case(True, False) == Case.S2_ONLY
    assert region_case(False, True) == Case.S11_ONLY
    assert region_case(False, False) == Case.BOTH


def test_classify_s2_only_everywhere():
    # strong user 1, hopeless user 2: cond1 holds on [0, 1], cond2 nowhere
    b = alpha_bounds(ChannelDraw(1000.0, 0.1), 1.0, 6.0)
    assert b.cond1_set == Interval(0.0, 1.0) and b.cond2_set is None
    rc = classify(b)
    assert rc.case_id == Case.S2_ONLY
    assert [(r.lo, r.hi, r.case) for r in rc.regions] == [(0.0, 1.0, Case.S2_ONLY)]


def test_classify_three_regions():
    # search a draw with 0 < a1 < a2 < 1
    rng = np.random.default_rng(4)
    for _ in range(10_000):
        g1, g2 = rng.exponential(100.0), rng.exponential(31.6)
        r1, r2 = rng.uniform(1, 8), rng.uniform(1, 8)
        b = alpha_bounds(ChannelDraw(g1, g2), r1, r2)
        if b.cond1_set and b.cond2_set and 0 < b.cond1_set.hi < b.cond2_set.lo < 1:
            break
    else:
        pytest.fail("no three-region draw found")
    rc = classify(b)
    assert [r.case for r in rc.regions] == [Case.S2_ONLY, Case.BOTH, Case.S11_ONLY]
    a1, a2 = b.cond1_set.hi, b.cond2_set.lo
    assert rc.region_of(a1).case == Case.S2_ONLY
    assert rc.region_of(math.nextafter(a1, 1)).case == Case.BOTH
    assert rc.region_of(a2).case == Case.S11_ONLY
    assert rc.case_id == Case.MIXED


def test_classify_no_retx_iff_s_nonempty():
    b = alpha_bounds(ChannelDraw(4.0, 1.0), 1.0, 1.0)
    assert classify(b).case_id == Case.NO_RETX
    b = alpha_bounds(ChannelDraw(4.0, 1.0), 3.0, 1.0)
    assert b.s_set is None and classify(b).case_id != Case.NO_RETX
