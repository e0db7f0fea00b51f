import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigroup_lab.circle import ArcSet, ball, parse_arcset
from semigroup_lab.generators import SemigroupSystem
from semigroup_lab.recurrence import (
    action_ball_return_time,
    action_return_time,
    cesaro_kac,
    dynball_return_ratio,
    first_return_time,
    fit_rate,
    geometric_grid,
    kac_integral_estimate,
    rotation_ball_bound_check,
    set_return_time,
    verify_recurrence,
)
from semigroup_lab.skew import FiberedOrbit
from semigroup_lab.symbols import BernoulliWalk, SymbolStream

S2 = SemigroupSystem.linear(2)
S23 = SemigroupSystem.linear(2, 3)
ONES = SymbolStream.cyclic("1")
ALT = SymbolStream.cyclic("12")


def test_first_return_examples():
    o = FiberedOrbit(S23, ALT, F(1, 7), exact=True)
    assert first_return_time(o, parse_arcset("[0,1/4)"), 100).value == 4
    o = FiberedOrbit(S2, ONES, F(1, 5), exact=True)
    assert first_return_time(o, parse_arcset("[0,1/2)"), 100).value == 1
    with pytest.raises(ValueError):
        first_return_time(o, parse_arcset("[1/2,1)"), 10)


def test_first_return_censors():
    # 3/10 -> 3/5 -> 1/5 -> 2/5 -> 4/5 -> 3/5 never comes back
    o = FiberedOrbit(S2, ONES, F(3, 10), exact=True)
    r = first_return_time(o, parse_arcset("[3/10,7/20)"), 9)
    assert r.censored and r.value == 9


def test_single_map_returns_match_brute_force():
    A = parse_arcset("[0,1/4)")
    for q in range(0, 64):
        x = F(q, 255)
        o = FiberedOrbit(S2, ONES, x, exact=True)
        y, k = x, 0
        while True:
            y, k = (2 * y) % 1, k + 1
            if A.contains(y):
                break
        assert first_return_time(o, A, 64).value == k


def test_kac_full_circle_is_exactly_one():
    est = kac_integral_estimate(S23, BernoulliWalk.symmetric(2), ArcSet.full(), 4096, 10, seed=1)
    assert est.mean == 1 and est.censored == 0


def test_kac_single_map_small_sample():
    est = kac_integral_estimate(S2, ONES, parse_arcset("[0,1/2)"), 40_000, 1000, seed=2)
    assert abs(est.mean - 2) < 3 * est.half_width + 1e-9
    assert est.mean >= 1


def test_cesaro_degenerate_shift_is_plain_kac():
    ck = cesaro_kac(S2, ONES, parse_arcset("[0,1/2)"), 3, 8192, 1000, seed=4)
    assert len(ck.per_shift) == 4
    assert all(abs(v - 2) < 0.1 for v in ck.per_shift)


def test_recurrence_fraction():
    rep = verify_recurrence(S23, BernoulliWalk.symmetric(2), ArcSet.full(), 1000, 1, seed=3)
    assert rep.fraction == 1
    rep = verify_recurrence(S2, ONES, parse_arcset("[0,1/10)"), 20_000, 1000, seed=3)
    assert rep.fraction >= 0.999


def test_set_return_examples():
    assert set_return_time(S2, ONES, parse_arcset("[3/10,7/20)"), 50) == 2
    assert set_return_time(S2, ONES, parse_arcset("[0,1/4)"), 50) == 1
    assert set_return_time(S23, ALT, parse_arcset("[0,1/100)"), 50) == 1


def test_action_ball_examples():
    assert action_ball_return_time(S23, F(0), F(1, 1000), 5) == 1
    assert action_ball_return_time(S2, F(1, 3), F(1, 20), 10) == 2
    t = action_ball_return_time(S23, F(3, 10), F(1, 1000), 40)
    assert t is not None and t <= math.ceil(-math.log(1e-3) / math.log(2)) + 2


def test_rotation_examples():
    rot = SemigroupSystem.parse("rotation:1/4")
    assert action_ball_return_time(rot, F(0), F(3, 10), 10) == 1
    rot = SemigroupSystem.parse("rotation:2/5")
    assert action_ball_return_time(rot, F(1, 7), F(1, 100), 10) == 5
    rep = rotation_ball_bound_check(["2/5", "1/3"], [F(1, 10), F(1, 40)], [F(0), F(1, 7)])
    assert rep.holds


def test_dynball_period_two_point():
    # the centre is itself 2-periodic, so the ball overlaps its second image at 1/3
    rows = dynball_return_ratio(S2, ONES, F(1, 3), F(1, 100), [10, 20, 40])
    assert [t for _, t, _ in rows] == [2, 2, 2]


def test_dynball_specification_bound_at_fixed_point():
    for n, t, _ in dynball_return_ratio(S23, ALT, F(0), F(1, 100), [5, 10, 20]):
        assert t <= n + 1


def test_fit_rate_recovers_line():
    pairs = [(d, round(-math.log(d) / math.log(2))) for d in geometric_grid(F(1, 10), F(1, 2), 10)]
    est = fit_rate(pairs)
    assert est.slope == pytest.approx(1 / math.log(2), rel=0.05)


unit = st.fractions(min_value=0, max_value=1).filter(lambda x: x < 1)
small = st.integers(2, 200).map(lambda k: F(1, k))


@given(unit, small, small)
@settings(max_examples=40, deadline=None)
def test_ball_return_monotone_in_delta(x, d1, d2):
    lo, hi = sorted((d1, d2))
    t_lo = action_ball_return_time(S23, x, lo, 40)
    t_hi = action_ball_return_time(S23, x, hi, 40)
    assert t_lo is not None and t_hi is not None and t_lo >= t_hi


@given(unit, st.integers(4, 40).map(lambda k: F(1, k)))
@settings(max_examples=30, deadline=None)
def test_bfs_equals_min_over_words(x, delta):
    A = ball(x, delta).to_arcset()
    bfs = action_return_time(S23, A, 8)
    best = None
    for k in range(1, 9):
        for word in itertools.product((1, 2), repeat=k):
            t = set_return_time(S23, SymbolStream.cyclic(word), A, k)
            if t is not None:
                best = t if best is None else min(best, t)
        if best is not None and best <= k:
            break
    assert bfs == best
