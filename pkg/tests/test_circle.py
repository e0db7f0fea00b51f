from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semigroup_lab.circle import Arc, ArcSet, ball, circle_dist, parse_arcset
from semigroup_lab.errors import InvalidRadiusError

unit = st.fractions(min_value=0, max_value=1).filter(lambda x: x < 1)
radius = st.fractions(min_value=F(1, 1000), max_value=F(1, 2))


@pytest.mark.parametrize("x, y, d", [(0.1, 0.9, 0.2), (0.3, 0.3, 0.0), (0.25, 0.5, 0.25)])
def test_circle_dist_examples(x, y, d):
    assert circle_dist(x, y) == pytest.approx(d, abs=1e-15)


def test_ball_examples():
    assert ball(F(1, 2), F(1, 10)) == Arc(F(2, 5), F(1, 5))
    assert ball(F(0), F(1, 10)) == Arc(F(9, 10), F(1, 5))
    assert ball(F(1, 3), F(3, 5)).is_full
    with pytest.raises(InvalidRadiusError):
        ball(0.5, 0)


def test_arcset_examples():
    assert parse_arcset("[0,1/4)U[1/2,3/4)").length == F(1, 2)
    a, b = parse_arcset("[0,1/4)"), parse_arcset("[1/4,1/2)")
    assert not a.intersects(b)
    assert a.intersects_closed(b)
    got = parse_arcset("[9/10,1)U[0,1/10)") & parse_arcset("[1/20,19/20)")
    assert got == parse_arcset("[1/20,1/10)U[9/10,19/20)")
    assert got.length == F(1, 10)


def test_wrap_and_closure_at_zero():
    a = parse_arcset("[9/10,1/10)")
    assert a.length == F(1, 5)
    assert len(a.arcs) == 1
    assert parse_arcset("[1/2,1)").intersects_closed(parse_arcset("[0,1/4)"))
    assert parse_arcset("[1/2,1)").contains_closed(0)
    assert not parse_arcset("[1/2,1)").contains(0)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_arcset("[0,1,2)")


@given(unit, unit, unit)
def test_metric_axioms(x, y, z):
    assert circle_dist(x, y) == circle_dist(y, x)
    assert 0 <= circle_dist(x, y) <= F(1, 2)
    assert circle_dist(x, z) <= circle_dist(x, y) + circle_dist(y, z)


@given(unit, radius, radius)
def test_ball_monotone(x, d1, d2):
    small, big = sorted((d1, d2))
    a, b = ball(x, small).to_arcset(), ball(x, big).to_arcset()
    assert (a & b) == a


@given(st.lists(st.tuples(unit, unit), max_size=5), unit)
def test_length_rotation_invariant_and_normalisation_idempotent(pairs, offset):
    a = ArcSet.from_arcs(Arc(lo, hi) for lo, hi in pairs)
    assert a.rotate(offset).length == a.length
    assert ArcSet(a.intervals) == a


@given(st.lists(st.tuples(unit, unit), max_size=4), st.lists(st.tuples(unit, unit), max_size=4))
def test_inclusion_exclusion(p, q):
    a = ArcSet.from_arcs(Arc(lo, ln) for lo, ln in p)
    b = ArcSet.from_arcs(Arc(lo, ln) for lo, ln in q)
    assert (a | b).length + (a & b).length == a.length + b.length
    assert a.complement().length == 1 - a.length
