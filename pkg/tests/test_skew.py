from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigroup_lab.circle import ball
from semigroup_lab.generators import SemigroupSystem
from semigroup_lab.skew import (
    FiberedOrbit,
    dyn_ball,
    dyn_ball_as_arc,
    dyn_ball_contains,
    sandwich_radii,
    trace,
)
from semigroup_lab.symbols import SymbolStream

S2 = SemigroupSystem.linear(2)
S23 = SemigroupSystem.linear(2, 3)
ONES = SymbolStream.cyclic("1")
unit = st.fractions(min_value=0, max_value=1).filter(lambda x: x < 1)
cyclic_words = st.lists(st.integers(1, 2), min_size=1, max_size=5).map(lambda w: SymbolStream.cyclic(tuple(w)))


def test_orbit_examples():
    o = FiberedOrbit(S23, SymbolStream.cyclic("12"), F(1, 7), exact=True)
    assert o.points(5) == [F(1, 7), F(2, 7), F(6, 7), F(5, 7), F(1, 7)]
    assert o[0] == F(1, 7)
    assert FiberedOrbit(S2, ONES, F(1, 3), exact=True)[2] == F(1, 3)
    assert trace(S23, (1, 2), F(1, 10)) == [F(1, 10), F(1, 5), F(3, 5)]


def test_float_arm_survives_long_orbits():
    # plain doubles would collapse to 0 after ~53 doublings
    o = FiberedOrbit(S2, ONES, F(1, 3))
    assert o[200] == pytest.approx(1 / 3, abs=1e-12)
    assert o.error_bound(200) <= 2.0**-64


@given(cyclic_words, st.integers(1, 2**20 - 1), st.integers(0, 40))
@settings(max_examples=60)
def test_float_matches_exact(stream, q, n):
    x = F(q, 2**20 + 1)
    exact = FiberedOrbit(S23, stream, x, exact=True)[n]
    assert FiberedOrbit(S23, stream, x)[n] == pytest.approx(float(exact), abs=1e-9)


def test_dyn_ball_contains_examples():
    o = FiberedOrbit(S2, ONES, F(0), exact=True)
    assert not dyn_ball_contains(o, F(3, 10), F(1, 4), 1)
    assert dyn_ball_contains(o, F(1, 100), F(1, 20), 3)
    assert dyn_ball_contains(o, F(0), F(1, 20), 9)


def test_dyn_ball_as_arc_examples():
    arc = dyn_ball_as_arc(FiberedOrbit(S2, ONES, F(1, 2), exact=True), F(1, 10), 3)
    assert (arc.start, arc.length) == (F(1, 2) - F(1, 40), F(1, 20))
    o = FiberedOrbit(S23, SymbolStream.cyclic("12"), F(1, 3), exact=True)
    assert dyn_ball_as_arc(o, F(1, 10), 1) == ball(F(1, 3), F(1, 10))
    assert dyn_ball_as_arc(o, F(1, 10), 2).length == F(1, 10)


@given(cyclic_words, unit, st.integers(1, 8), st.integers(0, 200))
@settings(max_examples=60)
def test_dyn_ball_matches_pointwise_definition(stream, x, n, j):
    o = FiberedOrbit(S23, stream, x, exact=True)
    delta = F(1, 7)
    y = F(j, 201)
    assert dyn_ball(o, delta, n).contains(y) == dyn_ball_contains(o, y, delta, n) or \
        dyn_ball(o, delta, n).contains(y) != dyn_ball(o, delta, n).contains_closed(y)


@given(cyclic_words, unit, st.integers(1, 10))
@settings(max_examples=60)
def test_nesting_and_sandwich(stream, x, n):
    o = FiberedOrbit(S23, stream, x, exact=True)
    delta = F(1, 20)
    inner, outer = sandwich_radii(S23, delta, n)
    b_n, b_next = dyn_ball(o, delta, n), dyn_ball(o, delta, n + 1)
    assert (b_next & b_n) == b_next
    assert (b_n & ball(x, delta).to_arcset()) == b_n
    assert (ball(x, inner).to_arcset() & b_n) == ball(x, inner).to_arcset()
    assert (b_n & ball(x, outer).to_arcset()) == b_n
