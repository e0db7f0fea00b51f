import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigroup_lab.circle import ArcSet, parse_arcset
from semigroup_lab.generators import SemigroupSystem
from semigroup_lab.hitting import (
    PeriodicOrbitMeasure,
    alpha_P_periodic,
    centered_arc,
    gamma_P_estimate,
    hitting_frequency,
    jenkinson_window,
)
from semigroup_lab.skew import FiberedOrbit
from semigroup_lab.symbols import PeriodicMixture, SymbolStream

DOUBLING = SemigroupSystem.linear(2)
MIXED = SemigroupSystem.parse("logistic,linear:2")
ONES = SymbolStream.cyclic("1")
PURE = PeriodicMixture((((1,), F(1)),))


def test_hitting_frequency_examples():
    o = FiberedOrbit(DOUBLING, ONES, F(1, 3), exact=True)
    hf = hitting_frequency(o, parse_arcset("[3/5,7/10)"), 64)
    assert hf.value == F(1, 2) and hf.exact
    assert hitting_frequency(o, ArcSet.full(), 10).value == 1
    assert hitting_frequency(o, ArcSet(), 10).value == 0


def test_windows():
    w2 = jenkinson_window(2)
    assert w2.doubling == (F(1, 5), F(1, 3))
    assert w2.logistic == pytest.approx((0.3090, 0.5), abs=1e-4)
    assert w2.intersection == pytest.approx((0.3090, 1 / 3), abs=1e-4)
    assert jenkinson_window(1).doubling == (F(1, 3), F(1, 2))
    widths = [jenkinson_window(n).doubling[1] - jenkinson_window(n).doubling[0] for n in range(1, 8)]
    assert widths == sorted(widths, reverse=True)


@pytest.mark.parametrize("n, ell", [(2, F(1, 4)), (2, F(8, 25)), (3, F(3, 20))])
def test_alpha_doubling_is_one_over_n(n, ell):
    rep = alpha_P_periodic(DOUBLING, PURE, centered_arc(ell), max_period=2 * n)
    assert rep.value == F(1, n)
    assert 2 * n % rep.witnesses[0][0].period == 0


def test_alpha_full_circle():
    assert alpha_P_periodic(DOUBLING, PURE, ArcSet.full(), 4).value == 1


def test_mixed_system_n2():
    mix = PeriodicMixture((((1,), F(1, 3)), ((2,), F(2, 3))))
    A = centered_arc(F(8, 25))
    alpha = alpha_P_periodic(MIXED, mix, A, max_period=8)
    gamma = gamma_P_estimate(MIXED, mix, A, streams=2, grid=8, n=256, max_period=8)
    assert alpha.value == F(1, 2)
    assert gamma.value == F(1, 2)
    assert sum(w for _, w in alpha.marginal()) == 1


def test_gamma_common_fixed_point():
    rep = gamma_P_estimate(DOUBLING, PURE, parse_arcset("[9/10,1/10)"), streams=1, grid=4, n=64, max_period=4)
    assert rep.value == 1


@given(st.integers(1, 2), st.integers(1, 4))
@settings(max_examples=25, deadline=None)
def test_periodic_measures_are_invariant(symbol, length):
    word = (symbol,) * length
    for x in MIXED.periodic_points(word):
        mu = PeriodicOrbitMeasure(MIXED, word, x)
        assert mu.is_invariant()


@given(st.integers(3, 40).map(lambda k: F(1, k)), st.integers(0, 99).map(lambda j: F(j, 100)))
@settings(max_examples=20, deadline=None)
def test_alpha_never_exceeds_gamma(ell, offset):
    A = centered_arc(ell).rotate(offset)
    alpha = alpha_P_periodic(DOUBLING, PURE, A, max_period=6)
    gamma = gamma_P_estimate(DOUBLING, PURE, A, streams=1, grid=4, n=64, max_period=6)
    assert 0 <= alpha.value <= gamma.value <= 1
    assert not math.isnan(float(gamma.value))
