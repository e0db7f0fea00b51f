import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigroup_lab.entropy import (
    CirclePartition,
    abramov_rokhlin_check,
    analytic_entropies,
    dyadic_partition,
    join_entropy,
    lyapunov_estimate,
    metric_entropy_estimate,
    refine_partition,
    variational_check,
)
from semigroup_lab.generators import SemigroupSystem
from semigroup_lab.symbols import BernoulliWalk, SymbolStream

S2 = SemigroupSystem.linear(2)
S23 = SemigroupSystem.linear(2, 3)
SYM = BernoulliWalk.symmetric(2)
LOG2, LOG3 = math.log(2), math.log(3)


def test_refine_examples():
    beta = dyadic_partition()
    assert refine_partition(S2, (1,), beta, 1) == beta
    assert refine_partition(S2, (1,), beta, 2) == CirclePartition.uniform(4)
    p = refine_partition(S23, (1, 2), beta, 3)
    assert len(p) == 12 and set(p.lengths) == {F(1, 12)}


def test_partition_rejects_overlaps():
    with pytest.raises(ValueError):
        CirclePartition.from_cuts([F(0), F(1, 2)]).__class__(
            (dyadic_partition().cells[0], dyadic_partition().cells[0]), None
        )


def test_single_map_entropy_is_log2():
    rep = metric_entropy_estimate(S2, SymbolStream.cyclic("1"), n_grid=(2, 4, 8))
    assert rep.values == pytest.approx([LOG2] * 3)


def test_analytic_values():
    an = analytic_entropies(S23, SYM)
    assert an.as_tuple() == pytest.approx((math.log(5), math.log(2.5), (LOG2 + LOG3) / 2, LOG2))
    assert an.as_tuple() == pytest.approx((1.609, 0.916, 0.896, 0.693), abs=5e-4)
    assert analytic_entropies(S2, BernoulliWalk((1.0,))).as_tuple() == pytest.approx((LOG2, LOG2, LOG2, 0))
    twin = analytic_entropies(SemigroupSystem.linear(2, 2), SYM)
    assert twin.as_tuple() == pytest.approx((math.log(4), LOG2, LOG2, LOG2))


def test_skew_entropy_is_log_p_plus_action_entropy():
    an = analytic_entropies(S23, SYM)
    assert an.htop_skew == pytest.approx(math.log(2) + an.htop_action)


def test_variational_examples():
    rep = variational_check(S23, BernoulliWalk((0.25, 0.75)), estimate=0.99)
    assert dict(rep.chain)["htop_action_plus_defect"] == pytest.approx(1.047, abs=1e-3)
    assert dict(rep.chain)["quenched_pressure"] == pytest.approx(0.9972, abs=1e-4)
    assert rep.holds
    rep = variational_check(S23, SYM, estimate=(LOG2 + LOG3) / 2)
    assert rep.holds and math.log(2.5) - rep.estimate == pytest.approx(0.020, abs=1e-3)


def test_entropy_estimate_for_symmetric_walk():
    rep = metric_entropy_estimate(S23, SYM, n_grid=(4, 6, 8, 10), samples=200, seed=5)
    assert abs(rep.limit - (LOG2 + LOG3) / 2) < 0.05
    assert all(v >= 0 for v in rep.values)


def test_lyapunov_matches_analytic():
    est = lyapunov_estimate(S23, BernoulliWalk((0.25, 0.75)), n=2000, samples=256, seed=1)
    assert est.analytic == pytest.approx(0.25 * LOG2 + 0.75 * LOG3)
    assert abs(est.value - est.analytic) < 0.01
    single = lyapunov_estimate(S2, BernoulliWalk((1.0,)), n=100, samples=16)
    assert single.value == pytest.approx(LOG2)


def test_abramov_rokhlin_twin_doubling_is_tight():
    rep = abramov_rokhlin_check(SemigroupSystem.linear(2, 2), SYM, n_grid=(4, 5, 6), fiber_estimate=LOG2)
    assert rep.skew_limit == pytest.approx(math.log(4), abs=1e-9)
    assert rep.holds


@given(st.lists(st.integers(1, 2), min_size=1, max_size=8))
@settings(max_examples=40, deadline=None)
def test_join_entropy_exact_oracle(word):
    # dyadic beta, linear maps: every cell has length 1/(2 * prod of the first n-1 degrees)
    n = len(word) + 1
    expected = math.log(2) + sum(math.log(S23.degrees[s - 1]) for s in word)
    assert join_entropy(S23, tuple(word), dyadic_partition(), n) == pytest.approx(expected)
    assert join_entropy(S23, tuple(word), dyadic_partition(), n) >= join_entropy(S23, tuple(word), dyadic_partition(), n - 1)
