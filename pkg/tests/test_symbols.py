import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semigroup_lab.symbols import (
    BernoulliWalk,
    PeriodicMixture,
    SymbolStream,
    bernoulli_entropy,
    next_symbol,
    parse_walk,
    shift,
    two_block_frequencies,
)

SYM = BernoulliWalk((0.5, 0.5))


def test_cyclic_and_shift():
    s = SymbolStream.cyclic((1, 2))
    assert list(s.take(4)) == [1, 2, 1, 2]
    assert list(shift(s, 1).take(4)) == [2, 1, 2, 1]
    assert shift(s, 0) == s
    sym, rest = next_symbol(s)
    assert sym == 1 and rest.at(0) == 2


def test_explicit_prefix_then_tail():
    s = SymbolStream.explicit("21", "1")
    assert list(s.take(5)) == [2, 1, 1, 1, 1]
    assert not s.is_constant
    assert s.shift(1).is_constant


def test_degenerate_walks_rejected():
    for a in [(1.0, 0.0), (0.7, 0.2), (1.2, -0.2), ()]:
        with pytest.raises(ValueError):
            BernoulliWalk(a)
    with pytest.raises(ValueError):
        PeriodicMixture((((1,), F(1, 2)),))


def test_sampled_frequency_law_of_large_numbers():
    s = SymbolStream.sampled(SYM, 42)
    freq = (s.take(10**6) == 1).mean()
    assert 0.499 <= freq <= 0.501


def test_reproducible_and_random_access():
    a = SymbolStream.sampled(SYM, 3, 9)
    b = SymbolStream.sampled(SYM, 3, 9)
    assert np.array_equal(a.take(20_000), b.take(20_000))
    assert a.at(12_345) == a.take(1, offset=12_345)[0]
    assert not np.array_equal(a.take(64), SymbolStream.sampled(SYM, 3, 10).take(64))


@given(st.integers(0, 10_000), st.integers(0, 10_000))
@settings(max_examples=30)
def test_shift_semigroup(j, k):
    s = SymbolStream.sampled(SYM, 1)
    assert np.array_equal(s.shift(j).shift(k).take(50), s.shift(j + k).take(50))


def test_two_block_stationarity():
    s = SymbolStream.sampled(BernoulliWalk((0.3, 0.7)), 5)
    n = 200_000
    f0 = two_block_frequencies(s.take(n), 2)
    f7 = two_block_frequencies(s.shift(7).take(n), 2)
    assert np.abs(f0 - f7).max() < 3 / math.sqrt(n)


def test_entropy_values():
    assert bernoulli_entropy(SYM) == pytest.approx(math.log(2))
    assert bernoulli_entropy(BernoulliWalk.symmetric(5)) == pytest.approx(math.log(5))
    assert bernoulli_entropy(BernoulliWalk((0.25, 0.75))) == pytest.approx(0.5623, abs=1e-4)


def test_parse_walk():
    assert parse_walk("bernoulli:1/4,3/4") == BernoulliWalk((0.25, 0.75))
    assert parse_walk("cyclic:12") == SymbolStream.cyclic((1, 2))
    mix = parse_walk("mixture:1=1/3,2=2/3")
    assert mix.symbol_frequencies() == {1: F(1, 3), 2: F(2, 3)}
    with pytest.raises(ValueError):
        parse_walk("markov:1")
