import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semigroup_lab.circle import Arc, ArcSet
from semigroup_lab.errors import NoFiniteFixError, SingularDerivativeError, UnknownGeneratorError
from semigroup_lab.generators import (
    LinearExpanding,
    Logistic,
    Rotation,
    SemigroupSystem,
    SineSquared,
    parse_generator,
    periodic_points,
    word_eval,
)

S23 = SemigroupSystem.linear(2, 3)
unit = st.fractions(min_value=0, max_value=1).filter(lambda x: x < 1)
words = st.lists(st.integers(1, 2), min_size=1, max_size=6).map(tuple)


def test_eval_examples():
    assert LinearExpanding(2).eval(0.7) == pytest.approx(0.4)
    assert Logistic().eval(F(3, 4)) == F(3, 4)
    assert Logistic().eval(SineSquared(F(1, 3))) == SineSquared(F(2, 3))
    assert float(SineSquared(F(2, 3))) == pytest.approx(0.75)


def test_word_eval_examples():
    assert word_eval(S23, (1, 2), F(1, 10)) == F(3, 5)
    assert word_eval(S23, (), F(2, 7)) == F(2, 7)
    assert word_eval(S23, (1, 2, 1, 2), F(1, 7)) == F(1, 7)
    with pytest.raises(UnknownGeneratorError):
        word_eval(S23, (3,), F(0))


def test_log_derivatives():
    assert LinearExpanding(3).log_abs_derivative(0.2) == pytest.approx(1.0986, abs=1e-4)
    assert Rotation(F(3, 10)).log_abs_derivative(0.5) == 0
    assert Logistic().log_abs_derivative(0) == pytest.approx(math.log(4))
    with pytest.raises(SingularDerivativeError):
        Logistic().log_abs_derivative(F(1, 2))


def test_arc_images():
    assert LinearExpanding(3).arc_image(Arc(F(4, 5), F(1, 10))) == ArcSet([(F(2, 5), F(7, 10))])
    assert LinearExpanding(3).arc_image(Arc(F(0), F(2, 5))).is_full
    assert Logistic().arc_image(Arc(F(1, 5), F(1, 10))) == ArcSet([(F(16, 25), F(21, 25))])
    assert Rotation(F(1, 4)).arc_image(Arc(F(7, 8), F(1, 4))) == ArcSet([(F(1, 8), F(3, 8))])


def test_periodic_point_examples():
    one = SemigroupSystem.linear(2)
    assert periodic_points(one, (1,)) == [0]
    assert periodic_points(one, (1, 1)) == [0, F(1, 3), F(2, 3)]
    assert periodic_points(S23, (1, 2)) == [F(m, 5) for m in range(5)]
    with pytest.raises(NoFiniteFixError):
        SemigroupSystem.parse("rotation:1/3").periodic_points((1,))


def test_logistic_periodic_points_include_both_conjugate_families():
    logi = SemigroupSystem.parse("logistic")
    angles = {z.angle for z in logi.periodic_points((1, 1))}
    assert angles == {F(0), F(1, 5), F(2, 5), F(1, 3)}
    # h(1/5) has exact period 2; h(1/3) = 3/4 is the non-zero fixed point
    for z in logi.periodic_points((1, 1, 1)):
        assert logi.word_eval((1, 1, 1), z) == z
    assert len(logi.periodic_points((1, 1, 1))) == 8  # 2^3 solutions of a degree-8 polynomial


def test_parse_generator():
    assert isinstance(parse_generator(" Linear:5 "), LinearExpanding)
    assert parse_generator("rotation:2/5").alpha == F(2, 5)
    for bad in ("linear:1", "rotation:3/2", "tent", "logistic:2"):
        with pytest.raises(ValueError):
            parse_generator(bad)


@given(words)
def test_periodic_points_are_fixed(word):
    for x in periodic_points(S23, word):
        assert word_eval(S23, word, x) == x
    assert len(periodic_points(S23, word)) == S23.word_degree(word) - 1


@given(words, words, unit)
def test_word_concatenation_acts_first_word_first(u, v, x):
    assert word_eval(S23, u + v, x) == word_eval(S23, v, word_eval(S23, u, x))


@given(st.integers(2, 5), unit, st.fractions(min_value=0, max_value=1))
def test_linear_image_length(k, start, length):
    img = LinearExpanding(k).arc_image(Arc(start, length))
    assert img.length == min(1, k * Arc(start, length).length)


@given(st.integers(2, 4), unit, st.fractions(min_value=F(1, 100), max_value=F(9, 10)))
def test_preimages_cover_the_arc(k, start, length):
    g = LinearExpanding(k)
    target = Arc(start, length)
    pieces = g.arc_preimage(target)
    assert sum(p.length for p in pieces) == target.length
    for p in pieces:
        assert g.arc_image(p) == target.to_arcset()
