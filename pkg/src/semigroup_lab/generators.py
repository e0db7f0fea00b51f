"""Generator maps g_1..g_p, the systems they form, and the words acting on S^1.

Words are tuples of symbols in ``1..p`` and act left to right: the first
symbol is applied first, so ``word_eval(S, (1, 2), x) == g_2(g_1(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Sequence

import numpy as np

from .circle import Arc, ArcSet, Number, is_exact, mod1, to_number
from .errors import (
    NoFiniteFixError,
    SingularDerivativeError,
    UnknownGeneratorError,
    UnsupportedGeneratorError,
)

Word = tuple[int, ...]


@dataclass(frozen=True)
class SineSquared:
    """The point ``sin^2(pi * angle)``, kept symbolically.

    ``h(y) = sin^2(pi y)`` conjugates doubling to the logistic map, so the
    logistic periodic points are exactly ``h`` of rational angles.
    """

    angle: Fraction

    def __post_init__(self):
        y = Fraction(self.angle) % 1
        object.__setattr__(self, "angle", min(y, 1 - y) if y else y)

    def __float__(self) -> float:
        return math.sin(math.pi * float(self.angle)) ** 2

    def doubled(self) -> "SineSquared":
        return SineSquared(2 * self.angle)


class GeneratorMap:
    """Common surface of the three generator families."""

    kind: str = ""
    #: whether ``arc_preimage`` and the exact-partition machinery apply
    linear = False

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        raise NotImplementedError

    def log_abs_derivative(self, x) -> float:
        raise NotImplementedError

    def arc_image(self, arc: Arc) -> ArcSet:
        raise NotImplementedError

    def arcset_image(self, a: ArcSet) -> ArcSet:
        out = ArcSet()
        for arc in a.arcs:
            out = out | self.arc_image(arc)
        return out

    @property
    def expansion(self) -> float:
        """``||Dg||`` when it is constant, else NaN."""
        return math.nan


@dataclass(frozen=True, repr=False)
class LinearExpanding(GeneratorMap):
    degree: int
    kind = "linear"
    linear = True

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 2:
            raise ValueError(f"linear expanding maps need an integer degree >= 2, got {self.degree}")

    def __repr__(self):
        return f"linear:{self.degree}"

    def eval(self, x):
        if isinstance(x, np.ndarray):
            return np.mod(self.degree * x, 1.0)
        if isinstance(x, SineSquared):
            raise UnsupportedGeneratorError("linear maps do not act on sin^2 points exactly")
        return mod1(self.degree * to_number(x))

    def log_abs_derivative(self, x=None) -> float:
        return math.log(self.degree)

    def fixed_step(self, m: int, bits: int) -> int:
        return (self.degree * m) & ((1 << bits) - 1)

    def arc_image(self, arc: Arc) -> ArcSet:
        length = self.degree * arc.length
        if length >= 1:
            return ArcSet.full(is_exact(arc.start, arc.length))
        return Arc(self.degree * arc.start, length).to_arcset()

    def arc_preimage(self, arc: Arc) -> list[Arc]:
        """The ``degree`` disjoint arcs mapped onto ``arc``."""
        k = self.degree
        if arc.is_full:
            raise ValueError("preimage of the full circle is not a union of disjoint arcs")
        return [Arc((arc.start + m) / k, arc.length / k) for m in range(k)]

    @property
    def expansion(self) -> float:
        return float(self.degree)


@dataclass(frozen=True, repr=False)
class Logistic(GeneratorMap):
    """``x -> 4x(1 - x)`` on [0, 1]; not a circle covering, used only for hitting experiments."""

    kind = "logistic"

    def __repr__(self):
        return "logistic"

    def eval(self, x):
        if isinstance(x, SineSquared):
            return x.doubled()
        if isinstance(x, np.ndarray):
            return np.mod(4.0 * x * (1.0 - x), 1.0)
        x = to_number(x)
        return mod1(4 * x * (1 - x))

    def log_abs_derivative(self, x) -> float:
        x = to_number(x)
        if x == Fraction(1, 2):
            raise SingularDerivativeError("logistic derivative vanishes at 1/2")
        return math.log(abs(4 - 8 * float(x)))

    def arc_image(self, arc: Arc) -> ArcSet:
        # split at the critical point 1/2 and at the wrap point, then map endpoints
        half = Fraction(1, 2) if is_exact(arc.start, arc.length) else 0.5
        out = ArcSet()
        for lo, hi in arc.intervals():
            for a, b in ((lo, min(hi, half)), (max(lo, half), hi)):
                if a >= b:
                    continue
                ya, yb = 4 * a * (1 - a), 4 * b * (1 - b)
                lo_img, hi_img = min(ya, yb), max(ya, yb)
                if hi_img > lo_img:
                    out = out | ArcSet([(lo_img, hi_img)])
        return out


@dataclass(frozen=True, repr=False)
class Rotation(GeneratorMap):
    alpha: Fraction
    kind = "rotation"

    def __post_init__(self):
        alpha = to_number(self.alpha)
        if not 0 < alpha < 1:
            raise ValueError(f"rotation number must lie in (0, 1), got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    def __repr__(self):
        return f"rotation:{self.alpha}"

    def eval(self, x):
        if isinstance(x, np.ndarray):
            return np.mod(x + float(self.alpha), 1.0)
        return mod1(to_number(x) + self.alpha)

    def log_abs_derivative(self, x=None) -> float:
        return 0.0

    def fixed_step(self, m: int, bits: int) -> int:
        return (m + round(Fraction(self.alpha) * (1 << bits))) & ((1 << bits) - 1)

    def arc_image(self, arc: Arc) -> ArcSet:
        return Arc(arc.start + self.alpha, arc.length).to_arcset()

    @property
    def expansion(self) -> float:
        return 1.0


def parse_generator(text: str) -> GeneratorMap:
    """Parse ``"linear:k"``, ``"logistic"`` or ``"rotation:num/den"`` (case-insensitive)."""
    raw = text.strip().lower()
    name, _, arg = raw.partition(":")
    name = name.strip()
    if name == "linear":
        try:
            return LinearExpanding(int(arg))
        except ValueError as exc:
            raise ValueError(f"bad linear generator {text!r}: {exc}") from None
    if name == "logistic" and not arg:
        return Logistic()
    if name == "rotation":
        try:
            return Rotation(Fraction(arg.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rotation generator {text!r}: {exc}") from None
    raise ValueError(f"unknown generator {text!r}; expected linear:k, logistic or rotation:num/den")


@dataclass(frozen=True)
class SemigroupSystem:
    """An ordered generator set; symbol ``i`` names ``generators[i - 1]``."""

    generators: tuple[GeneratorMap, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("a semigroup system needs at least one generator")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def parse(cls, spec) -> "SemigroupSystem":
        if isinstance(spec, str):
            spec = [s for s in spec.split(",") if s.strip()]
        return cls(tuple(parse_generator(s) if isinstance(s, str) else s for s in spec))

    @classmethod
    def linear(cls, *degrees: int) -> "SemigroupSystem":
        return cls(tuple(LinearExpanding(d) for d in degrees))

    @property
    def p(self) -> int:
        return len(self.generators)

    def __len__(self):
        return self.p

    def __getitem__(self, symbol: int) -> GeneratorMap:
        if not isinstance(symbol, (int, np.integer)) or not 1 <= symbol <= self.p:
            raise UnknownGeneratorError(f"symbol {symbol!r} is not in 1..{self.p}")
        return self.generators[symbol - 1]

    @property
    def spec(self) -> list[str]:
        return [repr(g) for g in self.generators]

    @property
    def all_linear(self) -> bool:
        return all(g.linear for g in self.generators)

    @property
    def degrees(self) -> tuple[int, ...]:
        if not self.all_linear:
            raise UnsupportedGeneratorError(f"degrees need linear generators, system is {self.spec}")
        return tuple(g.degree for g in self.generators)

    @property
    def max_expansion(self) -> float:
        return max(g.expansion for g in self.generators)

    @property
    def min_expansion(self) -> float:
        return min(g.expansion for g in self.generators)

    def check_word(self, word: Sequence[int]) -> Word:
        word = tuple(int(s) for s in word)
        for s in word:
            self[s]
        return word

    def word_eval(self, word: Sequence[int], x):
        for s in self.check_word(word):
            x = self[s].eval(x)
        return x

    def word_degree(self, word: Sequence[int]) -> int:
        return reduce(lambda acc, s: acc * self[s].degree, self.check_word(word), 1)

    def periodic_points(self, word: Sequence[int]) -> list:
        """All solutions of ``word_eval(word, x) == x``.

        Linear words of total degree D give the D - 1 rationals m/(D - 1).
        Pure logistic words of length n give sin^2 of the angles fixed up to
        sign by doubling n times, i.e. denominators 2^n - 1 and 2^n + 1.
        """
        word = self.check_word(word)
        if not word:
            raise ValueError("every point is fixed by the empty word")
        gens = [self[s] for s in word]
        if any(isinstance(g, Rotation) for g in gens):
            raise NoFiniteFixError("words containing a rotation have no finite fixed-point set")
        if all(g.linear for g in gens):
            d = self.word_degree(word)
            return [Fraction(m, d - 1) for m in range(d - 1)]
        if all(isinstance(g, Logistic) for g in gens):
            n = len(word)
            angles = {SineSquared(Fraction(m, (1 << n) - 1)) for m in range((1 << n) - 1)}
            angles |= {SineSquared(Fraction(m, (1 << n) + 1)) for m in range((1 << n) + 1)}
            return sorted(angles, key=lambda z: z.angle)
        raise UnsupportedGeneratorError("periodic points of words mixing logistic and linear maps")


def word_eval(system: SemigroupSystem, word: Sequence[int], x):
    return system.word_eval(word, x)


def periodic_points(system: SemigroupSystem, word: Sequence[int]) -> list:
    return system.periodic_points(word)


def parse_word(text) -> Word:
    """``"1212"`` or ``"1,2,1,2"`` or a sequence of ints."""
    if isinstance(text, str):
        text = text.strip()
        parts = text.split(",") if "," in text else list(text)
        return tuple(int(p) for p in parts if p.strip())
    return tuple(int(s) for s in text)


def as_exact(x) -> Number:
    if isinstance(x, (SineSquared, Rational)):
        return x if isinstance(x, SineSquared) else Fraction(x)
    return Fraction(x)
