"""Hitting frequencies of fibered orbits and their optimisation over periodic orbits.

Sets here are closed: a point on the boundary of ``A`` counts as a hit.
Logistic periodic points are :class:`SineSquared` values; membership of
``sin^2(pi y)`` in an arc is decided in floating point and, within 1e-9
of an endpoint, settled exactly (``sin^2(pi y)`` is rational only when the
denominator of ``y`` divides 6 or 4; otherwise it is irrational and a
60-digit evaluation cannot tie with a rational endpoint).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .circle import ArcSet
from .errors import NoFiniteFixError, UnsupportedGeneratorError
from .generators import SemigroupSystem, SineSquared, Word
from .skew import FiberedOrbit
from .symbols import DOMAIN_POINTS, BernoulliWalk, PeriodicMixture, SymbolStream, philox

_RATIONAL_COS = {1: 1, 2: -1, 3: Fraction(-1, 2), 4: 0, 6: Fraction(1, 2)}
_NEAR = 1e-9


def exact_value(z: SineSquared) -> Fraction | None:
    """``sin^2(pi * angle)`` as a Fraction when it is rational."""
    c = _RATIONAL_COS.get(z.angle.denominator)
    return None if c is None else (1 - Fraction(c)) / 2


def _sin2_mp(z: SineSquared):
    with mpmath.workdps(60):
        return mpmath.sin(mpmath.pi * mpmath.mpf(z.angle.numerator) / z.angle.denominator) ** 2


def in_closed(A: ArcSet, x) -> bool:
    """``x in cl(A)``, exact for Fractions and SineSquared points."""
    if not isinstance(x, SineSquared):
        return A.contains_closed(x)
    q = exact_value(x)
    if q is not None:
        return A.contains_closed(q)
    v = float(x)
    for lo, hi in A.intervals:
        if abs(v - float(lo)) < _NEAR or abs(v - float(hi)) < _NEAR:
            exact = _sin2_mp(x)
            with mpmath.workdps(60):
                if mpmath.mpf(Fraction(lo).numerator) / Fraction(lo).denominator <= exact <= (
                    mpmath.mpf(Fraction(hi).numerator) / Fraction(hi).denominator
                ):
                    return True
        elif lo < v < hi:
            return True
    return False


@dataclass(frozen=True)
class HittingFrequency:
    value: float | Fraction
    window: int
    trajectory_id: int = 0
    #: True when the value is the exact limsup of an eventually periodic orbit
    exact: bool = False


def _cycle_frequency(o: FiberedOrbit, A: ArcSet, limit: int) -> Fraction | None:
    """Exact limsup for an exact orbit along an eventually periodic stream, if a cycle shows up."""
    stream = o.stream
    if not o.exact or stream.walk is not None:
        return None
    pre, per = len(stream.prefix), len(stream.tail)
    seen: dict = {}
    hits: list[bool] = []
    for i in range(limit):
        pos = stream.position + i
        phase = pos if pos < pre else pre + (pos - pre) % per
        key = (phase, o.orbit_point(i))
        if key in seen:
            start = seen[key]
            return Fraction(sum(hits[start:i]), i - start)
        seen[key] = i
        hits.append(in_closed(A, o.orbit_point(i)))
    return None


def hitting_frequency(o: FiberedOrbit, A: ArcSet, n: int, trajectory_id: int = 0) -> HittingFrequency:
    """``limsup (1/n) #{0 <= i < n : f^i x in A}`` proxy.

    Exact orbits along periodic streams return the exact limsup once the
    orbit cycles within ``n`` steps.  Otherwise the largest frequency over
    the prefixes of length ``n, n/2, n/4, n/8`` is reported.
    """
    if n < 1:
        raise ValueError("window must be at least 1")
    if not A:
        return HittingFrequency(0, n, trajectory_id, exact=o.exact)
    if A.is_full:
        return HittingFrequency(1, n, trajectory_id, exact=o.exact)
    cyc = _cycle_frequency(o, A, n)
    if cyc is not None:
        return HittingFrequency(cyc, n, trajectory_id, exact=True)
    checkpoints = sorted({max(1, n >> j) for j in range(4)})
    count, best, i = 0, 0.0, 0
    for stop in checkpoints:
        while i < stop:
            count += in_closed(A, o.orbit_point(i))
            i += 1
        best = max(best, count / stop)
    return HittingFrequency(best, n, trajectory_id)


# -- periodic-orbit measures -----------------------------------------------------


@dataclass(frozen=True)
class PeriodicOrbitMeasure:
    """Uniform measure on the skew-product orbit of ``(w^inf, x0)``."""

    system: SemigroupSystem = field(repr=False)
    word: Word
    x0: object

    def __post_init__(self):
        if self.system.word_eval(self.word, self.x0) != self.x0:
            raise ValueError(f"{self.x0} is not fixed by word {self.word}")

    @property
    def period(self) -> int:
        return len(self.word)

    @property
    def atoms(self) -> list[tuple[Word, object]]:
        """``(sigma^j w, f^j x0)`` for ``j < period``; each carries mass ``1/period``."""
        out, x = [], self.x0
        for j in range(self.period):
            out.append((self.word[j:] + self.word[:j], x))
            x = self.system[self.word[j]].eval(x)
        return out

    def push_forward(self) -> list[tuple[Word, object]]:
        return [(w[1:] + w[:1], self.system[w[0]].eval(x)) for w, x in self.atoms]

    def is_invariant(self) -> bool:
        return sorted(map(repr, self.push_forward())) == sorted(map(repr, self.atoms))

    def mass(self, A: ArcSet) -> Fraction:
        return Fraction(sum(in_closed(A, x) for _, x in self.atoms), self.period)


@dataclass
class AlphaReport:
    value: Fraction
    witnesses: list[tuple[PeriodicOrbitMeasure, Fraction]]
    per_component: list[Fraction]
    lower_bound_only: bool = False

    def marginal(self) -> list[tuple[object, Fraction]]:
        """Atoms of the projection to the circle of the optimal witness mixture."""
        out: dict = {}
        for mu, weight in self.witnesses:
            for _, x in mu.atoms:
                out[x] = out.get(x, Fraction(0)) + weight / mu.period
        return sorted(out.items(), key=lambda kv: float(kv[0]))


def _component_periodic_points(system: SemigroupSystem, word: Word, max_period: int, budget: int):
    """Yield ``(w^r, x)`` for every point fixed by ``w^r``, ``r |w| <= max_period``."""
    for r in range(1, max_period // len(word) + 1):
        power = word * r
        gens = {system[s].kind for s in power}
        if gens <= {"linear"} and system.word_degree(power) - 1 > budget:
            raise OverflowError(power)
        if gens == {"logistic"} and (1 << len(power)) + 1 > budget:
            raise OverflowError(power)
        for x in system.periodic_points(power):
            yield power, x


def alpha_P_periodic(
    system: SemigroupSystem,
    mixture: PeriodicMixture,
    A: ArcSet,
    max_period: int = 12,
    budget: int = 1 << 20,
) -> AlphaReport:
    """Largest ``mu(Sigma x A)`` over periodic-orbit measures whose marginal on sequences is ``mixture``.

    Each component ``w`` of the mixture is matched with the periodic orbit
    of ``(w^inf, x)`` maximising the fraction of its points in ``A``, over
    all ``x`` fixed by ``w^r`` with ``r |w| <= max_period``.  The value is
    the mixture-weighted sum of these maxima.
    """
    if max_period > 24:
        raise ValueError("exhaustive periodic search is limited to periods <= 24")
    witnesses, per_comp, partial = [], [], False
    for word, weight in mixture.components:
        best, best_mu = Fraction(-1), None
        visited = set()
        try:
            for power, x in _component_periodic_points(system, word, max_period, budget):
                if (len(power), x) in visited:
                    continue
                mu = PeriodicOrbitMeasure(system, power, x)
                for _, y in mu.atoms:
                    visited.add((len(power), y))
                m = mu.mass(A)
                if m > best:
                    best, best_mu = m, mu
        except OverflowError:
            partial = True
        except NoFiniteFixError:
            raise
        if best_mu is None:
            raise UnsupportedGeneratorError(f"no periodic points found for component {word}")
        per_comp.append(best)
        witnesses.append((best_mu, weight))
    value = sum((w * f for (_, w), f in zip(witnesses, per_comp)), Fraction(0))
    return AlphaReport(value, witnesses, per_comp, partial)


# -- gamma ----------------------------------------------------------------------


@dataclass
class GammaReport:
    value: float | Fraction
    best: HittingFrequency
    best_stream: str
    best_start: object
    evaluated: int


def _common_fixed_points(system: SemigroupSystem) -> list:
    sets = []
    for s in range(1, system.p + 1):
        try:
            sets.append(set(system.periodic_points((s,))))
        except (NoFiniteFixError, UnsupportedGeneratorError):
            return []
    return sorted(set.intersection(*sets), key=float)


def gamma_P_estimate(
    system: SemigroupSystem,
    walk: BernoulliWalk | PeriodicMixture,
    A: ArcSet,
    streams: int = 8,
    grid: int = 32,
    n: int = 2048,
    max_period: int = 12,
    seed: int = 0,
) -> GammaReport:
    """Lower-bound estimate of the essential sup of hitting frequencies.

    Candidate sequences are ``streams`` samples of a Bernoulli walk, or the
    cyclic shifts of each mixture component.  Candidate starts are ``grid``
    random rationals of denominator ``2^32 - 1``, the common fixed points of
    the generators and, for mixtures, every periodic point searched by
    :func:`alpha_P_periodic`.  The result is the largest frequency found.
    """
    best: tuple | None = None
    count = 0
    gen = philox(seed, 0, DOMAIN_POINTS)
    xs = [Fraction(int(v), 2**32 - 1) for v in gen.integers(0, 2**32 - 1, size=grid)]
    fixed = _common_fixed_points(system)

    def consider(stream: SymbolStream, x, exact: bool):
        nonlocal best, count
        o = FiberedOrbit(system, stream, x, exact=exact)
        hf = hitting_frequency(o, A, n, trajectory_id=count)
        count += 1
        if best is None or hf.value > best[0].value:
            best = (hf, stream.mode, x)

    if isinstance(walk, BernoulliWalk):
        cands = [SymbolStream.sampled(walk, seed, i) for i in range(streams)]
        for st in cands:
            for x in fixed:
                consider(st, x, True)
            for x in xs:
                consider(st, x, False)
    else:
        for word, _ in walk.components:
            for j in range(len(word)):
                st = SymbolStream.cyclic(word[j:] + word[:j])
                for x in fixed:
                    consider(st, x, True)
                for x in xs:
                    consider(st, x, False)
            visited = set()
            for power, x in _component_periodic_points(system, word, max_period, 1 << 20):
                if (len(power), x) in visited:
                    continue
                for _, y in PeriodicOrbitMeasure(system, power, x).atoms:
                    visited.add((len(power), y))
                consider(SymbolStream.cyclic(power), x, True)
    hf, mode, x = best
    return GammaReport(hf.value, hf, mode, x, count)


# -- windows ----------------------------------------------------------------------


@dataclass(frozen=True)
class JenkinsonWindow:
    n: int
    doubling: tuple[Fraction, Fraction]
    logistic: tuple[float, float]

    @property
    def intersection(self) -> tuple[float, float] | None:
        lo = max(float(self.doubling[0]), self.logistic[0])
        hi = min(float(self.doubling[1]), self.logistic[1])
        return (lo, hi) if lo < hi else None


def jenkinson_window(n: int) -> JenkinsonWindow:
    """Half-open ranges of ``l`` for which ``A_l`` has maximal hitting frequency ``1/n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return JenkinsonWindow(
        n,
        (Fraction(1, 2**n + 1), Fraction(1, 2 ** (n - 1) + 1)),
        (math.sin(math.pi / (2 * (2**n + 1))), math.sin(math.pi / (2 * (2 ** (n - 1) + 1)))),
    )


def centered_arc(ell) -> ArcSet:
    """``A_l = [(1 - l)/2, (1 + l)/2]`` (stored half-open; hits use its closure)."""
    ell = Fraction(ell) if not isinstance(ell, float) else Fraction(ell).limit_denominator(10**12)
    return ArcSet([((1 - ell) / 2, (1 + ell) / 2)])


@dataclass
class HittingEqualityReport:
    n: int
    ell: Fraction | None
    variant: str
    gamma: float | Fraction | None
    alpha: Fraction | None
    target: Fraction
    holds: bool
    marginal: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    notice: str = ""


def hitting_equality_check(
    system: SemigroupSystem,
    mixture: PeriodicMixture,
    n: int,
    ell=None,
    max_period: int = 12,
    tolerance: float = 0.0,
    **gamma_kwargs,
) -> HittingEqualityReport:
    """Compare the hitting-frequency estimate with the periodic-orbit optimum on ``A_l``.

    ``ell`` defaults to the midpoint of the window intersection.  When the
    intersection is empty the check falls back to the doubling window and
    keeps only the mixture's linear components (renormalised).
    """
    win = jenkinson_window(n)
    variant = "both"
    if ell is None:
        inter = win.intersection
        if inter is None:
            variant = "doubling"
            lo, hi = win.doubling
            ell = (lo + hi) / 2
        else:
            ell = Fraction((inter[0] + inter[1]) / 2).limit_denominator(10**6)
    ell = Fraction(ell) if not isinstance(ell, float) else Fraction(ell).limit_denominator(10**12)
    if variant == "doubling":
        comps = [(w, wt) for w, wt in mixture.components if all(system[s].kind == "linear" for s in w)]
        if not comps:
            return HittingEqualityReport(n, ell, variant, None, None, Fraction(1, n), False,
                                         notice="empty window intersection and no linear component")
        total = sum(wt for _, wt in comps)
        mixture = PeriodicMixture(tuple((w, wt / total) for w, wt in comps))
    A = centered_arc(ell)
    alpha = alpha_P_periodic(system, mixture, A, max_period)
    gamma = gamma_P_estimate(system, mixture, A, max_period=max_period, **gamma_kwargs)
    target = Fraction(1, n)
    holds = abs(float(gamma.value) - float(alpha.value)) <= tolerance and abs(float(alpha.value) - target) <= tolerance
    return HittingEqualityReport(
        n, ell, variant, gamma.value, alpha.value, target, holds,
        marginal=alpha.marginal(),
        witnesses=[(mu.word, mu.x0) for mu, _ in alpha.witnesses],
    )
