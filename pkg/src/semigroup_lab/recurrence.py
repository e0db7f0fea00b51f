"""Return-time functionals: first returns, Kac averages, shortest set returns, rates.

Pointwise membership uses half-open arcs; set-to-set overlap uses closed
arcs, so ``set_return_time`` answers whether ``f^k(cl A)`` meets ``cl A``.
All searches are truncated at an explicit horizon and report censoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .circle import ArcSet, Number, ball, to_number
from .errors import EstimateUndefinedError
from .generators import Rotation, SemigroupSystem, SineSquared
from .sampling import BLOCK, blocks, first_return_block, parallel_map, require_linear, sample_in
from .skew import FiberedOrbit, dyn_ball_as_arc
from .symbols import DOMAIN_POINTS, BernoulliWalk, SymbolStream, philox

Z95 = 1.959963984540054


@dataclass(frozen=True)
class ReturnTimeSample:
    value: int
    censored: bool
    start: object
    stream_id: int = 0


def first_return_time(o: FiberedOrbit, A: ArcSet, n_max: int, hitting: bool = False) -> ReturnTimeSample:
    """Least ``k in [1, n_max]`` with ``f_omega^k(x0) in A``; censored at ``n_max`` otherwise.

    With ``hitting=False`` the start point must itself lie in ``A``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    member = A.contains
    if not hitting and not member(_coord(o.x0)):
        raise ValueError(f"start point {o.x0} is not in {A}; pass hitting=True for hitting times")
    for k in range(1, n_max + 1):
        if member(_coord(o.orbit_point(k))):
            return ReturnTimeSample(k, False, o.x0)
    return ReturnTimeSample(n_max, True, o.x0)


def _coord(x):
    return float(x) if isinstance(x, SineSquared) else x


# -- Kac --------------------------------------------------------------------


@dataclass
class KacEstimate:
    mean: float
    half_width: float
    samples: int
    censored: int
    n_max: int
    target: float
    times: np.ndarray = field(repr=False, default=None)

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.samples

    @property
    def defect_bound(self) -> float:
        """Largest bias the censored mass could hide, ``censored fraction * n_max``."""
        return self.censored_fraction * self.n_max


def _kac_task(task):
    degrees, A, omega, n_max, seed, stream, count, target = task
    gen = philox(seed, stream, DOMAIN_POINTS)
    m0 = sample_in(gen, A, count)
    if isinstance(omega, SymbolStream):
        times = first_return_block(degrees, A, m0, n_max, gen, symbols=omega.take(n_max), target=target)
    else:
        times = first_return_block(degrees, A, m0, n_max, gen, walk=omega, target=target)
    return times, m0


def return_time_samples(
    system: SemigroupSystem,
    omega: BernoulliWalk | SymbolStream,
    A: ArcSet,
    m: int,
    n_max: int,
    seed: int,
    workers: int = 1,
    stream_offset: int = 0,
    block: int = BLOCK,
    target: ArcSet | None = None,
    with_starts: bool = False,
):
    """First-return times of ``m`` Lebesgue points of ``A``; 0 marks a censored sample.

    ``omega`` is either a fixed stream (quenched: every point follows the
    same sequence) or a walk (annealed: each point draws its own).
    Sample ``i`` belongs to block ``i // block``, whose Philox stream id is
    ``stream_offset + i // block``.  With ``with_starts`` the 64-bit
    fixed-point start points are returned too.
    """
    degrees = require_linear(system, "Monte Carlo return times")
    if isinstance(omega, BernoulliWalk) and omega.p != system.p:
        raise ValueError(f"walk has {omega.p} symbols, system has {system.p}")
    tasks = [
        (degrees, A, omega, n_max, seed, stream_offset + b, count, target)
        for b, _, count in blocks(m, block)
    ]
    parts = parallel_map(_kac_task, tasks, workers)
    times = np.concatenate([t for t, _ in parts])
    if with_starts:
        return times, np.concatenate([m for _, m in parts])
    return times


def summarize_times(times: np.ndarray, n_max: int, target: float) -> KacEstimate:
    ok = times[times > 0]
    if ok.size == 0:
        raise EstimateUndefinedError("every sample was censored")
    sd = float(ok.std(ddof=1)) if ok.size > 1 else 0.0
    return KacEstimate(
        mean=float(ok.mean()),
        half_width=Z95 * sd / math.sqrt(ok.size),
        samples=int(times.size),
        censored=int(times.size - ok.size),
        n_max=n_max,
        target=target,
        times=times,
    )


def kac_integral_estimate(
    system: SemigroupSystem,
    omega: BernoulliWalk | SymbolStream,
    A: ArcSet,
    m: int,
    n_max: int,
    seed: int = 0,
    workers: int = 1,
) -> KacEstimate:
    """Monte Carlo mean of the first return time to ``A`` under the normalised Lebesgue measure."""
    if A.length <= 0:
        raise ValueError("Kac averages need a set of positive measure")
    times = return_time_samples(system, omega, A, m, n_max, seed, workers)
    return summarize_times(times, n_max, 1 / float(A.length))


@dataclass
class CesaroKac:
    per_shift: np.ndarray
    partial_means: np.ndarray
    half_widths: np.ndarray
    censored: int
    target: float
    stream: SymbolStream = field(repr=False, default=None)

    @property
    def final(self) -> float:
        return float(self.partial_means[-1])

    @property
    def unaveraged(self) -> float:
        """The single shift-``K`` integral (no Cesaro averaging)."""
        return float(self.per_shift[-1])


def cesaro_kac(
    system: SemigroupSystem,
    walk: BernoulliWalk | SymbolStream,
    A: ArcSet,
    shifts: int,
    m: int,
    n_max: int,
    seed: int = 0,
    stream_id: int = 0,
    workers: int = 1,
) -> CesaroKac:
    """Cesaro means over ``j < shifts`` of the Kac integral along ``sigma^j omega``.

    One ``omega`` is sampled from ``walk`` (or ``walk`` is already a fixed
    stream) and held fixed.  ``per_shift`` has ``shifts + 1`` entries; the
    last is the unaveraged term at shift ``K``.
    """
    if shifts < 1:
        raise ValueError("need at least one shift")
    omega = walk if isinstance(walk, SymbolStream) else SymbolStream.sampled(walk, seed, stream_id)
    n_blocks = len(blocks(m))
    means, hws, censored = [], [], 0
    for j in range(shifts + 1):
        times = return_time_samples(
            system, omega.shift(j), A, m, n_max, seed, workers, stream_offset=(stream_id << 24) + j * n_blocks
        )
        est = summarize_times(times, n_max, 1 / float(A.length))
        means.append(est.mean)
        hws.append(est.half_width)
        censored += est.censored
    per_shift = np.array(means)
    partial = np.cumsum(per_shift[:shifts]) / np.arange(1, shifts + 1)
    return CesaroKac(per_shift, partial, np.array(hws), censored, 1 / float(A.length), omega)


# -- recurrence ---------------------------------------------------------------


@dataclass
class RecurrenceReport:
    fraction: float
    returned: int
    samples: int
    n_max: int
    shift: int
    mode: str


def verify_recurrence(
    system: SemigroupSystem,
    omega: BernoulliWalk | SymbolStream,
    A: ArcSet,
    m: int,
    n_max: int,
    seed: int = 0,
    shift: int = 0,
    workers: int = 1,
) -> RecurrenceReport:
    """Fraction of Lebesgue points of ``A`` returning to ``A`` within ``n_max`` steps.

    With a fixed stream and ``shift = k`` the orbit starts at time ``k``,
    i.e. it uses ``g_{omega_n} ... g_{omega_{k+1}}``; this is the
    any-starting-time form of recurrence for an arbitrary sequence.
    """
    if A.length <= 0:
        raise ValueError("recurrence needs a set of positive measure")
    if isinstance(omega, SymbolStream):
        omega = omega.shift(shift)
        mode = omega.mode
    else:
        mode = repr(omega)
    times = return_time_samples(system, omega, A, m, n_max, seed, workers)
    returned = int((times > 0).sum())
    return RecurrenceReport(returned / m, returned, m, n_max, shift, mode)


# -- shortest returns of sets -------------------------------------------------


def set_return_time(system: SemigroupSystem, stream: SymbolStream, A: ArcSet, n_max: int) -> int | None:
    """Least ``k <= n_max`` with ``f_omega^k(A)`` meeting ``A`` (closed overlap), else None."""
    if not A:
        raise ValueError("shortest return time of the empty set is undefined")
    image = A
    for k in range(1, n_max + 1):
        image = system[stream.at(k - 1)].arcset_image(image)
        if image.intersects_closed(A):
            return k
    return None


def action_return_time(system: SemigroupSystem, A: ArcSet, k_max: int, max_frontier: int = 200_000) -> int | None:
    """Least ``k`` such that some word of length ``k`` maps ``A`` onto a set meeting ``A``.

    Breadth-first over word length; images that coincide as sets are kept
    once, which collapses commuting generators (``2x`` and ``3x`` commute,
    so level ``k`` holds at most ``k + 1`` images).
    """
    if not A:
        raise ValueError("shortest return time of the empty set is undefined")
    frontier = {A}
    for k in range(1, k_max + 1):
        nxt = set()
        for image in frontier:
            for g in system.generators:
                new = g.arcset_image(image)
                if new.intersects_closed(A):
                    return k
                nxt.add(new)
        if len(nxt) > max_frontier:
            raise RuntimeError(f"BFS frontier exceeded {max_frontier} images at depth {k}")
        frontier = nxt
    return None


def action_ball_return_time(system: SemigroupSystem, x, delta, k_max: int) -> int | None:
    return action_return_time(system, ball(to_number(x), to_number(delta)).to_arcset(), k_max)


def dynball_return_ratio(
    system: SemigroupSystem,
    stream: SymbolStream,
    x,
    delta,
    n_grid: Iterable[int],
    n_max: int | None = None,
) -> list[tuple[int, int | None, float]]:
    """``(n, T, T/n)`` for the shortest return of the exact dynamical ball along ``omega``."""
    o = FiberedOrbit(system, stream, to_number(x), exact=True)
    out = []
    for n in n_grid:
        arc = dyn_ball_as_arc(o, to_number(delta), n)
        t = set_return_time(system, stream, arc.to_arcset(), n_max if n_max is not None else 4 * n + 100)
        out.append((n, t, math.nan if t is None else t / n))
    return out


# -- rates --------------------------------------------------------------------


def geometric_grid(delta0=Fraction(1, 10), ratio=Fraction(1, 2), count: int = 13) -> list:
    delta0, ratio = to_number(delta0), to_number(ratio)
    if not 0 < ratio < 1:
        raise ValueError("grid ratio must lie in (0, 1)")
    return [delta0 * ratio**j for j in range(count)]


@dataclass
class RateEstimate:
    slope: float
    intercept: float
    r2: float
    grid: list
    stream_id: int = 0
    x: object = None
    dropped: int = 0

    @property
    def censored(self) -> bool:
        return math.isnan(self.slope)


def fit_rate(pairs: Sequence[tuple], stream_id: int = 0, x=None) -> RateEstimate:
    """Least-squares slope of ``T`` against ``-log delta`` over uncensored grid points."""
    deltas = [d for d, _ in pairs]
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta grid must be strictly decreasing")
    good = [(-math.log(d), t) for d, t in pairs if t is not None]
    dropped = len(pairs) - len(good)
    if len(good) < 2:
        return RateEstimate(math.nan, math.nan, math.nan, list(pairs), stream_id, x, dropped)
    u, t = np.array(good, dtype=float).T
    if np.ptp(t) == 0:
        fit = stats.linregress(u, t + 0.0)
        r2 = 0.0 if np.ptp(t) == 0 else fit.rvalue**2
        return RateEstimate(float(fit.slope), float(fit.intercept), r2, list(pairs), stream_id, x, dropped)
    fit = stats.linregress(u, t)
    return RateEstimate(float(fit.slope), float(fit.intercept), float(fit.rvalue**2), list(pairs), stream_id, x, dropped)


@dataclass
class RateReport:
    estimates: list[RateEstimate]
    mean: float
    std: float
    quantiles: dict
    analytic: float | None

    @property
    def slopes(self) -> np.ndarray:
        return np.array([e.slope for e in self.estimates if not e.censored])


def sample_rational_point(seed: int, stream_id: int, denominator: int) -> Fraction:
    gen = philox(seed, stream_id, DOMAIN_POINTS)
    return Fraction(int(gen.integers(0, denominator)), denominator)


def _rate_task(task):
    system, walk, grid, seed, i, n_max, den = task
    stream = walk if isinstance(walk, SymbolStream) else SymbolStream.sampled(walk, seed, i)
    x = sample_rational_point(seed, i, den)
    pairs = [(d, set_return_time(system, stream, ball(x, d).to_arcset(), n_max)) for d in grid]
    return fit_rate(pairs, i, x)


def recurrence_rate(
    system: SemigroupSystem,
    walk: BernoulliWalk | SymbolStream,
    delta_grid: Sequence,
    samples: int,
    seed: int = 0,
    n_max: int = 200,
    denominator: int = 2**32 - 1,
    workers: int = 1,
    dim: int = 1,
) -> RateReport:
    """Per-sample slopes of ``T^omega(B_delta(x))`` against ``-log delta``.

    ``x`` is uniform on the rationals with the given denominator and
    ``omega`` is sampled from ``walk`` (one stream per sample).  The
    analytic limit ``dim / sum a_i log d_i`` is attached for linear systems
    driven by a Bernoulli walk.
    """
    grid = [to_number(d) for d in delta_grid]
    tasks = [(system, walk, grid, seed, i, n_max, denominator) for i in range(samples)]
    estimates = parallel_map(_rate_task, tasks, workers)
    slopes = np.array([e.slope for e in estimates if not e.censored])
    analytic = None
    if isinstance(walk, BernoulliWalk) and system.all_linear:
        analytic = dim / sum(a * math.log(d) for a, d in zip(walk.a, system.degrees))
    q = {f"q{int(p * 100):02d}": float(np.quantile(slopes, p)) for p in (0.05, 0.25, 0.5, 0.75, 0.95)} if slopes.size else {}
    return RateReport(
        estimates,
        float(slopes.mean()) if slopes.size else math.nan,
        float(slopes.std(ddof=1)) if slopes.size > 1 else math.nan,
        q,
        analytic,
    )


# -- rotations ----------------------------------------------------------------


@dataclass
class RotationBoundReport:
    rows: list[dict]
    holds: bool


def rotation_ball_bound_check(alphas: Sequence, delta_grid: Sequence, xs: Sequence) -> RotationBoundReport:
    """Check ``T^S(B_delta(x)) <= (1/alpha_max + 1)/delta`` for rotations by the given rationals."""
    alphas = [Fraction(to_number(a)) for a in alphas]
    system = SemigroupSystem(tuple(Rotation(a) for a in alphas))
    a1 = max(alphas)
    rows, holds = [], True
    for x in xs:
        for d in delta_grid:
            d = to_number(d)
            bound = (1 / a1 + 1) / d
            t = action_ball_return_time(system, x, d, math.ceil(bound) + 1)
            ok = t is not None and t <= bound
            holds &= ok
            rows.append({"x": x, "delta": d, "T": t, "bound": float(bound), "holds": ok})
    return RotationBoundReport(rows, holds)
