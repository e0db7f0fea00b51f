"""Entropy of the action along random words, analytic entropies, Lyapunov exponents.

Join partitions are computed exactly for linear generators.  A cell of a
join is a connected piece of the circle cut at every preimage of a
boundary point of ``beta``: a cut ``c`` of ``beta`` pulls back under the
cumulative map of degree ``D_j`` to the ``D_j`` points ``(c + m) / D_j``.
All cuts of a join are put over the common denominator
``den(beta) * D_{n-1}`` and handled as int64 numerators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .circle import Arc, ArcSet
from .errors import UnsupportedGeneratorError
from .generators import SemigroupSystem, Word
from .sampling import parallel_map
from .symbols import DOMAIN_SYMBOLS, BernoulliWalk, SymbolStream, bernoulli_entropy, philox


@dataclass(frozen=True)
class CirclePartition:
    cells: tuple[ArcSet, ...]
    labels: tuple = ()

    def __post_init__(self):
        cells = tuple(self.cells)
        if not cells:
            raise ValueError("a partition needs at least one cell")
        total = sum(c.length for c in cells)
        if abs(float(total) - 1) > 1e-12:
            raise ValueError(f"cell lengths sum to {total}, not 1")
        for a, b in itertools.combinations(cells, 2):
            if a.intersects(b):
                raise ValueError("partition cells overlap")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "labels", tuple(self.labels) or tuple(range(len(cells))))

    @classmethod
    def from_cuts(cls, cuts: Sequence[Fraction]) -> "CirclePartition":
        """The arcs between consecutive cut points, read cyclically."""
        pts = sorted({Fraction(c) % 1 for c in cuts})
        if len(pts) < 2:
            # a single cut leaves the circle connected
            return cls((ArcSet.full(),))
        arcs = [Arc(a, b - a).to_arcset() for a, b in zip(pts, pts[1:])]
        arcs.append(Arc(pts[-1], 1 - pts[-1] + pts[0]).to_arcset())
        return cls(tuple(arcs))

    @classmethod
    def uniform(cls, k: int) -> "CirclePartition":
        return cls.from_cuts([Fraction(i, k) for i in range(k)])

    @property
    def cuts(self) -> list[Fraction]:
        """Boundary points of the cells (points where the cell label changes)."""
        out = set()
        for cell in self.cells:
            if cell.is_full:
                continue
            for lo, hi in cell.intervals:
                out.add(Fraction(lo) % 1)
                out.add(Fraction(hi) % 1)
        return sorted(out)

    @property
    def lengths(self) -> list:
        return [c.length for c in self.cells]

    def entropy(self) -> float:
        return shannon(np.array([float(x) for x in self.lengths]))

    def __len__(self):
        return len(self.cells)


def dyadic_partition() -> CirclePartition:
    return CirclePartition.uniform(2)


def shannon(lengths: np.ndarray) -> float:
    p = lengths[lengths > 0]
    return float(-(p * np.log(p)).sum())


def _degrees_of(system: SemigroupSystem, word: Sequence[int]) -> list[int]:
    if not system.all_linear:
        raise UnsupportedGeneratorError(f"exact join partitions need linear generators, system is {system.spec}")
    return [system[s].degree for s in system.check_word(word)]


def _cut_numerators(beta_cuts: Sequence[Fraction], degrees: Sequence[int]) -> tuple[np.ndarray, int]:
    """Sorted distinct cut numerators of the join and their common denominator."""
    den_beta = math.lcm(*(c.denominator for c in beta_cuts)) if beta_cuts else 1
    cumulative = [1]
    for d in degrees:
        cumulative.append(cumulative[-1] * d)
    big = cumulative[-1]
    total = den_beta * big
    if total >= 1 << 62:
        raise OverflowError("join denominator exceeds int64")
    nums = np.array([int(c * den_beta) for c in beta_cuts], dtype=np.int64)
    parts = []
    for dj in cumulative:
        # (c + m)/dj = (c*den_beta + m*den_beta) * (big/dj) / total
        m = np.arange(dj, dtype=np.int64) * den_beta
        parts.append(((nums[:, None] + m[None, :]) * (big // dj)).ravel())
    return np.unique(np.concatenate(parts)), total


def refine_partition(system: SemigroupSystem, word: Word, beta: CirclePartition, n: int) -> CirclePartition:
    """The join ``beta v g_{w1}^-1 beta v ... v (g_{w_{n-1}} ... g_{w1})^-1 beta`` (connected cells)."""
    if n < 1:
        raise ValueError("joins need n >= 1")
    if n == 1:
        return beta
    if len(word) < n - 1:
        raise ValueError(f"need {n - 1} symbols, got {len(word)}")
    nums, den = _cut_numerators(beta.cuts, _degrees_of(system, word[: n - 1]))
    return CirclePartition.from_cuts([Fraction(int(k), den) for k in nums])


def join_entropy(system: SemigroupSystem, word: Sequence[int], beta: CirclePartition, n: int) -> float:
    """``H_Leb`` of the n-fold join along ``word``, without building ArcSets."""
    if n == 1:
        return beta.entropy()
    cuts = beta.cuts
    if not cuts:
        return 0.0
    nums, den = _cut_numerators(cuts, _degrees_of(system, word[: n - 1]))
    gaps = np.diff(np.append(nums, nums[0] + den)).astype(np.float64) / den
    return shannon(gaps)


@dataclass
class EntropyReport:
    n_grid: list[int]
    values: list[float]
    half_widths: list[float]
    limit: float
    half_width: float
    samples: int

    def rows(self):
        return [{"n": n, "value": v, "half_width": h} for n, v, h in zip(self.n_grid, self.values, self.half_widths)]


def extrapolate(n_grid: Sequence[int], values: Sequence[float]) -> float:
    """Intercept of the linear fit of the last three values against ``1/n``."""
    if len(n_grid) < 2:
        return float(values[-1])
    u = 1 / np.array(n_grid[-3:], dtype=float)
    slope, intercept = np.polyfit(u, np.array(values[-3:], dtype=float), 1)
    return float(intercept)


def _entropy_task(task):
    system, omega, beta, n_grid, seed, i = task
    stream = omega if isinstance(omega, SymbolStream) else SymbolStream.sampled(omega, seed, i)
    word = tuple(int(s) for s in stream.take(max(n_grid)))
    return [join_entropy(system, word, beta, n) / n for n in n_grid]


def metric_entropy_estimate(
    system: SemigroupSystem,
    walk: BernoulliWalk | SymbolStream,
    beta: CirclePartition | None = None,
    n_grid: Sequence[int] = (4, 6, 8, 10, 12, 14),
    samples: int = 500,
    seed: int = 0,
    workers: int = 1,
) -> EntropyReport:
    """``(1/n) E_P H_Leb(beta_0^n(omega))`` on ``n_grid`` and its extrapolated limit."""
    beta = beta or dyadic_partition()
    n_grid = sorted(int(n) for n in n_grid)
    if n_grid[0] < 1:
        raise ValueError("n_grid entries must be >= 1")
    if isinstance(walk, SymbolStream):
        samples = 1
    rows = np.array(parallel_map(_entropy_task, [(system, walk, beta, n_grid, seed, i) for i in range(samples)], workers))
    means = rows.mean(axis=0)
    hws = rows.std(axis=0, ddof=1) * 1.96 / math.sqrt(samples) if samples > 1 else np.zeros(len(n_grid))
    return EntropyReport(n_grid, means.tolist(), hws.tolist(), extrapolate(n_grid, means), float(hws[-1]), samples)


# -- analytic ------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticEntropies:
    htop_skew: float
    htop_action: float
    quenched_pressure: float
    shift_entropy: float
    htop_action_walk: float
    #: which values come from outside the lab's own derivations
    external: tuple[str, ...] = ("htop_action_walk",)

    def as_tuple(self):
        return self.htop_skew, self.htop_action, self.quenched_pressure, self.shift_entropy


def analytic_entropies(system: SemigroupSystem, walk: BernoulliWalk) -> AnalyticEntropies:
    """Closed forms for linear maps of degrees ``d_i`` under the walk with weights ``a_i``.

    ``htop_skew = log sum d``, ``htop_action = log(sum d / p)``,
    ``quenched_pressure = sum a log d``, ``shift_entropy = -sum a log a`` and
    ``htop_action_walk = log sum a d`` (the walk-weighted topological
    entropy; an externally sourced formula, see the decisions log).
    """
    d = _degrees_of(system, range(1, system.p + 1))
    if walk.p != len(d):
        raise ValueError(f"walk has {walk.p} symbols, system has {len(d)}")
    a = walk.a
    return AnalyticEntropies(
        htop_skew=math.log(sum(d)),
        htop_action=math.log(Fraction(sum(d), len(d))),
        quenched_pressure=math.fsum(ai * math.log(di) for ai, di in zip(a, d)),
        shift_entropy=bernoulli_entropy(walk),
        htop_action_walk=math.log(math.fsum(ai * di for ai, di in zip(a, d))),
    )


@dataclass
class VariationalReport:
    estimate: float
    chain: list[tuple[str, float]]
    margins: list[float]
    holds: bool
    tolerance: float


def variational_check(
    system: SemigroupSystem,
    walk: BernoulliWalk,
    estimate: float | None = None,
    tolerance: float = 0.05,
    **entropy_kwargs,
) -> VariationalReport:
    """Check ``h_est <= quenched pressure <= h_top(S, P_a) <= h_top(S) + log p - h(sigma)``.

    Each step is tested with ``tolerance`` slack on the estimated side only;
    the analytic inequalities must hold exactly.
    """
    if estimate is None:
        estimate = metric_entropy_estimate(system, walk, **entropy_kwargs).limit
    an = analytic_entropies(system, walk)
    upper = an.htop_action + math.log(system.p) - an.shift_entropy
    chain = [
        ("estimate", estimate),
        ("quenched_pressure", an.quenched_pressure),
        ("htop_action_walk", an.htop_action_walk),
        ("htop_action_plus_defect", upper),
    ]
    margins = [b - a for (_, a), (_, b) in zip(chain, chain[1:])]
    holds = margins[0] >= -tolerance and all(m >= -1e-12 for m in margins[1:])
    return VariationalReport(estimate, chain, margins, holds, tolerance)


# -- Lyapunov ------------------------------------------------------------------


@dataclass
class LyapunovEstimate:
    value: float
    half_width: float
    analytic: float | None
    samples: int
    dropped: int
    dim: int = 1


def _lyapunov_task(task):
    system, walk, n, seed, b, count = task
    gen = philox(seed, b, DOMAIN_SYMBOLS)
    if system.all_linear:
        logd = np.log(np.array(system.degrees, dtype=float))
        total = np.zeros(count)
        for start in range(0, n, 4096):
            k = min(4096, n - start)
            total += logd[walk.draw(gen.random((count, k))) - 1].sum(axis=1)
        return total / n, np.zeros(count, dtype=bool)
    # general maps: float orbits, derivatives evaluated pointwise
    x = gen.random(count)
    total = np.zeros(count)
    bad = np.zeros(count, dtype=bool)
    for _ in range(n):
        sym = walk.draw(gen.random(count))
        for s in np.unique(sym):
            idx = sym == s
            g = system[int(s)]
            if g.kind == "logistic":
                deriv = np.abs(4 - 8 * x[idx])
                bad[idx] |= deriv == 0
                total[idx] += np.log(np.where(deriv == 0, 1.0, deriv))
            else:
                total[idx] += g.log_abs_derivative()
            x[idx] = g.eval(x[idx])
    return total / n, bad


def lyapunov_estimate(
    system: SemigroupSystem,
    walk: BernoulliWalk,
    n: int = 10_000,
    samples: int = 1000,
    seed: int = 0,
    workers: int = 1,
    dim: int = 1,
    block: int = 256,
) -> LyapunovEstimate:
    """Monte Carlo Birkhoff averages of ``log|Dg_{omega_{j+1}}(f^j x)| / dim``."""
    tasks = [(system, walk, n, seed, b, min(block, samples - start)) for b, start in enumerate(range(0, samples, block))]
    parts = parallel_map(_lyapunov_task, tasks, workers)
    vals = np.concatenate([v for v, _ in parts]) / dim
    bad = np.concatenate([m for _, m in parts])
    vals = vals[~bad]
    analytic = None
    if system.all_linear:
        analytic = math.fsum(a * math.log(d) for a, d in zip(walk.a, system.degrees)) / dim
    hw = 1.96 * float(vals.std(ddof=1)) / math.sqrt(vals.size) if vals.size > 1 else 0.0
    return LyapunovEstimate(float(vals.mean()), hw, analytic, int(vals.size), int(bad.sum()), dim)


# -- Abramov-Rokhlin -------------------------------------------------------------


@dataclass
class AbramovRokhlinReport:
    n_grid: list[int]
    skew_values: list[float]
    skew_limit: float
    fiber_limit: float
    shift_entropy: float
    difference: float
    holds: bool
    tolerance: float


def _exact_fiber_entropy(system, a, beta, n) -> float:
    """``E_P H_Leb(beta_0^n(omega))`` by enumerating every word of length ``n - 1``."""
    total = 0.0
    for word in itertools.product(range(1, system.p + 1), repeat=n - 1):
        weight = math.prod(a[s - 1] for s in word)
        total += weight * join_entropy(system, word, beta, n)
    return total


def abramov_rokhlin_check(
    system: SemigroupSystem,
    walk: BernoulliWalk,
    beta: CirclePartition | None = None,
    n_grid: Sequence[int] = (6, 7, 8, 9),
    fiber_estimate: float | None = None,
    tolerance: float = 0.05,
) -> AbramovRokhlinReport:
    """Skew-product entropy from cylinder-by-``beta`` joins against ``h(sigma) + h(S, P)``.

    The join of ``[omega_1] x beta`` over ``n`` skew steps has entropy
    ``n h(sigma) + E_P H(beta_0^n(omega))``; the expectation is computed
    exactly over all words, so the left side involves no sampling.
    """
    beta = beta or dyadic_partition()
    n_grid = sorted(n_grid)
    hs = bernoulli_entropy(walk)
    skew = [(n * hs + _exact_fiber_entropy(system, walk.a, beta, n)) / n for n in n_grid]
    skew_limit = extrapolate(n_grid, skew)
    if fiber_estimate is None:
        fiber_estimate = metric_entropy_estimate(system, walk, beta).limit
    diff = skew_limit - (hs + fiber_estimate)
    return AbramovRokhlinReport(list(n_grid), skew, skew_limit, fiber_estimate, hs, diff, abs(diff) <= tolerance, tolerance)
