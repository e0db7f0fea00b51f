"""Vectorised orbits of Lebesgue-random points under linear expanding maps.

A point is stored as a 64-bit integer ``m`` meaning ``x in [m, m+1) / 2^64``
with the unseen tail of ``x`` uniform and independent of ``m``.  Applying
``k x mod 1`` gives ``m' = k m + c (mod 2^64)`` where the carry ``c`` is
uniform on ``{0, ..., k-1}`` and the new tail is again uniform.  Drawing the
carry afresh therefore reproduces the exact law of the orbit of a uniform
real point; unlike double-precision iteration, orbits never collapse to 0.
Membership of ``x`` in an arc with non-dyadic endpoints is undecided only
inside the single 2^-64 cell containing an endpoint.

Work is split into fixed-size blocks, each with its own Philox key, so
results do not depend on how blocks are spread over worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .circle import ArcSet
from .errors import CapabilityError
from .generators import SemigroupSystem
from .symbols import BernoulliWalk, SymbolStream

SCALE = 1 << 64
BLOCK = 1 << 15
_INV_SCALE = 2.0**-64


class Thresholds:
    """Integer form of an ArcSet for tests on 64-bit fixed-point points."""

    def __init__(self, A: ArcSet):
        self.arcset = A
        self.bounds = [
            (math.ceil(Fraction(lo) * SCALE), math.ceil(Fraction(hi) * SCALE)) for lo, hi in A.intervals
        ]

    def member(self, m: np.ndarray) -> np.ndarray:
        out = np.zeros(m.shape, dtype=bool)
        for lo, hi in self.bounds:
            if lo >= SCALE:
                continue
            inside = m >= np.uint64(lo)
            if hi < SCALE:
                inside &= m < np.uint64(hi)
            out |= inside
        return out


def to_float(m: np.ndarray) -> np.ndarray:
    return m.astype(np.float64) * _INV_SCALE


def require_linear(system: SemigroupSystem, what: str) -> np.ndarray:
    if not system.all_linear:
        raise CapabilityError(f"{what} needs linear expanding generators; got {system.spec}")
    return np.array(system.degrees, dtype=np.uint64)


def sample_in(gen: np.random.Generator, A: ArcSet, size: int, batch: int | None = None) -> np.ndarray:
    """Rejection sampling of ``size`` fixed-point points uniform on ``A``."""
    if A.length <= 0:
        raise ValueError("cannot sample from a set of zero length")
    th = Thresholds(A)
    out = np.empty(size, dtype=np.uint64)
    filled = 0
    batch = batch or max(64, int(1.2 * size / float(A.length)) + 64)
    while filled < size:
        raw = gen.bit_generator.random_raw(batch)
        keep = raw[th.member(raw)]
        take = min(size - filled, keep.size)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def step(m: np.ndarray, degree, gen: np.random.Generator) -> np.ndarray:
    """One application of ``k x mod 1`` with exact tail carries."""
    carry = gen.integers(0, degree, size=m.shape, dtype=np.uint64)
    return m * np.asarray(degree, dtype=np.uint64) + carry


def first_return_block(
    degrees: np.ndarray,
    A: ArcSet,
    m0: np.ndarray,
    n_max: int,
    gen: np.random.Generator,
    symbols: np.ndarray | None = None,
    walk: BernoulliWalk | None = None,
    target: ArcSet | None = None,
) -> np.ndarray:
    """First ``k in [1, n_max]`` with ``f^k(x) in target`` (default ``A``); 0 marks censoring.

    ``symbols[k-1]`` is the symbol applied at step ``k`` (shared by all
    points: quenched); with ``walk`` every point draws its own symbols
    (annealed).
    """
    th = Thresholds(target if target is not None else A)
    times = np.zeros(m0.size, dtype=np.int64)
    active = np.arange(m0.size)
    m = m0.copy()
    for k in range(1, n_max + 1):
        if symbols is not None:
            deg = degrees[symbols[k - 1] - 1]
        else:
            sym = walk.draw(gen.random(active.size))
            deg = degrees[sym - 1]
        m = step(m, deg, gen)
        hit = th.member(m)
        times[active[hit]] = k
        keep = ~hit
        active, m = active[keep], m[keep]
        if active.size == 0:
            break
    return times


def blocks(total: int, size: int = BLOCK) -> list[tuple[int, int, int]]:
    """``(block id, first sample index, count)`` triples covering ``total`` samples."""
    return [(b, start, min(size, total - start)) for b, start in enumerate(range(0, total, size))]


def parallel_map(fn: Callable, tasks: Sequence, workers: int = 1) -> list:
    """Order-preserving map; results are identical for any worker count."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def quenched_symbols(stream: SymbolStream, n: int) -> np.ndarray:
    return stream.take(n)
