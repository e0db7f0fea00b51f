"""Fibered orbits of the skew product (omega, x) -> (sigma omega, g_{omega_1} x).

A :class:`FiberedOrbit` runs in one of two arms:

* exact: points are Fractions (or :class:`SineSquared` for logistic
  periodic points); nothing is ever rounded.
* float: points are reported as floats, but linear and rational-rotation
  steps are carried on a binary fixed-point integer.  Plain doubles lose
  ``log2(k)`` bits per step of ``k x mod 1`` and would be meaningless
  after a few dozen iterates of tripling; the fixed-point arm tracks a
  rigorous error bound and silently recomputes the trace at twice the
  precision whenever a requested iterate would exceed ``MAX_ERROR``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .circle import Arc, ArcSet, Number, circle_dist, to_number
from .errors import InvalidRadiusError, UnsupportedGeneratorError
from .generators import LinearExpanding, Rotation, SemigroupSystem, SineSquared
from .symbols import SymbolStream

MAX_ERROR = 2.0**-64
START_BITS = 256


class FiberedOrbit:
    """Lazy trace ``f_omega^n(x0)``, ``n >= 0``, along a fixed symbol stream."""

    def __init__(self, system: SemigroupSystem, stream: SymbolStream, x0, exact: bool = False):
        self.system = system
        self.stream = stream
        self.exact = exact
        if exact:
            self.x0 = x0 if isinstance(x0, SineSquared) else Fraction(to_number(x0))
        else:
            self.x0 = float(x0) if isinstance(x0, SineSquared) else to_number(x0)
        self._trace: list = [self.x0]
        self._bits = START_BITS
        self._fixed: list[int] = []
        self._err: list[float] = []
        if not exact:
            self._reset_fixed(self._bits)

    def __repr__(self):
        arm = "exact" if self.exact else "float"
        return f"FiberedOrbit({self.system.spec}, {self.stream.mode}, x0={self.x0}, {arm})"

    # float arm ------------------------------------------------------------

    def _reset_fixed(self, bits: int):
        self._bits = bits
        x = Fraction(self.x0)
        scaled = x * (1 << bits)
        m = round(scaled)
        self._fixed = [m & ((1 << bits) - 1)]
        self._err = [float(abs(scaled - m) / (1 << bits))]
        self._trace = [self.x0]

    def _fixed_step(self, symbol: int):
        g = self.system[symbol]
        m, err, bits = self._fixed[-1], self._err[-1], self._bits
        if isinstance(g, LinearExpanding):
            m_new, err_new = g.fixed_step(m, bits), g.degree * err
        elif isinstance(g, Rotation):
            m_new, err_new = g.fixed_step(m, bits), err + 2.0 ** -(bits + 1)
        else:
            # logistic (or any other map) falls back to double precision
            y = float(g.eval(m / (1 << bits)))
            m_new = round(y * (1 << bits)) & ((1 << bits) - 1)
            err_new = 4 * err + 2.0**-52
        self._fixed.append(m_new)
        self._err.append(err_new)
        self._trace.append(m_new / (1 << bits))

    def _extend_float(self, n: int):
        while len(self._trace) <= n:
            k = len(self._trace) - 1
            self._fixed_step(self.stream.at(k))
            if self._err[-1] > MAX_ERROR and self._refinable():
                self._reset_fixed(2 * self._bits + int(math.log2(max(self._err[-1], 1e-300) / MAX_ERROR)) + 64)
                target = n
                while len(self._trace) <= target:
                    self._fixed_step(self.stream.at(len(self._trace) - 1))

    def _refinable(self) -> bool:
        return all(isinstance(g, (LinearExpanding, Rotation)) for g in self.system.generators)

    # public ---------------------------------------------------------------

    def error_bound(self, n: int) -> float:
        """Worst-case distance between the float-arm iterate and the true one."""
        if self.exact:
            return 0.0
        self.orbit_point(n)
        return self._err[n]

    def orbit_point(self, n: int):
        if n < 0:
            raise ValueError("orbit index must be non-negative")
        if self.exact:
            while len(self._trace) <= n:
                k = len(self._trace) - 1
                self._trace.append(self.system[self.stream.at(k)].eval(self._trace[-1]))
            return self._trace[n]
        self._extend_float(n)
        return self._trace[n]

    def __getitem__(self, n: int):
        return self.orbit_point(n)

    def points(self, n: int) -> list:
        """The first ``n`` iterates ``f^0 x0 .. f^{n-1} x0``."""
        if n:
            self.orbit_point(n - 1)
        return self._trace[:n]

    def with_start(self, y) -> "FiberedOrbit":
        return FiberedOrbit(self.system, self.stream, y, self.exact)


def orbit_point(o: FiberedOrbit, n: int):
    return o.orbit_point(n)


def dyn_ball_contains(o: FiberedOrbit, y, delta: Number, n: int) -> bool:
    """``y`` lies in the dynamical ball iff ``d(f^j x0, f^j y) < delta`` for ``0 <= j < n``."""
    if delta <= 0:
        raise InvalidRadiusError(f"radius must be positive, got {delta}")
    if n < 1:
        raise ValueError("dynamical balls need n >= 1")
    other = o.with_start(y)
    for j in range(n):
        a, b = o.orbit_point(j), other.orbit_point(j)
        if isinstance(a, SineSquared) or isinstance(b, SineSquared):
            a, b = float(a), float(b)
        if not circle_dist(a, b) < delta:
            return False
    return True


def _linear_degrees(system: SemigroupSystem, stream: SymbolStream, count: int) -> list[int]:
    out = []
    for k in range(count):
        g = system[stream.at(k)]
        if not isinstance(g, LinearExpanding):
            raise UnsupportedGeneratorError(f"dynamical balls are exact only for linear maps, got {g!r}")
        out.append(g.degree)
    return out


def dyn_ball_offsets(system: SemigroupSystem, stream: SymbolStream, delta: Number, n: int) -> list[tuple]:
    """Offsets ``u`` (in (-1/2, 1/2]) with ``dist(D_j u, Z) < delta`` for all ``j < n``.

    ``D_j`` is the cumulative degree after ``j`` steps.  Returned as sorted
    open intervals ``(lo, hi)``; for ``delta < 1/(max degree + 1)`` this is the
    single interval ``(-delta/D_{n-1}, delta/D_{n-1})``.
    """
    delta = to_number(delta)
    if delta <= 0:
        raise InvalidRadiusError(f"radius must be positive, got {delta}")
    half = Fraction(1, 2) if isinstance(delta, Fraction) else 0.5
    current = [(-min(delta, half), min(delta, half))]
    if delta > half:
        current = [(-half, half)]
    d = 1
    for k in _linear_degrees(system, stream, n - 1):
        d *= k
        nxt = []
        for lo, hi in current:
            # allowed pieces: ((m - delta)/d, (m + delta)/d) for integers m
            m_lo = math.floor(lo * d - delta)
            m_hi = math.ceil(hi * d + delta)
            for m in range(m_lo, m_hi + 1):
                a, b = max(lo, (m - delta) / d), min(hi, (m + delta) / d)
                if a < b:
                    nxt.append((a, b))
        nxt.sort()
        merged = []
        for a, b in nxt:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
            else:
                merged.append((a, b))
        current = merged
    return current


def dyn_ball(o: FiberedOrbit, delta: Number, n: int) -> ArcSet:
    """The dynamical ball ``B^omega_delta(x0, n)`` as an exact ArcSet (linear generators)."""
    x0 = o.x0
    if isinstance(x0, float) and isinstance(to_number(delta), Fraction):
        delta = float(delta)
    offsets = dyn_ball_offsets(o.system, o.stream, delta, n)
    if len(offsets) == 1 and offsets[0][1] - offsets[0][0] >= 1:
        return ArcSet.full(isinstance(x0, Fraction))
    return ArcSet.from_arcs(Arc(x0 + lo, hi - lo) for lo, hi in offsets)


def dyn_ball_as_arc(o: FiberedOrbit, delta: Number, n: int) -> Arc:
    """Single-arc form of :func:`dyn_ball`; raises if the ball is disconnected."""
    offsets = dyn_ball_offsets(o.system, o.stream, delta, n)
    if len(offsets) != 1:
        raise ValueError(f"dynamical ball has {len(offsets)} components at radius {delta}")
    lo, hi = offsets[0]
    return Arc(o.x0 + lo, hi - lo)


def sandwich_radii(system: SemigroupSystem, delta: Number, n: int) -> tuple[Number, Number]:
    """Radii ``(delta * Lambda^-(n-1), delta * lambda^-(n-1))`` bounding every dynamical ball.

    Only the first ``n - 1`` maps constrain ``B(x, n)``, hence the exponent.
    """
    if isinstance(delta, Fraction) and system.all_linear:
        return delta / max(system.degrees) ** (n - 1), delta / min(system.degrees) ** (n - 1)
    return delta * system.max_expansion ** -(n - 1), delta * system.min_expansion ** -(n - 1)


def trace(system: SemigroupSystem, word: Sequence[int], x0, exact: bool = True) -> list:
    """Orbit of ``x0`` along a finite word (``len(word) + 1`` points)."""
    out = [x0]
    for s in system.check_word(word):
        out.append(system[s].eval(out[-1]))
    return out if exact else [float(v) for v in out]

