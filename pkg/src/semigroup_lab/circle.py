"""Points, arcs and finite unions of arcs on the circle S^1 = [0, 1).

Every routine is generic over the coordinate type: ``float`` for fast
work and :class:`fractions.Fraction` for the exact arm.  Mixed inputs
degrade to floats.  Float comparisons use an absolute tolerance of
``EPS_GEOM``; exact inputs are compared with no tolerance at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from .errors import InvalidRadiusError

Number = Union[float, Fraction]

EPS_GEOM = 1e-12


def is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def _tol(*values) -> float:
    return 0 if is_exact(*values) else EPS_GEOM


def to_number(x) -> Number:
    """Coerce ``x`` to a coordinate: strings and integers become exact."""
    if isinstance(x, bool):
        raise TypeError("booleans are not circle coordinates")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return float(x)


def mod1(x: Number) -> Number:
    if isinstance(x, Rational):
        return Fraction(x) % 1
    r = float(x) % 1.0
    # -1e-20 % 1.0 == 1.0 in IEEE arithmetic
    return 0.0 if r >= 1.0 else r


def circle_dist(x: Number, y: Number) -> Number:
    d = mod1(to_number(x) - to_number(y))
    return min(d, 1 - d)


@dataclass(frozen=True)
class Arc:
    """Half-open arc ``[start, start + length)``; ``length == 1`` is the whole circle."""

    start: Number
    length: Number

    def __post_init__(self):
        start = mod1(to_number(self.start))
        length = to_number(self.length)
        if length < 0:
            raise ValueError(f"negative arc length {length}")
        if length >= 1:
            start, length = (Fraction(0) if is_exact(length) else 0.0), (Fraction(1) if is_exact(length) else 1.0)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "length", length)

    @property
    def end(self) -> Number:
        """End coordinate, possibly beyond 1 when the arc wraps."""
        return self.start + self.length

    @property
    def is_full(self) -> bool:
        return self.length >= 1

    def intervals(self) -> list[tuple[Number, Number]]:
        if self.length == 0:
            return []
        if self.is_full:
            one = Fraction(1) if is_exact(self.length) else 1.0
            return [(one - one, one)]
        end = self.end
        if end <= 1:
            return [(self.start, end)]
        return [(self.start, type(end)(1)), (type(end)(0), end - 1)]

    def contains(self, x: Number) -> bool:
        return self.length > 0 and mod1(to_number(x) - self.start) < self.length

    def to_arcset(self) -> "ArcSet":
        return ArcSet(self.intervals())


def ball(x: Number, delta: Number) -> Arc:
    """Metric ball ``B_delta(x)`` as the arc of length ``min(1, 2 delta)`` centred at ``x``."""
    x = to_number(x)
    delta = to_number(delta)
    if delta <= 0:
        raise InvalidRadiusError(f"radius must be positive, got {delta}")
    if 2 * delta >= 1:
        return Arc(x - x, x - x + 1)
    return Arc(x - delta, 2 * delta)


class ArcSet:
    """A finite union of half-open arcs, kept as sorted disjoint intervals of [0, 1].

    Touching intervals are merged, so two ArcSets describing the same set
    compare equal and hash equal; BFS deduplication relies on this.
    """

    __slots__ = ("intervals", "_eps")

    def __init__(self, intervals: Iterable[tuple[Number, Number]] = ()):
        pieces = []
        for lo, hi in intervals:
            lo, hi = to_number(lo), to_number(hi)
            if not (0 <= lo <= hi <= 1):
                raise ValueError(f"interval ({lo}, {hi}) is not inside [0, 1]")
            pieces.append((lo, hi))
        flat = [v for pair in pieces for v in pair]
        self._eps = _tol(*flat)
        self.intervals = self._normalize(pieces)

    def _normalize(self, pieces):
        eps = self._eps
        pieces = sorted(p for p in pieces if p[1] - p[0] > eps)
        merged: list[tuple[Number, Number]] = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1] + eps:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        return tuple(merged)

    # constructors -------------------------------------------------------

    @classmethod
    def full(cls, exact: bool = True) -> "ArcSet":
        one = Fraction(1) if exact else 1.0
        return cls([(one - one, one)])

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls()

    @classmethod
    def from_bounds(cls, a, b) -> "ArcSet":
        """The arc running counter-clockwise from ``a`` to ``b``; ``b < a`` wraps through 0."""
        a, b = to_number(a), to_number(b)
        if a == b:
            return cls()
        return Arc(a, mod1(b - a) if b != 1 else 1 - a).to_arcset()

    @classmethod
    def from_arcs(cls, arcs: Iterable[Arc]) -> "ArcSet":
        return cls(iv for arc in arcs for iv in arc.intervals())

    # queries ------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self._eps == 0

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other) -> bool:
        return isinstance(other, ArcSet) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        body = " U ".join(f"[{lo}, {hi})" for lo, hi in self.intervals) or "{}"
        return f"ArcSet({body})"

    @property
    def length(self) -> Number:
        return sum((hi - lo for lo, hi in self.intervals), start=Fraction(0) if self.exact else 0.0)

    lebesgue_length = length

    @property
    def is_full(self) -> bool:
        return len(self.intervals) == 1 and self.length >= 1 - self._eps

    @property
    def arcs(self) -> list[Arc]:
        """Maximal arcs, joining the interval ending at 1 with the one starting at 0."""
        ivs = list(self.intervals)
        if not ivs:
            return []
        if self.is_full:
            return [Arc(ivs[0][0], 1)]
        wrap = len(ivs) > 1 and ivs[0][0] <= self._eps and ivs[-1][1] >= 1 - self._eps
        out = [Arc(lo, hi - lo) for lo, hi in ivs]
        if wrap:
            first, last = out[0], out[-1]
            out = out[1:-1] + [Arc(last.start, last.length + first.length)]
        return out

    def contains(self, x: Number) -> bool:
        x = mod1(to_number(x))
        return any(lo <= x < hi for lo, hi in self.intervals)

    __contains__ = contains

    def contains_closed(self, x: Number) -> bool:
        """Membership in the topological closure (1 is identified with 0)."""
        x = mod1(to_number(x))
        eps = max(self._eps, _tol(x))
        for lo, hi in self.intervals:
            if lo - eps <= x <= hi + eps:
                return True
            if hi >= 1 - eps and x <= eps:
                return True
        return False

    # set algebra --------------------------------------------------------

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(self.intervals + other.intervals)

    __or__ = union

    def intersection(self, other: "ArcSet") -> "ArcSet":
        out = []
        for lo1, hi1 in self.intervals:
            for lo2, hi2 in other.intervals:
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if lo < hi:
                    out.append((lo, hi))
        return ArcSet(out)

    __and__ = intersection

    def complement(self) -> "ArcSet":
        zero = Fraction(0) if self.exact else 0.0
        out, cursor = [], zero
        for lo, hi in self.intervals:
            if lo > cursor:
                out.append((cursor, lo))
            cursor = hi
        if cursor < 1:
            out.append((cursor, zero + 1))
        return ArcSet(out)

    def intersects(self, other: "ArcSet") -> bool:
        """Half-open convention: only an overlap of positive length counts."""
        eps = max(self._eps, other._eps)
        return any(
            min(hi1, hi2) - max(lo1, lo2) > eps
            for lo1, hi1 in self.intervals
            for lo2, hi2 in other.intervals
        )

    def intersects_closed(self, other: "ArcSet") -> bool:
        """Closed convention: arcs whose closures touch at a point intersect."""
        if not self or not other:
            return False
        eps = max(self._eps, other._eps)
        for lo1, hi1 in self.intervals:
            for lo2, hi2 in other.intervals:
                if max(lo1, lo2) <= min(hi1, hi2) + eps:
                    return True
        # closure of an interval ending at 1 contains the point 0
        ends_at_one = lambda s: s.intervals[-1][1] >= 1 - eps
        starts_at_zero = lambda s: s.intervals[0][0] <= eps
        return (ends_at_one(self) and starts_at_zero(other)) or (
            ends_at_one(other) and starts_at_zero(self)
        )

    def rotate(self, offset: Number) -> "ArcSet":
        return ArcSet.from_arcs(Arc(a.start + offset, a.length) for a in self.arcs)

    def as_float(self) -> "ArcSet":
        return ArcSet((float(lo), float(hi)) for lo, hi in self.intervals)


def arcset_from_pairs(pairs: Sequence[Sequence]) -> ArcSet:
    """Build an ArcSet from ``[[a, b], ...]`` pairs, each read as the arc ``[a, b)``."""
    out = ArcSet()
    for pair in pairs:
        if len(pair) != 2:
            raise ValueError(f"expected a pair [start, end], got {pair!r}")
        out = out | ArcSet.from_bounds(pair[0], pair[1])
    return out


def parse_arcset(text: str) -> ArcSet:
    """Parse ``"[0,1/2)"``, ``"[0.9,0.1)"`` (wrapping) or unions joined by ``U``.

    The bracket style is cosmetic: every arc is stored half-open.
    """
    text = text.strip()
    if text.lower() in ("x", "full", "circle", "[0,1)"):
        return ArcSet.full()
    if text in ("", "{}", "empty"):
        return ArcSet()
    pairs = []
    for chunk in text.replace("∪", "U").split("U"):
        chunk = chunk.strip().strip("[]()")
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"cannot parse arc {chunk!r}")
        pairs.append(parts)
    return arcset_from_pairs(pairs)
