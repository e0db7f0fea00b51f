"""The one-sided shift on p symbols: random walks, symbol streams, entropy.

Randomness comes from numpy's counter-based Philox generator keyed by
``(seed, stream id, domain)``.  Symbols are produced in fixed-size chunks
whose counter is the chunk index, so ``omega_k`` is available in O(1)
without generating the prefix, and shifted or cloned streams reproduce
the same sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .generators import Word, parse_word

CHUNK = 4096
_MASK64 = (1 << 64) - 1

# key domains keep the symbol, start-point and carry streams independent
DOMAIN_SYMBOLS = 1
DOMAIN_POINTS = 2
DOMAIN_MIXTURE = 3
DOMAIN_AUX = 4


def philox(seed: int, stream: int, domain: int = DOMAIN_AUX, chunk: int = 0) -> np.random.Generator:
    """A Generator whose output depends only on the four integer arguments."""
    key = [seed & _MASK64, ((stream << 8) | domain) & _MASK64]
    return np.random.Generator(np.random.Philox(key=key, counter=(chunk & _MASK64) << 64))


@dataclass(frozen=True)
class BernoulliWalk:
    """Product measure P_a on sequences, ``a`` strictly positive and summing to 1."""

    a: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if not a:
            raise ValueError("empty probability vector")
        if any(not 0 < x <= 1 for x in a) or (len(a) > 1 and any(x >= 1 for x in a)):
            raise ValueError(f"Bernoulli weights must lie in (0, 1), got {a}")
        if abs(sum(a) - 1) > 1e-12:
            raise ValueError(f"Bernoulli weights must sum to 1, got {sum(a)!r}")
        object.__setattr__(self, "a", a)

    @classmethod
    def symmetric(cls, p: int) -> "BernoulliWalk":
        return cls(tuple([1 / p] * p))

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def cumulative(self) -> np.ndarray:
        c = np.cumsum(self.a)
        c[-1] = 1.0
        return c

    def draw(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms in [0, 1) to symbols ``1..p``."""
        return np.searchsorted(self.cumulative, u, side="right").astype(np.int64) + 1

    def entropy(self) -> float:
        return bernoulli_entropy(self)

    def __repr__(self):
        return "bernoulli:" + ",".join(repr(x) for x in self.a)


def bernoulli_entropy(walk: BernoulliWalk | Sequence[float]) -> float:
    """Shift entropy ``-sum a_i log a_i`` in nats."""
    a = walk.a if isinstance(walk, BernoulliWalk) else walk
    return -sum(x * math.log(x) for x in a if x > 0)


@dataclass(frozen=True)
class PeriodicMixture:
    """A shift-invariant law supported on finitely many periodic sequences.

    ``components`` pairs each cyclic word ``w`` with its weight; the law is
    ``sum weight * delta_{w^infinity}`` (each cyclic orbit counted through
    its base point).  ``{(1,): 1/3, (2,): 2/3}`` is the law used to exhibit
    equal hitting frequencies for logistic + doubling.
    """

    components: tuple[tuple[Word, Fraction], ...]

    def __post_init__(self):
        comps = tuple((parse_word(w), Fraction(wt)) for w, wt in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(wt <= 0 for _, wt in comps) or sum(wt for _, wt in comps) != 1:
            raise ValueError("mixture weights must be positive and sum to exactly 1")
        if any(not w for w, _ in comps):
            raise ValueError("mixture components must be non-empty words")
        object.__setattr__(self, "components", comps)

    @property
    def p(self) -> int:
        return max(max(w) for w, _ in self.components)

    def symbol_frequencies(self) -> dict[int, Fraction]:
        freq: dict[int, Fraction] = {}
        for w, wt in self.components:
            for s in w:
                freq[s] = freq.get(s, Fraction(0)) + wt / len(w)
        return freq

    def __repr__(self):
        return "mixture:" + ",".join(f"{''.join(map(str, w))}={wt}" for w, wt in self.components)


@lru_cache(maxsize=256)
def _sampled_chunk(walk: BernoulliWalk, seed: int, stream: int, chunk: int) -> np.ndarray:
    u = philox(seed, stream, DOMAIN_SYMBOLS, chunk).random(CHUNK)
    out = walk.draw(u)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SymbolStream:
    """A cursor over one sequence omega in the shift space.

    Exactly one source is set: ``walk`` (sampled with ``seed``/``stream_id``),
    or a finite ``prefix`` followed by the periodic ``tail`` (a purely cyclic
    stream has an empty prefix).  ``position`` counts symbols already
    consumed; ``at(0)`` is the next symbol.
    """

    walk: BernoulliWalk | None = None
    seed: int = 0
    stream_id: int = 0
    prefix: Word = ()
    tail: Word = ()
    position: int = 0

    def __post_init__(self):
        if (self.walk is None) == (not self.tail):
            raise ValueError("a stream is either sampled from a walk or has a cyclic tail")
        if self.walk is not None and self.prefix:
            raise ValueError("sampled streams take no explicit prefix")
        if self.position < 0:
            raise ValueError("negative stream position")

    @classmethod
    def sampled(cls, walk: BernoulliWalk, seed: int, stream_id: int = 0) -> "SymbolStream":
        return cls(walk=walk, seed=int(seed), stream_id=int(stream_id))

    @classmethod
    def cyclic(cls, word) -> "SymbolStream":
        return cls(tail=parse_word(word))

    @classmethod
    def explicit(cls, prefix, tail) -> "SymbolStream":
        return cls(prefix=parse_word(prefix), tail=parse_word(tail))

    @property
    def mode(self) -> str:
        if self.walk is not None:
            return f"sampled:{self.walk!r}:seed={self.seed}:stream={self.stream_id}"
        if not self.prefix:
            return "cyclic:" + "".join(map(str, self.tail))
        return "explicit:" + "".join(map(str, self.prefix)) + "|" + "".join(map(str, self.tail))

    @property
    def is_constant(self) -> bool:
        """True when every symbol from the cursor on is the same (shift acts trivially)."""
        return self.walk is None and len(set(self.tail)) == 1 and (
            self.position >= len(self.prefix) or set(self.prefix[self.position:]) <= set(self.tail)
        )

    def _absolute(self, index: int) -> int:
        if self.walk is not None:
            chunk, offset = divmod(index, CHUNK)
            return int(_sampled_chunk(self.walk, self.seed, self.stream_id, chunk)[offset])
        if index < len(self.prefix):
            return self.prefix[index]
        return self.tail[(index - len(self.prefix)) % len(self.tail)]

    def at(self, k: int) -> int:
        """Symbol ``omega_{position + k + 1}`` (0-based offset from the cursor)."""
        return self._absolute(self.position + k)

    def take(self, n: int, offset: int = 0) -> np.ndarray:
        """The next ``n`` symbols after skipping ``offset``, as an int64 array."""
        start = self.position + offset
        if self.walk is not None:
            first, last = start // CHUNK, (start + n - 1) // CHUNK if n else start // CHUNK
            if n == 0:
                return np.empty(0, dtype=np.int64)
            parts = [_sampled_chunk(self.walk, self.seed, self.stream_id, c) for c in range(first, last + 1)]
            joined = np.concatenate(parts) if len(parts) > 1 else parts[0]
            lo = start - first * CHUNK
            return np.array(joined[lo:lo + n], dtype=np.int64)
        return np.array([self._absolute(start + i) for i in range(n)], dtype=np.int64)

    def next_symbol(self) -> tuple[int, "SymbolStream"]:
        """The next symbol and the advanced cursor (streams are immutable values)."""
        return self.at(0), self.shift(1)

    def shift(self, k: int) -> "SymbolStream":
        if k < 0:
            raise ValueError("shift takes a non-negative count")
        return SymbolStream(self.walk, self.seed, self.stream_id, self.prefix, self.tail, self.position + k)

    def __iter__(self):
        i = 0
        while True:
            yield self.at(i)
            i += 1


def shift(stream: SymbolStream, k: int) -> SymbolStream:
    return stream.shift(k)


def next_symbol(stream: SymbolStream) -> tuple[int, SymbolStream]:
    return stream.next_symbol()


def parse_walk(text: str):
    """Parse ``"bernoulli:0.5,0.5"``, ``"cyclic:1212"`` or ``"mixture:1=1/3,2=2/3"``.

    Returns a :class:`BernoulliWalk`, a cyclic :class:`SymbolStream` or a
    :class:`PeriodicMixture`.
    """
    raw = text.strip()
    name, _, arg = raw.partition(":")
    name = name.strip().lower()
    if name == "bernoulli":
        try:
            return BernoulliWalk(tuple(float(Fraction(v)) for v in arg.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad walk {text!r}: {exc}") from None
    if name == "symmetric":
        return BernoulliWalk.symmetric(int(arg))
    if name == "cyclic":
        return SymbolStream.cyclic(arg)
    if name == "mixture":
        comps = []
        for item in arg.split(","):
            word, eq, weight = item.partition("=")
            if not eq:
                raise ValueError(f"bad mixture component {item!r}; expected word=weight")
            comps.append((parse_word(word), Fraction(weight.strip())))
        return PeriodicMixture(tuple(comps))
    raise ValueError(f"unknown walk {text!r}; expected bernoulli:..., cyclic:..., mixture:...")


def two_block_frequencies(symbols: np.ndarray, p: int) -> np.ndarray:
    """Empirical frequencies of consecutive pairs, shape ``(p, p)``."""
    pairs = (symbols[:-1] - 1) * p + (symbols[1:] - 1)
    counts = np.bincount(pairs, minlength=p * p).astype(float)
    return (counts / counts.sum()).reshape(p, p)
