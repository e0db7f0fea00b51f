"""Simulation and estimation lab for free semigroup actions on the circle.

Expanding circle maps (``kx mod 1``), the logistic map and rational
rotations are composed along symbol sequences; the lab measures return
times, recurrence rates, entropies, Lyapunov exponents and hitting
frequencies, with exact rational oracles for cross-checking.
"""

__version__ = "0.1.0"

from .circle import Arc, ArcSet, ball, circle_dist, parse_arcset
from .generators import LinearExpanding, Logistic, Rotation, SemigroupSystem, SineSquared
from .skew import FiberedOrbit
from .symbols import BernoulliWalk, PeriodicMixture, SymbolStream

__all__ = [
    "Arc",
    "ArcSet",
    "BernoulliWalk",
    "FiberedOrbit",
    "LinearExpanding",
    "Logistic",
    "PeriodicMixture",
    "Rotation",
    "SemigroupSystem",
    "SineSquared",
    "SymbolStream",
    "ball",
    "circle_dist",
    "parse_arcset",
]
