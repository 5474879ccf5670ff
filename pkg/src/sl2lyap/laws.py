"""Probability laws for the random factors, exposed through their
characteristic function chi(theta) = E exp(i theta t), their moments and a
sampler.

Only laws with every moment finite are provided; chi(0) = 1 and
|chi(theta)| <= 1 hold for all of them.  ``Exponential`` accepts a negative
rate, which denotes the law of -t with t exponential of rate |p| (used for
transposed products where an angle enters with reversed sign).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularModelError

__all__ = ["Dirac", "Exponential", "GammaLaw", "DiscreteLaw", "CallableLaw"]


@dataclass(frozen=True)
class Dirac:
    """Point mass at t0."""

    t0: float

    def chi(self, theta):
        return cmath.exp(1j * theta * self.t0)

    def moment(self, i: int) -> float:
        return self.t0**i

    def sample(self, rng, size):
        return np.full(size, float(self.t0))

    def label(self) -> str:
        return f"dirac:{self.t0:g}"


@dataclass(frozen=True)
class Exponential:
    """Exponential law of rate p (mean 1/p); p < 0 means the mirrored law -t."""

    rate: float

    def __post_init__(self):
        if self.rate == 0 or not math.isfinite(self.rate):
            raise ValueError("exponential rate must be finite and nonzero")

    def chi(self, theta):
        return 1.0 / (1.0 - 1j * theta / self.rate)

    def moment(self, i: int) -> float:
        return math.factorial(i) / self.rate**i

    def sample(self, rng, size):
        scale = 1.0 / abs(self.rate)
        out = rng.standard_exponential(size) * scale
        return out if self.rate > 0 else -out

    def label(self) -> str:
        return f"exp:{self.rate:g}"


@dataclass(frozen=True)
class GammaLaw:
    """Gamma law with shape k and scale theta (mean k*theta)."""

    shape: float
    scale: float

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("gamma shape and scale must be positive")

    def chi(self, theta):
        return (1.0 - 1j * theta * self.scale) ** (-self.shape)

    def moment(self, i: int) -> float:
        out = 1.0
        for j in range(i):
            out *= (self.shape + j) * self.scale
        return out

    def sample(self, rng, size):
        return rng.gamma(self.shape, self.scale, size)

    def label(self) -> str:
        return f"gamma:{self.shape:g},{self.scale:g}"


@dataclass(frozen=True)
class DiscreteLaw:
    """Finite-support law, mainly used for moment-matching cross-checks."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.points) != len(self.weights) or not self.points:
            raise ValueError("points and weights must be nonempty and equal length")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    def chi(self, theta):
        return sum(w * cmath.exp(1j * theta * t) for t, w in zip(self.points, self.weights))

    def moment(self, i: int) -> float:
        return float(sum(w * t**i for t, w in zip(self.points, self.weights)))

    def sample(self, rng, size):
        return rng.choice(np.asarray(self.points, dtype=float), p=np.asarray(self.weights), size=size)

    def label(self) -> str:
        pts = ",".join(f"{t:g}" for t in self.points)
        return f"discrete:{pts}"


class CallableLaw:
    """Wrap a user characteristic function.

    ``|chi| <= 1`` is asserted lazily on every real argument the solvers
    actually evaluate; moments and a sampler are optional.
    """

    def __init__(self, chi, moments=None, sampler=None, name="callable"):
        self._chi = chi
        self._moments = moments
        self._sampler = sampler
        self._name = name

    def chi(self, theta):
        val = complex(self._chi(theta))
        if abs(theta) > 0 and abs(val) > 1.0 + 1e-12:
            raise SingularModelError(
                f"|chi({theta!r})| = {abs(val):.6g} > 1; not a characteristic function"
            )
        return val

    def moment(self, i: int) -> float:
        if self._moments is None:
            raise ValueError("this law has no registered moments")
        return self._moments[i]

    def sample(self, rng, size):
        if self._sampler is None:
            raise ValueError("this law has no registered sampler")
        return self._sampler(rng, size)

    def label(self) -> str:
        return self._name


def parse_law(text: str):
    """Parse the distribution grammar ``exp:<p>``, ``gamma:<k>,<theta>``, ``dirac:<t0>``."""
    try:
        kind, _, rest = text.partition(":")
        if kind == "exp":
            return Exponential(float(rest))
        if kind == "gamma":
            k, theta = rest.split(",")
            return GammaLaw(float(k), float(theta))
        if kind == "dirac":
            return Dirac(float(rest))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad distribution spec {text!r}: {exc}") from None
    raise ValueError(f"unknown distribution kind {text!r} (use exp:, gamma: or dirac:)")
