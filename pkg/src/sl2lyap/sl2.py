"""Exact SL(2,R) arithmetic, the five one-parameter subgroups, and the
boundary actions on the circle, the projective line and the hyperbola
together with their multipliers (Jacobian cocycles).

The group acts on row vectors from the right, ``x . g = x @ g``; all values
are immutable and every function is pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOrbitError

__all__ = [
    "SubgroupKind",
    "GroupElement",
    "one_param",
    "act_circle",
    "act_line",
    "act_hyperbola",
    "renormalized_product",
    "CirclePoint",
    "LinePoint",
    "HyperbolaPoint",
]

_DET_TOL = 1e-12


class SubgroupKind(enum.Enum):
    K = "K"
    A1 = "A1"
    A2 = "A2"
    NPLUS = "Nplus"
    NMINUS = "Nminus"


@dataclass(frozen=True)
class GroupElement:
    """Real 2x2 matrix ((a, b), (c, d)) with unit determinant.

    The determinant is validated on construction with absolute tolerance
    1e-12, relaxed proportionally when the entries are large enough that
    ``a*d - b*c`` is dominated by cancellation noise.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("matrix entries must be finite")
        det = self.a * self.d - self.b * self.c
        scale = max(1.0, abs(self.a * self.d), abs(self.b * self.c))
        if abs(det - 1.0) > _DET_TOL * scale:
            raise ValueError(f"determinant {det!r} is not 1 within tolerance")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @property
    def t(self) -> "GroupElement":
        """Transpose."""
        return GroupElement(self.a, self.c, self.b, self.d)

    def inv(self) -> "GroupElement":
        """Exact inverse ((d, -b), (-c, a))."""
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply_row(self, x1: float, x2: float):
        """Right action on the row vector (x1, x2)."""
        return (self.a * x1 + self.c * x2, self.b * x1 + self.d * x2)

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])


IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)


def one_param(kind: SubgroupKind, t: float) -> GroupElement:
    """Element of the one-parameter subgroup `kind` at parameter t.

    Elliptic k(t) rotates by t/2; hyperbolic a1(t) = diag(e^{t/2}, e^{-t/2})
    and a2(t) built from cosh/sinh of t/2; parabolic n+(t), n-(t) are the
    unit upper/lower triangular shears.
    """
    if not math.isfinite(t):
        raise ValueError("subgroup parameter must be finite")
    h = 0.5 * t
    if kind is SubgroupKind.K:
        ch, sh = math.cos(h), math.sin(h)
        return GroupElement(ch, -sh, sh, ch)
    if kind is SubgroupKind.A1:
        e = math.exp(h)
        return GroupElement(e, 0.0, 0.0, 1.0 / e)
    if kind is SubgroupKind.A2:
        ch, sh = math.cosh(h), math.sinh(h)
        return GroupElement(ch, sh, sh, ch)
    if kind is SubgroupKind.NPLUS:
        return GroupElement(1.0, t, 0.0, 1.0)
    if kind is SubgroupKind.NMINUS:
        return GroupElement(1.0, 0.0, t, 1.0)
    raise ValueError(f"unknown subgroup kind {kind!r}")


def act_circle(theta: float, g: GroupElement):
    """Action of g on the circle angle theta in [0, 2pi), with its multiplier.

    Returns (theta', sigma) where cot(theta'/2) = (a cos(theta/2) + c
    sin(theta/2)) / (b cos(theta/2) + d sin(theta/2)) and sigma is the
    Jacobian d theta'/d theta.  The branch is fixed with atan2 so that the
    map is continuous and 2pi-periodic; a vanishing denominator lands on
    theta' = 0.
    """
    h = 0.5 * theta
    ch, sh = math.cos(h), math.sin(h)
    num = g.a * ch + g.c * sh
    den = g.b * ch + g.d * sh
    half = math.atan2(den, num) % math.pi
    theta_new = 2.0 * half
    if theta_new >= 2.0 * math.pi:
        theta_new -= 2.0 * math.pi
    sigma = 1.0 / (num * num + den * den)
    return theta_new, sigma


def act_line(x: float, g: GroupElement):
    """Projective action x' = (a x + c)/(b x + d) and multiplier 1/(b x + d)^2.

    ``math.inf`` is the point at infinity: it maps to a/b (or stays at
    infinity when b = 0).  A vanishing denominator sends x to infinity with
    the multiplier reported as ``math.inf`` rather than raising.
    """
    if math.isinf(x):
        if g.b == 0.0:
            return math.inf, 1.0 / (g.d * g.d)
        return g.a / g.b, 0.0
    den = g.b * x + g.d
    if den == 0.0:
        return math.inf, math.inf
    return (g.a * x + g.c) / den, 1.0 / (den * den)


def act_hyperbola(x: float, g: GroupElement):
    """Action x' = (a x + c)/(b x + d) on the hyperbola chart (x != 0)
    with multiplier |x / ((a x + c)(b x + d))|.

    The chart degenerates when (a x + c)(b x + d) = 0; that is an error.
    """
    if x == 0.0:
        raise ValueError("hyperbola coordinate must be nonzero")
    num = g.a * x + g.c
    den = g.b * x + g.d
    if num * den == 0.0:
        raise DegenerateOrbitError(f"orbit of x={x!r} leaves the hyperbola chart")
    return num / den, abs(x / (num * den))


def renormalized_product(factors, every: int = 64) -> GroupElement:
    """Product of group elements, rescaling by det^{-1/2} every `every` steps.

    The rescale removes roundoff drift of the determinant; it does not
    bound the matrix norm, so the caller must keep the product within
    floating-point range (weak-disorder models, or few enough factors).
    """
    acc = IDENTITY
    for k, g in enumerate(factors, start=1):
        acc = acc @ g
        if k % every == 0:
            s = 1.0 / math.sqrt(acc.det())
            acc = GroupElement(acc.a * s, acc.b * s, acc.c * s, acc.d * s)
    return acc


@dataclass(frozen=True)
class CirclePoint:
    """Angle on the circle, stored reduced mod 2pi."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", self.theta % (2.0 * math.pi))

    def transform(self, g: GroupElement):
        theta_new, sigma = act_circle(self.theta, g)
        return CirclePoint(theta_new), sigma


@dataclass(frozen=True)
class LinePoint:
    """Point of the projective line; ``math.inf`` is allowed."""

    x: float

    def transform(self, g: GroupElement):
        x_new, sigma = act_line(self.x, g)
        return LinePoint(x_new), sigma


@dataclass(frozen=True)
class HyperbolaPoint:
    """Nonzero coordinate on the two-branched hyperbola chart."""

    x: float

    def __post_init__(self):
        if self.x == 0.0:
            raise ValueError("hyperbola coordinate must be nonzero")

    def transform(self, g: GroupElement):
        x_new, sigma = act_hyperbola(self.x, g)
        return HyperbolaPoint(x_new), sigma
