"""The four product families and the shared perturbation-result container."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

__all__ = ["Family", "PerturbationResult"]


class Family(enum.Enum):
    """Composition g = d(t) e(tau) of the random product, named by the two
    one-parameter subgroups in order."""

    K_NPLUS = "k-nplus"
    NMINUS_K = "nminus-k"
    NMINUS_NPLUS = "nminus-nplus"
    NMINUS_A1 = "nminus-a1"


@dataclass(frozen=True)
class PerturbationResult:
    """First two eigenvalue-expansion coefficients and the derived growth
    rate and variance: gamma = -lambda1/2, sigma2 = lambda1^2/4 - lambda2/2."""

    lambda1: float
    lambda2: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def gamma(self) -> float:
        return -0.5 * self.lambda1

    @property
    def sigma2(self) -> float:
        return 0.25 * self.lambda1**2 - 0.5 * self.lambda2

    def gle_expansion(self, ell: float) -> float:
        """Second-order expansion -log(1 + lambda1 ell + lambda2 ell^2) of
        the growth exponent at index ell near zero."""
        import math

        return -math.log(1.0 + self.lambda1 * ell + self.lambda2 * ell * ell)
