"""Growth rate, variance and exponential-moment exponents for products of
i.i.d. random SL(2,R) matrices, by three mutually cross-checking routes:
exact block spectra at integer index, perturbative expansion of the
stationarity problem, and Monte Carlo simulation of the actual products.
"""

from .api import Outcome, Request, compute_gamma, compute_gle, compute_sigma2
from .families import Family, PerturbationResult
from .laws import CallableLaw, Dirac, DiscreteLaw, Exponential, GammaLaw, parse_law
from .montecarlo import MCEstimate, ModelSpec, estimate_gamma, estimate_gle, estimate_sigma2
from .sl2 import GroupElement, SubgroupKind, one_param

__version__ = "0.1.0"

__all__ = [
    "Family",
    "PerturbationResult",
    "Request",
    "Outcome",
    "compute_gamma",
    "compute_sigma2",
    "compute_gle",
    "Dirac",
    "Exponential",
    "GammaLaw",
    "DiscreteLaw",
    "CallableLaw",
    "parse_law",
    "ModelSpec",
    "MCEstimate",
    "estimate_gamma",
    "estimate_sigma2",
    "estimate_gle",
    "GroupElement",
    "SubgroupKind",
    "one_param",
    "__version__",
]
