"""High-level dispatch over the three computational routes, shared by the
command line and the self-test battery.

Route selection ("auto"): exact block spectra for integer index, the
perturbative expansion for growth rate and variance, Monte Carlo otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .continuous import nminus_a1_analysis, solve_nminus_perturbative
from .discrete import solve_kn_perturbative
from .errors import NoInvariantMeasureError
from .families import Family, PerturbationResult
from .finitedim import gle_finite
from .laws import Exponential
from . import exact
from .montecarlo import ModelSpec, estimate_gamma, estimate_gle, estimate_sigma2

__all__ = ["Request", "Outcome", "perturbative", "compute_gamma", "compute_sigma2", "compute_gle"]


@dataclass(frozen=True)
class Request:
    """One computation request: family/model parameters plus MC controls."""

    family: Family
    law: object
    rho: float
    sign: int = 1
    seed: int = 0
    n_steps: int = 10**5
    n_replicas: int = 400
    tol: float = 1e-10

    def model(self) -> ModelSpec:
        return ModelSpec(self.family, self.law, self.rho, self.sign)


@dataclass(frozen=True)
class Outcome:
    """Computed quantities; unset fields stay None."""

    method: str
    gamma: float | None = None
    sigma2: float | None = None
    gle: float | None = None
    ell: complex | None = None
    lambda1: float | None = None
    lambda2: float | None = None
    stderr: float | None = None
    no_invariant_measure: bool = False
    diagnostics: dict = field(default_factory=dict, compare=False)


def perturbative(req: Request) -> PerturbationResult:
    """lambda1/lambda2 by the family's expansion solver."""
    if req.family is Family.K_NPLUS:
        return solve_kn_perturbative(req.law, req.rho, req.tol)
    if req.family in (Family.NMINUS_K, Family.NMINUS_NPLUS):
        return solve_nminus_perturbative(req.family, req.law, req.rho, req.tol)
    return solve_nminus_perturbative(req.family, req.law, req.rho, req.tol, sign=req.sign)


def _closed_form_gamma(req: Request) -> float:
    law = req.law
    if req.family is Family.NMINUS_A1:
        return 1.0 / (2.0 * req.rho)
    if not isinstance(law, Exponential):
        raise ValueError("closed forms require an exponential first-factor law")
    if req.family is Family.K_NPLUS:
        return -0.5 * exact.lambda1_kn_exact(law.rate, req.rho)
    if req.family is Family.NMINUS_K:
        return -0.5 * exact.lambda1_nminus_k_exact(law.rate, req.rho)
    return exact.dyson_gamma_exact(law.rate, req.rho)


def compute_gamma(req: Request, method: str = "auto") -> Outcome:
    """Growth rate by the requested route."""
    if method in ("auto", "perturbative"):
        if req.family is Family.NMINUS_A1 and req.sign > 0:
            # no invariant measure, but the exponent (hence gamma) exists
            out = Outcome(
                method="closed-form", gamma=1.0 / (2.0 * req.rho), lambda1=-1.0 / req.rho,
                no_invariant_measure=True,
            )
            return out
        res = perturbative(req)
        return Outcome(
            method="perturbative", gamma=res.gamma, sigma2=res.sigma2,
            lambda1=res.lambda1, lambda2=res.lambda2, diagnostics=res.diagnostics,
        )
    if method == "closed-form":
        return Outcome(
            method="closed-form",
            gamma=_closed_form_gamma(req),
            no_invariant_measure=req.family is Family.NMINUS_A1 and req.sign > 0,
        )
    if method == "mc":
        est = estimate_gamma(req.model(), req.n_steps, req.n_replicas, req.seed)
        return Outcome(method="mc", gamma=est.value, stderr=est.stderr, diagnostics=est.diagnostics)
    raise ValueError(f"unsupported method {method!r} for gamma")


def compute_sigma2(req: Request, method: str = "auto") -> Outcome:
    """Variance by the requested route."""
    if method in ("auto", "perturbative"):
        if req.family is Family.NMINUS_A1 and req.sign > 0:
            return Outcome(
                method="closed-form", sigma2=1.0 / (4.0 * req.rho**2),
                no_invariant_measure=True,
            )
        res = perturbative(req)
        return Outcome(
            method="perturbative", gamma=res.gamma, sigma2=res.sigma2,
            lambda1=res.lambda1, lambda2=res.lambda2, diagnostics=res.diagnostics,
        )
    if method == "mc":
        est = estimate_sigma2(req.model(), req.n_steps, req.n_replicas, req.seed)
        return Outcome(method="mc", sigma2=est.value, stderr=est.stderr, diagnostics=est.diagnostics)
    raise ValueError(f"unsupported method {method!r} for sigma2")


def compute_gle(req: Request, ell, method: str = "auto") -> Outcome:
    """Exponential-moment growth rate at index ell by the requested route."""
    ell = complex(ell)
    is_integer = ell.imag == 0.0 and ell.real >= 0 and ell.real == int(ell.real)
    if method == "auto":
        if req.family is Family.NMINUS_A1:
            method = "closed-form"
        elif is_integer:
            method = "finite"
        else:
            method = "mc"
    if method == "finite":
        if not is_integer:
            raise ValueError("the block route needs a nonnegative integer index")
        res = gle_finite(req.family, int(ell.real), req.rho, req.law, req.sign)
        return Outcome(
            method="finite", gle=res.gle, ell=ell,
            diagnostics={"mu": res.mu, "complex_leading": res.complex_leading},
        )
    if method == "closed-form":
        if req.family is not Family.NMINUS_A1:
            raise ValueError("closed-form exponent is available for the triangular family only")
        ana = nminus_a1_analysis(ell, req.rho, _rate_of(req.law), req.sign)
        out = Outcome(
            method="closed-form", gle=float(ana.gle.real) if isinstance(ana.gle, complex) else ana.gle,
            ell=ell, lambda1=ana.lambda1, lambda2=ana.lambda2,
            no_invariant_measure=ana.no_invariant_measure,
        )
        if ana.no_invariant_measure:
            # the exponent is still defined; signal the measure failure
            # while letting the caller recover the computed row
            raise NoMeasureOutcome(out)
        return out
    if method == "perturbative":
        res = perturbative(req)
        return Outcome(
            method="perturbative", gle=res.gle_expansion(ell.real), ell=ell,
            lambda1=res.lambda1, lambda2=res.lambda2,
            diagnostics={"expansion_order": 2, **res.diagnostics},
        )
    if method == "mc":
        est = estimate_gle(req.model(), ell, req.n_steps, req.n_replicas, req.seed)
        return Outcome(
            method="mc", gle=est.value, ell=ell, stderr=est.stderr, diagnostics=est.diagnostics
        )
    raise ValueError(f"unsupported method {method!r} for gle")


class NoMeasureOutcome(NoInvariantMeasureError):
    """No-invariant-measure signal that still carries the computed row."""

    def __init__(self, outcome: Outcome):
        super().__init__("no invariant measure for this model", suspected=False)
        self.outcome = outcome


def _rate_of(law) -> float:
    return law.rate if isinstance(law, Exponential) else 1.0
