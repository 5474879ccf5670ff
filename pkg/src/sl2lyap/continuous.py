"""Perturbative growth-rate expansion for the lower-shear families in
continuous Fourier space.

The stationarity equation is a second-order complex ODE f'' = q(s) f on
s > 0 whose decaying solution is found by backward integration from a tail
point s_max seeded with Liouville-Green (WKB) data; backward integration is
stable because the wanted branch dominates in that direction.  The first
expansion coefficient is a boundary derivative at 0+, the second a
regularised integral whose integrand has a removable singularity there.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import (
    NoInvariantMeasureError,
    ReductionBreakdownError,
    RegularisationError,
    StiffnessError,
)
from .families import Family, PerturbationResult

__all__ = [
    "FamilyCoefficients",
    "OdeSolution",
    "ode_coefficient",
    "solve_f0_continuous",
    "lambda1_continuous",
    "lambda2_continuous",
    "GreenFunction",
    "green_continuous",
    "TriangularAnalysis",
    "nminus_a1_analysis",
    "solve_nminus_perturbative",
]

_S_TINY = 1e-7


@dataclass(frozen=True)
class FamilyCoefficients:
    """Coefficient q of the stationarity ODE f'' = q(s) f, plus the scale
    factor turning Im f'(0+) into the first expansion coefficient."""

    family: Family
    rho: float
    law: object
    q0: complex
    lambda1_scale: float  # lambda1 = scale * Im f'(0+)
    b_factor: complex  # lambda2 integrand term: Re[lam1 chi f^2 + b_factor/rho f f']

    def q(self, s):
        """ODE coefficient, continuous down to s = 0."""
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        out = np.empty(s.shape, dtype=complex)
        small = np.abs(s) < _S_TINY
        if np.any(~small):
            sb = s[~small]
            chi = np.array([self.law.chi(float(x)) for x in sb])
            if self.family is Family.NMINUS_K:
                out[~small] = 1.0 - (2j * self.rho / sb) * (chi - 1.0)
            else:
                out[~small] = -(1j * self.rho / sb) * (1.0 - chi)
        if np.any(small):
            m1 = self.law.moment(1)
            m2 = self.law.moment(2)
            sb = s[small]
            # chi(s) = 1 + i m1 s - m2 s^2/2 + ...
            if self.family is Family.NMINUS_K:
                out[small] = 1.0 + 2.0 * self.rho * m1 + 1j * self.rho * m2 * sb
            else:
                out[small] = -self.rho * m1 - 0.5j * self.rho * m2 * sb
        return out[0] if scalar else out


def ode_coefficient(family: Family, law, rho: float) -> FamilyCoefficients:
    """Stationarity-ODE data for the lower-shear/rotation or
    lower-shear/upper-shear family."""
    if not (rho > 0.0) or not math.isfinite(rho):
        raise ValueError("rho must be positive and finite")
    m1 = law.moment(1)
    if family is Family.NMINUS_K:
        return FamilyCoefficients(family, rho, law, complex(1.0 + 2.0 * rho * m1), 1.0 / rho, 1j)
    if family is Family.NMINUS_NPLUS:
        return FamilyCoefficients(family, rho, law, complex(-rho * m1), -2.0 / rho, -2j)
    raise ValueError(f"no second-order stationarity ODE for family {family!r}")


@dataclass(frozen=True)
class OdeSolution:
    """Decaying stationarity solution normalised to f(0) = 1."""

    family: Family
    s_max: float
    grid: np.ndarray
    f_grid: np.ndarray
    fp_grid: np.ndarray
    decay: float
    diagnostics: dict = field(default_factory=dict, compare=False)
    _dense: object = field(default=None, repr=False, compare=False)
    _norm: complex = 1.0

    def f(self, s):
        return np.asarray(self._dense(s))[0] / self._norm

    def fp(self, s):
        return np.asarray(self._dense(s))[1] / self._norm

    @property
    def fprime0(self) -> complex:
        return complex(self.fp_grid[0])


def _pick_s_max(coeffs: FamilyCoefficients, tol: float) -> tuple[float, float]:
    """Tail point with enough accumulated decay exponent W = int Re sqrt(q)
    to suppress the Liouville-Green seeding error, with the fixed floor on
    families whose q approaches a nonzero limit."""
    target = max(14.0, 0.75 * abs(math.log(tol)))
    s = 8.0
    w = _w_integral(coeffs, 0.0, s)
    while True:
        floor = 30.0 / math.sqrt(min(1.0, abs(coeffs.q(s)) + 1e-30))
        if w >= target and s >= min(floor, 4000.0):
            return s, w
        w += _w_integral(coeffs, s, 2.0 * s)
        s *= 2.0
        if s > 1e7:
            raise NoInvariantMeasureError(
                "decay exponent fails to accumulate; no decaying branch found", suspected=True
            )


def _w_integral(coeffs, lo, hi):
    val, _ = integrate.quad(
        lambda s: math.sqrt(abs(coeffs.q(s))) * math.cos(0.5 * cmath.phase(coeffs.q(s))),
        lo,
        hi,
        limit=200,
    )
    return val


def solve_f0_continuous(family: Family, law, rho: float, tol: float = 1e-10, sign: int = 1) -> OdeSolution:
    """Decaying stationarity solution, normalised to f(0) = 1.

    For the two second-order families this integrates f'' = q f backward
    from s_max with Liouville-Green seed data f = q^{-1/4} exp(-int sqrt q),
    f' = (-sqrt q - q'/(4q)) f; the principal square root selects the
    decaying branch.  The triangular family is first order and handled in
    closed form: the positive-sign model has no decaying solution.
    """
    if not (1e-13 < tol < 1e-5):
        raise ValueError("tol must lie in (1e-13, 1e-5)")
    if family is Family.NMINUS_A1:
        return _triangular_f0(law, rho, sign)
    coeffs = ode_coefficient(family, law, rho)
    s_max, w_acc = _pick_s_max(coeffs, tol)

    def rhs(s, y):
        return [y[1], coeffs.q(s) * y[0]]

    q_end = complex(coeffs.q(s_max))
    h = 1e-5 * (1.0 + s_max)
    qp_end = (coeffs.q(s_max + h) - coeffs.q(s_max - h)) / (2.0 * h)
    sq = cmath.sqrt(q_end)
    f_end = q_end ** (-0.25)
    fp_end = (-sq - qp_end / (4.0 * q_end)) * f_end
    rtol = max(1e-13, 0.01 * tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # solve_ivp complains near rtol floor
        sol = integrate.solve_ivp(
            rhs,
            (s_max, 0.0),
            np.array([f_end, fp_end], dtype=complex),
            method="DOP853",
            rtol=rtol,
            atol=1e-290,
            dense_output=True,
        )
    if not sol.success:
        raise StiffnessError(f"backward integration failed: {sol.message}")
    norm = sol.y[0, -1]
    if norm == 0:
        raise NoInvariantMeasureError("solution vanished at the origin", suspected=True)
    grid = sol.t[::-1].copy()
    f_grid = sol.y[0, ::-1] / norm
    fp_grid = sol.y[1, ::-1] / norm
    decay = float(abs(f_grid[-1]))
    return OdeSolution(
        family=family,
        s_max=s_max,
        grid=grid,
        f_grid=f_grid,
        fp_grid=fp_grid,
        decay=decay,
        diagnostics={"w_accumulated": w_acc, "rtol": rtol, "n_steps": len(grid)},
        _dense=sol.sol,
        _norm=norm,
    )


def _triangular_f0(law, rho: float, sign: int) -> OdeSolution:
    """Closed-form stationarity solution of the first-order triangular
    family; only the mirrored (sign = -1) model has one."""
    from .laws import Exponential

    if not isinstance(law, Exponential) or law.rate <= 0:
        raise ValueError("triangular analysis requires an exponential shear law")
    p = law.rate
    if sign > 0:
        raise NoInvariantMeasureError(
            "the stationarity solution grows like s^rho; not a probability transform",
            suspected=False,
        )
    s_max = 50.0 * (1.0 + 1.0 / rho) * max(1.0, p)
    grid = np.linspace(0.0, s_max, 2001)

    def dense(s):
        s = np.asarray(s, dtype=float)
        base = (1.0 + s / (1j * p)) ** (-rho)
        deriv = -rho / (1j * p) * (1.0 + s / (1j * p)) ** (-rho - 1.0)
        return np.stack([base, deriv])

    vals = dense(grid)
    return OdeSolution(
        family=Family.NMINUS_A1,
        s_max=s_max,
        grid=grid,
        f_grid=vals[0],
        fp_grid=vals[1],
        decay=float(abs(vals[0][-1])),
        diagnostics={"closed_form": True},
        _dense=dense,
        _norm=1.0,
    )


def lambda1_continuous(family: Family, f0: OdeSolution, rho: float) -> float:
    """First expansion coefficient from the one-sided boundary derivative."""
    scale = {Family.NMINUS_K: 1.0 / rho, Family.NMINUS_NPLUS: -2.0 / rho}[family]
    return scale * float(f0.fprime0.imag)


def lambda2_continuous(
    family: Family,
    f0: OdeSolution,
    law,
    rho: float,
    lam1: float,
    s_split: float = 1e-3,
) -> float:
    """Second expansion coefficient by the regularised integral
    2 int_0^inf ds/s Re[lam1 chi f^2 + (b/rho) f f'] with b = i for the
    rotation family, -2i for the upper-shear family.

    The real part of the bracket vanishes at 0 when lam1 is consistent with
    f0, so the integrand extends continuously; the stretch [0, s_split] uses
    that limit in a trapezoid step, the rest adaptive quadrature.
    """
    coeffs = ode_coefficient(family, law, rho)
    b = coeffs.b_factor

    fprime0 = f0.fprime0
    res0 = lam1 + (b * fprime0).real / rho
    if abs(res0) > 1e-6 * max(1.0, abs(lam1)):
        raise RegularisationError(
            f"integrand not regular at 0 (residual {res0:.3g}); lambda1 inconsistent with f0"
        )

    def bracket(s):
        fv = f0.f(s)
        fpv = f0.fp(s)
        chi = law.chi(float(s))
        return lam1 * chi * fv * fv + (b / rho) * fv * fpv

    def integrand(s):
        return bracket(s).real / s

    # g(0) from the analytic first derivative of the bracket at 0
    m1 = law.moment(1)
    q0 = coeffs.q0
    num_prime0 = lam1 * (1j * m1 + 2.0 * fprime0) + (b / rho) * (fprime0 * fprime0 + q0)
    g0 = float(num_prime0.real)

    head = 0.5 * s_split * (g0 + integrand(s_split))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        body, _ = integrate.quad(
            integrand, s_split, f0.s_max, epsabs=1e-13, epsrel=1e-11, limit=800
        )
    return 2.0 * (head + body)


@dataclass(frozen=True)
class GreenFunction:
    """Green function of the stationarity operator with source at t > 0."""

    t: float
    prefactor: complex
    f0: OdeSolution
    zeta_dense: object

    def zeta(self, s):
        return np.asarray(self.zeta_dense(s))[0]

    def zeta_prime(self, s):
        return np.asarray(self.zeta_dense(s))[1]

    def __call__(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        f_t = self.f0.f(self.t)
        z_t = self.zeta(self.t)
        out = np.where(
            s_arr <= self.t,
            f_t * np.asarray(self.zeta(s_arr)),
            np.asarray(self.f0.f(s_arr)) * z_t,
        )
        out = self.prefactor * out
        return out[0] if np.ndim(s) == 0 else out

    def wronskian_residual(self, s) -> float:
        """max |f0 zeta' - f0' zeta - 1| over the sample points; the two
        solutions are computed by independent integrations, so this is a
        nontrivial consistency check."""
        f = np.asarray(self.f0.f(s))
        fp = np.asarray(self.f0.fp(s))
        z = np.asarray(self.zeta(s))
        zp = np.asarray(self.zeta_prime(s))
        return float(np.max(np.abs(f * zp - fp * z - 1.0)))


def green_continuous(f0: OdeSolution, law, rho: float, t: float) -> GreenFunction:
    """Green function with unit source at t, built from the decaying
    solution and the second solution zeta with zeta(0) = 0, zeta'(0+) = 1.

    zeta equals f0(s) int_0^s d tau / f0(tau)^2 by reduction of order; it is
    realised here by a forward integration of the same ODE (the growing
    direction, stable forwards), which keeps the Wronskian check meaningful.
    """
    if t <= 0:
        raise ValueError("source point t must be positive")
    if np.min(np.abs(f0.f_grid)) == 0.0:
        raise ReductionBreakdownError("f0 vanishes on the grid")
    coeffs = ode_coefficient(f0.family, law, rho)

    def rhs(s, y):
        return [y[1], coeffs.q(s) * y[0]]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = integrate.solve_ivp(
            rhs,
            (0.0, f0.s_max),
            np.array([0.0, 1.0], dtype=complex),
            method="DOP853",
            rtol=1e-12,
            atol=1e-14,
            dense_output=True,
        )
    if not sol.success:
        raise StiffnessError(f"forward integration for zeta failed: {sol.message}")
    chi_t = complex(law.chi(float(t)))
    pre = 2j * rho * chi_t / t
    return GreenFunction(t=t, prefactor=pre, f0=f0, zeta_dense=sol.sol)


@dataclass(frozen=True)
class TriangularAnalysis:
    """Exact results for the triangular (lower-shear/diagonal) family."""

    gle: complex
    no_invariant_measure: bool
    lambda1: float | None
    lambda2: float | None


def nminus_a1_analysis(ell, rho: float, p: float, sign: int = 1) -> TriangularAnalysis:
    """Triangular products: growth exponent -log(1 - ell/rho) for
    Re ell < rho, valid for either sign of the diagonal parameter.

    With the positive sign there is no invariant measure (the stationarity
    solution grows); the mirrored sign admits one and the expansion
    coefficients are exactly (-1/rho, 0).
    """
    ell = complex(ell)
    if not (rho > 0 and p > 0):
        raise ValueError("rho and p must be positive")
    if ell.real >= rho:
        raise ValueError(f"growth exponent defined only for Re ell < rho (got {ell}, rho={rho})")
    lam = -cmath.log(1.0 - ell / rho)
    gle = lam.real if abs(lam.imag) < 1e-14 else lam
    if sign > 0:
        return TriangularAnalysis(gle=gle, no_invariant_measure=True, lambda1=None, lambda2=None)
    return TriangularAnalysis(
        gle=gle, no_invariant_measure=False, lambda1=-1.0 / rho, lambda2=0.0
    )


def solve_nminus_perturbative(
    family: Family, law, rho: float, tol: float = 1e-10, sign: int = 1
) -> PerturbationResult:
    """lambda1, lambda2 (hence growth rate and variance) for the
    lower-shear families."""
    if family is Family.NMINUS_A1:
        if sign > 0:
            raise NoInvariantMeasureError(
                "positive-sign triangular family has no invariant measure", suspected=False
            )
        return PerturbationResult(lambda1=-1.0 / rho, lambda2=0.0, diagnostics={"closed_form": True})
    f0 = solve_f0_continuous(family, law, rho, tol)
    lam1 = lambda1_continuous(family, f0, rho)
    lam2 = lambda2_continuous(family, f0, law, rho, lam1)
    return PerturbationResult(
        lambda1=lam1,
        lambda2=lam2,
        diagnostics={"s_max": f0.s_max, "decay": f0.decay, **f0.diagnostics},
    )
