"""Perturbative growth-rate expansion for rotation/upper-shear products in
discrete Fourier space.

The stationarity equation for the Fourier coefficients f(n) of the invariant
density is a three-term recurrence whose decaying (minimal) solution is
found by backward recurrence from a cap N, doubling N until the value at
n = 1 settles.  The first two expansion coefficients follow from boundary
values of f0 and of the first correction, the latter evaluated both through
the lattice Green function and through a summation-by-parts rearrangement
as a built-in cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AccuracyError,
    NoInvariantMeasureError,
    ReductionBreakdownError,
    SingularModelError,
)
from .families import PerturbationResult
from .laws import Dirac, Exponential, GammaLaw

__all__ = [
    "DiscreteSolution",
    "solve_f0_discrete",
    "lambda1_discrete",
    "zeta_discrete",
    "green_discrete",
    "lambda2_discrete",
    "apply_stationarity_residual",
    "solve_kn_perturbative",
]

_N_START = 64
_N_CAP = 2**20


@dataclass(frozen=True)
class DiscreteSolution:
    """Minimal solution f(0..N) of the stationarity recurrence, f(0) = 1;
    negative indices are implied by f(-n) = conj f(n)."""

    f: np.ndarray
    N: int
    tol: float
    achieved: float
    rho: float
    diagnostics: dict = field(default_factory=dict, compare=False)


def _chi_values(law, n_max: int) -> np.ndarray:
    """chi(1..n_max) as an array, vectorised for the closed-form laws."""
    n = np.arange(1, n_max + 1, dtype=float)
    if isinstance(law, Exponential):
        return 1.0 / (1.0 - 1j * n / law.rate)
    if isinstance(law, Dirac):
        return np.exp(1j * n * law.t0)
    if isinstance(law, GammaLaw):
        return (1.0 - 1j * n * law.scale) ** (-law.shape)
    return np.array([complex(law.chi(float(k))) for k in range(1, n_max + 1)])


def _backward_pass(chi: np.ndarray, rho: float, N: int) -> np.ndarray:
    """Backward (minimal-solution) recurrence seeded with f(N+1) = 0,
    f(N) = 1, rescaled against overflow, then normalised to f(0) = 1."""
    f = np.zeros(N + 2, dtype=complex)
    f[N] = 1.0
    coef = (2j * rho) * (chi - 1.0) / np.arange(1, N + 1)
    for n in range(N, 0, -1):
        f[n - 1] = -(coef[n - 1] + 2.0) * f[n] - f[n + 1]
        if abs(f[n - 1].real) + abs(f[n - 1].imag) > 1e250:
            f[n - 1 :] /= 1e250
    f0 = f[0]
    if f0 == 0:
        raise SingularModelError("backward recurrence hit an exact zero at n = 0")
    return f[: N + 1] / f0


def solve_f0_discrete(law, rho: float, tol: float = 1e-10) -> DiscreteSolution:
    """Invariant-density Fourier coefficients for a rotation angle drawn
    from `law` and an exponential upper-shear parameter of rate rho.

    The cap N doubles until the change in f(1) drops below tol; a cap of
    2**20 without settling, or a growing change, is treated as evidence
    against a decaying solution.
    """
    if not (rho > 0.0) or not math.isfinite(rho):
        raise ValueError("rho must be positive and finite")
    if not (1e-14 < tol < 1e-4):
        raise ValueError("tol must lie in (1e-14, 1e-4)")
    chi = _chi_values(law, _N_START)
    if np.any(np.abs(chi) < 1e-300):
        raise SingularModelError("chi vanishes at an integer")
    N = _N_START
    f_prev = _backward_pass(chi, rho, N)
    delta_prev = math.inf
    grew = 0
    while True:
        N *= 2
        if N > _N_CAP:
            raise NoInvariantMeasureError(
                f"no settled minimal solution by N = {_N_CAP}; last change {delta_prev:.3g}",
                suspected=True,
            )
        chi = np.concatenate([chi, _chi_values_range(law, len(chi) + 1, N)])
        if np.any(np.abs(chi[len(chi) // 2 :]) < 1e-300):
            raise SingularModelError("chi vanishes at an integer")
        f = _backward_pass(chi, rho, N)
        delta = abs(f[1] - f_prev[1])
        if delta < tol:
            return DiscreteSolution(
                f=f,
                N=N,
                tol=tol,
                achieved=delta,
                rho=rho,
                diagnostics={"tail": float(abs(f[N])), "doublings": int(math.log2(N // _N_START))},
            )
        if delta > delta_prev:
            grew += 1
            if grew >= 3:
                raise NoInvariantMeasureError(
                    "backward recurrence is not settling (change grows under doubling)",
                    suspected=True,
                )
        else:
            grew = 0
        f_prev, delta_prev = f, delta


def _chi_values_range(law, lo: int, hi: int) -> np.ndarray:
    out = _chi_values(law, hi)
    return out[lo - 1 :]


def lambda1_discrete(f0: DiscreteSolution, rho: float) -> float:
    """First expansion coefficient, Im f0(1) / rho."""
    return float(f0.f[1].imag) / rho


def zeta_discrete(f0: DiscreteSolution) -> np.ndarray:
    """Second homogeneous solution by reduction of order:
    zeta(n) = f0(n) * sum_{j<=n} 1/(f0(j-1) f0(j)), zeta(0) = 0, zeta(1) = 1.

    The discrete Wronskian f0(n-1) zeta(n) - f0(n) zeta(n-1) is 1 for all n.
    """
    f = f0.f
    if np.any(f == 0):
        raise ReductionBreakdownError("f0 vanishes inside the range; reduction of order fails")
    partial = np.concatenate([[0.0], np.cumsum(1.0 / (f[:-1] * f[1:]))])
    return f * partial


def green_discrete(f0: DiscreteSolution, zeta: np.ndarray, law, rho: float, m: int) -> np.ndarray:
    """Lattice Green function G(m, .) of the stationarity operator with unit
    source at m >= 1 and boundary values G(m, 0) = 0, G(m, inf) = 0."""
    if m < 1:
        raise ValueError("source index m must be >= 1")
    f = f0.f
    pre = 2j * rho * complex(law.chi(float(m))) / m
    out = np.where(np.arange(len(f)) <= m, f[m] * zeta, f * zeta[m])
    return pre * out


def apply_stationarity_residual(g: np.ndarray, law, rho: float) -> np.ndarray:
    """Apply the stationarity operator minus identity to a coefficient
    vector on rows n = 1..N-1 (returns an array aligned with those rows)."""
    N = len(g) - 1
    n = np.arange(1, N, dtype=float)
    chi = _chi_values(law, N - 1)
    return (g[1:N] + (1j * n / (2 * rho)) * (g[2 : N + 1] + 2 * g[1:N] + g[: N - 1])) / chi - g[1:N]


def lambda2_discrete(
    f0: DiscreteSolution, zeta: np.ndarray, law, rho: float, lam1: float, cross_tol: float = 1e-8
) -> float:
    """Second expansion coefficient, Im f1(1) / rho.

    f1(1) is evaluated along two routes that must agree to cross_tol: the
    Green-function sum against the first-order source, and the
    summation-by-parts rearrangement
    f0(1) + 2 i rho lam1 sum chi(n)/n f0(n)^2 - sum f0(n) f0(n+1)/(n(n+1)).
    """
    f = f0.f
    N = f0.N
    n = np.arange(1, N, dtype=float)
    chi = _chi_values(law, N - 1)
    fn = f[1:N]
    # Green route: G(m, 1) = 2 i rho chi(m)/m f0(m) zeta(1), zeta(1) = 1
    r1 = lam1 * fn + (0.5j / (rho * chi)) * (f[2 : N + 1] - f[: N - 1])
    f1_green = 2j * rho * np.sum((chi / n) * fn * r1)
    # summation-by-parts route
    s_quad = np.sum((chi / n) * fn * fn)
    s_pair = np.sum(fn * f[2 : N + 1] / (n * (n + 1)))
    f1_parts = f[1] + 2j * rho * lam1 * s_quad - s_pair
    # truncation sanity: the summands must have died out at the cap
    tail = abs(chi[-1] / n[-1]) * abs(fn[-1]) * (abs(r1[-1]) + abs(fn[-1]))
    if tail * N > 1e3 * cross_tol:
        raise AccuracyError(
            f"lambda2 series not converged at the truncation (tail {tail:.3g})", achieved=tail * N
        )
    if abs(f1_green - f1_parts) > cross_tol:
        raise AccuracyError(
            f"Green and summation-by-parts routes disagree: {abs(f1_green - f1_parts):.3g}",
            achieved=abs(f1_green - f1_parts),
        )
    return float(f1_parts.imag) / rho


def solve_kn_perturbative(law, rho: float, tol: float = 1e-10) -> PerturbationResult:
    """lambda1, lambda2 (hence growth rate and variance) for the
    rotation/upper-shear family."""
    f0 = solve_f0_discrete(law, rho, tol)
    lam1 = lambda1_discrete(f0, rho)
    zeta = zeta_discrete(f0)
    lam2 = lambda2_discrete(f0, zeta, law, rho, lam1)
    return PerturbationResult(
        lambda1=lam1,
        lambda2=lam2,
        diagnostics={"N": f0.N, "tol": f0.tol, "achieved": f0.achieved, **f0.diagnostics},
    )
