"""Closed-form reference values for exponentially distributed factors:
stationary solutions and first expansion coefficients in terms of Whittaker
and modified Bessel functions, and the triangular family's exact exponent.

These are the cross-check targets for the numerical solvers; the rate
arguments may be negative where the formulas continue analytically (used
for transposed products with a mirrored angle law).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .specfun import bessel_k, whittaker_w, whittaker_w_prime

__all__ = [
    "lambda1_kn_exact",
    "lambda1_nminus_k_exact",
    "dyson_gamma_exact",
    "f0_kn_exact",
    "f0_nminus_k_exact",
    "f0_nminus_nplus_exact",
    "bessel_k1_complex",
    "triangular_gle_exact",
]


def lambda1_kn_exact(p: float, rho: float) -> float:
    """First expansion coefficient of the rotation/upper-shear family with
    angle rate p and shear rate rho: (2/p) Im W'/W at (-ip, 1/2; -2i rho)."""
    k = -1j * p
    z = -2j * rho
    return (2.0 / p) * (whittaker_w_prime(k, 0.5, z) / whittaker_w(k, 0.5, z)).imag


def lambda1_nminus_k_exact(p: float, rho: float) -> float:
    """First expansion coefficient of the lower-shear/rotation family with
    shear rate p and angle rate rho: (2/rho) Im W'/W at (-i rho, 1/2; 2ip)."""
    k = -1j * rho
    z = 2j * p
    return (2.0 / rho) * (whittaker_w_prime(k, 0.5, z) / whittaker_w(k, 0.5, z)).imag


def dyson_gamma_exact(p: float, rho: float) -> float:
    """Growth rate of the lower-shear/upper-shear family,
    K0(2 sqrt(rho p)) / (sqrt(rho p) K1(2 sqrt(rho p)))."""
    x = 2.0 * math.sqrt(rho * p)
    return bessel_k(0, x) / bessel_k(1, x) / math.sqrt(rho * p)


def f0_kn_exact(n: int, p: float, rho: float) -> complex:
    """Stationary Fourier coefficient n >= 0 of the rotation/upper-shear
    family: (-1)^n prod_{j=1..n}(ip+j) W_{-n-ip,1/2}(-2i rho) normalised."""
    if n < 0:
        raise ValueError("use conjugation for negative indices")
    z = -2j * rho
    pref = (-1.0) ** n * np.prod([1j * p + j for j in range(1, n + 1)]) if n else 1.0
    return complex(pref) * whittaker_w(-n - 1j * p, 0.5, z) / whittaker_w(-1j * p, 0.5, z)


def f0_nminus_k_exact(s: float, p: float, rho: float) -> complex:
    """Stationary transform of the lower-shear/rotation family at s >= 0."""
    return whittaker_w(-1j * rho, 0.5, 2j * p + 2.0 * s) / whittaker_w(-1j * rho, 0.5, 2j * p)


def bessel_k1_complex(w: complex) -> complex:
    """K1 of a complex argument with Re w > 0, via K1(w) =
    sqrt(pi/(2w)) W_{0,1}(2w)."""
    return cmath.sqrt(cmath.pi / (2.0 * w)) * whittaker_w(0.0, 1.0, 2.0 * w)


def f0_nminus_nplus_exact(s: float, p: float, rho: float) -> complex:
    """Stationary transform of the lower-shear/upper-shear family at s >= 0,
    a generalised-inverse-Gaussian transform in K1."""
    num = cmath.sqrt(p - 1j * s) * bessel_k1_complex(2.0 * cmath.sqrt(rho * (p - 1j * s)))
    den = cmath.sqrt(p) * bessel_k1_complex(2.0 * cmath.sqrt(complex(rho * p)))
    return num / den


def triangular_gle_exact(ell, rho: float):
    """Exponent -log(1 - ell/rho) of the triangular family, Re ell < rho."""
    ell = complex(ell)
    if ell.real >= rho:
        raise ValueError("exponent defined only for Re ell < rho")
    val = -cmath.log(1.0 - ell / rho)
    return val.real if abs(val.imag) < 1e-14 else val
