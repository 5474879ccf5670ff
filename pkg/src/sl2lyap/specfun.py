"""Special-function kernel: complex log-gamma, modified Bessel K0/K1 on the
positive axis, and the Whittaker function W_{kappa,mu}(z) for complex kappa
and complex z off the branch cut, together with its derivative.

W is evaluated through the integral representation

    W = e^{-z/2} z^kappa / Gamma(mu - kappa + 1/2)
        * int_0^inf e^{-t} t^{mu-kappa-1/2} (1 + t/z)^{mu+kappa-1/2} dt,

valid for Re(mu - kappa + 1/2) > 0 and z off (-inf, 0], which covers the
imaginary-axis arguments needed by the stationarity solvers where power
series in z converge too slowly.
"""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np
from scipy import integrate

from .errors import AccuracyError, PoleError, UnderflowWarning

__all__ = ["lngamma", "bessel_k", "whittaker_w", "whittaker_w_prime"]

# Lanczos coefficients, g = 7.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LN_PI = math.log(math.pi)


def lngamma(z) -> complex:
    """Principal branch of log Gamma(z), Lanczos approximation.

    Arguments left of Re z = 1/2 are shifted right with the recurrence
    lngamma(z) = lngamma(z+1) - Log z, principal logs throughout, which
    keeps the principal branch off the cut (-inf, 0] (and its limit from
    above on the cut).  Accuracy ~1e-14 relative; nonpositive integers
    raise PoleError.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise PoleError(f"lngamma pole at z = {z.real:g}")
    shift = 0.0 + 0.0j
    while z.real < 0.5:
        shift += cmath.log(z)
        z += 1.0
    w = z - 1.0
    x = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        x += c / (w + i)
    t = w + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (w + 0.5) * cmath.log(t) - t + cmath.log(x) - shift


def _k01_series(x: float):
    """Ascending series for (K0, K1), accurate for x <= 2."""
    q = 0.25 * x * x
    lh = math.log(0.5 * x)
    # I0, I1 and the psi-weighted sums, all in one accumulation loop
    term_i0 = 1.0
    i0 = term_i0
    k0_sum = 0.0  # sum H_k q^k / (k!)^2, k >= 1
    term_i1 = 1.0  # q^k / (k! (k+1)!), k = 0 term
    i1_sum = term_i1
    k1_sum = term_i1 * (_psi_int(1) + _psi_int(2))
    h = 0.0
    k = 0
    while True:
        k += 1
        term_i0 *= q / (k * k)
        i0 += term_i0
        h += 1.0 / k
        k0_sum += term_i0 * h
        term_i1 *= q / (k * (k + 1))
        i1_sum += term_i1
        k1_sum += term_i1 * (_psi_int(k + 1) + _psi_int(k + 2))
        if term_i0 < 1e-18 * i0 and term_i1 < 1e-18 * i1_sum:
            break
        if k > 200:
            raise AccuracyError("K0/K1 ascending series did not converge")
    euler = 0.5772156649015328606
    k0 = -(lh + euler) * i0 + k0_sum
    i1 = 0.5 * x * i1_sum
    k1 = 1.0 / x + lh * i1 - 0.25 * x * k1_sum
    return k0, k1


_PSI_CACHE = [None, -0.5772156649015328606]


def _psi_int(n: int) -> float:
    """Digamma at positive integer n."""
    while len(_PSI_CACHE) <= n:
        m = len(_PSI_CACHE)
        _PSI_CACHE.append(_PSI_CACHE[m - 1] + 1.0 / (m - 1))
    return _PSI_CACHE[n]


def _k01_cf(x: float):
    """Steed continued fraction for (K0, K1), accurate for x >= 2."""
    eps = 1e-16
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 9001):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) <= eps:
            break
    else:
        raise AccuracyError("K0/K1 continued fraction did not converge")
    h = a1 * h
    expx = math.exp(-x) if x < 700.0 else 0.0
    if expx == 0.0:
        warnings.warn(f"K0/K1 underflow to zero at x = {x:g}", UnderflowWarning)
        return 0.0, 0.0
    k0 = math.sqrt(math.pi / (2.0 * x)) * expx / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def bessel_k(order: int, x: float) -> float:
    """Modified Bessel function K0 or K1 of a positive real argument.

    Series for x <= 2 and a continued fraction beyond; relative accuracy
    ~1e-13 across [1e-6, 700].  Underflow past x ~ 700 returns 0.0 with an
    UnderflowWarning.
    """
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are provided")
    if not (x > 0.0) or not math.isfinite(x):
        raise ValueError("argument must be positive and finite")
    k0, k1 = _k01_series(x) if x <= 2.0 else _k01_cf(x)
    return k0 if order == 0 else k1


def _quad_complex(fun, lo, hi, epsrel):
    # QUADPACK's roundoff-abort warning is redundant here: the returned
    # error estimate is checked explicitly by the caller.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re, re_err = integrate.quad(
            lambda t: fun(t).real, lo, hi, epsabs=0.0, epsrel=epsrel, limit=500
        )
        im, im_err = integrate.quad(
            lambda t: fun(t).imag, lo, hi, epsabs=0.0, epsrel=epsrel, limit=500
        )
    return complex(re, im), re_err + im_err


def whittaker_w(kappa, mu, z, epsrel: float = 1e-13) -> complex:
    """Whittaker W_{kappa,mu}(z), complex parameters, z off (-inf, 0].

    Requires Re(mu - kappa + 1/2) > 0; relative accuracy ~1e-11 for
    moderate parameters (|z| in [0.05, 50], |kappa| <= 20).
    """
    kappa = complex(kappa)
    mu = complex(mu)
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise ValueError("z must lie off the branch cut (-inf, 0]")
    a = mu - kappa + 0.5
    b = mu + kappa - 0.5
    if a.real <= 0.0:
        raise ValueError("integral representation needs Re(mu - kappa + 1/2) > 0")

    inv_z = 1.0 / z

    def integrand(t):
        if t == 0.0:
            return 0.0 + 0.0j
        return cmath.exp(-t + (a - 1.0) * math.log(t) + b * cmath.log(1.0 + t * inv_z))

    val, err = _quad_complex(integrand, 0.0, np.inf, epsrel)
    if abs(val) > 0.0 and err > 1e-8 * abs(val):
        raise AccuracyError(
            f"Whittaker quadrature achieved only {err / abs(val):.3g} relative",
            achieved=err / abs(val),
        )
    pref = cmath.exp(-0.5 * z + kappa * cmath.log(z) - lngamma(a))
    return pref * val


def whittaker_w_prime(kappa, mu, z, epsrel: float = 1e-13) -> complex:
    """Derivative of W_{kappa,mu} at z via the three-term contiguous identity

        z W' = (kappa - z/2) W_{kappa,mu} - [mu^2 - (kappa - 1/2)^2] W_{kappa-1,mu},

    avoiding numerical differentiation.  Needs the representation to hold at
    kappa and kappa - 1.
    """
    kappa = complex(kappa)
    mu = complex(mu)
    z = complex(z)
    w0 = whittaker_w(kappa, mu, z, epsrel)
    w1 = whittaker_w(kappa - 1.0, mu, z, epsrel)
    coef = mu * mu - (kappa - 0.5) ** 2
    return ((kappa - 0.5 * z) * w0 - coef * w1) / z
