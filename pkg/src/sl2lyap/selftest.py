"""Acceptance battery: every release criterion as an executable check with
its tolerance pinned, shared between ``sl2lyap selftest`` and the test
suite.  Each criterion prints one pass/fail line; the battery exits nonzero
if any criterion fails.

Monte Carlo criteria use fixed seeds chosen up front; three-standard-error
comparisons are expected to pass with probability ~0.997 each.
"""

from __future__ import annotations

import cmath
import math
import sys
import time
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import exact
from .continuous import (
    green_continuous,
    lambda1_continuous,
    nminus_a1_analysis,
    solve_f0_continuous,
    solve_nminus_perturbative,
)
from .discrete import (
    apply_stationarity_residual,
    green_discrete,
    lambda1_discrete,
    solve_f0_discrete,
    solve_kn_perturbative,
    zeta_discrete,
)
from .errors import HeavyTailError, NoInvariantMeasureError
from .families import Family
from .finitedim import gle_finite, transfer_matrix
from .laws import Dirac, DiscreteLaw, Exponential
from .montecarlo import ModelSpec, estimate_gamma, estimate_gle, estimate_sigma2
from .operators import (
    MellinOperator,
    casimir_discrete,
    generator_discrete,
    ladder_coeff,
    mellin_apply,
    mellin_compose,
)
from .sl2 import SubgroupKind as SK
from .specfun import bessel_k, lngamma, whittaker_w, whittaker_w_prime

__all__ = ["run_selftest", "CRITERIA", "CriterionResult"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float


class Check:
    """Collects named sub-checks; the criterion passes if all do."""

    def __init__(self):
        self.failures = []
        self.count = 0

    def expect(self, ok: bool, label: str):
        self.count += 1
        if not ok:
            self.failures.append(label)

    def within(self, value, bound, label: str):
        self.expect(abs(value) <= bound, f"{label}: |{value:.3e}| > {bound:g}")

    def result(self, note: str = ""):
        if self.failures:
            return False, "; ".join(self.failures[:4])
        return True, note or f"{self.count} checks"


@lru_cache(maxsize=None)
def _pert(family: Family, rate: float, rho: float):
    law = Exponential(rate)
    if family is Family.K_NPLUS:
        return solve_kn_perturbative(law, rho, tol=1e-10)
    return solve_nminus_perturbative(family, law, rho, tol=1e-10)


# ------------------------------------------------------------ criterion 1
def zero_law():
    c = Check()
    params = [(0.5, 1.0), (1.0, 1.0), (2.0, 0.5)]
    for family in Family:
        for p, rho in params:
            law = Exponential(p)
            fin = gle_finite(family, 0, rho, law, sign=1).gle
            c.within(fin, 1e-12, f"block {family.value} ({p},{rho})")
            if family is Family.NMINUS_A1:
                ana = nminus_a1_analysis(0.0, rho, p, sign=-1)
                c.within(ana.gle, 1e-12, f"closed {family.value}")
                exp0 = -math.log1p(ana.lambda1 * 0.0 + ana.lambda2 * 0.0**2)
                c.within(exp0, 1e-12, "triangular expansion at 0")
            else:
                res = _pert(family, p, rho)
                c.within(res.gle_expansion(0.0), 1e-12, f"expansion {family.value} ({p},{rho})")
            model = ModelSpec(family, law, rho)
            mc = estimate_gle(model, 0.0, 1000, 8, seed=101)
            c.within(mc.value, 1e-12, f"mc {family.value} ({p},{rho})")
    return c.result("all routes return 0 at index 0")


# ------------------------------------------------------------ criterion 2
def nieuwenhuizen_consistency():
    c = Check()
    for p, rho in [(0.2, 1.0), (1.0, 1.0), (2.0, 0.5)]:
        first_transposed = exact.lambda1_kn_exact(-rho, p)
        second = exact.lambda1_nminus_k_exact(p, rho)
        c.within(first_transposed - second, 1e-8, f"formula pair ({p},{rho})")
        sol = solve_f0_discrete(Exponential(p), rho, tol=1e-11)
        lam_disc = lambda1_discrete(sol, rho)
        c.within(lam_disc - exact.lambda1_kn_exact(p, rho), 1e-7, f"discrete ({p},{rho})")
        f0 = solve_f0_continuous(Family.NMINUS_K, Exponential(p), rho, tol=1e-10)
        lam_cont = lambda1_continuous(Family.NMINUS_K, f0, rho)
        c.within(lam_cont - second, 1e-7, f"continuous ({p},{rho})")
    return c.result("both realisations agree with the W-ratio formulas")


# ------------------------------------------------------------ criterion 3
def dyson_closed_form():
    c = Check()
    for rho, p in [(0.2, 0.2), (0.2, 5.0), (5.0, 0.2), (5.0, 5.0), (1.0, 1.0)]:
        f0 = solve_f0_continuous(Family.NMINUS_NPLUS, Exponential(p), rho, tol=1e-10)
        gamma = -0.5 * lambda1_continuous(Family.NMINUS_NPLUS, f0, rho)
        c.within(gamma - exact.dyson_gamma_exact(p, rho), 1e-8, f"gamma ({rho},{p})")
    est = estimate_gamma(ModelSpec(Family.NMINUS_NPLUS, Exponential(1.0), 1.0), 10**5, 200, seed=202)
    dev = est.value - exact.dyson_gamma_exact(1.0, 1.0)
    c.expect(abs(dev) <= 3 * est.stderr, f"mc gamma off by {dev:.2e} vs 3se={3*est.stderr:.2e}")
    return c.result("Bessel-ratio growth rate reproduced")


# ------------------------------------------------------------ criterion 4
def casimir_and_brackets():
    c = Check()
    n = 40
    ells = [0.0 + 0j, 1.0 + 0j, 0.3 + 0j, complex(-0.5, 0.7)]
    for ell in ells:
        cas = casimir_discrete(ell, n)
        res = cas - ell * (ell + 1.0) * np.eye(2 * n + 1)
        c.within(np.max(np.abs(res[:, 1 : 2 * n])), 1e-12, f"casimir ell={ell}")

        ops = {k: generator_discrete(k, ell, n).to_matrix() for k in SK}

        def comm(x, y):
            return ops[x] @ ops[y] - ops[y] @ ops[x]

        pad = slice(2, 2 * n - 1)
        c.within(np.max(np.abs((comm(SK.A1, SK.NPLUS) - ops[SK.NPLUS])[pad, pad])), 1e-12, "[A1,N+]")
        c.within(np.max(np.abs((comm(SK.A1, SK.NMINUS) + ops[SK.NMINUS])[pad, pad])), 1e-12, "[A1,N-]")
        c.within(np.max(np.abs((comm(SK.NPLUS, SK.NMINUS) - 2 * ops[SK.A1])[pad, pad])), 1e-12, "[N+,N-]")
        c.within(np.max(np.abs((comm(SK.A1, SK.A2) + ops[SK.K])[pad, pad])), 1e-12, "[A1,A2]")

        v = (lambda s: 1.0 / (s * s + 4.0), lambda s: 1.0 / (s * s + 4.0))
        mops = {k: MellinOperator(k, ell) for k in SK}
        for s in (0.3, 1.7):
            cas_pt = [0.0, 0.0]
            for kind, sgn in ((SK.A1, 1), (SK.A2, 1), (SK.K, -1)):
                o = mops[kind]
                val = mellin_apply(o, mellin_compose(o, v), s)
                cas_pt[0] += sgn * val[0]
                cas_pt[1] += sgn * val[1]
            expect = ell * (ell + 1.0) * v[0](s)
            c.within(abs(cas_pt[0] - expect) + abs(cas_pt[1] - expect), 1e-12, f"mellin casimir s={s}")

        for n_idx in range(-6, 7):
            cp, up = ladder_coeff("Jplus", ell, n_idx)
            cm, dn = ladder_coeff("Jminus", ell, n_idx)
            tol = 1e-12 * (1 + abs(ell) + abs(n_idx))
            c.within(cp * (up - n_idx) - cp, tol, "[J0,J+]")
            c.within(cm * (dn - n_idx) + cm, tol, "[J0,J-]")
            jp_after = ladder_coeff("Jplus", ell, dn)[0]
            jm_after = ladder_coeff("Jminus", ell, up)[0]
            c.within(cm * jp_after - cp * jm_after - 2.0 * n_idx, tol, "[J+,J-]")
    return c.result("algebra certified in both realisations")


# ------------------------------------------------------------ criterion 5
def finite_vs_mc():
    lam_finite = gle_finite(Family.K_NPLUS, 1, 1.0, Exponential(1.0)).gle
    model = ModelSpec(Family.K_NPLUS, Exponential(1.0), 1.0)
    try:
        est = estimate_gle(model, 1.0, 10**5, 400, seed=303)
        note = ""
    except HeavyTailError as exc:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            est = estimate_gle(model, 1.0, 10**5, 400, seed=303, on_heavy_tail="warn")
        note = f"; ESS {exc.diagnostics['ess']:.1f} of 400 (estimate dominated by one path)"
    dev = abs(lam_finite - est.value)
    ok = dev <= 3.0 * est.stderr and not note
    return ok, (
        f"block {lam_finite:.6f} vs mc {est.value:.6f} +- {est.stderr:.2e} "
        f"(|diff|={dev:.3e}, 3se={3 * est.stderr:.2e}){note}"
    )


# ------------------------------------------------------------ criterion 6
def moment_truncation():
    c = Check()
    two_point = DiscreteLaw((0.0, 2.0), (0.5, 0.5))  # mean 1, second moment 2
    from numpy.polynomial import laguerre

    nodes = laguerre.lagroots([0.0, 0.0, 0.0, 1.0])
    wts = nodes / (16.0 * laguerre.lagval(nodes, [0.0] * 4 + [1.0]) ** 2)
    wts = wts / wts.sum()
    three_point = DiscreteLaw(tuple(map(float, nodes)), tuple(map(float, wts)))
    for ell, matched in ((1, two_point), (2, three_point)):
        a = transfer_matrix(Family.NMINUS_K, ell, 1.0, Exponential(1.0)).entries
        b = transfer_matrix(Family.NMINUS_K, ell, 1.0, matched).entries
        scale = max(1.0, float(np.max(np.abs(a))))
        c.within(np.max(np.abs(a - b)) / scale, 1e-14, f"ell={ell}")
    return c.result("blocks depend on the shear law through its moments only")


# ------------------------------------------------------------ criterion 7
def green_residuals():
    c = Check()
    law, rho = Exponential(1.0), 1.0
    sol = solve_f0_discrete(law, rho, tol=1e-11)
    z = zeta_discrete(sol)
    for m in range(1, 11):
        g = green_discrete(sol, z, law, rho, m)
        res = apply_stationarity_residual(g, law, rho)
        delta = np.zeros(len(res), dtype=complex)
        delta[m - 1] = 1.0
        c.within(np.max(np.abs(res - delta)), 1e-10, f"lattice source m={m}")
    f0 = solve_f0_continuous(Family.NMINUS_K, law, rho, tol=1e-10)
    gf = green_continuous(f0, law, rho, t=1.5)
    grid = np.linspace(0.01, 12.0, 100)
    c.within(gf.wronskian_residual(grid), 1e-8, "continuous Wronskian")
    return c.result("unit sources reproduced on both realisations")


# ------------------------------------------------------------ criterion 8
def gle_symmetry():
    model = ModelSpec(Family.NMINUS_NPLUS, Exponential(1.0), 1.0)
    note = ""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            a = estimate_gle(model, 0.25, 10**5, 400, seed=404)
            b = estimate_gle(model, -1.25, 10**5, 400, seed=405)
        except HeavyTailError:
            a = estimate_gle(model, 0.25, 10**5, 400, seed=404, on_heavy_tail="warn")
            b = estimate_gle(model, -1.25, 10**5, 400, seed=405, on_heavy_tail="warn")
            note = (
                f"; ESS {a.diagnostics['ess']:.1f}/{b.diagnostics['ess']:.1f} of 400 "
                f"(exponential moments unsampled at these indices)"
            )
    joint = math.hypot(a.stderr, b.stderr)
    dev = abs(a.value - b.value)
    ok = dev <= 3.0 * joint and not note
    return ok, (
        f"L(0.5)={a.value:.5f} vs L(-2.5)={b.value:.5f}, |diff|={dev:.3e}, "
        f"3se={3 * joint:.3e}{note}"
    )


# ------------------------------------------------------------ criterion 9
def variance_triangulation():
    c = Check()
    cases = [(Family.K_NPLUS, 1.0, 1.0)]
    cases += [(Family.NMINUS_K, 0.2, rho) for rho in (0.5, 1.0, 2.0)]
    cases += [(Family.NMINUS_NPLUS, 1.0, rho) for rho in (0.5, 1.0, 2.0)]
    for i, (family, p, rho) in enumerate(cases):
        res = _pert(family, p, rho)
        est = estimate_sigma2(ModelSpec(family, Exponential(p), rho), 10**5, 400, seed=500 + i)
        dev = res.sigma2 - est.value
        c.expect(
            abs(dev) <= 3.0 * est.stderr,
            f"{family.value}({p},{rho}): solver {res.sigma2:.4f} vs mc "
            f"{est.value:.4f}+-{est.stderr:.1e}",
        )
    return c.result("variances match the sampled products at every tested point")


# ------------------------------------------------------------ criterion 10
def triangular_family():
    c = Check()
    ana = nminus_a1_analysis(1.0, 2.0, 1.0, sign=1)
    c.within(ana.gle - math.log(2.0), 1e-12, "exponent at (1,2)")
    c.expect(ana.no_invariant_measure, "positive sign must flag no invariant measure")
    try:
        solve_f0_continuous(Family.NMINUS_A1, Exponential(1.0), 2.0, sign=1)
        c.expect(False, "stationarity solve must refuse the positive sign")
    except NoInvariantMeasureError:
        pass
    res = solve_nminus_perturbative(Family.NMINUS_A1, Exponential(1.0), 2.0, sign=-1)
    c.within(res.lambda1 + 0.5, 1e-10, "lambda1")
    c.within(res.lambda2, 1e-10, "lambda2")
    est = estimate_gamma(ModelSpec(Family.NMINUS_A1, Exponential(1.0), 2.0, sign=1), 10**4, 100, seed=606)
    c.expect(abs(est.value - 0.25) <= 3 * est.stderr, f"mc gamma {est.value:.5f} vs 0.25")
    return c.result("triangular exponent, measure failure and mirrored expansion verified")


# ------------------------------------------------------------ criterion 11
def special_functions():
    c = Check()
    for z in (3.0, 1.0 - 2.0j):
        c.within(whittaker_w(0.0, 0.5, z) - cmath.exp(-z / 2.0), 1e-10, f"W(0,1/2;{z})")
    kappa, mu, p = -1j, 0.5, 1.0
    for s in (0.0, 1.0):
        z = 2j * p + 2.0 * s
        h = 0.02
        w = [whittaker_w(kappa, mu, z + k * h) for k in (-2, -1, 0, 1, 2)]
        second = (-w[0] + 16 * w[1] - 30 * w[2] + 16 * w[3] - w[4]) / (12 * h * h)
        coef = 0.25 - kappa / z + (mu * mu - 0.25) / (z * z)
        c.within(abs(second - coef * w[2]) / max(1.0, abs(coef * w[2])), 1e-8, "ODE residual")
    h = 1e-4
    fd = (whittaker_w(-1j, 0.5, -2j + h) - whittaker_w(-1j, 0.5, -2j - h)) / (2 * h)
    c.within(whittaker_w_prime(-1j, 0.5, -2j) - fd, 1e-7, "derivative identity")
    val = abs(cmath.exp(lngamma(1 + 1j))) ** 2
    c.within(val - math.pi / math.sinh(math.pi), 1e-12, "loggamma modulus")
    euler = 0.5772156649015328606
    q, term, i0, tot, hsum = 0.25, 1.0, 1.0, 0.0, 0.0
    for k in range(1, 40):
        term *= q / (k * k)
        i0 += term
        hsum += 1.0 / k
        tot += term * hsum
    series = -(math.log(0.5) + euler) * i0 + tot
    c.within(bessel_k(0, 1.0) - series, 1e-12, "K0 series oracle")
    return c.result("special-function kernel matches its oracles")


# ------------------------------------------------------------ criterion 12
def gle_slope():
    p, rho = 0.2, 1.0
    res = _pert(Family.NMINUS_K, p, rho)
    model = ModelSpec(Family.NMINUS_K, Exponential(p), rho)
    n, reps = 1200, 6000
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        up = estimate_gle(model, 0.05, n, reps, seed=707)
        dn = estimate_gle(model, -0.05, n, reps, seed=708)
    slope = (up.value - dn.value) / 0.2
    se = math.hypot(up.stderr, dn.stderr) / 0.2
    dev = slope - res.gamma
    ok = abs(dev) <= 3.0 * se
    return ok, f"slope {slope:.5f} vs gamma {res.gamma:.5f} (|diff|={abs(dev):.2e}, 3se={3*se:.2e})"


CRITERIA = [
    (1, "zero-law", zero_law),
    (2, "nieuwenhuizen-consistency", nieuwenhuizen_consistency),
    (3, "dyson-closed-form", dyson_closed_form),
    (4, "casimir-and-brackets", casimir_and_brackets),
    (5, "finite-vs-mc", finite_vs_mc),
    (6, "moment-truncation", moment_truncation),
    (7, "green-residuals", green_residuals),
    (8, "gle-symmetry", gle_symmetry),
    (9, "variance-triangulation", variance_triangulation),
    (10, "triangular-family", triangular_family),
    (11, "special-functions", special_functions),
    (12, "gle-slope", gle_slope),
]


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            start = time.perf_counter()
            try:
                passed, detail = fn()
            except HeavyTailError as exc:
                passed, detail = False, f"heavy-tail collapse: {exc}"
            except Exception as exc:  # a crash is a failure, not an abort
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            return CriterionResult(num, name, passed, detail, time.perf_counter() - start)
    raise ValueError(f"no criterion number {number}")


def run_selftest(name_filter: str | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    results = []
    for num, name, _ in CRITERIA:
        if name_filter and name_filter not in name:
            continue
        res = run_criterion(num)
        results.append(res)
        mark = "PASS" if res.passed else "FAIL"
        stream.write(f"[{mark}] {res.number:2d} {res.name:<28s} {res.seconds:7.2f}s  {res.detail}\n")
        stream.flush()
    if not results:
        stream.write(f"no criteria match filter {name_filter!r}\n")
        return 1
    n_fail = sum(1 for r in results if not r.passed)
    total = sum(r.seconds for r in results)
    stream.write(f"{len(results) - n_fail}/{len(results)} criteria passed in {total:.1f}s\n")
    return 0 if n_fail == 0 else 1
