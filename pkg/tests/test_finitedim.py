import math

import numpy as np
import pytest
from numpy.polynomial import laguerre

from sl2lyap.errors import SingularModelError
from sl2lyap.families import Family
from sl2lyap.finitedim import (
    assemble_kn_from_generators,
    gle_finite,
    gle_from_matrix,
    transfer_matrix,
    transfer_matrix_kn,
    transfer_matrix_nminus_k,
)
from sl2lyap.laws import CallableLaw, Dirac, DiscreteLaw, Exponential
from sl2lyap.montecarlo import ModelSpec, _accumulate_lognorms
from sl2lyap.operators import restricted_generator
from sl2lyap.sl2 import SubgroupKind as SK


def gauss_exponential_law(n_nodes):
    """Discrete law matching the first 2 n_nodes - 1 moments of the unit
    exponential (Gauss quadrature for the weight e^{-t}); the test's own
    moment-matching oracle."""
    coeffs = [0.0] * n_nodes + [1.0]
    nodes = laguerre.lagroots(coeffs)
    lag_next = laguerre.lagval(nodes, [0.0] * (n_nodes + 1) + [1.0])
    weights = nodes / ((n_nodes + 1) ** 2 * lag_next**2)
    weights = weights / weights.sum()
    return DiscreteLaw(tuple(float(x) for x in nodes), tuple(float(w) for w in weights))


def test_zero_index_block_is_identity():
    for fam in Family:
        m = transfer_matrix(fam, 0, 1.3, Exponential(0.7))
        assert m.entries.shape == (1, 1)
        assert abs(m.entries[0, 0] - 1.0) < 1e-15
        assert gle_from_matrix(m).gle == 0.0


def test_kn_block_entries_match_generator_assembly():
    for ell in [1, 2, 5, 9]:
        for law in [Exponential(1.0), Exponential(0.3), Dirac(0.7), Dirac(-1.2)]:
            a = transfer_matrix_kn(ell, 1.3, law).entries
            b = assemble_kn_from_generators(ell, 1.3, law)
            assert np.max(np.abs(a - b)) <= 1e-14 * max(1.0, np.max(np.abs(a)))


def test_kn_stated_entry_formulas():
    # row m: a_m = (i/2rho)(ell+1-m)/chi(-m+1), b_m = (1-i m/rho)/chi(-m),
    # c_m = (-i/2rho)(ell+1+m)/chi(-m-1)
    ell, rho, law = 2, 0.8, Exponential(1.7)
    mat = transfer_matrix_kn(ell, rho, law).entries
    for i, m in enumerate(range(-ell, ell + 1)):
        assert abs(mat[i, i] - (1 - 1j * m / rho) / law.chi(-m)) < 1e-14
        if i > 0:
            a_m = (0.5j / rho) * (ell + 1 - m) / law.chi(-m + 1)
            assert abs(mat[i, i - 1] - a_m) < 1e-14
        if i < 2 * ell:
            c_m = (-0.5j / rho) * (ell + 1 + m) / law.chi(-m - 1)
            assert abs(mat[i, i + 1] - c_m) < 1e-14


def test_kn_dirac_zero_has_unit_spectrum():
    # chi = 1 makes the block I - N+/rho with nilpotent N+: defective unit
    # eigenvalue, so expect agreement at the cube root of machine epsilon
    res = gle_from_matrix(transfer_matrix_kn(1, 1.0, Dirac(0.0)))
    assert np.max(np.abs(res.spectrum - 1.0)) < 5e-5
    assert abs(res.gle) < 5e-5


def test_nminus_block_is_nilpotent():
    nm = restricted_generator(SK.NMINUS, 1)
    assert np.max(np.abs(np.linalg.matrix_power(nm, 3))) == 0.0
    nm = restricted_generator(SK.NMINUS, 3)
    assert np.max(np.abs(np.linalg.matrix_power(nm, 7))) == 0.0


def test_moment_truncation_two_point_law():
    # two-point law {0, 2} with equal weights matches the unit exponential's
    # first two moments (mean 1, second moment 2): identical blocks at ell=1
    two = DiscreteLaw((0.0, 2.0), (0.5, 0.5))
    assert two.moment(1) == 1.0 and two.moment(2) == 2.0
    a = transfer_matrix_nminus_k(1, 1.0, Exponential(1.0)).entries
    b = transfer_matrix_nminus_k(1, 1.0, two).entries
    assert np.max(np.abs(a - b)) <= 1e-14 * max(1.0, np.max(np.abs(a)))


def test_moment_truncation_gauss_law_higher_index():
    three = gauss_exponential_law(3)
    for i in range(1, 5):
        assert abs(three.moment(i) - math.factorial(i)) < 1e-12 * math.factorial(i)
    for fam in (Family.NMINUS_K, Family.NMINUS_NPLUS):
        a = transfer_matrix(fam, 2, 1.0, Exponential(1.0)).entries
        b = transfer_matrix(fam, 2, 1.0, three).entries
        assert np.max(np.abs(a - b)) <= 1e-14 * max(1.0, np.max(np.abs(a)))


def test_triangular_block_reproduces_closed_form():
    for sign in (1, -1):
        res = gle_finite(Family.NMINUS_A1, 1, 2.0, Exponential(1.0), sign=sign)
        assert abs(res.gle - math.log(2.0)) < 1e-12
        assert not res.complex_leading
    # non-normal block at higher index: eigenvalues good to ~1e-10
    res = gle_finite(Family.NMINUS_A1, 2, 5.0, Exponential(0.5))
    assert abs(res.gle + math.log(1.0 - 2.0 / 5.0)) < 1e-9
    with pytest.raises(SingularModelError):
        transfer_matrix(Family.NMINUS_A1, 3, 2.0, Exponential(1.0))


def test_chi_zero_raises_singular_model():
    law = CallableLaw(lambda theta: 0.0 if theta == -1 else 1.0)
    with pytest.raises(SingularModelError):
        transfer_matrix_kn(1, 1.0, law)


def exact_second_moment_sequence(mat, n_max):
    """E |x Pi_n|^2 at the start angle theta = 0 from powers of the
    transfer block (the independent oracle for the simulation test)."""
    size = mat.entries.shape[0]
    transfer = np.linalg.inv(mat.entries)
    coeffs = np.zeros(size, dtype=complex)
    coeffs[size // 2] = 1.0  # the constant function e_0
    out = []
    for _ in range(n_max):
        coeffs = transfer @ coeffs
        out.append(complex(np.sum(coeffs)))  # evaluation at theta = 0
    return out


def test_block_route_against_simulation_moments():
    # NminusK with a deterministic unit shear: E |x Pi_n|^2 from the block
    # matches the sample mean of exp(2 log-norm), and the ratio of
    # consecutive exact moments converges to exp(exponent)
    law, rho, ell = Dirac(1.0), 1.0, 1
    mat = transfer_matrix(Family.NMINUS_K, ell, rho, law)
    exact_seq = exact_second_moment_sequence(mat, 60)
    imag_max = max(abs(v.imag) for v in exact_seq)
    assert imag_max < 1e-10 * max(abs(v) for v in exact_seq)

    model = ModelSpec(Family.NMINUS_K, law, rho)
    n_probe = 8
    reps = 200_000
    s = _accumulate_lognorms(model, n_probe, reps, seed=123)
    # per-step second moments need per-step log norms; rerun cumulatively
    for n in (4, n_probe):
        sn = _accumulate_lognorms(model, n, reps, seed=123)
        w = np.exp(2.0 * sn)
        est = float(np.mean(w))
        se = float(np.std(w, ddof=1) / math.sqrt(reps))
        assert abs(est - exact_seq[n - 1].real) <= 3.0 * se

    lam = gle_from_matrix(mat)
    ratio = exact_seq[-1].real / exact_seq[-2].real
    assert abs(math.log(ratio) - lam.gle) < 1e-6


def test_mutated_entries_break_consistency():
    # a sign error injected into the subdiagonal coupling formula must move
    # the block spectrum (flipping a *pair* of opposite off-diagonals is a
    # diagonal similarity and would be invisible, so flip the whole band)
    ell, rho, law = 1, 1.0, Exponential(1.0)
    good = transfer_matrix_kn(ell, rho, law).entries
    bad = good.copy()
    for i in range(1, bad.shape[0]):
        bad[i, i - 1] *= -1.0
    ref = assemble_kn_from_generators(ell, rho, law)
    assert np.max(np.abs(good - ref)) < 1e-14 * np.max(np.abs(ref))
    assert np.max(np.abs(bad - ref)) > 0.1
    mu_good = gle_from_matrix(transfer_matrix_kn(ell, rho, law)).gle
    from sl2lyap.finitedim import RestrictedTransferMatrix

    mu_bad = gle_from_matrix(RestrictedTransferMatrix(ell, Family.K_NPLUS, bad)).gle
    assert abs(mu_good - mu_bad) > 1e-3
