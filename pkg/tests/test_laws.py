import math

import numpy as np
import pytest

from sl2lyap.errors import SingularModelError
from sl2lyap.laws import CallableLaw, Dirac, DiscreteLaw, Exponential, GammaLaw, parse_law

ALL = [Dirac(0.7), Exponential(1.3), Exponential(-2.0), GammaLaw(2.0, 0.5),
       DiscreteLaw((0.0, 2.0), (0.5, 0.5))]


def test_chi_normalisation_and_bound():
    for law in ALL:
        assert abs(law.chi(0.0) - 1.0) < 1e-15
        for theta in [-3.0, -1.0, 0.3, 2.0, 11.0]:
            assert abs(law.chi(theta)) <= 1.0 + 1e-12


def test_moments_match_samplers():
    rng = np.random.default_rng(2)
    for law in ALL:
        draws = law.sample(rng, 200_000)
        for i in (1, 2):
            m = law.moment(i)
            se = np.std(draws**i) / math.sqrt(len(draws)) + 1e-12
            assert abs(np.mean(draws**i) - m) < 5 * se


def test_mirrored_exponential():
    law = Exponential(-2.0)
    assert law.moment(1) == -0.5
    assert abs(law.chi(1.0) - 1.0 / (1.0 + 0.5j)) < 1e-15
    rng = np.random.default_rng(0)
    assert np.all(law.sample(rng, 100) <= 0)


def test_callable_law_guard():
    bad = CallableLaw(lambda theta: 2.0)
    with pytest.raises(SingularModelError):
        bad.chi(1.0)
    good = CallableLaw(lambda theta: 1.0 / (1.0 - 1j * theta), moments=[1.0, 1.0, 2.0])
    assert good.moment(2) == 2.0


def test_parse_law():
    assert parse_law("exp:2") == Exponential(2.0)
    assert parse_law("gamma:2,0.5") == GammaLaw(2.0, 0.5)
    assert parse_law("dirac:-1.5") == Dirac(-1.5)
    for bad in ["exp:", "exp:a", "norm:1", "gamma:2", ""]:
        with pytest.raises(ValueError):
            parse_law(bad)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        Exponential(0.0)
    with pytest.raises(ValueError):
        GammaLaw(-1.0, 1.0)
    with pytest.raises(ValueError):
        DiscreteLaw((1.0, 2.0), (0.7, 0.7))
