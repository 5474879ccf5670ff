import math

import numpy as np
import pytest

from sl2lyap.errors import DegenerateOrbitError
from sl2lyap.sl2 import (
    GroupElement,
    SubgroupKind,
    act_circle,
    act_hyperbola,
    act_line,
    one_param,
    renormalized_product,
)

K, A1, A2, NP, NM = (
    SubgroupKind.K,
    SubgroupKind.A1,
    SubgroupKind.A2,
    SubgroupKind.NPLUS,
    SubgroupKind.NMINUS,
)
ALL_KINDS = [K, A1, A2, NP, NM]
TWO_PI = 2.0 * math.pi


def random_group_element(rng):
    # generic element as a product of subgroup factors
    g = one_param(K, rng.uniform(-3, 3))
    g = g @ one_param(NP, rng.uniform(-2, 2))
    g = g @ one_param(A1, rng.uniform(-1.5, 1.5))
    return g


def test_one_param_identity_at_zero():
    for kind in ALL_KINDS:
        g = one_param(kind, 0.0)
        assert (g.a, g.b, g.c, g.d) == (1.0, 0.0, 0.0, 1.0)


def test_one_param_matches_stated_matrices():
    g = one_param(NP, 5.0)
    assert (g.a, g.b, g.c, g.d) == (1.0, 5.0, 0.0, 1.0)
    g = one_param(A1, 2.0 * math.log(2.0))
    assert abs(g.a - 2.0) < 1e-14 and abs(g.d - 0.5) < 1e-14 and g.b == g.c == 0.0
    g = one_param(K, 1.0)
    assert abs(g.a - math.cos(0.5)) < 1e-15 and abs(g.b + math.sin(0.5)) < 1e-15
    g = one_param(A2, 2.0)
    assert abs(g.a - math.cosh(1.0)) < 1e-15 and abs(g.b - math.sinh(1.0)) < 1e-15
    g = one_param(NM, -0.7)
    assert (g.b, g.c) == (0.0, -0.7)


def test_one_param_homomorphism():
    rng = np.random.default_rng(7)
    for kind in ALL_KINDS:
        for _ in range(20):
            s, t = rng.uniform(-2, 2, size=2)
            left = one_param(kind, s) @ one_param(kind, t)
            right = one_param(kind, s + t)
            for x, y in zip(
                (left.a, left.b, left.c, left.d), (right.a, right.b, right.c, right.d)
            ):
                assert abs(x - y) <= 1e-12


def test_one_param_rejects_nonfinite():
    with pytest.raises(ValueError):
        one_param(K, math.inf)


def test_determinant_validation():
    with pytest.raises(ValueError):
        GroupElement(1.0, 0.0, 0.0, 2.0)


def test_transpose_and_inverse():
    g = GroupElement(1.0, 2.0, 3.0, 7.0)
    assert (g.t.a, g.t.b, g.t.c, g.t.d) == (1.0, 3.0, 2.0, 7.0)
    gi = g @ g.inv()
    assert max(abs(gi.a - 1), abs(gi.b), abs(gi.c), abs(gi.d - 1)) < 1e-15


def test_circle_identity_and_rotation():
    e = one_param(K, 0.0)
    for theta in [0.0, 1.0, 3.5, 6.2]:
        theta2, sig = act_circle(theta, e)
        assert abs(theta2 - theta) < 1e-12 and abs(sig - 1.0) < 1e-13
    for theta in [0.3, 2.0, 5.9]:
        for t in [0.5, -1.7, 4.0]:
            theta2, sig = act_circle(theta, one_param(K, t))
            assert abs(theta2 - (theta - t) % TWO_PI) < 1e-12
            assert abs(sig - 1.0) < 1e-12


def test_circle_shear_fixed_point():
    theta2, sig = act_circle(math.pi, one_param(NP, 1.0))
    assert abs(theta2 - math.pi) < 1e-12
    assert abs(sig - 1.0) < 1e-13


def test_circle_vanishing_denominator_lands_on_zero():
    # at theta = 0 a lower shear has num = a = 1, den = b = 0: cot = inf
    theta2, _ = act_circle(0.0, one_param(NM, 2.0))
    assert theta2 == 0.0


def test_line_action():
    e = one_param(K, 0.0)
    assert act_line(0.7, e) == (0.7, 1.0)
    x2, sig = act_line(0.7, one_param(NM, 1.3))
    assert abs(x2 - 2.0) < 1e-15 and abs(sig - 1.0) < 1e-15
    for t in [0.4, -1.1]:
        x2, sig = act_line(0.7, one_param(A1, t))
        assert abs(x2 - math.exp(t) * 0.7) < 1e-14
        assert abs(sig - math.exp(t)) < 1e-14


def test_line_projective_infinity():
    g = one_param(NP, 2.0)  # b = 2
    x2, sig = act_line(math.inf, g)
    assert x2 == 0.5 and sig == 0.0
    # b x + d = 0 sends x to infinity with an inf multiplier, not an error
    x2, sig = act_line(-0.5, g)
    assert x2 == math.inf and sig == math.inf
    x2, sig = act_line(math.inf, one_param(NM, 1.0))  # b = 0
    assert x2 == math.inf and sig == 1.0


def test_hyperbola_action():
    e = one_param(K, 0.0)
    assert act_hyperbola(1.3, e) == (1.3, 1.0)
    x2, sig = act_hyperbola(1.0, one_param(NM, 1.0))
    assert abs(x2 - 2.0) < 1e-15 and abs(sig - 0.5) < 1e-15
    for t in [0.8, -0.6]:
        x2, sig = act_hyperbola(-0.9, one_param(A1, t))
        assert abs(x2 + 0.9 * math.exp(t)) < 1e-14
        assert abs(sig - 1.0) < 1e-14
    with pytest.raises(ValueError):
        act_hyperbola(0.0, e)
    with pytest.raises(DegenerateOrbitError):
        act_hyperbola(-0.5, one_param(NP, 2.0))  # b x + d = 0


@pytest.mark.parametrize("action", ["circle", "line", "hyperbola"])
def test_multiplier_cocycle(action):
    rng = np.random.default_rng(11)
    for _ in range(60):
        g1 = random_group_element(rng)
        g2 = random_group_element(rng)
        if action == "circle":
            theta = rng.uniform(0, TWO_PI)
            t1, s1 = act_circle(theta, g1)
            _, s2 = act_circle(t1, g2)
            _, s12 = act_circle(theta, g1 @ g2)
            assert abs(s12 - s1 * s2) <= 1e-10 * max(1.0, abs(s12))
        elif action == "line":
            x = rng.uniform(-4, 4)
            y1, s1 = act_line(x, g1)
            if math.isinf(y1):
                continue
            _, s2 = act_line(y1, g2)
            _, s12 = act_line(x, g1 @ g2)
            if math.isinf(s2) or math.isinf(s12):
                continue
            assert abs(s12 - s1 * s2) <= 1e-10 * max(1.0, abs(s12))
        else:
            x = rng.uniform(0.2, 4) * rng.choice([-1, 1])
            try:
                y1, s1 = act_hyperbola(x, g1)
                _, s2 = act_hyperbola(y1, g2)
                _, s12 = act_hyperbola(x, g1 @ g2)
            except DegenerateOrbitError:
                continue
            assert abs(s12 - s1 * s2) <= 1e-10 * max(1.0, abs(s12))


def test_multiplier_inverse_identity():
    rng = np.random.default_rng(13)
    for _ in range(60):
        g = random_group_element(rng)
        theta = rng.uniform(0, TWO_PI)
        t1, s1 = act_circle(theta, g)
        _, s_back = act_circle(t1, g.inv())
        assert abs(s_back * s1 - 1.0) <= 1e-10


def test_long_product_keeps_determinant():
    # weak-disorder model keeps entries in floating-point range so the
    # determinant stays numerically meaningful over >= 1e4 factors
    rng = np.random.default_rng(5)

    def factors():
        for _ in range(10**4):
            yield one_param(K, rng.exponential(1.0)) @ one_param(NP, rng.exponential(0.02))

    acc = renormalized_product(factors(), every=64)
    assert abs(acc.det() - 1.0) < 1e-12
