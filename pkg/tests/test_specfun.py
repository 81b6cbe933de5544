"""Special-function kernel tests.

Expected values were computed with independent oracles (mpmath at 30+ digits,
adaptive quadrature of the Euler-type integral representations, gamma
identities) and frozen below.  Where cheap, the quadrature oracle is also
re-evaluated at test time.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from hetnet_in import specfun as sf
from hetnet_in.errors import InvalidParam


# ---------------------------------------------------------------------------
# gauss_2f1_neg


def test_2f1_empty_series():
    assert sf.gauss_2f1_neg(-0.5, 1, 0.5, 0.0) == 1.0


def test_2f1_closed_form_arctan():
    # 2F1(-1/2, 1; 1/2; -x) = 1 + sqrt(x) arctan(sqrt(x))
    assert sf.gauss_2f1_neg(-0.5, 1, 0.5, 1.0) == pytest.approx(
        1.0 + math.atan(1.0), rel=1e-11)


def test_2f1_frozen_oracle_values():
    # mpmath.hyp2f1 at 30 digits (independent implementation).
    frozen = [
        ((-0.5, 2, 0.5, 2.0), 3.359865909901453),
        ((-0.5, 8, 0.5, 1.0), 4.93598355679674),
        ((2.25, 0.5, 1.5, 0.4), 0.7833662098580622),
        ((-0.5, 1, 0.5, 100.0), 15.71127674303735),
        ((5.0, 1.5, 2.5, 1e6), 1.84077694546277e-10),
    ]
    for (a, b, c, x), want in frozen:
        assert sf.gauss_2f1_neg(a, b, c, x) == pytest.approx(want, rel=1e-10)


def test_2f1_quadrature_oracle_runtime():
    # Euler integral with c > b > 0:
    # 2F1(a,b;c;-x) = 1/B(b, c-b) * int_0^1 t^(b-1)(1-t)^(c-b-1)(1+xt)^(-a) dt
    cases = [(2.25, 0.5, 1.5, 0.4), (-0.5, 0.7, 2.0, 2.0), (1.5, 1.0, 3.0, 5.0)]
    for a, b, c, x in cases:
        val, _ = quad(lambda t: t ** (b - 1) * (1 - t) ** (c - b - 1)
                      * (1 + x * t) ** (-a), 0, 1)
        val /= sf.beta(b, c - b)
        assert sf.gauss_2f1_neg(a, b, c, x) == pytest.approx(val, rel=1e-8)


def test_2f1_pfaff_vs_series_overlap():
    # Force both evaluation paths on the overlap region and compare.
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = rng.uniform(-1, 0)
        b = rng.integers(1, 9)
        c = a + 1.0
        x = rng.uniform(0.3, 0.9)
        direct = sf._series_2f1(a, float(b), c, -x, sf.DEFAULT_CONFIG)
        y = x / (1.0 + x)
        pfaff = (1.0 + x) ** (-float(b)) * sf._series_2f1(
            c - a, float(b), c, y, sf.DEFAULT_CONFIG)
        assert pfaff == pytest.approx(direct, rel=1e-9)


def test_2f1_invalid_c():
    with pytest.raises(InvalidParam):
        sf.gauss_2f1_neg(1.0, 1.0, 0.0, 0.5)
    with pytest.raises(InvalidParam):
        sf.gauss_2f1_neg(1.0, 1.0, -3.0, 0.5)


def test_2f1_negative_x_rejected():
    with pytest.raises(InvalidParam):
        sf.gauss_2f1_neg(1.0, 1.0, 2.0, -0.5)


# ---------------------------------------------------------------------------
# capital_f


def test_capital_f_trivial_zero():
    assert sf.capital_f(0.0, 1, 4.0) == 0.0


def test_capital_f_closed_form_u1_alpha4():
    # F(x; U=1, alpha=4) = sqrt(x) arctan(sqrt(x))
    for x in (0.1, 1.0, 10.0, 100.0):
        want = math.sqrt(x) * math.atan(math.sqrt(x))
        assert sf.capital_f(x, 1, 4.0) == pytest.approx(want, rel=1e-9)


def test_capital_f_quadrature_oracle():
    # F(x) = 2 * int_1^inf (1 - (1 + x v^-alpha)^-U) v dv
    def oracle(x, U, alpha):
        val, _ = quad(lambda v: (1 - (1 + x * v ** -alpha) ** -U) * v,
                      1, np.inf, limit=200)
        return 2 * val

    frozen = [
        ((2.0, 2, 4.0), 2.359865909901453),
        ((1.0, 8, 4.0), 3.93598355679674),
        ((0.5, 3, 3.2), 2.034289422999628),
    ]
    for (x, U, alpha), want in frozen:
        assert sf.capital_f(x, U, alpha) == pytest.approx(want, rel=1e-9)
        assert oracle(x, U, alpha) == pytest.approx(want, rel=1e-7)


def test_capital_f_nonneg_nondecreasing_grid():
    xs = np.linspace(0.0, 30.0, 120)
    for U, alpha in [(1, 4.0), (2, 4.0), (4, 3.5), (8, 2.5), (16, 5.0)]:
        vals = [sf.capital_f(x, U, alpha) for x in xs]
        assert vals[0] == 0.0
        assert all(v >= 0 for v in vals)
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# capital_g


def test_capital_g_values():
    assert sf.capital_g(0.0, 2, 4.0) == 0.0
    assert sf.capital_g(1.0, 1, 4.0) == pytest.approx(math.pi / 2, rel=1e-12)
    assert sf.capital_g(1.0, 2, 4.0) == pytest.approx(3 * math.pi / 4, rel=1e-12)


def test_capital_g_strictly_increasing():
    xs = np.linspace(0.01, 5.0, 100)
    vals = [sf.capital_g(x, 3, 3.7) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# f_tilde


def test_f_tilde_trivial_zero():
    assert sf.f_tilde(0.0, 1, 2, 4.0) == 0.0


def test_f_tilde_quadrature_oracle():
    # F~_k(x) = x^k / alpha * int_0^1 t^(k - 2/alpha - 1) (1 + x t)^-(U+k) dt
    def oracle(x, k, U, alpha):
        # epsabs=0: the raw integral can be ~1e-9 before the x^k prefactor.
        r = 2.0 / alpha
        val, _ = quad(lambda t: t ** (k - r - 1) * (1 + x * t) ** (-(U + k)),
                      0, 1, points=[min(1.0, 1.0 / x)] if x > 1 else None,
                      limit=200, epsabs=0.0, epsrel=1e-11)
        return x ** k / alpha * val

    frozen = [
        ((1.0, 1, 1, 4.0), 0.3213495408493621),
        ((3.0, 2, 4, 3.5), 0.05061248230884481),
        ((0.5, 1, 2, 4.0), 0.1718796294684437),
        ((625.0, 3, 4, 4.0), 0.1342233189396328),
    ]
    for (x, k, U, alpha), want in frozen:
        assert sf.f_tilde(x, k, U, alpha) == pytest.approx(want, rel=1e-9)
        assert oracle(x, k, U, alpha) == pytest.approx(want, rel=1e-6)


def test_f_tilde_nonneg():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.uniform(0, 20)
        k = int(rng.integers(1, 6))
        U = int(rng.integers(1, 9))
        alpha = rng.uniform(2.2, 5.0)
        assert sf.f_tilde(x, k, U, alpha) >= 0.0


# ---------------------------------------------------------------------------
# lower_inc_gamma_reg


def test_gammainc_trivial():
    assert sf.lower_inc_gamma_reg(1.0, 0.0) == 0.0


def test_gammainc_exponential_identity():
    assert sf.lower_inc_gamma_reg(1.0, math.log(2)) == pytest.approx(0.5, rel=1e-12)


def test_gammainc_integer_closed_form():
    # P(3, 2) = 1 - e^-2 (1 + 2 + 2)
    want = 1 - math.exp(-2) * 5
    assert sf.lower_inc_gamma_reg(3.0, 2.0) == pytest.approx(want, rel=1e-12)
    assert want == pytest.approx(0.3233235838, abs=1e-10)


def test_gammainc_range_and_limit():
    rng = np.random.default_rng(11)
    for _ in range(100):
        s = rng.uniform(0.1, 20.0)
        x = rng.uniform(0.0, 60.0)
        p = sf.lower_inc_gamma_reg(s, x)
        assert 0.0 <= p <= 1.0
    for s in (0.5, 1.0, 3.0, 10.0):
        assert sf.lower_inc_gamma_reg(s, 50.0 * s) == pytest.approx(1.0, abs=1e-10)


def test_gammainc_monotone_in_x():
    xs = np.linspace(0, 12, 200)
    vals = [sf.lower_inc_gamma_reg(2.7, x) for x in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
