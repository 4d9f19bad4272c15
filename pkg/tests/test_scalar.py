from fractions import Fraction
from math import e, pi

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phimf import scalar
from phimf.errors import PoleProximity
from phimf.scalar import (TWO_PI, bernoulli_numbers, bernoulli_poly, phi1, psi1, psi_ns, q_t,
                          r_t, rational_part, taylor_part, truncation_bound, w_t,
                          y_t_accelerated, zeta_even, zeta_tail)

EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials
# ---------------------------------------------------------------------------

def test_small_bernoulli_numbers():
    assert bernoulli_numbers(2).values[2] == Fraction(1, 6)
    assert bernoulli_numbers(4).values[4] == Fraction(-1, 30)
    assert bernoulli_numbers(5).values[5] == 0
    assert bernoulli_numbers(1)[1] == Fraction(-1, 2)


def test_bernoulli_table_bounds():
    assert len(bernoulli_numbers(0)) == 1
    with pytest.raises(ValueError):
        bernoulli_numbers(-1)
    with pytest.raises(ValueError):
        bernoulli_numbers(scalar.MAX_BERNOULLI_INDEX + 1)


def test_bernoulli_agrees_with_mpmath():
    import mpmath
    B = bernoulli_numbers(60)
    for k in range(0, 61, 2):
        assert float(B[k]) == pytest.approx(float(mpmath.bernoulli(k)), rel=1e-15)


def test_bernoulli_poly_values(frozen):
    assert bernoulli_poly(1, 0) == -0.5
    assert bernoulli_poly(2, 0.5) == pytest.approx(frozen["scalar"]["bernoulli_poly_2_half"],
                                                   abs=1e-16)
    assert bernoulli_poly(0, 0.77) == 1.0


@given(st.integers(0, 12), st.floats(0, 1))
def test_bernoulli_poly_reflection(k, t):
    # B_k(1 - t) = (-1)^k B_k(t)
    assert bernoulli_poly(k, 1 - t) == pytest.approx((-1) ** k * bernoulli_poly(k, t),
                                                     abs=1e-11)


# ---------------------------------------------------------------------------
# psi1, phi1
# ---------------------------------------------------------------------------

def test_psi1_closed_forms(frozen):
    assert psi1(0) == 1.0
    assert psi1(1) == pytest.approx(frozen["scalar"]["psi1_1"], rel=1e-15)
    assert psi1(2) == pytest.approx(frozen["scalar"]["psi1_2"], rel=1e-15)
    assert psi1(1) == pytest.approx(1 / (e - 1), rel=1e-15)


def test_phi1_closed_forms():
    assert phi1(0) == 1.0
    assert phi1(1) == pytest.approx(e - 1, rel=1e-15)
    assert phi1(-1) == pytest.approx(1 - 1 / e, rel=1e-15)


def test_psi1_pole_raises():
    with pytest.raises(PoleProximity):
        psi1(TWO_PI * 1j)
    with pytest.raises(PoleProximity):
        psi1(np.array([1.0, -2 * TWO_PI * 1j + 1e-10]))


def test_psi1_preserves_shape_and_dtype():
    x = np.linspace(-3, 3, 7).reshape(7, 1)
    out = psi1(x)
    assert out.shape == (7, 1) and out.dtype == float
    assert psi1(0.5 + 0.5j).imag != 0
    assert isinstance(psi1(1.0), float)


def test_psi1_large_arguments():
    assert psi1(800.0) == 0.0
    assert psi1(-800.0) == pytest.approx(800.0)


@given(st.floats(-700, 700))
def test_psi1_phi1_reciprocal_real(x):
    assert psi1(x) * phi1(x) == pytest.approx(1.0, rel=1e-13)


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_psi1_phi1_reciprocal_complex(a, b):
    z = complex(a, b)
    k = round(b / TWO_PI)
    if abs(z - TWO_PI * k * 1j) < 1e-3 and k != 0:
        return
    assert abs(psi1(z) * phi1(z) - 1.0) < 1e-12


@given(st.floats(-50, 50))
def test_psi1_reflection(x):
    # psi1(-x) = psi1(x) + x
    assert psi1(-x) == pytest.approx(psi1(x) + x, rel=1e-13, abs=1e-13)


@given(st.floats(-20, 20), st.floats(-20, 20))
def test_psi1_conjugate_symmetry(a, b):
    z = complex(a, b)
    k = round(b / TWO_PI)
    if k != 0 and abs(z - TWO_PI * k * 1j) < 1e-3:
        return
    assert psi1(z.conjugate()) == pytest.approx(np.conj(psi1(z)), rel=1e-14, abs=1e-300)


# ---------------------------------------------------------------------------
# q_t, w_t, r_t
# ---------------------------------------------------------------------------

def test_q_t_examples(frozen):
    assert q_t(0, 1.0, TWO_PI) == pytest.approx(1 / TWO_PI, rel=1e-15)
    assert q_t(1, 0.0, TWO_PI) == pytest.approx(frozen["scalar"]["q_1_t0_tau2pi"], rel=1e-14)


@given(st.floats(-5, 5), st.floats(-3, 3), st.floats(0, 1), st.floats(0.1, 4))
def test_q_t_identity(a, b, frac, tau):
    z = complex(a, b)
    t = frac * tau
    spacing = TWO_PI / tau
    k = round(b / spacing)
    if abs(z - 1j * k * spacing) < 1e-2 or abs(tau * z) < 1e-3:
        return
    lhs = q_t(z, t, tau) * np.expm1(tau * z) / z
    assert abs(lhs - np.exp(z * t)) <= 1e-11 * max(1.0, abs(np.exp(z * t)))


def test_w_t_examples():
    assert w_t(0, pi, TWO_PI) == pytest.approx(0.5)
    assert w_t(0.7, 0.0, 1.3) == 0.0
    assert w_t(0.7, 1.3, 1.3) == 1.0


@given(st.floats(-5, 5), st.floats(0, 1), st.floats(0.1, 4))
def test_w_t_real_closed_form(x, frac, tau):
    t = frac * tau
    if abs(x) < 1e-6:
        return
    expected = np.expm1(x * t) / np.expm1(x * tau)
    assert w_t(x, t, tau) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_horizon_checks():
    with pytest.raises(ValueError):
        q_t(1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        w_t(1.0, 0.5, -1.0)
    with pytest.raises(PoleProximity):
        r_t(0.0, 1.0)


@given(st.floats(0.05, 3), st.floats(0, TWO_PI))
def test_r_t_closed_form(x, t):
    assert r_t(x, t) == pytest.approx(np.exp(x * t) / np.expm1(TWO_PI * x), rel=1e-12)


# ---------------------------------------------------------------------------
# y_t and its acceleration
# ---------------------------------------------------------------------------

def test_y_t_vanishes_at_zero():
    assert y_t_accelerated(0.0, 1.3, 3, 40) == 0.0


def test_y_t_accelerated_matches_closed_form(frozen):
    ref = frozen["scalar"]["y_t_z0.3_t1"]
    fast = y_t_accelerated(0.3, 1.0, 2, 200)
    slow = y_t_accelerated(0.3, 1.0, 0, 200_000)
    assert abs(fast - ref) < 1e-9
    assert abs(fast - slow) < 1e-8


def test_y_t_identity_complex(frozen):
    z, t = 0.2 + 0.1j, 2.0
    re, im = frozen["scalar"]["y_t_z0.2+0.1i_t2"]
    y = y_t_accelerated(z, t, 4, 500)
    assert abs(y - complex(re, im)) < 1e-12
    resid = (1 / (TWO_PI * z) + (t - pi) / TWO_PI + y) * np.expm1(TWO_PI * z) - np.exp(z * t)
    assert abs(resid) < 1e-6


def test_bernoulli_part_coefficients_shape():
    c = scalar.bernoulli_part_coefficients(3, 1.0)
    assert c.shape == (7,) and c[0] == 0.0
    with pytest.raises(ValueError):
        scalar.bernoulli_part_coefficients(1, 7.0)


@given(st.floats(-0.9, 0.9), st.floats(0, TWO_PI), st.integers(0, 4))
def test_y_t_accelerated_order_independent(x, t, n):
    if abs(x) < 1e-3:
        return
    exact = r_t(x, t) - 1 / (TWO_PI * x) - (t - pi) / TWO_PI
    # the tail after s terms is O(s^-(2n+1)) for n >= 1 and O(1/s) otherwise
    s = 4000 if n == 0 else 200
    assert abs(y_t_accelerated(x, t, n, s) - exact) < (2e-3 if n == 0 else 1e-6)


# ---------------------------------------------------------------------------
# Taylor part, rational part, bound
# ---------------------------------------------------------------------------

def test_taylor_part_examples():
    assert taylor_part(0, 7) == 1.0
    assert taylor_part(1, 1) == pytest.approx(7 / 12, rel=1e-15)
    assert taylor_part(1, 25) == pytest.approx(psi1(1), abs=1e-14)


def test_rational_part_examples(frozen):
    assert rational_part(0, 2, 5) == 0.0
    assert rational_part(1, 1, 1) == pytest.approx(frozen["scalar"]["rational_part_1_1_1"],
                                                   rel=1e-14)
    assert rational_part(1.7, 3, 0) == 0.0


def test_psi_ns_examples(frozen):
    assert psi_ns(0, 3, 9) == 1.0
    assert psi_ns(1, 1, 1) == pytest.approx(frozen["scalar"]["psi_ns_1_1_1"], rel=1e-14)
    err = abs(psi_ns(1, 1, 1) - psi1(1))
    assert err == pytest.approx(frozen["scalar"]["psi_ns_1_1_1_error"], rel=1e-9)
    assert err <= truncation_bound(1, 1, 1)


def test_truncation_bound_examples(frozen):
    assert truncation_bound(2, 7, 0) == 0.0
    assert zeta_even(2) == pytest.approx(pi ** 2 / 6, rel=1e-15)
    assert zeta_even(2) == pytest.approx(frozen["scalar"]["zeta_2"], rel=1e-15)
    assert truncation_bound(1, 1, 1) == pytest.approx(frozen["scalar"]["truncation_bound_1_1_1"],
                                                      rel=1e-14)


def test_zeta_tail_matches_direct_sum():
    direct = sum(k ** -6.0 for k in range(11, 200_000))
    assert zeta_tail(6, 10) == pytest.approx(direct, rel=1e-12)


def test_order_validation():
    with pytest.raises(ValueError):
        taylor_part(1.0, -1)
    with pytest.raises(ValueError):
        rational_part(1.0, 1, -2)
    with pytest.raises(PoleProximity):
        rational_part(TWO_PI * 3j, 1, 5)
    # poles beyond s are not poles of the approximant
    assert np.isfinite(rational_part(TWO_PI * 3j, 1, 2))


@given(st.floats(-3 * pi, 3 * pi), st.integers(1, 4), st.sampled_from([1, 4, 16, 64]))
def test_truncation_bound_dominates(x, n, s):
    err = abs(psi_ns(x, n, s) - psi1(x))
    # the bound is sharp to ten digits, so leave room for double rounding in both values
    slack = 64 * EPS * (abs(psi1(x)) + abs(taylor_part(x, n)))
    assert err <= truncation_bound(n, s, abs(x)) + slack


@given(st.floats(-12, 12), st.integers(0, 4))
def test_error_decreases_with_s(x, n):
    errs = [abs(psi_ns(x, n, s) - psi1(x)) for s in (1, 4, 16, 64)]
    tol = 64 * EPS * max(1.0, abs(x)) ** (2 * n + 2)
    assert all(b <= a + tol for a, b in zip(errs, errs[1:]))


@given(st.floats(-10, 10), st.floats(-10, 10), st.integers(0, 4), st.integers(0, 20))
def test_psi_ns_conjugate_symmetry(a, b, n, s):
    z = complex(a, b)
    if s and any(abs(z - TWO_PI * k * 1j) < 1e-3 for k in range(-s, s + 1) if k):
        return
    assert psi_ns(z.conjugate(), n, s) == pytest.approx(np.conj(psi_ns(z, n, s)), rel=1e-13,
                                                        abs=1e-13)


@given(st.floats(-3 * pi, 3 * pi), st.integers(1, 4))
def test_rational_part_sign(x, n):
    # on the real axis the pole corrections carry the sign (-1)^n
    r = rational_part(x, n, 8)
    assert r * (-1) ** n >= 0
