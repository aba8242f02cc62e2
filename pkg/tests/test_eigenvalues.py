import math
from fractions import Fraction

import numpy as np
import pytest

from fockradial.eigenvalues import (
    ClosedForm,
    QuadConfig,
    Quadrature,
    averaging_operator,
    gamma_closed_form,
    gamma_closed_form_float,
    gamma_combo_closed_form,
    gamma_quadrature,
    gamma_sequence,
    has_closed_form,
    shifted_gamma_residual,
)
from fockradial.symbols import (
    CallableSymbol,
    ConstantSymbol,
    basic_symbol,
    combo_symbol,
    sup_estimate,
    with_limit_offset,
)


# ---------------------------------------------------------------------------
# closed forms

def test_gamma_closed_form_examples():
    assert gamma_closed_form(2, 4, 1) == 0
    assert gamma_closed_form(1, 4, 3) == Fraction(3, 16)
    assert gamma_closed_form(0, 2, 5) == Fraction(1, 32)


def test_gamma_closed_form_float_matches_exact():
    for m in range(6):
        for xi in (2, 4, 16):
            for n in range(0, 40):
                exact = gamma_closed_form(m, xi, n)
                assert gamma_closed_form_float(m, xi, n) == pytest.approx(
                    float(exact), rel=1e-15, abs=0.0
                )


def test_gamma_combo_closed_form_examples():
    assert gamma_combo_closed_form([1.0], 2, 0.0, 3) == pytest.approx(0.125)
    assert gamma_combo_closed_form([], 2, 5.0, 17) == 5.0
    assert gamma_combo_closed_form([1.0, -1.0], 2, 0.0, 1) == pytest.approx(-0.5)


def test_monotone_tail_for_admissible_scales():
    # with 2 xi >= m + 2 the eigenvalue sequence is nonincreasing past n = m:
    # gamma(n) >= gamma(n+1) iff binom(n, m) * xi >= binom(n+1, m), checked
    # exhaustively in exact integer arithmetic
    for m in range(21):
        xi_min = max(2, math.ceil((m + 2) / 2))
        for xi in range(xi_min, 65):
            binom = m + 1  # binom(m+1, m)
            for n in range(m + 1, 501):
                binom_next = binom * (n + 1) // (n + 1 - m)
                assert binom * xi >= binom_next, (m, xi, n)
                binom = binom_next
    # the same fact on the actual closed-form values for one family
    vals = [gamma_closed_form(3, 3, n) for n in range(3, 60)]
    assert all(a >= b for a, b in zip(vals[1:], vals[2:]))


def test_norm_bound_closed_form_families():
    # |gamma(n)| <= grid-estimated sup of the symbol
    for m in range(6):
        for xi in (2, 4):
            sym = basic_symbol(m, xi)
            bound = sup_estimate(sym) + 1e-9
            for n in range(51):
                assert abs(gamma_closed_form_float(m, xi, n)) <= bound


# ---------------------------------------------------------------------------
# quadrature

def test_gamma_quadrature_constant_one():
    one = ConstantSymbol(1.0)
    for n in (0, 1, 7, 63, 200, 500):
        res = gamma_quadrature(one, n)
        assert abs(res.value - 1.0) <= 1e-10
        assert res.converged


def test_gamma_quadrature_gaussian_callable():
    # g(x) = e^{-x^2} has eigenvalues 2^{-(n+1)}
    sym = CallableSymbol(lambda x: np.exp(-(x**2)), sup_bound=1.0)
    for n in range(5):
        res = gamma_quadrature(sym, n)
        assert abs(res.value - 2.0 ** -(n + 1)) <= 1e-10


def test_gamma_quadrature_cross_engine():
    res = gamma_quadrature(basic_symbol(1, 4), 3)
    assert abs(res.value - 3 / 16) <= 1e-8


def test_gamma_quadrature_cancellation_cells():
    # closed form is exactly zero below the degree; the quadrature must hold
    # the absolute tolerance despite integrand mass ~ xi^m
    for n in range(4):
        res = gamma_quadrature(basic_symbol(10, 8), n)
        assert abs(res.value) <= 1e-9


def test_gamma_quadrature_linearity():
    rng = np.random.default_rng(2)
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
    combo = combo_symbol(coeffs, 4)
    for n in (0, 2, 7):
        parts = sum(
            c * float(gamma_closed_form(k, 4, n)) for k, c in enumerate(coeffs)
        )
        # closed combo vs sum of closed parts
        assert abs(gamma_combo_closed_form(coeffs, 4, 0.0, n) - parts) <= 1e-10
        # quadrature of the combo vs the same sum
        assert abs(gamma_quadrature(combo, n).value - parts) <= 1e-9


def test_weight_normalization():
    # gamma of the constant-1 symbol is the weight's total mass
    one = ConstantSymbol(1.0)
    for n in (0, 5, 50, 500):
        assert abs(gamma_quadrature(one, n).value - 1.0) <= 1e-10


def test_quad_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadConfig(peak_window_sigmas=2.0)
    with pytest.raises(ValueError):
        QuadConfig(max_subdivisions=-1)


def test_nonconvergence_is_flagged_not_raised():
    cfg = QuadConfig(rel_tol=1e-30, max_subdivisions=1)
    res = gamma_quadrature(ConstantSymbol(1.0), 3, cfg)
    assert not res.converged
    assert abs(res.value - 1.0) <= 1e-9  # value still sane
    assert res.est_abs_err > 1e-30  # and the estimate stays honest


# ---------------------------------------------------------------------------
# sequences

def test_gamma_sequence_closed():
    seq = gamma_sequence(basic_symbol(0, 2), 3)
    assert [v.real for v in seq.values] == [1.0, 0.5, 0.25, 0.125]
    assert all(isinstance(tag, ClosedForm) for tag in seq.engines)


def test_gamma_sequence_zero_symbol():
    seq = gamma_sequence(ConstantSymbol(0.0), 10)
    assert all(v == 0 for v in seq.values)


def test_gamma_sequence_quadrature_engine():
    sym = CallableSymbol(lambda x: np.exp(-(x**2)), sup_bound=1.0)
    seq = gamma_sequence(sym, 4)
    expected = [2.0 ** -(n + 1) for n in range(5)]
    assert all(isinstance(tag, Quadrature) for tag in seq.engines)
    assert seq.converged
    np.testing.assert_allclose([v.real for v in seq.values], expected, atol=1e-10)


def test_gamma_sequence_forced_engines():
    sym = basic_symbol(1, 4)
    closed = gamma_sequence(sym, 10, engine="closed")
    quad = gamma_sequence(sym, 10, engine="quad")
    for c, q in zip(closed.values, quad.values):
        assert abs(c - q) <= 1e-9
    with pytest.raises(ValueError):
        gamma_sequence(CallableSymbol(lambda x: x, 1.0), 3, engine="closed")
    with pytest.raises(ValueError):
        gamma_sequence(sym, 3, engine="warp")


def test_gamma_sequence_parallel_matches_serial():
    sym = CallableSymbol(lambda x: np.exp(-(x**2)), sup_bound=1.0)
    serial = gamma_sequence(sym, 8, engine="quad")
    parallel = gamma_sequence(sym, 8, engine="quad", max_workers=4)
    assert serial.values == parallel.values


def test_offset_combo_closed_form():
    sym = with_limit_offset(combo_symbol([1.0], 2), 2.0)
    seq = gamma_sequence(sym, 3)
    np.testing.assert_allclose(
        [v.real for v in seq.values], [3.0, 2.5, 2.25, 2.125]
    )
    assert has_closed_form(sym)


# ---------------------------------------------------------------------------
# averaging operators

def test_averaging_constant_has_unit_mass_kernel():
    for j in range(4):
        assert averaging_operator(lambda x: 3.0, j, 1.7) == pytest.approx(3.0, abs=1e-9)


def test_averaging_level_zero_is_substitution():
    assert averaging_operator(lambda x: math.cos(x), 0, 9.0) == pytest.approx(
        math.cos(3.0)
    )


def test_averaging_square_example():
    # g(x) = x^2: level 0 gives u, level 1 gives r + 1
    assert averaging_operator(lambda x: x**2, 1, 2.0) == pytest.approx(3.0, abs=1e-8)
    assert averaging_operator(lambda x: x**2, 1, 0.0) == pytest.approx(1.0, abs=1e-8)


def test_averaging_validation():
    with pytest.raises(ValueError):
        averaging_operator(lambda x: x, -1, 1.0)
    with pytest.raises(ValueError):
        averaging_operator(lambda x: x, 1, -1.0)


# ---------------------------------------------------------------------------
# shift identity

def test_shift_identity_constant():
    assert shifted_gamma_residual(ConstantSymbol(1.0), 1, 10) <= 1e-9


def test_shift_identity_basic_symbol():
    assert shifted_gamma_residual(basic_symbol(0, 2), 1, 20) < 1e-7


def test_shift_identity_gaussian_level_two():
    sym = CallableSymbol(lambda x: np.exp(-(x**2)), sup_bound=1.0)
    assert shifted_gamma_residual(sym, 2, 10) < 1e-6


def test_shift_identity_validation():
    with pytest.raises(ValueError):
        shifted_gamma_residual(ConstantSymbol(1.0), 0, 5)
