import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from laguerre_lab.errors import DegenerateInput, DomainError, PrecisionExhausted
from laguerre_lab.orthopoly import (
    christoffel_darboux_residual,
    eval_by_coeffs,
    eval_polynomial,
    eval_polynomial_pair,
    hankel_determinant,
    moment_determinant,
    orthogonality_residual,
    recurrence_table,
)
from laguerre_lab.params import PrecisionContext, WeightParams


def test_classical_laguerre_trivials():
    prec = PrecisionContext(digits=60)
    t0 = recurrence_table(WeightParams("0", ("0", "0")), 3, prec)
    with mp.workdps(70):
        assert abs(t0.alpha(0) - 1) < mpf(10) ** -50  # mu_1/mu_0 = 1
    t5 = recurrence_table(WeightParams("0.5", ("0", "0")), 3, prec)
    with mp.workdps(70):
        # classical alpha_n = 2n+1+alpha, beta_n = n(n+alpha)
        assert abs(t5.alpha(2) - mpf("5.5")) < mpf(10) ** -50
        assert abs(t5.beta(2) - 5) < mpf(10) ** -50


def test_structural_identities(table12):
    tab = table12
    assert tab.p(0) == 0
    with mp.workdps(tab.prec.work_dps):
        for n in range(1, 11):
            assert tab.h[n] > 0
            assert abs(tab.beta(n) - tab.h[n] / tab.h[n - 1]) < mpf(10) ** -125
        for n in range(10):
            assert abs(tab.alpha(n) - (tab.p(n) - tab.p(n + 1))) < mpf(10) ** -100
        # sum rule: sum_{j<n} alpha_j = -p(n)
        for n in range(1, 11):
            s = mp.fsum(tab.alpha(j) for j in range(n))
            assert abs(s + tab.p(n)) < mpf(10) ** -100


def test_determinant_ratio_oracle(params_default):
    # h_n = D_{n+1}/D_n from explicit minors, desk scale at 200 digits
    tab = recurrence_table(params_default, 8, PrecisionContext(digits=200))
    with mp.workdps(220):
        for n in range(7):
            dn = moment_determinant(tab, n)
            dn1 = moment_determinant(tab, n + 1)
            assert abs(dn1 / dn - tab.h[n]) <= mpf(10) ** -100 * tab.h[n]


def test_hankel_determinant(table12):
    with mp.workdps(table12.prec.work_dps):
        assert hankel_determinant(table12, 0) == 1
        assert abs(hankel_determinant(table12, 1) - table12.moments[0]) < mpf(10) ** -120
        d4 = hankel_determinant(table12, 4)
        m4 = moment_determinant(table12, 4)
        assert abs(d4 - m4) <= mpf(10) ** -90 * abs(m4)
    with pytest.raises(DomainError):
        hankel_determinant(table12, 20)


def test_eval_polynomial(table12):
    with mp.workdps(table12.prec.work_dps):
        assert eval_polynomial(table12, 0, "1.7") == 1
        x = mpf("1.7")
        p1 = eval_polynomial(table12, 1, x)
        assert abs(p1 - (x - table12.alpha(0))) < mpf(10) ** -125
        # recurrence route vs Horner on the Gram-Schmidt coefficient vector
        a = eval_polynomial(table12, 5, x)
        b = eval_by_coeffs(table12, 5, x)
        assert abs(a - b) < mpf(10) ** -110
        pn, pn1 = eval_polynomial_pair(table12, 5, x)
        assert pn == a
        assert abs(pn1 - eval_polynomial(table12, 4, x)) < mpf(10) ** -110


def test_christoffel_darboux(table12):
    half = mpf(10) ** -60
    with mp.workdps(table12.prec.work_dps):
        # n=1: both sides collapse to 1/h_0
        assert christoffel_darboux_residual(table12, 1, "0.4", "1.9") < half
        assert christoffel_darboux_residual(table12, 6, "0.5", "2.0") < half
        # stability just off the diagonal
        y = mpf("2.0")
        x = y + mpf(10) ** -30
        assert christoffel_darboux_residual(table12, 6, x, y) < half
    with pytest.raises(DegenerateInput):
        christoffel_darboux_residual(table12, 6, 2, 2)


def test_orthogonality_independent_quadrature(table12):
    half = mpf(10) ** -60
    with mp.workdps(table12.prec.work_dps):
        for j, k in ((6, 3), (8, 0), (5, 4)):
            assert orthogonality_residual(table12, j, k) < half
        assert orthogonality_residual(table12, 4, 4) < half


def test_classical_limit_along_t2_eq_t1sq():
    t1 = mpf(10) ** -6
    params = WeightParams("0.5", (t1, t1 * t1))
    tab = recurrence_table(params, 5, PrecisionContext(digits=60))
    with mp.workdps(70):
        for n in range(4):
            assert abs(tab.alpha(n) - (2 * n + 1 + mpf("0.5"))) < mpf(10) ** -4
        for n in range(1, 5):
            assert abs(tab.beta(n) - n * (n + mpf("0.5"))) < mpf(10) ** -4


def test_precision_exhausted():
    params = WeightParams("0.5", ("0.3", "0.2"))
    with pytest.raises(PrecisionExhausted):
        recurrence_table(params, 40, PrecisionContext(digits=50), auto_digits=False)


@settings(max_examples=6, deadline=None)
@given(
    a10=st.integers(min_value=-5, max_value=25),
    t110=st.integers(min_value=-10, max_value=10).filter(lambda v: v != 0),
    t210=st.integers(min_value=1, max_value=10),
)
def test_table_positivity_property(a10, t110, t210):
    params = WeightParams(mpf(a10) / 10, (mpf(t110) / 10, mpf(t210) / 10))
    tab = recurrence_table(params, 4, PrecisionContext(digits=50))
    assert all(h > 0 for h in tab.h)
    assert all(b > 0 for b in tab.beta_rc)
