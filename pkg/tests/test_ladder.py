import pytest
from mpmath import mp, mpf

from laguerre_lab.errors import DegenerateInput, DomainError, SingularAux
from laguerre_lab.ladder import (
    AuxQuadruple,
    alpha_from_aux,
    aux_integrals,
    beta_from_aux,
    compatibility_residuals,
    initial_aux,
    iterate_difference_system,
    ladder_coeffs,
    ladder_residuals,
    sum_rules,
)
from laguerre_lab.orthopoly import eval_polynomial, recurrence_table
from laguerre_lab.params import PrecisionContext, WeightParams, to_mpf
from laguerre_lab.quadrature import integrate_weighted, moments

HALF = mpf(10) ** -60  # 10^(-P/2) at the 120-digit default
TRIPLE = mpf(10) ** -50  # 10^(-P/2+10) cross-representation contract


def direct_ladder_A(table, n, z):
    """A_n(z) straight from its integral definition (divided-difference kernel)."""
    params, prec = table.params, table.prec
    z = mpf(z)
    with mp.workdps(prec.work_dps):
        zvz = z * params.potential_derivative(z)

        def f(x):
            kern = (zvz - x * params.potential_derivative(x)) / (z - x)
            return kern * eval_polynomial(table, n, x) ** 2

        return integrate_weighted(f, params, prec) / (z * table.h[n])


def test_initial_conditions(params_default, prec120, aux12):
    a0 = initial_aux(params_default, prec120)
    assert a0.r == 0 and a0.rstar == 0
    mu = moments(params_default, -2, 0, prec120)
    with mp.workdps(prec120.work_dps):
        assert abs(a0.R - to_mpf(params_default.t1) * mu[-1] / mu[0]) < HALF
        assert abs(a0.Rstar - 2 * to_mpf(params_default.t2) * mu[-2] / mu[0]) < HALF
        # integral route at n=0 agrees
        assert abs(aux12[0].R - a0.R) < HALF


def test_aux_signs(aux12, aux12_neg):
    for n in range(10):
        assert aux12[n].R > 0 and aux12[n].Rstar > 0
        assert aux12_neg[n].R < 0 and aux12_neg[n].Rstar > 0


def test_requires_m2(prec60):
    tab3 = recurrence_table(WeightParams("0.5", ("0.3", "0.2", "0.1")), 2, prec60)
    with pytest.raises(DomainError):
        aux_integrals(tab3, 1)


def test_triple_representation_agreement(params_default, table12, aux12, prec120):
    iterated = iterate_difference_system(params_default, 10, prec120)
    with mp.workdps(prec120.work_dps):
        for n in range(11):
            for a, b in zip(aux12[n].as_tuple(), iterated[n].as_tuple()):
                assert abs(a - b) < TRIPLE
        for n in range(11):
            assert abs(alpha_from_aux(aux12[n], n, params_default.alpha) - table12.alpha(n)) < TRIPLE
        for n in range(1, 11):
            assert abs(beta_from_aux(aux12[n], n, params_default, prec120) - table12.beta(n)) < TRIPLE


def test_triple_representation_negative_t1(params_neg_t1, table12_neg, aux12_neg, prec120):
    iterated = iterate_difference_system(params_neg_t1, 10, prec120)
    with mp.workdps(prec120.work_dps):
        for n in range(11):
            for a, b in zip(aux12_neg[n].as_tuple(), iterated[n].as_tuple()):
                assert abs(a - b) < TRIPLE
            assert iterated[n].R < 0


def test_first_step_closed_form(params_default, prec120):
    it = iterate_difference_system(params_default, 1, prec120)
    with mp.workdps(prec120.work_dps):
        a0 = it[0]
        t1, alpha = to_mpf(params_default.t1), to_mpf(params_default.alpha)
        r1 = t1 - (1 + alpha + a0.R + a0.Rstar) * a0.R
        assert abs(r1 - it[1].r) < HALF


def test_ladder_coeff_invariants(params_default, aux12):
    with mp.workdps(150):
        c0 = ladder_coeffs(aux12[0], 0, params_default)
        assert c0.a_coeffs[0] == 1
        assert c0.b_coeffs[0] == 0  # -n at n = 0
        c3 = ladder_coeffs(aux12[3], 3, params_default)
        assert c3.a_coeffs[0] == 1 and c3.b_coeffs[0] == -3


def test_ladder_coeffs_vs_integral_definition(table12, aux12):
    with mp.workdps(table12.prec.work_dps):
        c2 = ladder_coeffs(aux12[2], 2, table12.params)
        direct = direct_ladder_A(table12, 2, 5)
        assert abs(c2.eval_a(5) - direct) < HALF


def test_ladder_residuals(table12, aux12):
    for n, z in ((1, "3"), (4, "0.7"), (6, "5")):
        lo, ro = ladder_residuals(table12, aux12, n, z)
        assert lo < HALF and ro < HALF
    lo0, ro0 = ladder_residuals(table12, aux12, 0, "2")
    assert lo0 < HALF and ro0 == 0
    with pytest.raises(DegenerateInput):
        ladder_residuals(table12, aux12, 1, 0)


def test_compatibility_residuals(table12, aux12):
    for n in (0, 3, 6):
        for z in ("0.7", "2", "5"):
            s1, s2, s2p = compatibility_residuals(table12, aux12, n, z)
            assert s1 < HALF and s2 < HALF and s2p < HALF


def test_s1_family_and_s2p_product(table12, aux12):
    params = table12.params
    with mp.workdps(table12.prec.work_dps):
        for n in range(10):
            # r_{n+1} + r_n + alpha_n R_n - t1 = 0
            res = aux12[n + 1].r + aux12[n].r + table12.alpha(n) * aux12[n].R - to_mpf(params.t1)
            assert abs(res) < HALF
        for n in range(1, 10):
            # beta_n R_n R_{n-1} = r_n (r_n - t1)
            res = table12.beta(n) * aux12[n].R * aux12[n - 1].R - aux12[n].r * (
                aux12[n].r - to_mpf(params.t1)
            )
            assert abs(res) < HALF


def test_sum_rules(table12, aux12):
    r1, r2, r3 = sum_rules(table12, aux12, 0)
    assert r1 == 0 and r2 < HALF and r3 == 0
    for n in (1, 2, 5):
        r1, r2, r3 = sum_rules(table12, aux12, n)
        assert r1 < HALF and r2 < HALF and r3 < HALF


def test_t2_to_zero_star_ratio():
    # R*/tau and r*/tau approach finite positive limits as t2 -> 0+
    prec = PrecisionContext(digits=60)
    vals = []
    for t2 in ("1e-6", "1e-8"):
        params = WeightParams("0.5", ("0.3", t2))
        tab = recurrence_table(params, 4, prec)
        with mp.workdps(prec.work_dps):
            a3 = aux_integrals(tab, 3)
            vals.append((a3.Rstar / params.tau, a3.rstar / params.tau))
    with mp.workdps(70):
        for a, b in zip(vals[0], vals[1]):
            assert abs(a - b) <= mpf("0.01") * max(abs(a), abs(b))
        assert vals[1][0] > 0


def test_singular_aux_guard(params_default, prec120):
    bad = AuxQuadruple(mpf(10) ** -80, mpf("0.1"), mpf("0.1"), mpf("0.1"))
    with pytest.raises(SingularAux):
        beta_from_aux(bad, 2, params_default, prec120)
