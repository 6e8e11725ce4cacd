from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from laguerre_lab import equilibrium as eq
from laguerre_lab.errors import DomainError, OutOfSupport
from laguerre_lab.params import PrecisionContext, WeightParams, to_mpf


@pytest.fixture(scope="module")
def prec():
    return PrecisionContext(digits=120)


@pytest.fixture(scope="module")
def params_eq():
    return WeightParams("1", ("0.3", "0.2"))


@pytest.fixture(scope="module")
def sol(params_eq, prec):
    return eq.solve_support(10, params_eq, prec=prec)


def test_support_solution(sol):
    with mp.workdps(sol.prec.work_dps):
        assert 0 < sol.a < sol.b
        assert abs(sol.X ** 2 - sol.a * sol.b) < mpf(10) ** -90
        assert abs(sol.Y - (sol.a + sol.b) / 2) < mpf(10) ** -90
        assert sol.X <= sol.Y  # AM-GM


def test_support_preconditions(prec):
    with pytest.raises(DomainError):
        eq.solve_support(10, WeightParams("1", ("-0.3", "0.2")), prec=prec)
    with pytest.raises(DomainError):
        eq.solve_support(0, WeightParams("1", ("0.3", "0.2")), prec=prec)


def test_density_boundary_and_normalization(sol):
    with mp.workdps(sol.prec.work_dps):
        edge = eq.density(sol, sol.a + (sol.b - sol.a) / mpf(10 ** 12))
        closer = eq.density(sol, sol.a + (sol.b - sol.a) / mpf(10 ** 16))
        assert 0 <= closer < edge < mpf(10) ** -3  # vanishing sqrt factor
        assert abs(eq.density_normalization(sol) - 10) < mpf(10) ** -10
        r1, r2 = eq.supplementary_residual(sol)
        assert r1 < mpf(10) ** -10 and r2 < mpf(10) ** -10
    with pytest.raises(OutOfSupport):
        eq.density(sol, sol.b + 1)


def test_density_nonnegative_grid(sol):
    with mp.workdps(sol.prec.work_dps):
        for k in range(1, 102):
            x = sol.a + (sol.b - sol.a) * k / mpf(102)
            assert eq.density(sol, x) >= 0


def test_equilibrium_condition(sol):
    with mp.workdps(sol.prec.work_dps):
        for q in ("0.25", "0.5", "0.75"):
            x = sol.a + mpf(q) * (sol.b - sol.a)
            assert eq.equilibrium_condition_residual(sol, x) < mpf(10) ** -8


def test_lagrange_limit_value(prec):
    sol0 = eq.solve_support(10, WeightParams("1"), prec=prec)
    with mp.workdps(prec.work_dps):
        n, am = 10, mpf(1)
        want = 2 * n + am - (n + am) * mp.log(n + am) - n * mp.log(n)
        assert abs(eq.lagrange_multiplier(sol0) - want) < mpf(10) ** -90
        assert abs(sol0.X - 1) < mpf(10) ** -90
        assert abs(sol0.Y - 21) < mpf(10) ** -90


def test_degree9_matches_newton(params_eq, prec, sol):
    x9, x5 = eq.solve_X_equations(10, params_eq, prec)
    with mp.workdps(prec.work_dps):
        assert abs(x9 - sol.X) < mpf(10) ** -10
        alpha, t = params_eq.materialize()
        # the degree-5 root satisfies its polynomial
        c5 = eq.degree5_coeffs(2 * 10 * t[0], 4 * 100 * t[1], alpha)
        assert abs(eq._poly_eval(c5, x5)) < mpf(10) ** -60
        assert x5 > 0


def test_degenerate_polynomials(prec):
    # t = 0 factorizations: X^8 (X - alpha) and X^4 (X - alpha)
    x9, x5 = eq.solve_X_equations(10, WeightParams("1.5"), prec)
    with mp.workdps(60):
        assert x9 == to_mpf("1.5") and x5 == to_mpf("1.5")


def test_sturm_isolation_on_known_roots(prec):
    # (x-1)(x-2)(x-4) = x^3 - 7x^2 + 14x - 8
    with mp.workdps(prec.work_dps):
        coeffs = [mpf(1), mpf(-7), mpf(14), mpf(-8)]
        roots = eq.positive_roots(coeffs, mpf(10), mpf(10) ** -40)
        assert len(roots) == 3
        for r, want in zip(roots, (1, 2, 4)):
            assert abs(r - want) < mpf(10) ** -35


def test_mp_limit(prec):
    p60 = PrecisionContext(digits=60)
    with mp.workdps(70):
        dens, mpv, gap = eq.mp_limit_check(Fraction(1, 2), 200, "1", p60)
        # MP value at y = 1/2 is 1/(2 pi)
        assert abs(mpv - 1 / (2 * mp.pi)) < mpf(10) ** -50
        _, _, gap200 = eq.mp_limit_check(Fraction(1, 4), 200, "1", p60)
        _, _, gap400 = eq.mp_limit_check(Fraction(1, 4), 400, "1", p60)
        assert gap200 < mpf("0.01")
        assert mpf("0.35") < gap400 / gap200 < mpf("0.65")
    with pytest.raises(DomainError):
        eq.mp_limit_check(Fraction(3, 2), 200, "1", p60)


def test_appendix_identities(prec):
    with mp.workdps(prec.work_dps):
        for (a, b) in (("1", "4"), ("0.5", "2.5")):
            out = eq.appendix_integrals(a, b, prec)
            assert len(out) == 6
            for cid, res in out:
                assert res < mpf(10) ** -60, cid
    with pytest.raises(DomainError):
        eq.appendix_integrals("4", "1", prec)


def test_appendix_specific_values(prec):
    # plain integral is pi; the 1/x variant is pi/sqrt(ab) = pi/2 at (1,4)
    with mp.workdps(prec.work_dps):
        sol = eq.solve_support(10, WeightParams("1", ("0.3", "0.2")), prec=prec)
        v = eq.support_integral(sol, lambda x: mpf(1))
        assert abs(v - mp.pi) < mpf(10) ** -90


@settings(max_examples=5, deadline=None)
@given(n=st.integers(min_value=1, max_value=40),
       a10=st.integers(min_value=2, max_value=30),
       t110=st.integers(min_value=1, max_value=12),
       t210=st.integers(min_value=1, max_value=12))
def test_support_property(n, a10, t110, t210):
    params = WeightParams(Fraction(a10, 10), (Fraction(t110, 10), Fraction(t210, 10)))
    prec = PrecisionContext(digits=60)
    sol = eq.solve_support(n, params, prec=prec)
    with mp.workdps(70):
        assert 0 < sol.a < sol.b
        assert sol.X <= sol.Y
        # consistency triangle: degree-9 root agrees with the Newton X
        x9, _ = eq.solve_X_equations(n, params, prec)
        assert abs(x9 - sol.X) < mpf(10) ** -8
