from fractions import Fraction

import pytest
from mpmath import mp, mpf

from laguerre_lab import calculus as ca
from laguerre_lab.errors import DomainError, StencilOutOfDomain
from laguerre_lab.params import PrecisionContext, WeightParams, to_mpf


@pytest.fixture(scope="module")
def prec():
    return PrecisionContext(digits=120)


@pytest.fixture(scope="module")
def stencil():
    return ca.DerivativeStencil()


@pytest.fixture(scope="module")
def grid(params_default, prec, stencil):
    return ca.StencilGrid(params_default, prec, stencil,
                          ca.table_bundle_builder(5, prec))


def test_stencil_invariants(prec):
    with pytest.raises(DomainError):
        ca.DerivativeStencil(order=3)
    with pytest.raises(DomainError):
        ca.DerivativeStencil(rel_step=Fraction(1, 100)).step(prec)  # > 1e-3
    with pytest.raises(DomainError):
        ca.DerivativeStencil(rel_step=Fraction(1, 10**61)).step(prec)
    assert ca.DerivativeStencil().step(prec) == Fraction(1, 10**24)


def test_fd_partial_trivials(params_default, prec, stencil):
    with mp.workdps(prec.work_dps):
        v, e = ca.fd_partial(lambda p: to_mpf(p.t1) * to_mpf(p.t2), ("t1", "t2"),
                             params_default, stencil, prec)
        assert abs(v - 1) < 10 * e + mpf(10) ** -60
        v, e = ca.fd_partial(lambda p: mpf(3), "t1", params_default, stencil, prec)
        assert abs(v) <= e


def test_fd_partial_matches_exact_derivative(params_default, prec, stencil):
    # d/dt1 of t1^2 t2 = 2 t1 t2, second derivative = 2 t2
    q = lambda p: to_mpf(p.t1) ** 2 * to_mpf(p.t2)
    with mp.workdps(prec.work_dps):
        v, e = ca.fd_partial(q, "t1", params_default, stencil, prec)
        want = 2 * mpf("0.3") * mpf("0.2")
        assert abs(v - want) < 10 * e + mpf(10) ** -60
        v2, e2 = ca.fd_partial(q, ("t1", "t1"), params_default, stencil, prec)
        assert abs(v2 - 2 * mpf("0.2")) < 10 * e2 + mpf(10) ** -50


def test_stencil_out_of_domain(prec, stencil):
    # a relative step cannot leave the region, so force it via huge offset
    point = WeightParams("0.5", ("0.3", "0.2"))
    g = ca.StencilGrid(point, prec, stencil, lambda p: mpf(1))
    with pytest.raises(StencilOutOfDomain):
        g.params_at(((1, -Fraction(10 ** 25)),))


def test_derivative_relations(params_default, prec, stencil, grid):
    checks = ca.verify_derivative_relations(3, params_default, stencil, prec, grid)
    assert len(checks) == 8
    for c in checks:
        assert c.ok, c.id
        assert c.residual < mpf(10) ** -12


def test_derivative_relations_negative_t1(params_neg_t1, prec, stencil):
    g = ca.StencilGrid(params_neg_t1, prec, stencil, ca.table_bundle_builder(4, prec))
    for c in ca.verify_derivative_relations(3, params_neg_t1, stencil, prec, g):
        assert c.ok, c.id


def test_toda(params_default, prec, stencil, grid):
    checks = ca.verify_toda(2, params_default, stencil, prec, grid)
    ids = {c.id for c in checks}
    assert ids == {"toda-alpha", "toda-beta", "toda-molecule", "toda-lndn"}
    for c in checks:
        assert c.ok, c.id
        assert c.residual < mpf(10) ** -12
    with pytest.raises(DomainError):
        ca.verify_toda(0, params_default, stencil, prec, grid)


def test_riccati(params_default, prec, stencil, grid):
    for c in ca.verify_riccati(2, params_default, stencil, prec, grid):
        assert c.ok, c.id
        assert c.residual < mpf(10) ** -12


def test_coupled_pdes(params_default, prec, stencil, grid):
    for n in (1, 2, 3):
        res1, res2, bound = ca.coupled_pde_residuals(n, params_default, stencil,
                                                     prec, grid)
        assert res1 < mpf(10) ** -8 and res2 < mpf(10) ** -8
        assert res1 <= 100 * bound and res2 <= 100 * bound


def test_fd_convergence_order(params_default, prec):
    # an exact identity's FD residual is pure truncation error, so halving
    # the step must shrink it by ~2^order
    res = []
    for denom in (10 ** 4, 2 * 10 ** 4):
        stn = ca.DerivativeStencil(order=2, rel_step=Fraction(1, denom),
                                   richardson_levels=1)
        g = ca.StencilGrid(params_default, prec, stn, ca.table_bundle_builder(4, prec))
        with mp.workdps(prec.work_dps):
            d, _ = g.first(lambda v: mp.log(v.table.h[3]), 0)
            res.append(abs(to_mpf(params_default.t1) * d + g.bundle().aux[3].R))
    with mp.workdps(60):
        ratio = res[0] / res[1]
        assert ratio > mpf("3.5"), ratio


def test_rode_reduction_decay(params_default, prec):
    out = ca.verify_t2_zero_reduction(1, "0.5", params_default.alpha,
                                      ("1e-4", "1e-5", "1e-6"), prec)
    with mp.workdps(60):
        eps_last, res_last, _ = out[-1]
        assert res_last <= max(mpf(10) ** -8, 10 * to_mpf(eps_last))
        for (_, r0, _), (_, r1, _) in zip(out, out[1:]):
            assert mpf(5) < r0 / r1 < mpf(20)
    with pytest.raises(DomainError):
        ca.verify_t2_zero_reduction(1, "0.5", "0.5", ("0",), prec)
