from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from laguerre_lab import scaling as sc
from laguerre_lab.errors import DomainError
from laguerre_lab.params import PrecisionContext


@pytest.fixture(scope="module")
def prec():
    return PrecisionContext(digits=60)


@pytest.fixture(scope="module")
def grid11(prec):
    return sc.ScaledGrid(1, 1, (8, 12, 16, 24), prec)


def test_scaling_point_invariants():
    p = sc.ScalingPoint(8, Fraction(1), Fraction(1))
    assert p.t1 == Fraction(1, 16) and p.t2 == Fraction(1, 256)
    with pytest.raises(DomainError):
        sc.ScalingPoint(0, Fraction(1), Fraction(1))
    with pytest.raises(DomainError):
        sc.ScalingPoint(8, Fraction(0), Fraction(1))
    with pytest.raises(DomainError):
        sc.ScalingPoint(8, Fraction(1), Fraction(-1))


def test_n_list_validation(prec):
    with pytest.raises(DomainError):
        sc.scaled_sequences(1, 1, (8, 8), prec)
    with pytest.raises(DomainError):
        sc.scaled_sequences(1, 1, (2, 8), prec)


def test_sequences_finite_and_signed(grid11):
    s = grid11.at()
    with mp.workdps(60):
        for x in s.x_seq:
            assert mp.isfinite(x) and x > 0  # same sign as s1
        # R + r -> 0 within extrapolation error
        assert abs(s.R + s.r) <= s.err_R + s.err_r
        assert abs(s.Rstar + s.rstar) <= s.err_Rstar + s.err_rstar
        assert s.V > 0


def test_limit_identities(grid11):
    for c in sc.verify_limit_identities(grid11):
        assert c.ok, (c.id, c.residual, c.tol)


def test_limit_identities_negative_s1(prec):
    grid = sc.ScaledGrid(-1, 1, (8, 12, 16, 24), prec)
    checks = sc.verify_limit_identities(grid)
    for c in checks:
        assert c.ok, (c.id, c.residual, c.tol)
    s = grid.at()
    with mp.workdps(60):
        assert s.R < 0  # R keeps the sign of s1


def test_limiting_pdes(grid11):
    for c in sc.verify_limiting_pdes(grid11):
        assert c.ok, (c.id, c.residual, c.tol)


def test_convergence_slope(grid11):
    with mp.workdps(60):
        slope = sc.convergence_slope(grid11.at())
        assert abs(slope + 1) < mpf("0.3")


def test_tail_invariance(prec, grid11):
    # dropping the smallest n moves the limit by less than the combined
    # reported errors
    s_full = grid11.at()
    s_tail = sc.scaled_sequences(1, 1, (12, 16, 24), prec)
    with mp.workdps(60):
        assert abs(s_full.R - s_tail.R) <= 2 * (s_full.err_R + s_tail.err_R)


def test_reduced_limit_residual(prec):
    with mp.workdps(60):
        r_small = sc.reduced_limit_residual(1, Fraction(1, 50), (8, 12, 16), prec)
        r_big = sc.reduced_limit_residual(1, Fraction(1, 5), (8, 12, 16), prec)
        assert r_small < r_big
        assert r_small < mpf("0.01")


@settings(max_examples=5, deadline=None)
@given(n=st.integers(min_value=4, max_value=20),
       s1num=st.integers(min_value=-8, max_value=8).filter(lambda v: v != 0),
       s2num=st.integers(min_value=1, max_value=8))
def test_scaling_point_params_property(n, s1num, s2num):
    p = sc.ScalingPoint(n, Fraction(s1num, 4), Fraction(s2num, 4))
    params = p.params("0.5")
    assert params.t1 == Fraction(s1num, 4) / (2 * n)
    assert params.t2 == Fraction(s2num, 4) / (4 * n * n)
    assert params.is_deformed
