"""Suite orchestration: wire every verification into residual reports.

Each suite function takes a RunConfig and returns a ResidualReport whose
entry ids exactly match the registry for that suite.  Tables are pulled
through the decimal-string cache so a warm rerun skips quadrature and
reproduces values (and therefore serialized reports) bit for bit.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp, mpf

from . import calculus as ca
from . import equilibrium as eq
from . import ladder as ld
from . import multitime as mt
from . import scaling as sc
from .cache import cached_recurrence_table
from .config import RunConfig
from .errors import DomainError
from .orthopoly import (
    christoffel_darboux_residual,
    hankel_determinant,
    moment_determinant,
    orthogonality_residual,
    recurrence_table,
)
from .params import PrecisionContext, WeightParams, to_mpf
from .quadrature import integrate_weighted, moment, moments
from .reports import Check, ResidualReport

#: deterministic seed data for the random admissible points of the
#: discriminant sign check (simple LCG so no library RNG is involved)
_LCG_SEED = 20240917


def _lcg_uniform(state):
    state = (6364136223846793005 * state + 1442695040888963407) % (1 << 64)
    return state, Fraction(state >> 11, 1 << 53)


def _meta(config: RunConfig, **extra) -> dict:
    meta = {
        "point": f"alpha={config.params.alpha};t={','.join(str(v) for v in config.params.t)}",
        "digits": config.prec.digits,
        "n_max": config.n_max,
    }
    meta.update(extra)
    return meta


def _table(config: RunConfig, params: WeightParams, N: int):
    return cached_recurrence_table(params, N, config.prec, cache_dir=config.cache_dir)


def moments_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport("moments", metadata=_meta(config))
    params, prec = config.params, config.prec
    tab = _table(config, params, 12)
    with mp.workdps(prec.work_dps):
        half = to_mpf(prec.half_eps)
        kmin = -params.m if params.is_deformed else 0
        worst_k = min((v, k) for k, v in moments(params, kmin, 6, prec).items())
        rep.add(Check("moment-positive",
                      mpf(0) if worst_k[0] > 0 else 1 - worst_k[0],
                      half, f"k={kmin}..6"))
        bad = mpf(0)
        for nn in range(1, 13):
            mat = mp.matrix([[tab.moments[i + j] for j in range(nn)] for i in range(nn)])
            d = mp.det(mat)
            if not d > 0:
                bad = max(bad, 1 - d)
        rep.add(Check("hankel-positive-definite", bad, half, "N<=12"))
        lo = moment(0, params, prec.scaled(max(50, prec.digits // 2)))
        hi = moment(0, params, prec)
        rep.add(Check("precision-doubling", abs(lo - hi),
                      mpf(10) ** (-(max(50, prec.digits // 2) - 10)), "k=0"))
        a = integrate_weighted(lambda x: 1, params, prec)
        b = integrate_weighted(lambda x: 1, params, prec, mapping="expsinh")
        rep.add(Check("map-invariance", abs(a - b), 10 * to_mpf(prec.quad_tol) * abs(a), "f=1"))
    return rep


def recurrence_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport("recurrence", metadata=_meta(config))
    params, prec = config.params, config.prec
    N = max(config.n_max + 2, 8)
    tab = _table(config, params, N)
    with mp.workdps(prec.work_dps):
        half = to_mpf(prec.half_eps)
        worst = max(
            orthogonality_residual(tab, j, k)
            for j, k in ((1, 0), (4, 2), (8, 3), (6, 6))
        )
        rep.add(Check("orthogonality", worst, half, "pairs<=8"))
        worst = max(
            abs(mp.fsum(tab.alpha(j) for j in range(nn)) + tab.p(nn))
            for nn in range(1, config.n_max + 1)
        )
        rep.add(Check("alpha-sum-rule", worst, half, f"n<={config.n_max}"))
        bad = mpf(0)
        for nn in range(1, N + 1):
            if not tab.beta(nn) > 0:
                bad = max(bad, 1 - tab.beta(nn))
        rep.add(Check("beta-positive", bad, half, f"n<={N}"))
        d4 = hankel_determinant(tab, 4)
        rep.add(Check("hankel-product", abs(d4 - moment_determinant(tab, 4)),
                      mpf(10) ** (-(prec.digits - 50)) * abs(d4), "n=4"))
        worst = max(
            christoffel_darboux_residual(tab, 6, "0.5", "2.0"),
            christoffel_darboux_residual(tab, 6, mpf(2) + mpf(10) ** (-prec.digits // 4), 2),
        )
        rep.add(Check("christoffel-darboux", worst, half, "n=6"))
    t1 = Fraction(1, 10 ** 6)
    ctab = recurrence_table(WeightParams(params.alpha, (t1, t1 * t1)), 4,
                            PrecisionContext(digits=60))
    with mp.workdps(70):
        am = to_mpf(params.alpha)
        worst = max(abs(ctab.alpha(nn) - (2 * nn + 1 + am)) for nn in range(4))
        worst = max(worst, max(abs(ctab.beta(nn) - nn * (nn + am)) for nn in range(1, 5)))
        rep.add(Check("classical-limit", worst, mpf(10) ** -4, "t1=1e-6,t2=t1^2"))
    return rep


def ladder_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport("ladder", metadata=_meta(config))
    params, prec = config.params, config.prec
    if params.m != 2:
        raise DomainError("ladder suite needs m = 2")
    n_top = min(config.n_max, 10)
    tab = _table(config, params, n_top + 2)
    aux = ld.aux_array(tab, n_top + 2)
    iterated = ld.iterate_difference_system(params, n_top, prec)
    with mp.workdps(prec.work_dps):
        half = to_mpf(prec.half_eps)
        triple = half * mpf(10) ** 10
        t1 = to_mpf(params.t1)

        rep.add(Check("aux-initial-r", abs(aux[0].r) + abs(aux[0].rstar), half, "n=0"))
        mu = tab.moments
        rep.add(Check("aux-initial-R",
                      abs(aux[0].R - t1 * mu[-1] / mu[0])
                      + abs(aux[0].Rstar - 2 * to_mpf(params.t2) * mu[-2] / mu[0]),
                      half, "n=0"))
        sgn = mp.sign(t1)
        bad_R = mpf(0)
        bad_Rs = mpf(0)
        for nn in range(n_top + 1):
            if not aux[nn].R * sgn > 0:
                bad_R = max(bad_R, abs(aux[nn].R))
            if not aux[nn].Rstar > 0:
                bad_Rs = max(bad_Rs, 1 - aux[nn].Rstar)
        rep.add(Check("aux-sign-R", bad_R, half, f"n<={n_top}"))
        rep.add(Check("aux-sign-Rstar", bad_Rs, half, f"n<={n_top}"))

        rep.add(Check("alpha-aux",
                      max(abs(ld.alpha_from_aux(aux[nn], nn, params.alpha) - tab.alpha(nn))
                          for nn in range(n_top + 1)),
                      triple, f"n<={n_top}"))
        rep.add(Check("beta-aux",
                      max(abs(ld.beta_from_aux(aux[nn], nn, params, prec) - tab.beta(nn))
                          for nn in range(1, n_top + 1)),
                      triple, f"n<={n_top}"))
        rep.add(Check("iteration-agree",
                      max(abs(a - b) for nn in range(n_top + 1)
                          for a, b in zip(aux[nn].as_tuple(), iterated[nn].as_tuple())),
                      triple, f"n<={n_top}"))

        zs = ("0.7", "2", "5")
        lo = ro = s1r = s2r = s2pr = mpf(0)
        for nn in range(min(6, n_top) + 1):
            for z in zs:
                a, b = ld.ladder_residuals(tab, aux, nn, z)
                lo, ro = max(lo, a), max(ro, b)
                c1, c2, c3 = ld.compatibility_residuals(tab, aux, nn, z)
                s1r, s2r, s2pr = max(s1r, c1), max(s2r, c2), max(s2pr, c3)
        ptz = f"n<=6;z={{{','.join(zs)}}}"
        rep.add(Check("ladder-lower", lo, half, ptz))
        rep.add(Check("ladder-raise", ro, half, ptz))
        rep.add(Check("compat-s1", s1r, half, ptz))
        rep.add(Check("compat-s2", s2r, half, ptz))
        rep.add(Check("compat-s2p", s2pr, half, ptz))

        rep.add(Check("s1-r-advance",
                      max(abs(aux[nn + 1].r + aux[nn].r + tab.alpha(nn) * aux[nn].R - t1)
                          for nn in range(n_top + 1)),
                      half, f"n<={n_top}"))
        rep.add(Check("s2p-product",
                      max(abs(tab.beta(nn) * aux[nn].R * aux[nn - 1].R
                              - aux[nn].r * (aux[nn].r - t1))
                          for nn in range(1, n_top + 1)),
                      half, f"n<={n_top}"))

        w1 = w2 = w3 = mpf(0)
        for nn in range(n_top + 1):
            r1, r2, r3 = ld.sum_rules(tab, aux, nn)
            w1, w2, w3 = max(w1, r1), max(w2, r2), max(w3, r3)
        rep.add(Check("sum-p-R", w1, half, f"n<={n_top}"))
        rep.add(Check("sum-p-r-beta", w2, half, f"n<={n_top}"))
        rep.add(Check("beta-det-ratio", w3, half, f"n<={n_top}"))

        c2 = ld.ladder_coeffs(aux[2], 2, params)
        direct = ld_direct_A(tab, 2, 5)
        rep.add(Check("ladder-coeff-integral", abs(c2.eval_a(5) - direct), half, "n=2;z=5"))
    return rep


def ld_direct_A(tab, n, z):
    """A_n(z) from the raw integral definition (oracle route)."""
    return mt.ladder_A_direct(tab, n, z)


def calculus_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport("calculus", metadata=_meta(config))
    params, prec = config.params, config.prec
    if params.m != 2:
        raise DomainError("calculus suite needs m = 2")
    st = ca.DerivativeStencil()
    grid = ca.StencilGrid(params, prec, st,
                          ca.table_bundle_builder(5, prec, config.cache_dir))
    rep.extend(ca.verify_derivative_relations(3, params, st, prec, grid))
    rep.extend(ca.verify_toda(2, params, st, prec, grid))
    rep.extend(ca.verify_riccati(2, params, st, prec, grid))
    for nn in (1, 2, 3):
        for c in ca.verify_coupled_pdes(nn, params, st, prec, grid):
            rep.add(c)

    # FD convergence order: an exact identity's residual must shrink at
    # the stencil's theoretical order (2 here) when the step halves
    coarse = ca.DerivativeStencil(order=2, rel_step=Fraction(1, 10 ** 4),
                                  richardson_levels=1)
    fine = ca.DerivativeStencil(order=2, rel_step=Fraction(1, 2 * 10 ** 4),
                                richardson_levels=1)
    with mp.workdps(prec.work_dps):
        res = []
        for stn in (coarse, fine):
            g = ca.StencilGrid(params, prec, stn,
                              ca.table_bundle_builder(4, prec, config.cache_dir))
            t1 = to_mpf(params.t1)
            d, _ = g.first(lambda v: mp.log(v.table.h[3]), 0)
            res.append(abs(t1 * d + g.bundle().aux[3].R))
        ratio = res[0] / res[1]
        rep.add(Check("fd-convergence-order",
                      mpf(0) if ratio > mpf("3.5") else abs(ratio - 4),
                      mpf("0.5"), "order2;h,h/2"))

    eps_list = ("1e-4", "1e-5", "1e-6")
    rode = ca.verify_t2_zero_reduction(1, "0.5", params.alpha, eps_list, prec)
    with mp.workdps(prec.work_dps):
        eps_last, res_last, err_last = rode[-1]
        rep.add(Check("rode-reduction", res_last,
                      max(mpf(10) ** -8, 10 * to_mpf(eps_last), 100 * err_last),
                      f"n=1;t1=0.5;eps={eps_last}"))
        ratios = [rode[i][1] / rode[i + 1][1] for i in range(len(rode) - 1)]
        bad = max(abs(r - 10) for r in ratios)
        rep.add(Check("rode-decay", bad, mpf(4), "eps=1e-4..1e-6"))
    return rep


def sigma_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport("sigma-pde", metadata=_meta(config))
    params, prec = config.params, config.prec
    if params.m != 2:
        raise DomainError("sigma suite needs m = 2")
    st = ca.DerivativeStencil()
    grid = ca.StencilGrid(params, prec, st,
                          ca.table_bundle_builder(4, prec, config.cache_dir))
    collected = {}
    for nn in (1, 2, 3):
        for c in ca.verify_sigma_pde(nn, params, st, prec, grid):
            prev = collected.get(c.id)
            if prev is None or c.residual / c.tol > prev.residual / prev.tol:
                collected[c.id] = c
    for cid in ("H-def", "H-p-shift", "dH-t1", "dH-t2", "delta-identity",
                "delta-nonneg", "reconstruct-R", "reconstruct-Rstar",
                "reconstruct-r", "reconstruct-rstar", "H-from-aux", "sigma-pde"):
        rep.add(collected[cid])

    with mp.workdps(prec.work_dps):
        r5 = ca.sigma_reduction_residual(2, "0.3", params.alpha, "1e-5", prec)
        r4 = ca.sigma_reduction_residual(2, "0.3", params.alpha, "1e-4", prec)
        rep.add(Check("sigma-pde-reduction", r5,
                      min(r4, mpf(10) ** -3), "n=2;t1=0.3;eps=1e-5"))

    # Delta >= 0 at 20 deterministic admissible points (desk precision;
    # a coarse stencil is plenty for a sign with Delta of order one)
    small = PrecisionContext(digits=60)
    st60 = ca.DerivativeStencil(order=2, richardson_levels=1)
    state = _LCG_SEED
    worst = mpf(0)
    for _ in range(20):
        state, u1 = _lcg_uniform(state)
        state, u2 = _lcg_uniform(state)
        state, u3 = _lcg_uniform(state)
        state, u4 = _lcg_uniform(state)
        alpha = Fraction(-9, 10) + Fraction(round(u1 * 3900), 1000)
        t1 = (Fraction(1, 20) + Fraction(round(u2 * 950), 1000)) * (1 if u4 < Fraction(1, 2) else -1)
        t2 = Fraction(1, 20) + Fraction(round(u3 * 950), 1000)
        point = WeightParams(alpha, (t1, t2))
        sgrid = ca.StencilGrid(point, small, st60,
                                ca.table_bundle_builder(3, small, config.cache_dir))
        sst = ca.hankel_sigma(2, point, st60, small, sgrid)
        with mp.workdps(small.work_dps):
            if sst.Delta < 0:
                worst = max(worst, -sst.Delta)
    rep.add(Check("delta-random", worst, to_mpf(small.half_eps), "20 LCG points"))
    return rep


def scaling_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport(
        "scaling",
        metadata=_meta(config, s1=str(config.s1), s2=str(config.s2),
                       n_list=",".join(str(n) for n in config.n_list)),
    )
    prec = config.prec
    grid = sc.ScaledGrid(config.s1, config.s2, config.n_list, prec,
                         alpha=config.params.alpha, cache_dir=config.cache_dir)
    rep.extend(sc.verify_limit_identities(grid))
    rep.extend(sc.verify_limiting_pdes(grid))
    with mp.workdps(prec.work_dps):
        slope = sc.convergence_slope(grid.at())
        rep.add(Check("convergence-slope", abs(slope + 1), mpf("0.3"),
                      f"n={config.n_list}"))
        red = sc.reduced_limit_residual(config.s1, Fraction(1, 20), config.n_list,
                                        prec, alpha=config.params.alpha,
                                        cache_dir=config.cache_dir)
        rep.add(Check("reduced-limit", red, mpf("0.01"), "s2=1/20"))
    return rep


def equilibrium_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport("equilibrium", metadata=_meta(config))
    prec = config.prec
    n = 10
    params = WeightParams(max(config.params.alpha, Fraction(1)),
                          config.params.t if config.params.is_deformed
                          and config.params.t1 > 0 else ("0.3", "0.2"))
    sol = eq.solve_support(n, params, prec=prec)
    with mp.workdps(prec.work_dps):
        alpha, t = params.materialize()
        f1, f2 = eq._support_system(sol.X, sol.Y, n, alpha, t[0], t[1])
        tolN = mpf(10) ** (-(prec.digits - 25))
        rep.add(Check("support-eq1", abs(f1), tolN, f"n={n}"))
        rep.add(Check("support-eq2", abs(f2), tolN, f"n={n}"))
        rep.add(Check("density-normalization", abs(eq.density_normalization(sol) - n),
                      mpf(10) ** -10, f"n={n}"))
        neg = mpf(0)
        for k in range(1, 102):
            x = sol.a + (sol.b - sol.a) * k / mpf(102)
            d = eq.density(sol, x)
            if d < 0:
                neg = max(neg, -d)
        rep.add(Check("density-nonneg", neg, to_mpf(prec.half_eps), "101-point grid"))
        r1, r2 = eq.supplementary_residual(sol)
        rep.add(Check("supplementary-v1", r1, mpf(10) ** -10, f"n={n}"))
        rep.add(Check("supplementary-v2", r2, mpf(10) ** -10, f"n={n}"))
        worst = max(
            eq.equilibrium_condition_residual(sol, sol.a + q * (sol.b - sol.a))
            for q in (mpf("0.25"), mpf("0.5"), mpf("0.75"))
        )
        rep.add(Check("lagrange-eq", worst, mpf(10) ** -8, "3 probes"))
        x9, x5 = eq.solve_X_equations(n, params, prec)
        rep.add(Check("degree9-root", abs(x9 - sol.X), mpf(10) ** -10, f"n={n}"))
        rep.add(Check("degree5-root",
                      abs(eq._poly_eval(eq.degree5_coeffs(
                          2 * n * t[0], 4 * n * n * t[1], alpha), x5)),
                      mpf(10) ** -20 * (1 + abs(x5)) ** 5, f"n={n}"))

        limit = eq.solve_support(n, WeightParams(params.alpha), prec=prec)
        am = to_mpf(params.alpha)
        rep.add(Check("limit-X", abs(limit.X - am), tolN, "t=0"))
        a_exp = (2 * n + am - (n + am) * mp.log(n + am) - n * mp.log(n))
        rep.add(Check("limit-A", abs(limit.A - a_exp), tolN * 100, "t=0"))

        p60 = PrecisionContext(digits=60)
        _, _, gap2 = eq.mp_limit_check(Fraction(1, 4), 200, params.alpha, p60)
        _, _, gap4 = eq.mp_limit_check(Fraction(1, 4), 400, params.alpha, p60)
        rep.add(Check("mp-gap", gap2, mpf("0.01"), "y=1/4;n=200"))
        rep.add(Check("mp-rate", abs(gap4 / gap2 - mpf("0.5")), mpf("0.15"), "n=200,400"))

        half = to_mpf(prec.half_eps)
        for (a, b) in (("1", "4"), ("0.5", "2.5")):
            for cid, res in eq.appendix_integrals(a, b, prec):
                rep.add(Check(cid, res, half, f"(a,b)=({a},{b})"))
    return rep


def multitime_suite(config: RunConfig) -> ResidualReport:
    rep = ResidualReport("multitime", metadata=_meta(config))
    prec = config.prec
    base_t = config.params.t if config.params.m >= 2 else ("0.3", "0.2")
    p3 = WeightParams(config.params.alpha, tuple(base_t[:2]) + (Fraction(1, 10),))
    st = ca.DerivativeStencil()

    n_top = min(config.n_max, 8)
    tab3 = _table(config, p3, n_top)
    rows = mt.aux_rows(tab3, n_top)
    iterated = mt.iterate_difference_3(p3, n_top, prec)
    with mp.workdps(prec.work_dps):
        triple = to_mpf(prec.half_eps) * mpf(10) ** 10
        worst = max(
            abs(a - b) for nn in range(n_top + 1)
            for a, b in zip(mt.AuxSextuple.from_row(rows[nn]).as_tuple(),
                            iterated[nn].as_tuple())
        )
        rep.add(Check("iteration-agree-3", worst, triple, f"n<={n_top}"))

    grid3 = ca.StencilGrid(p3, prec, st, mt.row_bundle_builder(3, prec, config.cache_dir))
    rep.extend(mt.verify_identities_3(2, p3, st, prec, grid3))
    rep.extend(mt.h3_reconstruction(2, p3, st, prec, grid3))

    # t3 -> 0+ continuity: the sextuple collapses onto the quadruple
    with mp.workdps(prec.work_dps):
        p3eps = WeightParams(p3.alpha, (p3.t[0], p3.t[1], Fraction(1, 10 ** 6)))
        tab_eps = _table(config, p3eps, 3)
        s_eps = mt.AuxSextuple.from_row(mt.aux_integrals_m(tab_eps, 2))
        p2 = WeightParams(p3.alpha, p3.t[:2])
        tab2 = _table(config, p2, 3)
        q2 = ld.aux_integrals(tab2, 2)
        drift = max(
            abs(s_eps.R - q2.R), abs(s_eps.Rstar - q2.Rstar),
            abs(s_eps.r - q2.r), abs(s_eps.rstar - q2.rstar),
            abs(s_eps.Rhat), abs(s_eps.rhat),
        )
        rep.add(Check("t3-continuity", drift, mpf("0.001"), "t3=1e-6"))

    m4 = WeightParams(config.params.alpha, ("0.3", "0.2", "0.1", "0.05"))
    rep.extend(mt.verify_S1_S2_general_m(2, m4, st, prec))
    m5 = WeightParams(config.params.alpha, ("0.3", "0.2", "0.1", "0.05", "0.02"))
    rep.extend(mt.verify_S1_S2_general_m(1, m5, st, prec))

    with mp.workdps(prec.work_dps):
        tab4 = _table(config, m4, 3)
        rows4 = mt.aux_rows(tab4, 3)
        worst = mpf(0)
        for z in ("0.9", "3"):
            direct = mt.ladder_A_direct(tab4, 2, z)
            asm = mt.eval_laurent(mt.ladder_coeffs_m(rows4[2], 2, m4)[0], z)
            worst = max(worst, abs(direct - asm))
        rep.add(Check("ladder-coeff-m", worst, to_mpf(prec.half_eps), "m=4;n=2"))
    return rep


SUITE_RUNNERS = {
    "moments": moments_suite,
    "recurrence": recurrence_suite,
    "ladder": ladder_suite,
    "calculus": calculus_suite,
    "sigma-pde": sigma_suite,
    "scaling": scaling_suite,
    "equilibrium": equilibrium_suite,
    "multitime": multitime_suite,
}


def run_suite(config: RunConfig) -> list:
    """Run the configured suites in registry order; deterministic."""
    out = []
    for name in config.active_suites:
        out.append(SUITE_RUNNERS[name](config))
    return out
