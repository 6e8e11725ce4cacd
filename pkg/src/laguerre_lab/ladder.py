"""Ladder-operator layer for the two-parameter weight (m = 2).

Holds the auxiliary quadruple (R_n, R_n*, r_n, r_n*), the 1/z-coefficient
form of the ladder coefficients A_n, B_n, pointwise residuals of the
lowering/raising operators and of the compatibility conditions
S1/S2/S2', the closed-form recurrence coefficients in terms of the
auxiliaries, and the difference system iterated in n from the moment
initial data.

Route naming used throughout tests and suites:
  integral  -- quadruple from weighted moment sums of P_n^2, P_n P_{n-1}
  identity  -- alpha_n, beta_n reassembled from the quadruple
  iteration -- quadruple advanced by the difference system alone
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import DegenerateBracket, DegenerateInput, DomainError, SingularAux
from .orthopoly import RecurrenceTable, eval_polynomial_derivative
from .params import PrecisionContext, WeightParams, to_mpf
from .quadrature import moments


@dataclass(frozen=True)
class AuxQuadruple:
    """R, R*, r, r* at one index n and one (t1, t2)."""

    R: mpf
    Rstar: mpf
    r: mpf
    rstar: mpf

    def as_tuple(self):
        return (self.R, self.Rstar, self.r, self.rstar)


@dataclass(frozen=True)
class LadderCoeffs:
    """Coefficients of z^-1..z^-3 in A_n and B_n (1-based access)."""

    a_coeffs: tuple
    b_coeffs: tuple

    def eval_a(self, z) -> mpf:
        z = to_mpf(z)
        return sum(c / z ** (i + 1) for i, c in enumerate(self.a_coeffs))

    def eval_b(self, z) -> mpf:
        z = to_mpf(z)
        return sum(c / z ** (i + 1) for i, c in enumerate(self.b_coeffs))


def _require_m2(params: WeightParams):
    if params.m != 2 or not params.is_deformed:
        raise DomainError("this layer needs the two-parameter weight (m = 2)")


def aux_integrals(table: RecurrenceTable, n: int) -> AuxQuadruple:
    """The four auxiliary integrals at index n, via the moment table."""
    _require_m2(table.params)
    if n > table.N:
        raise DomainError(f"n = {n} exceeds table depth {table.N}")
    with mp.workdps(table.prec.work_dps):
        t1, t2 = to_mpf(table.params.t1), to_mpf(table.params.t2)
        R = t1 * table.inner_xk(n, n, -1) / table.h[n]
        Rstar = 2 * t2 * table.inner_xk(n, n, -2) / table.h[n]
        if n == 0:
            r = rstar = mpf(0)
        else:
            r = t1 * table.inner_xk(n, n - 1, -1) / table.h[n - 1]
            rstar = 2 * t2 * table.inner_xk(n, n - 1, -2) / table.h[n - 1]
        return AuxQuadruple(R, Rstar, r, rstar)


def aux_array(table: RecurrenceTable, N: int) -> list:
    """aux_integrals for n = 0..N."""
    return [aux_integrals(table, n) for n in range(N + 1)]


def ladder_coeffs(aux: AuxQuadruple, n: int, params: WeightParams) -> LadderCoeffs:
    """A_n = 1/z + (R+R*)/z^2 + tau R/z^3,  B_n = -n/z + (r+r*)/z^2 + tau r/z^3."""
    _require_m2(params)
    tau = to_mpf(params.tau)  # at the caller's working precision
    return LadderCoeffs(
        a_coeffs=(mpf(1), aux.R + aux.Rstar, tau * aux.R),
        b_coeffs=(mpf(-n), aux.r + aux.rstar, tau * aux.r),
    )


def ladder_residuals(table: RecurrenceTable, aux: list, n: int, z):
    """Pointwise residuals of the lowering and raising operators at z > 0.

    lowering: (d/dz + B_n) P_n - beta_n A_n P_{n-1}
    raising:  (d/dz - B_n - v') P_{n-1} + A_{n-1} P_n
    """
    z = to_mpf(z)
    if z <= 0:
        raise DegenerateInput("z must be > 0")
    params = table.params
    with mp.workdps(table.prec.work_dps):
        pn, dpn, pn1, dpn1 = eval_polynomial_derivative(table, n, z)
        cn = ladder_coeffs(aux[n], n, params)
        vprime = params.potential_derivative(z)
        lowering = dpn + cn.eval_b(z) * pn - table.beta(n) * cn.eval_a(z) * pn1
        if n == 0:
            raising = mpf(0)  # P_{-1} = 0 and A_{-1} = 0
        else:
            cn1 = ladder_coeffs(aux[n - 1], n - 1, params)
            raising = dpn1 - (cn.eval_b(z) + vprime) * pn1 + cn1.eval_a(z) * pn
        return abs(lowering), abs(raising)


def compatibility_residuals(table: RecurrenceTable, aux: list, n: int, z):
    """Pointwise residuals of S1, S2 and S2' at z.

    Needs the quadruples for j <= n+1 (partial sums of A_j are
    accumulated from the stored per-j coefficients, not re-integrated).
    """
    z = to_mpf(z)
    params = table.params
    with mp.workdps(table.prec.work_dps):
        coeff = [ladder_coeffs(aux[j], j, params) for j in range(n + 2)]
        vprime = params.potential_derivative(z)
        an = table.alpha(n)
        bn0 = coeff[n].eval_b(z)
        bn1 = coeff[n + 1].eval_b(z)
        s1 = bn1 + bn0 - (z - an) * coeff[n].eval_a(z) + vprime
        a_prev = coeff[n - 1].eval_a(z) if n >= 1 else mpf(0)
        s2 = (
            1 + (z - an) * (bn1 - bn0)
            - table.beta(n + 1) * coeff[n + 1].eval_a(z)
            + table.beta(n) * a_prev
        )
        asum = mp.fsum(coeff[j].eval_a(z) for j in range(n))
        s2p = (bn0 + vprime) * bn0 + asum - table.beta(n) * coeff[n].eval_a(z) * a_prev
        return abs(s1), abs(s2), abs(s2p)


def alpha_from_aux(aux: AuxQuadruple, n: int, alpha) -> mpf:
    """alpha_n = 2n + 1 + alpha + R_n + R_n*."""
    return 2 * n + 1 + to_mpf(alpha) + aux.R + aux.Rstar


def beta_from_aux(aux: AuxQuadruple, n: int, params: WeightParams,
                  prec: PrecisionContext) -> mpf:
    """beta_n assembled from the quadruple alone."""
    _require_m2(params)
    with mp.workdps(prec.work_dps):
        if abs(aux.R) < to_mpf(prec.half_eps):
            raise SingularAux(f"|R_{n}| below 10^-P/2")
        t1 = to_mpf(params.t1)
        tau = to_mpf(params.tau)
        R, Rs, r, rs = aux.as_tuple()
        T = Rs / R
        return (
            (rs - r * T) * (rs + (t1 - r) * T) / (tau * R)
            + r * (t1 - r) / R ** 2
            + (n * t1 - (2 * n + params.alpha) * r) / R
        )


def initial_aux(params: WeightParams, prec: PrecisionContext) -> AuxQuadruple:
    """n = 0 quadruple from moment ratios: R_0 = t1 mu_-1/mu_0, R_0* = 2 t2 mu_-2/mu_0."""
    _require_m2(params)
    mu = moments(params, -2, 0, prec)
    with mp.workdps(prec.work_dps):
        return AuxQuadruple(
            R=to_mpf(params.t1) * mu[-1] / mu[0],
            Rstar=2 * to_mpf(params.t2) * mu[-2] / mu[0],
            r=mpf(0),
            rstar=mpf(0),
        )


def iterate_difference_system(params: WeightParams, N: int,
                              prec: PrecisionContext) -> list:
    """Advance the quadruple by the difference system for n = 0..N.

    Each step advances r, r* through the S1 family, then solves the two
    remaining difference equations, which are linear in R_n and R_n*
    respectively given the level n-1 data.
    """
    _require_m2(params)
    out = [initial_aux(params, prec)]
    with mp.workdps(prec.work_dps):
        thresh = to_mpf(prec.half_eps)
        t1 = to_mpf(params.t1)
        alpha = to_mpf(params.alpha)
        tau = to_mpf(params.tau)
        for n in range(1, N + 1):
            prev = out[-1]
            Rm, Rms = prev.R, prev.Rstar
            a_prev = 2 * (n - 1) + 1 + alpha + Rm + Rms
            r = t1 - prev.r - a_prev * Rm
            rs = tau * Rm - prev.rstar - a_prev * Rms
            bracket3 = (
                (rs ** 2 / tau - (2 * n + alpha) * r + n * t1) * Rm ** 2
                + r * (t1 - r) * Rm
                + (rs * (t1 - 2 * r) * Rm + r * (r - t1) * Rms) * Rms / tau
            )
            if abs(bracket3) < thresh:
                raise DegenerateBracket(
                    f"R_n coefficient vanished at n = {n}", index=n, equation="R-step")
            R = r * (r - t1) * Rm ** 2 / bracket3
            bracket4 = r * (r - t1) * Rm
            if abs(bracket4) < thresh:
                raise DegenerateBracket(
                    f"R_n* coefficient vanished at n = {n}", index=n, equation="Rstar-step")
            Rs = (rs * (2 * r - t1) * Rm + r * (t1 - r) * Rms) * R / bracket4
            out.append(AuxQuadruple(R, Rs, r, rs))
    return out


def sum_rules(table: RecurrenceTable, aux: list, n: int):
    """Residuals of the three p(n)/beta_n sum rules.

    (p + sum R)    p(n) = -n(n+alpha) - sum_{j<n}(R_j + R_j*)
    (p - r + beta) p(n) = r_n + r_n* - beta_n
    (det ratio)    beta_n = D_{n+1} D_{n-1} / D_n^2          (n >= 1)
    """
    with mp.workdps(table.prec.work_dps):
        alpha = to_mpf(table.params.alpha)
        srr = mp.fsum(aux[j].R + aux[j].Rstar for j in range(n))
        res1 = abs(table.p(n) + n * (n + alpha) + srr)
        res2 = abs(table.p(n) - (aux[n].r + aux[n].rstar - table.beta(n)))
        if n >= 1:
            # D_{n+1} D_{n-1} / D_n^2 = h_n / h_{n-1} in product form
            logratio = table.log_hankel(n + 1) + table.log_hankel(n - 1) - 2 * table.log_hankel(n)
            res3 = abs(table.beta(n) - mp.exp(logratio))
        else:
            res3 = mpf(0)
        return res1, res2, res3
