"""Monic orthogonal polynomials, norms, recurrence data, Hankel determinants.

Construction is moment-based Gram-Schmidt (the Stieltjes procedure run
against the moment functional): monic coefficient vectors are advanced
through the three-term recurrence

    x P_n = P_{n+1} + alpha_n P_n + beta_n P_{n-1},

with alpha_n = <x P_n, P_n> / h_n and beta_n = h_n / h_{n-1} evaluated
from the precomputed moment table.  Hankel conditioning grows
exponentially in the degree, so the working precision is auto-raised to
at least 20 + 4 N digits.  Determinant ratios of explicit minors serve
only as a desk-scale oracle (see ``moment_determinant``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp, mpf

from .errors import DegenerateInput, DomainError, PrecisionExhausted
from .params import PrecisionContext, WeightParams, to_mpf
from .quadrature import moments

#: heuristic floor on digits needed for a table of depth N
def digits_for(N: int) -> int:
    return 20 + 4 * N


@dataclass(frozen=True)
class RecurrenceTable:
    """Recurrence data h_n, alpha_n, beta_n, p(n) for n = 0..N at one point.

    ``coeffs[n]`` is the monic coefficient vector of P_n (degree order),
    ``moments[k]`` holds mu_k for k = -m..2N+1 (k >= 0 in the t = 0
    limit mode).  Tables are immutable and safe to share.
    """

    params: WeightParams
    prec: PrecisionContext
    N: int
    h: tuple
    alpha_rc: tuple
    beta_rc: tuple
    p_sub: tuple
    coeffs: tuple
    moments: dict = field(repr=False)

    def alpha(self, n: int) -> mpf:
        return self.alpha_rc[n]

    def beta(self, n: int) -> mpf:
        if n == 0:
            return mpf(0)
        return self.beta_rc[n - 1]

    def p(self, n: int) -> mpf:
        return self.p_sub[n]

    def log_h(self, n: int) -> mpf:
        return mp.log(self.h[n])

    def log_hankel(self, n: int) -> mpf:
        """ln D_n = sum_{j<n} ln h_j."""
        with mp.workdps(self.prec.work_dps):
            return mp.fsum(mp.log(hj) for hj in self.h[:n])

    def inner_xk(self, j: int, k: int, shift: int) -> mpf:
        """<P_j, P_k>_w with the measure shifted by x^shift (moment route)."""
        cj, ck = self.coeffs[j], self.coeffs[k]
        mu = self.moments
        with mp.workdps(self.prec.work_dps):
            return mp.fsum(
                a * b * mu[ia + ib + shift]
                for ia, a in enumerate(cj)
                for ib, b in enumerate(ck)
            )


def recurrence_table(params: WeightParams, N: int, prec: PrecisionContext,
                     auto_digits: bool = True) -> RecurrenceTable:
    """Build the recurrence table for n <= N.

    Raises PrecisionExhausted if a squared norm comes out non-positive,
    which signals lost significance rather than a true negative norm.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    eff = prec
    if auto_digits and prec.digits < digits_for(N):
        eff = prec.scaled(digits_for(N))
    kmin = -params.m if params.is_deformed else 0
    mu = moments(params, kmin, 2 * N + 1, eff)

    with mp.workdps(eff.work_dps):
        coeffs = [[mpf(1)]]
        h = [mu[0]]
        p_sub = [mpf(0)]
        alpha_rc = []
        beta_rc = []
        if h[0] <= 0:
            raise PrecisionExhausted("h_0 <= 0")
        for n in range(N):
            cn = coeffs[n]
            a_n = mp.fsum(
                ci * cj * mu[i + j + 1]
                for i, ci in enumerate(cn)
                for j, cj in enumerate(cn)
            ) / h[n]
            alpha_rc.append(a_n)
            # c_{n+1} = shift(c_n) - a_n c_n - beta_n c_{n-1}
            nxt = [mpf(0)] + list(cn)
            for i, ci in enumerate(cn):
                nxt[i] -= a_n * ci
            if n >= 1:
                b_n = beta_rc[n - 1]
                for i, ci in enumerate(coeffs[n - 1]):
                    nxt[i] -= b_n * ci
            hn1 = mp.fsum(ci * mu[i + n + 1] for i, ci in enumerate(nxt))
            if hn1 <= 0:
                raise PrecisionExhausted(
                    f"h_{n + 1} <= 0 at {eff.digits} digits; raise the precision"
                )
            coeffs.append(nxt)
            h.append(hn1)
            beta_rc.append(hn1 / h[n])
            p_sub.append(nxt[n])
    return RecurrenceTable(
        params=params,
        prec=eff,
        N=N,
        h=tuple(h),
        alpha_rc=tuple(alpha_rc),
        beta_rc=tuple(beta_rc),
        p_sub=tuple(p_sub),
        coeffs=tuple(tuple(c) for c in coeffs),
        moments=mu,
    )


def hankel_determinant(table: RecurrenceTable, n: int) -> mpf:
    """D_n = prod_{j<n} h_j; D_0 = 1 by the empty product."""
    if n < 0 or n > table.N + 1:
        raise DomainError(f"n = {n} outside 0..N+1")
    with mp.workdps(table.prec.work_dps):
        out = mpf(1)
        for hj in table.h[:n]:
            out *= hj
        return out


def moment_determinant(table: RecurrenceTable, n: int) -> mpf:
    """det(mu_{i+j})_{i,j<n} by direct elimination on the explicit minors.

    Desk-scale oracle for hankel_determinant; O(n^3) and numerically
    rough, so keep n <= ~12.
    """
    if n == 0:
        return mpf(1)
    with mp.workdps(table.prec.work_dps):
        mat = mp.matrix([[table.moments[i + j] for j in range(n)] for i in range(n)])
        return mp.det(mat)


def eval_polynomial(table: RecurrenceTable, n: int, x) -> mpf:
    """Monic P_n(x) by the forward three-term recurrence."""
    return eval_polynomial_pair(table, n, x)[0]


def eval_polynomial_pair(table: RecurrenceTable, n: int, x):
    """(P_n(x), P_{n-1}(x)); P_{-1} := 0."""
    if n > table.N:
        raise DomainError(f"n = {n} exceeds table depth {table.N}")
    x = to_mpf(x)
    with mp.workdps(table.prec.work_dps):
        prev, cur = mpf(0), mpf(1)
        for j in range(n):
            prev, cur = cur, (x - table.alpha(j)) * cur - table.beta(j) * prev
        return cur, prev


def eval_polynomial_derivative(table: RecurrenceTable, n: int, x):
    """(P_n(x), P_n'(x), P_{n-1}(x), P_{n-1}'(x)) by differentiating the recurrence."""
    if n > table.N:
        raise DomainError(f"n = {n} exceeds table depth {table.N}")
    x = to_mpf(x)
    with mp.workdps(table.prec.work_dps):
        prev, cur = mpf(0), mpf(1)
        dprev, dcur = mpf(0), mpf(0)
        for j in range(n):
            shifted = (x - table.alpha(j))
            prev, cur, dprev, dcur = (
                cur,
                shifted * cur - table.beta(j) * prev,
                dcur,
                cur + shifted * dcur - table.beta(j) * dprev,
            )
        return cur, dcur, prev, dprev


def eval_by_coeffs(table: RecurrenceTable, n: int, x) -> mpf:
    """Horner evaluation of the stored monic coefficient vector (oracle route)."""
    x = to_mpf(x)
    with mp.workdps(table.prec.work_dps):
        acc = mpf(0)
        for c in reversed(table.coeffs[n]):
            acc = acc * x + c
        return acc


def christoffel_darboux_residual(table: RecurrenceTable, n: int, x, y) -> mpf:
    """|sum_{j<n} P_j(x)P_j(y)/h_j - [P_n(x)P_{n-1}(y)-P_n(y)P_{n-1}(x)] / (h_{n-1}(x-y))|."""
    x, y = to_mpf(x), to_mpf(y)
    if abs(x - y) < to_mpf(table.prec.half_eps):
        raise DegenerateInput("x and y too close for the divided difference")
    with mp.workdps(table.prec.work_dps):
        lhs = mp.fsum(
            eval_polynomial(table, j, x) * eval_polynomial(table, j, y) / table.h[j]
            for j in range(n)
        )
        pnx, pn1x = eval_polynomial_pair(table, n, x)
        pny, pn1y = eval_polynomial_pair(table, n, y)
        rhs = (pnx * pn1y - pny * pn1x) / (table.h[n - 1] * (x - y))
        return abs(lhs - rhs)


def orthogonality_residual(table: RecurrenceTable, j: int, k: int, quad=True) -> mpf:
    """|int P_j P_k w dx - h_j delta_jk| / sqrt(h_j h_k).

    With quad=True the integral is recomputed by independent quadrature
    of the recurrence-evaluated polynomials; otherwise the moment route
    is used.
    """
    from .quadrature import integrate_weighted

    with mp.workdps(table.prec.work_dps):
        if quad:
            val = integrate_weighted(
                lambda t: eval_polynomial(table, j, t) * eval_polynomial(table, k, t),
                table.params, table.prec,
            )
        else:
            val = table.inner_xk(j, k, 0)
        if j == k:
            val -= table.h[j]
        return abs(val) / mp.sqrt(table.h[j] * table.h[k])
