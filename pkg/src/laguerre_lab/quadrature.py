"""Adaptive high-precision quadrature of weighted integrals on (0, inf).

The substitution x = e^u maps (0, inf) to the whole real line.  With
t_m > 0 the transformed integrand decays double-exponentially at both
ends (the essential zero at the origin on the left, e^{-x} on the
right), so the plain trapezoid rule with level doubling converges like
a tanh-sinh rule.  An alternative composed map x = exp(sinh(v)) is kept
around as an independent route for invariance checks.

All arithmetic is mpmath with guard digits on top of the caller's
working precision; results are deterministic functions of the inputs.
"""

from __future__ import annotations

from mpmath import mp, mpf

from .errors import DomainError, NonConvergence
from .params import PrecisionContext, WeightParams, to_mpf

#: truncation threshold exponent below working digits for tail cut-off
_TRUNC_EXTRA = 25
#: quadrature-internal guard digits beyond the context's work_dps
_QUAD_GUARD = 10


def _trapezoid_levels(g, prec: PrecisionContext, what: str, abs_floor_from_mass=True):
    """Trapezoid sum of g over the real line with level doubling.

    g(u) must decay at least exponentially in both directions.  Returns
    the converged sum.  Convergence: successive levels agree to
    quad_tol relative to max(|total|, quad_tol-scaled L1 mass).
    """
    trunc = mpf(10) ** (-(prec.digits + _TRUNC_EXTRA))
    h = mpf(1)

    def sweep(start, step):
        """Sum g over start, start+step, ... until terms are negligible."""
        total = mpf(0)
        mass = mpf(0)
        scale = mpf(0)
        u = start
        idle = 0
        for _ in range(2_000_000):
            term = g(u)
            a = abs(term)
            if not mp.isfinite(a):
                raise NonConvergence(f"{what}: non-finite integrand sample at u = {u}")
            total += term
            mass += a
            if a > scale:
                scale = a
                idle = 0
            elif a < trunc * scale:
                idle += 1
                if idle >= 3:
                    break
            u += step
        else:  # pragma: no cover - guarded by decay preconditions
            raise NonConvergence(f"{what}: tail did not decay")
        return total, mass

    right, mass_r = sweep(mpf(0), h)
    left, mass_l = sweep(-h, -h)
    total = h * (right + left)
    mass = h * (mass_r + mass_l)

    prev = None
    for _ in range(prec.quad_max_level):
        # refine: add midpoints (odd multiples of h/2) on both sides
        h2 = h / 2
        mid_r, mmr = sweep(h2, h)
        mid_l, mml = sweep(-h2, -h)
        new_total = total / 2 + h2 * (mid_r + mid_l)
        mass = mass / 2 + h2 * (mmr + mml)
        prev, total, h = total, new_total, h2
        floor = prec.quad_tol * mass if abs_floor_from_mass else mpf(0)
        if abs(total - prev) <= prec.quad_tol * abs(total) + floor:
            return total
    raise NonConvergence(f"{what}: level cap {prec.quad_max_level} reached before tolerance")


def _log_weight_u_fn(params: WeightParams):
    """ln[x w(x)] at x = e^u as a closure over materialized parameters.

    Must be built inside the working-precision block; the e^u factor is
    the Jacobian of the log map.
    """
    alpha, t = params.materialize()
    a1 = alpha + 1
    deformed = params.is_deformed

    def logw(u, expu):
        acc = a1 * u - expu
        if deformed:
            inv = 1 / expu
            p = mpf(1)
            for tk in t:
                p *= inv
                acc -= tk * p
        return acc

    return logw


def integrate_weighted(f, params: WeightParams, prec: PrecisionContext, mapping="exp") -> mpf:
    """Integral of f(x) w(x) dx over (0, inf) to relative accuracy quad_tol.

    Parameters
    ----------
    f : callable
        Integrand factor, evaluated at mpf x > 0; f(x) w(x) must be
        absolutely integrable.
    params, prec : weight and precision contexts.
    mapping : "exp" for x = e^u (default) or "expsinh" for the composed
        x = exp(sinh(v)) route used by invariance checks.
    """
    if mapping not in ("exp", "expsinh"):
        raise DomainError(f"unknown mapping {mapping!r}")
    with mp.workdps(prec.work_dps + _QUAD_GUARD):
        logw = _log_weight_u_fn(params)
        if mapping == "exp":
            def g(u):
                x = mp.exp(u)
                return mp.exp(logw(u, x)) * f(x)
        else:
            def g(v):
                u = mp.sinh(v)
                x = mp.exp(u)
                return mp.exp(logw(u, x)) * f(x) * mp.cosh(v)
        result = _trapezoid_levels(g, prec, "integrate_weighted")
    return +result


def moments(params: WeightParams, kmin: int, kmax: int, prec: PrecisionContext) -> dict:
    """All moments mu_k = int x^(alpha+k) w(x) dx for k = kmin..kmax in one pass.

    The weight factor is shared across k at every node, so the cost of a
    full moment table is one tanh-sinh style sweep.  With t_m > 0 any
    integer k is admissible; in the degenerate t = 0 mode only
    alpha + k > -1 converges.
    """
    if kmax < kmin:
        raise DomainError("kmax < kmin")
    if not params.is_deformed and params.alpha + kmin <= -1:
        raise DomainError(
            f"moment k={kmin} diverges for t = 0 (needs alpha + k > -1, alpha={params.alpha})"
        )
    nk = kmax - kmin + 1

    with mp.workdps(prec.work_dps + _QUAD_GUARD):
        trunc = mpf(10) ** (-(prec.digits + _TRUNC_EXTRA))
        logw = _log_weight_u_fn(params)

        def node_terms(u):
            x = mp.exp(u)
            base = mp.exp(logw(u, x) + kmin * u)
            out = [base]
            for _ in range(nk - 1):
                base *= x
                out.append(base)
            return out

        h = mpf(1)

        def sweep(start, step, totals, masses, scales):
            u = start
            idle = 0
            for _ in range(2_000_000):
                terms = node_terms(u)
                if not mp.isfinite(terms[-1]):
                    raise NonConvergence(f"moments: non-finite sample at u = {u}")
                alive = False
                for i, term in enumerate(terms):
                    a = abs(term)
                    totals[i] += term
                    masses[i] += a
                    if a > scales[i]:
                        scales[i] = a
                        alive = True
                    elif a >= trunc * scales[i]:
                        alive = True
                if alive:
                    idle = 0
                else:
                    idle += 1
                    if idle >= 3:
                        return
                u += step
            raise NonConvergence("moments: tail did not decay")  # pragma: no cover

        totals = [mpf(0)] * nk
        masses = [mpf(0)] * nk
        scales = [mpf(0)] * nk
        sweep(mpf(0), h, totals, masses, scales)
        sweep(-h, -h, totals, masses, scales)
        totals = [h * v for v in totals]
        masses = [h * v for v in masses]

        for _ in range(prec.quad_max_level):
            h2 = h / 2
            mids = [mpf(0)] * nk
            mmass = [mpf(0)] * nk
            sweep(h2, h, mids, mmass, scales)
            sweep(-h2, -h, mids, mmass, scales)
            new_totals = [t / 2 + h2 * v for t, v in zip(totals, mids)]
            masses = [mt / 2 + h2 * v for mt, v in zip(masses, mmass)]
            done = all(
                abs(nt - t) <= prec.quad_tol * abs(nt)
                for nt, t in zip(new_totals, totals)
            )
            totals, h = new_totals, h2
            if done:
                return {kmin + i: +totals[i] for i in range(nk)}
        raise NonConvergence(
            f"moments: level cap {prec.quad_max_level} reached before tolerance"
        )


def moment(k: int, params: WeightParams, prec: PrecisionContext) -> mpf:
    """mu_k = int_0^inf x^(alpha+k) w(x) dx at full precision."""
    return moments(params, k, k, prec)[k]


def integrate_finite(f, a, b, prec: PrecisionContext, what="integrate_finite") -> mpf:
    """Tanh-sinh integral of f over the finite interval [a, b].

    Handles integrable endpoint singularities (log, inverse square
    root); used by the equilibrium-measure checks.
    """
    a, b = to_mpf(a), to_mpf(b)
    if not b > a:
        raise DomainError("need b > a")
    with mp.workdps(prec.work_dps + _QUAD_GUARD):
        half = (b - a) / 2
        pihalf = mp.pi / 2

        def g(t):
            w = pihalf * mp.sinh(t)
            # distance to the near endpoint via 1 + tanh(w) = 2e^{2w}/(1+e^{2w}),
            # which keeps full relative accuracy for endpoint singularities
            e2 = mp.exp(-2 * abs(w))
            dist = half * 2 * e2 / (1 + e2)
            if dist == 0:
                return mpf(0)
            x = a + dist if t < 0 else b - dist
            dxdt = half * pihalf * mp.cosh(t) / mp.cosh(w) ** 2
            return f(x) * dxdt

        result = _trapezoid_levels(g, prec, what)
    return +result
