"""Coulomb-fluid layer: support endpoints, equilibrium density, Lagrange
multiplier, the degree-9/degree-5 algebraic equations for sqrt(ab), the
Marchenko-Pastur limit, and the closed-form integral identities.

The support endpoints come from a damped Newton solve for
(X, Y) = (sqrt(ab), (a+b)/2):

    -alpha/X + 1 - t1 Y/X^3 - (3Y^2 - X^2) t2/X^5 = 0
    2n + alpha + t1/X + (2 t2/X^3 - 1) Y = 0

valid for alpha > 0, t1 > 0, t2 > 0 (convex potential, single cut); the
degenerate t = 0 limit mode gives X = alpha, Y = 2n + alpha exactly.
Integrals over the support use the substitution x = (a+b)/2 +
(b-a)/2 cos(theta), under which 1/sqrt((b-x)(x-a)) weights become
trapezoid sums of smooth periodic functions (spectral accuracy); the
logarithmic kernel of the equilibrium condition is split at its interior
singularity and fed to the finite-interval tanh-sinh rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .errors import (
    DomainError,
    NoConvergence,
    NonPhysical,
    NoPositiveRoot,
    OutOfSupport,
    RootSelectionAmbiguous,
)
from .params import PrecisionContext, WeightParams, to_fraction, to_mpf
from .quadrature import integrate_finite


@dataclass(frozen=True)
class EquilibriumSolution:
    """Support endpoints and derived data of the equilibrium measure."""

    n: int
    params: WeightParams
    a: mpf
    b: mpf
    A: mpf
    X: mpf
    Y: mpf
    prec: PrecisionContext


def _support_system(X, Y, n, alpha, t1, t2):
    f1 = -alpha / X + 1 - t1 * Y / X ** 3 - (3 * Y ** 2 - X ** 2) * t2 / X ** 5
    f2 = 2 * n + alpha + t1 / X + (2 * t2 / X ** 3 - 1) * Y
    return f1, f2


def solve_support(n: int, params: WeightParams, tol=None,
                  prec: PrecisionContext = None) -> EquilibriumSolution:
    """Damped Newton solve of the endpoint system in (X, Y).

    Initial guess X0 = alpha + (2n t1)^(1/3) + (12 n^2 t2)^(1/5),
    Y0 = 2n + alpha (exact in the t -> 0 limit, dominant-balance
    corrections otherwise); steps are halved until the residual norm
    decreases and the iterate stays in X > 0, Y > X.
    """
    prec = prec or PrecisionContext()
    if n < 1:
        raise DomainError("need n >= 1")
    deformed = params.is_deformed
    if deformed and not (params.alpha > 0 and params.t1 > 0 and params.t2 > 0):
        raise DomainError("single-cut solve needs alpha > 0, t1 > 0, t2 > 0")
    with mp.workdps(prec.work_dps):
        alpha, t = params.materialize()
        t1 = t[0] if deformed else mpf(0)
        t2 = t[1] if deformed else mpf(0)
        tol = to_mpf(tol) if tol is not None else mpf(10) ** (-(prec.digits - 20))

        Y = mpf(2 * n) + alpha
        X = alpha + (2 * n * t1) ** mpf("1/3") + (12 * n * n * t2) ** mpf("0.2") \
            if deformed else alpha
        if X <= 0:
            X = mpf("0.5")

        f1, f2 = _support_system(X, Y, n, alpha, t1, t2)
        norm = abs(f1) + abs(f2)
        for _ in range(200):
            if norm <= tol:
                break
            j11 = alpha / X ** 2 + 3 * t1 * Y / X ** 4 + 15 * t2 * Y ** 2 / X ** 6 - 3 * t2 / X ** 4
            j12 = -t1 / X ** 3 - 6 * t2 * Y / X ** 5
            j21 = -t1 / X ** 2 - 6 * t2 * Y / X ** 4
            j22 = 2 * t2 / X ** 3 - 1
            det = j11 * j22 - j12 * j21
            if det == 0:
                raise NoConvergence("singular Jacobian in the endpoint solve")
            dX = (f1 * j22 - f2 * j12) / det
            dY = (f2 * j11 - f1 * j21) / det
            lam = mpf(1)
            for _ in range(60):
                Xn, Yn = X - lam * dX, Y - lam * dY
                if Xn > 0 and Yn > Xn:
                    g1, g2 = _support_system(Xn, Yn, n, alpha, t1, t2)
                    if abs(g1) + abs(g2) < norm:
                        break
                lam /= 2
            else:
                raise NoConvergence("backtracking stalled in the endpoint solve")
            X, Y, f1, f2 = Xn, Yn, g1, g2
            norm = abs(f1) + abs(f2)
        else:
            raise NoConvergence(f"Newton did not reach tol {tol}")

        gap = mp.sqrt(Y ** 2 - X ** 2)
        a, b = Y - gap, Y + gap
        if a <= 0 or not a < b:
            raise NonPhysical(f"endpoints ({a}, {b}) invalid")
        A = lagrange_closed_form(n, alpha, t1, t2, X, Y)
        return EquilibriumSolution(n=n, params=params, a=a, b=b, A=A, X=X, Y=Y, prec=prec)


def lagrange_closed_form(n, alpha, t1, t2, X, Y) -> mpf:
    """A = Y - alpha ln((X+Y)/2) - 2n ln(sqrt(Y^2-X^2)/2) + t1/X + Y t2/X^3."""
    return (Y - alpha * mp.log((X + Y) / 2)
            - 2 * n * mp.log(mp.sqrt(Y ** 2 - X ** 2) / 2)
            + t1 / X + Y * t2 / X ** 3)


def density(sol: EquilibriumSolution, x) -> mpf:
    """Equilibrium density sigma(x) on (a, b)."""
    with mp.workdps(sol.prec.work_dps):
        x = to_mpf(x)
        if not sol.a < x < sol.b:
            raise OutOfSupport(f"x = {x} outside ({sol.a}, {sol.b})")
        return mp.sqrt((sol.b - x) * (x - sol.a)) * _density_bracket(sol, x) / (
            2 * mp.pi * sol.X)


def _density_bracket(sol: EquilibriumSolution, x) -> mpf:
    """2 pi sqrt(ab) sigma(x) / sqrt((b-x)(x-a)) as a rational function of x."""
    alpha, t = sol.params.materialize()
    t1 = t[0] if sol.params.is_deformed else mpf(0)
    t2 = t[1] if sol.params.is_deformed else mpf(0)
    X, Y = sol.X, sol.Y
    c1 = alpha + Y * t1 / X ** 2 + (3 * Y ** 2 - X ** 2) * t2 / X ** 4
    c2 = t1 + 2 * Y * t2 / X ** 2
    return c1 / x + c2 / x ** 2 + 2 * t2 / x ** 3


def _theta_trapezoid(g, prec: PrecisionContext, min_doublings=4):
    """int_0^pi g(theta) dtheta by trapezoid doubling (spectral for the
    even periodic extensions produced by the cosine substitution)."""
    with mp.workdps(prec.work_dps):
        tol = to_mpf(prec.quad_tol)
        N = 8
        vals = [g(mp.pi * k / N) for k in range(N + 1)]
        total = mp.pi / N * (vals[0] / 2 + mp.fsum(vals[1:-1]) + vals[-1] / 2)
        for level in range(prec.quad_max_level + 8):
            mids = [g(mp.pi * (2 * k + 1) / (2 * N)) for k in range(N)]
            new_total = total / 2 + mp.pi / (2 * N) * mp.fsum(mids)
            done = abs(new_total - total) <= tol * (abs(new_total) + 1)
            total, N = new_total, 2 * N
            if done and level >= min_doublings:
                return total
        raise NoConvergence("theta trapezoid did not converge")


def support_integral(sol: EquilibriumSolution, f) -> mpf:
    """int_a^b f(x) / sqrt((b-x)(x-a)) dx via the cosine substitution."""
    mid = (sol.a + sol.b) / 2
    W = (sol.b - sol.a) / 2
    return _theta_trapezoid(lambda th: f(mid + W * mp.cos(th)), sol.prec)


def density_normalization(sol: EquilibriumSolution) -> mpf:
    """int_a^b sigma(x) dx, which the multiplier pins to n."""
    with mp.workdps(sol.prec.work_dps):
        mid = (sol.a + sol.b) / 2
        W = (sol.b - sol.a) / 2

        def g(th):
            x = mid + W * mp.cos(th)
            return (W * mp.sin(th)) ** 2 * _density_bracket(sol, x) / (2 * mp.pi * sol.X)

        return _theta_trapezoid(g, sol.prec)


def supplementary_residual(sol: EquilibriumSolution):
    """(|int v'/sqrt|, |int x v'/sqrt - 2 pi n|): the two endpoint conditions."""
    with mp.workdps(sol.prec.work_dps):
        vp = sol.params.potential_derivative
        r1 = support_integral(sol, vp)
        r2 = support_integral(sol, lambda x: x * vp(x)) - 2 * mp.pi * sol.n
        return abs(r1), abs(r2)


def lagrange_multiplier(sol: EquilibriumSolution) -> mpf:
    """The closed-form multiplier A (stored on the solution)."""
    return sol.A


def equilibrium_condition_residual(sol: EquilibriumSolution, x) -> mpf:
    """|v(x) - 2 int sigma(y) ln|x-y| dy - A| at an interior probe x.

    The logarithmic integral is split at the singularity and handled by
    tanh-sinh on each theta panel.
    """
    with mp.workdps(sol.prec.work_dps):
        x = to_mpf(x)
        if not sol.a < x < sol.b:
            raise OutOfSupport(f"probe {x} outside the support")
        mid = (sol.a + sol.b) / 2
        W = (sol.b - sol.a) / 2
        theta0 = mp.acos((x - mid) / W)

        def g(th):
            y = mid + W * mp.cos(th)
            d = abs(x - y)
            if d == 0:
                # node collided with the probe after rounding; the DE
                # weight there is far below the target tolerance
                return mpf(0)
            dens = (W * mp.sin(th)) ** 2 * _density_bracket(sol, y) / (2 * mp.pi * sol.X)
            return mp.log(d) * dens

        quad_prec = sol.prec.scaled(min(sol.prec.digits, 60))
        li = integrate_finite(g, 0, theta0, quad_prec, what="log-kernel-left") + \
            integrate_finite(g, theta0, mp.pi, quad_prec, what="log-kernel-right")
        v = -sol.params.log_weight(x)
        return abs(v - 2 * li - sol.A)


# --------------------------------------------------------------------------
# polynomial route for X = sqrt(ab)
# --------------------------------------------------------------------------

def degree9_coeffs(n, alpha, t1, t2):
    """Descending coefficients of the degree-9 equation for X."""
    return [
        mpf(1),
        -alpha,
        mpf(0),
        -((2 * n + alpha) * t1 + 3 * t2),
        4 * alpha * t2 - t1 ** 2,
        -3 * t2 * (2 * n + alpha) ** 2,
        -4 * t1 * t2 * (2 * n + alpha),
        -t2 * (t1 ** 2 + 4 * alpha * t2),
        mpf(0),
        4 * t2 ** 3,
    ]


def degree5_coeffs(s1, s2, alpha):
    """Descending coefficients of the double-scaled degree-5 equation."""
    return [mpf(1), -alpha, mpf(0), -s1, mpf(0), -3 * s2]


def _poly_eval(coeffs, x):
    acc = mpf(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _poly_derivative(coeffs):
    d = len(coeffs) - 1
    return [c * (d - i) for i, c in enumerate(coeffs[:-1])]


def sturm_chain(coeffs):
    """Sturm sequence with tiny leading/remainder coefficients swept out."""
    floor = max(abs(c) for c in coeffs) * mpf(10) ** (-mp.dps + 8)

    def trim(p):
        while p and abs(p[0]) <= floor:
            p = p[1:]
        return p

    chain = [trim(list(coeffs)), trim(_poly_derivative(coeffs))]
    while chain[-1] and len(chain[-1]) > 1:
        num, den = chain[-2], chain[-1]
        rem = list(num)
        while len(rem) >= len(den) and rem:
            q = rem[0] / den[0]
            for i in range(len(den)):
                rem[i] -= q * den[i]
            rem = rem[1:]
        rem = trim(rem)
        if not rem:
            break
        chain.append([-c for c in rem])
    return [c for c in chain if c]


def _sign_changes(chain, x):
    signs = []
    for p in chain:
        v = _poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for u, w in zip(signs, signs[1:]) if u != w)


def count_roots(chain, lo, hi) -> int:
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def positive_roots(coeffs, hi, tol) -> list:
    """All positive real roots in (0, hi), isolated by Sturm bisection
    and polished by bisection + Newton."""
    chain = sturm_chain(coeffs)
    lo = tol / 10
    total = count_roots(chain, lo, hi)
    if total == 0:
        return []
    stack = [(lo, hi, total)]
    isolated = []
    while stack:
        a, b, cnt = stack.pop()
        if cnt == 0:
            continue
        if cnt == 1:
            isolated.append((a, b))
            continue
        m = (a + b) / 2
        cl = count_roots(chain, a, m)
        stack.append((a, m, cl))
        stack.append((m, b, cnt - cl))
    roots = []
    dp = _poly_derivative(coeffs)
    for a, b in isolated:
        fa = _poly_eval(coeffs, a)
        for _ in range(mp.prec + 10):  # bisect to full width resolution
            m = (a + b) / 2
            fm = _poly_eval(coeffs, m)
            if fm == 0:
                a = b = m
                break
            if (fa > 0) == (fm > 0):
                a, fa = m, fm
            else:
                b = m
            if b - a <= tol * max(1, abs(m)):
                break
        x = (a + b) / 2
        for _ in range(8):  # Newton polish
            d = _poly_eval(dp, x)
            if d == 0:
                break
            x -= _poly_eval(coeffs, x) / d
        roots.append(x)
    return sorted(roots)


def solve_X_equations(n: int, params: WeightParams, prec: PrecisionContext = None,
                      tol=None):
    """(X from the degree-9 equation, X from the double-scaled degree-5).

    The degree-9 root matching the Newton endpoint solve is selected;
    ambiguity within tol raises RootSelectionAmbiguous.  The degree-5
    root uses s1 = 2n t1, s2 = 4 n^2 t2.
    """
    prec = prec or PrecisionContext()
    with mp.workdps(prec.work_dps):
        alpha, t = params.materialize()
        tol = to_mpf(tol) if tol is not None else mpf(10) ** (-(prec.digits - 30))
        if not params.is_deformed:
            return alpha, alpha  # X^8 (X - alpha) and X^4 (X - alpha)
        t1, t2 = t[0], t[1]
        sol = solve_support(n, params, prec=prec)
        hi = 10 * (2 * n + alpha)
        roots = positive_roots(degree9_coeffs(n, alpha, t1, t2), hi, tol)
        if not roots:
            raise NoPositiveRoot("degree-9 equation has no positive root")
        best = min(roots, key=lambda r: abs(r - sol.X))
        near = [r for r in roots if abs(r - best) <= to_mpf(tol) * 100 and r is not best]
        if near:
            raise RootSelectionAmbiguous(f"roots {near} within tol of {best}")
        s1, s2 = 2 * n * t1, 4 * n * n * t2
        roots5 = positive_roots(degree5_coeffs(s1, s2, alpha), hi, tol)
        if not roots5:
            raise NoPositiveRoot("degree-5 equation has no positive root")
        return best, roots5[-1]


# --------------------------------------------------------------------------
# Marchenko-Pastur limit and the closed-form integral identities
# --------------------------------------------------------------------------

def mp_limit_check(y, n: int, alpha, prec: PrecisionContext = None):
    """(sigma(4 n y) at finite n in the t -> 0 limit mode, the
    Marchenko-Pastur value (1/2pi) sqrt((1-y)/y), their gap)."""
    prec = prec or PrecisionContext()
    y = to_fraction(y)
    if not Fraction(0) < y < Fraction(1):
        raise DomainError("y must be in (0, 1)")
    params = WeightParams(alpha, ())
    sol = solve_support(n, params, prec=prec)
    with mp.workdps(prec.work_dps):
        x = 4 * n * to_mpf(y)
        dens = density(sol, x)
        mpv = mp.sqrt((1 - to_mpf(y)) / to_mpf(y)) / (2 * mp.pi)
        return dens, mpv, abs(dens - mpv)


def appendix_integrals(a, b, prec: PrecisionContext = None):
    """Residuals of the six closed forms of int_a^b g(x)/sqrt((b-x)(x-a)) dx
    for g = 1, ln x, x, 1/x, 1/x^2, 1/x^3, against the quadrature route."""
    prec = prec or PrecisionContext()
    a, b = to_mpf(a), to_mpf(b)
    if not 0 < a < b:
        raise DomainError("need 0 < a < b")
    with mp.workdps(prec.work_dps):
        mid = (a + b) / 2
        W = (b - a) / 2
        ab = a * b
        cases = [
            ("appendix-1", lambda x: mpf(1), mp.pi),
            ("appendix-lnx", lambda x: mp.log(x),
             2 * mp.pi * mp.log((mp.sqrt(a) + mp.sqrt(b)) / 2)),
            ("appendix-x", lambda x: x, (a + b) / 2 * mp.pi),
            ("appendix-xinv1", lambda x: 1 / x, mp.pi / mp.sqrt(ab)),
            ("appendix-xinv2", lambda x: 1 / x ** 2, (a + b) * mp.pi / (2 * ab ** mpf("1.5"))),
            ("appendix-xinv3", lambda x: 1 / x ** 3,
             (3 * (a + b) ** 2 - 4 * ab) * mp.pi / (8 * ab ** mpf("2.5"))),
        ]
        out = []
        for cid, g, closed in cases:
            num = _theta_trapezoid(lambda th: g(mid + W * mp.cos(th)), prec)
            out.append((cid, abs(num - closed)))
        return out
