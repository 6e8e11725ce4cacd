"""Weight parameters and precision policy.

``WeightParams`` is the single source of truth for the deformed Laguerre
weight

    w(x) = x^alpha * exp(-x - sum_{k=1}^m t_k / x^k),   x in (0, inf),

with alpha > -1, t_m > 0 and t_i != 0 for i < m.  The fully degenerate
vector t = 0 is accepted as a classical-Laguerre limit mode used by limit
tests only; mixed zero/nonzero vectors are rejected.

Parameters are stored as exact rationals and materialize to mpf at the
precision active where they are used, so a point like t1 = 0.3 means the
decimal 3/10 at every working precision, and derived ratios such as
tau = 2 t2/t1 are exact.  Numerical code must do its arithmetic inside
``mp.workdps(...)`` blocks; everything here follows that convention.

``PrecisionContext`` carries the working decimal precision together with
the quadrature and finite-difference step policy derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp, mpf

from .errors import DomainError

#: extra guard digits used internally by quadrature / linear algebra
GUARD_DIGITS = 15


def to_fraction(value) -> Fraction:
    """Exact rational from str / int / float / Fraction / mpf.

    Floats go through ``repr`` so that 0.3 means the decimal 3/10, not
    the nearest double; mpf values convert exactly (they are binary
    rationals).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, mpf) or hasattr(value, "_mpf_"):
        sign, man, exp, _ = value._mpf_
        if man == 0 and exp != 0:
            raise DomainError(f"cannot convert special value {value!r}")
        num = -man if sign else man
        return Fraction(num) * Fraction(2) ** exp
    raise DomainError(f"cannot interpret {value!r} as an exact parameter")


def to_mpf(value) -> mpf:
    """mpf at the current working precision, decimal-faithful for floats."""
    if isinstance(value, mpf):
        return value
    if isinstance(value, (int, str)):
        return mpf(value)
    q = to_fraction(value)
    return mpf(q.numerator) / q.denominator


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


@dataclass(frozen=True)
class WeightParams:
    """Parameters (alpha, t_1..t_m) of the deformed Laguerre weight."""

    alpha: Fraction
    t: tuple
    m: int = field(init=False)

    def __init__(self, alpha, t=()):
        object.__setattr__(self, "alpha", to_fraction(alpha))
        object.__setattr__(self, "t", tuple(to_fraction(v) for v in t))
        object.__setattr__(self, "m", len(self.t))
        self._validate()

    def _validate(self):
        if not self.alpha > -1:
            raise DomainError(f"alpha must be > -1, got {self.alpha}")
        if self.m == 0 or all(v == 0 for v in self.t):
            return  # classical limit mode
        if not self.t[-1] > 0:
            raise DomainError(f"t_m must be > 0, got t_{self.m} = {self.t[-1]}")
        for i, v in enumerate(self.t[:-1], start=1):
            if v == 0:
                raise DomainError(f"t_{i} must be nonzero (only t = 0 entirely is allowed)")

    @property
    def is_deformed(self) -> bool:
        """False only in the classical-Laguerre limit mode t = 0."""
        return self.m > 0 and any(v != 0 for v in self.t)

    @property
    def t1(self) -> Fraction:
        return self.t[0] if self.m >= 1 else Fraction(0)

    @property
    def t2(self) -> Fraction:
        return self.t[1] if self.m >= 2 else Fraction(0)

    @property
    def t3(self) -> Fraction:
        return self.t[2] if self.m >= 3 else Fraction(0)

    @property
    def tau(self) -> Fraction:
        """2 t2 / t1, exact; requires t1 != 0."""
        if self.m < 2 or self.t1 == 0:
            raise DomainError("tau = 2 t2 / t1 needs m >= 2 and t1 != 0")
        return 2 * self.t2 / self.t1

    @property
    def rho(self) -> Fraction:
        """3 t3 / (2 t2), exact; requires t2 != 0."""
        if self.m < 3 or self.t2 == 0:
            raise DomainError("rho = 3 t3 / (2 t2) needs m >= 3 and t2 != 0")
        return Fraction(3, 2) * self.t3 / self.t2

    def with_t(self, t) -> "WeightParams":
        """Same alpha, new deformation vector."""
        return WeightParams(self.alpha, t)

    def materialize(self):
        """(alpha, t) as mpf at the current working precision."""
        return to_mpf(self.alpha), tuple(to_mpf(v) for v in self.t)

    def potential_derivative(self, z) -> mpf:
        """v'(z) for v = -ln w:  -alpha/z + 1 - sum_k k t_k z^(-k-1)."""
        z = to_mpf(z)
        out = -to_mpf(self.alpha) / z + 1
        zp = z
        for k, tk in enumerate(self.t, start=1):
            zp *= z
            out -= k * to_mpf(tk) / zp
        return out

    def log_weight(self, x) -> mpf:
        """ln w(x) = alpha ln x - x - sum_k t_k x^(-k)."""
        x = to_mpf(x)
        out = to_mpf(self.alpha) * mp.log(x) - x
        xp = mpf(1)
        for tk in self.t:
            xp *= x
            out -= to_mpf(tk) / xp
        return out

    def cache_token(self) -> str:
        return "a=%s;t=%s" % (frac_str(self.alpha), ",".join(frac_str(v) for v in self.t))


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision plus derived quadrature / FD step policy.

    digits           -- working decimal precision P (>= 50)
    quad_tol         -- relative quadrature target, default 10^(-P+10)
    quad_max_level   -- cap on trapezoid level-doubling (>= 8)
    fd_step_exponent -- rational q; FD relative step is 10^(-round(P*q)),
                        default q = 1/5 balancing truncation vs roundoff
    """

    digits: int = 120
    quad_tol: Fraction = None
    quad_max_level: int = 12
    fd_step_exponent: Fraction = Fraction(1, 5)

    def __post_init__(self):
        if self.digits < 50:
            raise DomainError(f"digits must be >= 50, got {self.digits}")
        if self.quad_max_level < 8:
            raise DomainError("quad_max_level must be >= 8")
        if self.quad_tol is None:
            object.__setattr__(self, "quad_tol", Fraction(1, 10 ** (self.digits - 10)))
        else:
            object.__setattr__(self, "quad_tol", to_fraction(self.quad_tol))
            if not self.quad_tol > 0:
                raise DomainError("quad_tol must be > 0")

    @property
    def work_dps(self) -> int:
        return self.digits + GUARD_DIGITS

    @property
    def fd_rel_step(self) -> Fraction:
        return Fraction(1, 10 ** round(self.digits * self.fd_step_exponent))

    @property
    def eps(self) -> Fraction:
        """10^(-digits): nominal resolution of stored quantities."""
        return Fraction(1, 10 ** self.digits)

    @property
    def half_eps(self) -> Fraction:
        """10^(-digits/2): default residual contract for exact identities."""
        return Fraction(1, 10 ** (self.digits // 2))

    def scaled(self, digits: int) -> "PrecisionContext":
        """Same policy at a different working precision."""
        return PrecisionContext(
            digits=digits,
            quad_max_level=self.quad_max_level,
            fd_step_exponent=self.fd_step_exponent,
        )

    def cache_token(self) -> str:
        return f"P={self.digits}"
