"""Arbitrary-precision q-special functions built on mpmath.

Everything here is real arithmetic.  Rational inputs (Fractions, "p/q"
strings, ints) are promoted exactly at the working precision.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

import mpmath as mp

from .exact import DomainError

GUARD_DIGITS = 10
DEFAULT_DIGITS = 60


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PrecisionCtx:
    """Decimal working precision plus the truncation threshold derived from it."""

    digits: int = DEFAULT_DIGITS
    max_terms: int = 100_000

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 15:
            raise DomainError(f"digits must be an integer >= 15, got {self.digits!r}")

    @classmethod
    def from_env(cls, default: int = DEFAULT_DIGITS) -> "PrecisionCtx":
        raw = os.environ.get("QPV_DIGITS")
        return cls(int(raw) if raw else default)

    @property
    def tail_eps(self):
        return mp.mpf(10) ** (-(self.digits + 10))

    @property
    def dps(self) -> int:
        return self.digits + GUARD_DIGITS

    def work(self):
        """Context manager raising mpmath to the working precision."""
        return mp.workdps(self.dps)

    def with_digits(self, digits: int) -> "PrecisionCtx":
        return PrecisionCtx(digits, self.max_terms)


def to_mpf(v):
    """Exact promotion of a rational (or mpf passthrough) at the current precision."""
    if isinstance(v, (mp.mpf, mp.mpc)):
        return v
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    if isinstance(v, str):
        f = Fraction(v.strip())
        return mp.mpf(f.numerator) / f.denominator
    return mp.mpf(v)


def _check_base(q):
    if not 0 < abs(q) < 1:
        raise DomainError(f"need 0 < |q| < 1, got q = {mp.nstr(q, 8)}")


class SeriesResult(NamedTuple):
    value: object
    terms: int
    tail: object  # geometric estimate of the neglected tail


def sum_series(terms: Iterable, ctx: PrecisionCtx, what: str = "series") -> SeriesResult:
    """Sum terms until the tail is negligible.

    A finite iterator is summed completely.  Otherwise we stop once five
    consecutive term ratios were below 1 and the geometric tail bound
    |t| r/(1-r) (r the largest of those ratios) is under tail_eps relative
    to the size of the sum.  For r < 1/2 the bound is below |t| itself.
    """
    eps = ctx.tail_eps
    total = mp.mpf(0)
    big = mp.mpf(0)
    prev = None
    ratios: list = []
    n = 0
    for n, t in enumerate(terms, 1):
        total += t
        at = abs(t)
        if at > big:
            big = at
        if prev is not None:
            if prev == 0:
                r = mp.mpf(0) if at == 0 else mp.inf
            else:
                r = at / prev
            ratios.append(r)
            if len(ratios) > 5:
                ratios.pop(0)
            if len(ratios) == 5 and max(ratios) < 1:
                rmax = max(ratios)
                tail = at * rmax / (1 - rmax)
                if tail <= eps * max(abs(total), big) or big == 0:
                    return SeriesResult(total, n, tail)
        prev = at
        if n >= ctx.max_terms:
            raise ConvergenceError(f"{what}: no convergence after {n} terms")
    return SeriesResult(total, n, mp.mpf(0))


def qpoch(a, q, k: int | None = None, ctx: PrecisionCtx | None = None):
    """(a; q)_k, with k = None meaning the infinite product."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        a, q = to_mpf(a), to_mpf(q)
        if k is not None:
            if k < 0:
                raise DomainError("negative k")
            out = mp.mpf(1)
            aq = a
            for _ in range(k):
                out *= 1 - aq
                aq *= q
            return +out
        _check_base(q)
        eps = ctx.tail_eps
        out = mp.mpf(1)
        aq = a
        bound = 1 / (1 - abs(q))
        for n in range(ctx.max_terms):
            # log-tail of the product is at most 2 sum |a q^m| once that is small
            if abs(aq) * bound < eps:
                return +out
            out *= 1 - aq
            if out == 0:
                return out
            aq *= q
        raise ConvergenceError("q-Pochhammer product did not converge")


def qpoch_multi(params: Sequence, q, k: int | None = None, ctx: PrecisionCtx | None = None):
    """(a_1, ..., a_m; q)_k."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        out = mp.mpf(1)
        for a in params:
            out *= qpoch(a, q, k, ctx)
        return out


def theta(x, q, ctx: PrecisionCtx | None = None):
    """Jacobi theta in triple-product form (-q x, -1/x, q; q)_inf."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        x, q = to_mpf(x), to_mpf(q)
        if x == 0:
            raise DomainError("theta_q(x) needs x != 0")
        _check_base(q)
        return qpoch(-q * x, q, None, ctx) * qpoch(-1 / x, q, None, ctx) * qpoch(q, q, None, ctx)


def theta_series(x, q, ctx: PrecisionCtx | None = None):
    """Bilateral series sum x^k q^(k(k+1)/2) over all integers k.

    This is the Laurent expansion of the product form used by ``theta``.
    """
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        x, q = to_mpf(x), to_mpf(q)
        if x == 0:
            raise DomainError("theta_q(x) needs x != 0")
        _check_base(q)

        def up():
            t, k = mp.mpf(1), 0
            while True:
                yield t
                k += 1
                t *= x * q**k

        def down():
            # k = -1, -2, ...; term(k-1)/term(k) = q^(-k)/x
            t, k = 1 / x, -1
            while True:
                yield t
                t *= q ** (-k) / x
                k -= 1

        pos = sum_series(up(), ctx, "theta series").value
        neg = sum_series(down(), ctx, "theta series").value
        return pos + neg


def q_char(c, x, q, ctx: PrecisionCtx | None = None):
    """q-character e_{q,c}(x) = theta(x) theta(1/c) / theta(x/c)."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        c, x, q = to_mpf(c), to_mpf(x), to_mpf(q)
        if c == 0 or x == 0:
            raise DomainError("q-character needs x, c != 0")
        den = theta(x / c, q, ctx)
        if abs(den) < ctx.tail_eps:
            raise DomainError("q-character evaluated at a pole")
        return theta(x, q, ctx) * theta(1 / c, q, ctx) / den


def _terminating_index(a, q, ctx) -> int | None:
    """n if a equals q^-n to working precision, else None."""
    if a == 0:
        return None
    r = mp.log(abs(a)) / mp.log(abs(q))
    n = -int(mp.nint(r))
    if n < 0:
        return None
    if abs(a - q ** (-n)) <= mp.mpf(10) ** (-ctx.digits) * abs(a):
        return n
    return None


def phi_rs_series(upper: Sequence, lower: Sequence, q, z, ctx: PrecisionCtx | None = None) -> SeriesResult:
    """Generalized basic hypergeometric series with the (-1)^k q^C(k,2) weighting."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        q, z = to_mpf(q), to_mpf(z)
        upper = [to_mpf(a) for a in upper]
        lower = [to_mpf(b) for b in lower]
        _check_base(q)
        r, s = len(upper), len(lower)
        stops = [n for n in (_terminating_index(a, q, ctx) for a in upper) if n is not None]
        nterm = min(stops) if stops else None
        if z == 0:
            return SeriesResult(mp.mpf(1), 1, mp.mpf(0))
        e = 1 + s - r
        if nterm is None:
            if e < 0:
                raise ConvergenceError(f"{r}phi{s} diverges for z != 0")
            if e == 0 and abs(z) >= 1:
                raise ConvergenceError(f"{r}phi{s} needs |z| < 1")
        eps = mp.mpf(10) ** (-ctx.digits)

        def terms():
            t = mp.mpf(1)
            k, qk = 0, mp.mpf(1)
            sign = (-1) ** e
            while True:
                yield t
                if nterm is not None and k == nterm:
                    return
                num = mp.mpf(1)
                for a in upper:
                    num *= 1 - a * qk
                den = 1 - qk * q
                for b in lower:
                    f = 1 - b * qk
                    if abs(f) <= eps:
                        raise DomainError(f"lower parameter pole at k = {k}")
                    den *= f
                t = t * num / den * z
                if e:
                    t *= sign * qk**e
                k += 1
                qk *= q

        return sum_series(terms(), ctx, f"{r}phi{s}")


def phi_rs(upper: Sequence, lower: Sequence, q, z, ctx: PrecisionCtx | None = None):
    return phi_rs_series(upper, lower, q, z, ctx).value


def jackson_sum(f: Callable, z, q, ctx: PrecisionCtx | None = None):
    """One-sided Jackson integral from 0 to z: z(1-q) sum f(z q^n) q^n."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        z, q = to_mpf(z), to_mpf(q)
        _check_base(q)
        if z == 0:
            return mp.mpf(0)

        def terms():
            t, qn = z, mp.mpf(1)
            while True:
                yield f(t) * qn
                t *= q
                qn *= q

        return z * (1 - q) * sum_series(terms(), ctx, "Jackson sum").value


def jackson_integral(f: Callable, a, b, q, ctx: PrecisionCtx | None = None):
    """Jackson integral from a to b, taken as (0 to a) minus (0 to b)."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        a, b = to_mpf(a), to_mpf(b)
        if a == b:
            return mp.mpf(0)
        return jackson_sum(f, a, q, ctx) - jackson_sum(f, b, q, ctx)


def phi21_jackson(a, b, c, t, q, ctx: PrecisionCtx | None = None):
    """Heine's 2phi1 through its Jackson integral over [0, 1] (needs b > 0)."""
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        a, b, c, t, q = (to_mpf(v) for v in (a, b, c, t, q))
        if b <= 0:
            raise DomainError("the integral form needs b > 0 for the power x^(log_q b - 1)")
        expo = mp.log(b) / mp.log(q) - 1
        qe = mp.power(q, expo + 1)

        def terms():
            # nodes x = q^k; f(qx)/f(x) from one factor of each product
            x = mp.mpf(1)
            f = qpoch(t * a, q, None, ctx) * qpoch(q, q, None, ctx)
            f /= qpoch(t, q, None, ctx) * qpoch(c / b, q, None, ctx)
            while True:
                yield f
                num = (1 - x * t) * (1 - x * c / b)
                den = (1 - x * t * a) * (1 - x * q)
                if den == 0:
                    raise DomainError("integrand pole on the Jackson lattice")
                f = f * qe * num / den
                x *= q

        total = (1 - q) * sum_series(terms(), ctx, "2phi1 Jackson sum").value
        pref = qpoch(b, q, None, ctx) * qpoch(c / b, q, None, ctx)
        pref /= (1 - q) * qpoch(c, q, None, ctx) * qpoch(q, q, None, ctx)
        return pref * total
