"""Exact kernel: big rationals, dense univariate polynomials, canonical
rational functions and 2x2 rational-function matrices.

Polynomials are stored low to high (``coeffs[k]`` is the coefficient of
``x**k``) with trailing zeros stripped.  Rational functions are kept as
``num/den`` with ``gcd(num, den) = 1`` and ``den`` monic, so structural
equality is the exact identity test.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

BigRat = Fraction


class DomainError(ValueError):
    pass


class SingularMatrixError(ZeroDivisionError):
    pass


def rat(value) -> Fraction:
    """Promote ints, Fractions and "p/q" strings to a Fraction.

    Floats are refused so nothing inexact sneaks into the exact layer.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot make an exact rational from {type(value).__name__}")


def rat_str(r) -> str:
    r = rat(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


class Poly:
    """Dense univariate polynomial over a field (Fractions or mpf)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @property
    def degree(self) -> int:
        # -1 for the zero polynomial
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = _as_poly(other)
            if other is None:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if not u:
                continue
            for j, v in enumerate(b):
                out[i + j] += u * v
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly((1,))
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other):
        other = _as_poly(other)
        if other is None or other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lead = other.lead
        if len(rem) - 1 < dd:
            return Poly(), self
        quot = [0] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = _div(rem[k], lead)
            quot[k - dd] = c
            if c:
                for j, v in enumerate(other.coeffs):
                    rem[k - dd + j] -= c * v
            rem[k] = 0
        return Poly(quot), Poly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def scale(self, c) -> "Poly":
        return Poly(c * u for u in self.coeffs)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.lead
        return Poly(_div(u, lead) for u in self.coeffs)

    def q_shift(self, q) -> "Poly":
        """Substitute x -> q*x."""
        out, p = [], 1
        for c in self.coeffs:
            out.append(c * p)
            p = p * q
        return Poly(out)


def _div(u, v):
    if isinstance(u, int) and isinstance(v, int):
        return Fraction(u, v)
    return u / v


def _as_poly(v):
    if isinstance(v, Poly):
        return v
    if isinstance(v, (int, Fraction)) or hasattr(v, "__float__") or hasattr(v, "__complex__"):
        return Poly((v,))
    return None


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm (exact coefficients expected)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


class RatFunc:
    """Canonical rational function: gcd(num, den) = 1 and den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num) if not isinstance(num, Poly) else num
        if den is None:
            den = Poly((1,))
        elif not isinstance(den, Poly):
            den = _as_poly(den)
        if den.is_zero():
            raise DomainError("zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly((1,))
            return
        if den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        lead = den.lead
        if lead != 1:
            num, den = num.scale(_div(1, lead)), den.monic()
        self.num, self.den = num, den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def __call__(self, x):
        d = self.den(x)
        if not d:
            raise DomainError("evaluation at a pole")
        return _div(self.num(x), d)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            other = _as_ratfunc(other)
            if other is None:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({list(self.num.coeffs)!r}, {list(self.den.coeffs)!r})"

    def __neg__(self):
        out = object.__new__(RatFunc)
        out.num, out.den = -self.num, self.den
        return out

    def __add__(self, other):
        other = _as_ratfunc(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_ratfunc(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_ratfunc(other)
        if other is None:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfunc(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_ratfunc(other) / self

    def q_shift(self, q) -> "RatFunc":
        return RatFunc(self.num.q_shift(q), self.den.q_shift(q))


def _as_ratfunc(v):
    if isinstance(v, RatFunc):
        return v
    p = _as_poly(v)
    return None if p is None else RatFunc(p)


def ratfunc_canonicalize(num: Poly, den: Poly) -> RatFunc:
    return RatFunc(num, den)


X = RatFunc(Poly.x())


class Mat2:
    """2x2 matrix of canonical rational functions, row-major."""

    __slots__ = ("e",)

    def __init__(self, e11, e12, e21, e22):
        self.e = tuple(_as_ratfunc(v) for v in (e11, e12, e21, e22))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, d1, d2) -> "Mat2":
        return cls(d1, 0, 0, d2)

    def __getitem__(self, ij):
        i, j = ij
        return self.e[2 * i + j]

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.e == other.e

    def __hash__(self):
        return hash(self.e)

    def __repr__(self):
        return "Mat2(" + ", ".join(map(repr, self.e)) + ")"

    def __add__(self, other):
        return Mat2(*(u + v for u, v in zip(self.e, other.e)))

    def __sub__(self, other):
        return Mat2(*(u - v for u, v in zip(self.e, other.e)))

    def __neg__(self):
        return Mat2(*(-u for u in self.e))

    def __mul__(self, other):
        if isinstance(other, Mat2):
            a, b, c, d = self.e
            p, r, s, t = other.e
            return Mat2(a * p + b * s, a * r + b * t, c * p + d * s, c * r + d * t)
        return Mat2(*(u * other for u in self.e))

    def __rmul__(self, other):
        return Mat2(*(other * u for u in self.e))

    def det(self) -> RatFunc:
        a, b, c, d = self.e
        return a * d - b * c

    def trace(self) -> RatFunc:
        return self.e[0] + self.e[3]

    def inv(self) -> "Mat2":
        dt = self.det()
        if dt.is_zero():
            raise SingularMatrixError("determinant is identically zero")
        a, b, c, d = self.e
        return Mat2(d / dt, -b / dt, -c / dt, a / dt)

    def q_shift(self, q) -> "Mat2":
        return Mat2(*(u.q_shift(q) for u in self.e))

    def is_zero(self) -> bool:
        return all(u.is_zero() for u in self.e)

    def __call__(self, x):
        return tuple(u(x) for u in self.e)


def q_shift(f, q):
    """x -> q*x on a Poly, RatFunc or Mat2."""
    if q == 0:
        raise DomainError("q must be nonzero")
    return f.q_shift(q)


def mat2_mul(a: Mat2, b: Mat2) -> Mat2:
    return a * b


def mat2_inv(a: Mat2) -> Mat2:
    return a.inv()


def poly_to_json(p: Poly) -> list[str]:
    return [rat_str(c) for c in p.coeffs]


def ratfunc_to_json(f: RatFunc) -> dict:
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def mat2_to_json(m: Mat2) -> list[list[dict]]:
    return [[ratfunc_to_json(m[i, j]) for j in range(2)] for i in range(2)]
