"""The parameterized linear problem Y(qx) = A(x) Y(x).

A state is a pair (ConnectionData, SurfaceState).  All scalar formulas
only use field operations, so they run unchanged on Fractions (exact
checks) or on mpmath numbers (the orthogonal-polynomial side).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, fields, replace
from fractions import Fraction

import mpmath as mp

from .exact import X, DomainError, Mat2, Poly, RatFunc, rat, rat_str


class DegenerateError(DomainError):
    """A state or map hit a vanishing factor."""


def _is_exact(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in vals)


def _close(u, v) -> bool:
    if _is_exact(u, v):
        return u == v
    scale = max(abs(u), abs(v), 1)
    return abs(u - v) <= scale * mp.mpf(10) ** (-(mp.mp.dps - 8))


@dataclass(frozen=True)
class ConnectionData:
    """{a1, a2, a3; kappa1, kappa2, lambda1, lambda2} together with q."""

    a1: object
    a2: object
    a3: object
    kappa1: object
    kappa2: object
    lambda1: object
    lambda2: object
    q: object

    def __post_init__(self):
        vals = [getattr(self, f.name) for f in fields(self)]
        if any(v == 0 for v in vals):
            raise DegenerateError("connection data entries and q must be nonzero")
        if self.a1 == self.a2 or self.a1 == self.a3 or self.a2 == self.a3:
            raise DegenerateError("a1, a2, a3 must be pairwise distinct")
        lhs = self.lambda1 * self.lambda2
        rhs = -self.kappa1 * self.kappa2 * self.a1 * self.a2 * self.a3
        if not _close(lhs, rhs):
            raise DomainError("constraint lambda1*lambda2 = -kappa1*kappa2*a1*a2*a3 violated")

    @property
    def a(self):
        return (self.a1, self.a2, self.a3)

    def with_(self, **kw) -> "ConnectionData":
        return replace(self, **kw)

    def scaled(self, exps) -> "ConnectionData":
        """Multiply (a1, a2, a3, kappa1, kappa2, lambda1, lambda2) by q**e."""
        q = self.q
        names = ("a1", "a2", "a3", "kappa1", "kappa2", "lambda1", "lambda2")
        return replace(self, **{n: getattr(self, n) * q**e for n, e in zip(names, exps)})

    def exponents_over(self, other: "ConnectionData") -> tuple[int, ...]:
        """Integer e with self = other scaled by q**e, entry-wise (exact data only)."""
        out = []
        for n in ("a1", "a2", "a3", "kappa1", "kappa2", "lambda1", "lambda2"):
            r = getattr(self, n) / getattr(other, n)
            e = _q_log(r, self.q)
            if e is None:
                raise DomainError(f"{n} ratio {r} is not an integer power of q")
            out.append(e)
        return tuple(out)


def _q_log(r, q, bound: int = 12):
    for e in range(-bound, bound + 1):
        if r == q**e:
            return e
    return None


@dataclass(frozen=True)
class SurfaceState:
    y: object
    z: object
    w: object


@dataclass(frozen=True)
class AuxValues:
    z1: object
    z2: object
    alpha: object
    gamma: object
    delta: object


def z1_value(a1, a2, y, z):
    return (a1 - y) * (a2 - y) / z


def check_state(M: ConnectionData, s: SurfaceState):
    if s.z == 0:
        raise DegenerateError("z = 0")
    if s.w == 0:
        raise DegenerateError("w = 0")
    if s.y == 0:
        raise DegenerateError("y = 0 (alpha and delta divide by y)")
    for i, a in enumerate(M.a, 1):
        if s.y == a:
            raise DegenerateError(f"y = a{i}")


def derive_aux(M: ConnectionData, s: SurfaceState) -> AuxValues:
    """z1, z2 from the factorized parameterization, then alpha, gamma, delta."""
    check_state(M, s)
    a1, a2, a3 = M.a
    k1, k2, l1, l2 = M.kappa1, M.kappa2, M.lambda1, M.lambda2
    y, z = s.y, s.z
    z1 = z1_value(a1, a2, y, z)
    z2 = (y - a3) * z
    # trace A(0) = l1 + l2 is linear in alpha
    alpha = (l1 + l2 - k1 * (z1 - y) - k2 * z2) / (k2 * y)
    # x^3 coefficient of det A
    gamma = a1 + a2 + a3 - 2 * y + z1 - alpha
    # det A(0) = l1 l2
    delta = (k1 * k2 * (y - z1) * (y * alpha + z2) + l1 * l2) / (y * k1 * k2)
    return AuxValues(z1, z2, alpha, gamma, delta)


def A_entries(M: ConnectionData, s: SurfaceState, aux: AuxValues | None = None):
    """Coefficient lists (low to high) of the four entries of A(x)."""
    aux = aux or derive_aux(M, s)
    k1, k2 = M.kappa1, M.kappa2
    y, w = s.y, s.w
    a11 = (k1 * (aux.z1 - y), k1)
    a12 = (-k2 * w * y, k2 * w)
    a21 = (k1 * aux.delta / w, k1 * aux.gamma / w)
    a22 = (k2 * (aux.alpha * y + aux.z2), -k2 * (aux.alpha + y), k2)
    return a11, a12, a21, a22


def build_A(M: ConnectionData, s: SurfaceState) -> Mat2:
    return Mat2(*(RatFunc(Poly(c)) for c in A_entries(M, s)))


def eval_A(M: ConnectionData, s: SurfaceState, x):
    """A(x) as a 2x2 tuple of numbers."""
    return tuple(sum(c * x**k for k, c in enumerate(e)) for e in A_entries(M, s))


def det_A_expected(M: ConnectionData) -> RatFunc:
    return M.kappa1 * M.kappa2 * (X - M.a1) * (X - M.a2) * (X - M.a3)


def first_term_Yinf(M: ConnectionData, s: SurfaceState):
    """Coefficient of 1/x in the expansion of Y at infinity, row-major."""
    q = M.q
    if q == 1:
        raise DomainError("q = 1")
    aux = derive_aux(M, s)
    k1, k2, y, w = M.kappa1, M.kappa2, s.y, s.w
    return (
        q * (y - aux.z1 + aux.gamma) / (q - 1),
        q * w,
        -aux.gamma * k1 / (w * k2),
        q * (y + aux.alpha) / (q - 1),
    )


@dataclass(frozen=True)
class WeylParams:
    b0: object
    b1: object
    b2: object
    b3: object
    b4: object
    f: object
    g: object

    @property
    def b(self):
        return (self.b0, self.b1, self.b2, self.b3, self.b4)

    def product(self):
        out = 1
        for v in self.b:
            out = out * v
        return out


def weyl_correspondence(M: ConnectionData, s: SurfaceState) -> WeylParams:
    a1, a2, a3 = M.a
    k1, k2, l1, l2, q = M.kappa1, M.kappa2, M.lambda1, M.lambda2, M.q
    if s.z == 0:
        raise DomainError("z = 0 has no f")
    return WeylParams(
        b0=a3 / a1,
        b1=a1 / a2,
        b2=-a2 * k2 / l2,
        b3=l2 / l1,
        b4=-l1 / (a3 * q * k1),
        f=-l1 / (a3 * k2 * s.z),
        g=-a3 * k2 * s.y / l1,
    )


def state_from_weyl(M: ConnectionData, p: WeylParams, w=1):
    """(y, z) back from (f, g); the gauge w is not part of the Weyl data."""
    a3, k2, l1 = M.a3, M.kappa2, M.lambda1
    if p.f == 0:
        raise DomainError("f = 0")
    return SurfaceState(-l1 * p.g / (a3 * k2), -l1 / (a3 * k2 * p.f), w)


# JSON ------------------------------------------------------------------

def state_to_json(M: ConnectionData, s: SurfaceState) -> dict:
    return {
        "q": rat_str(M.q),
        "a": [rat_str(v) for v in M.a],
        "kappa": [rat_str(M.kappa1), rat_str(M.kappa2)],
        "lambda": [rat_str(M.lambda1), rat_str(M.lambda2)],
        "y": rat_str(s.y),
        "z": rat_str(s.z),
        "w": rat_str(s.w),
    }


def state_from_json(obj) -> tuple[ConnectionData, SurfaceState]:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        a = [rat(v) for v in obj["a"]]
        k = [rat(v) for v in obj["kappa"]]
        lam = [rat(v) for v in obj["lambda"]]
        if len(a) != 3 or len(k) != 2 or len(lam) != 2:
            raise DomainError("need 3 a's, 2 kappas and 2 lambdas")
        M = ConnectionData(*a, *k, *lam, rat(obj["q"]))
        s = SurfaceState(rat(obj["y"]), rat(obj["z"]), rat(obj.get("w", "1")))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed state JSON: {exc}") from exc
    check_state(M, s)
    return M, s


# random states ----------------------------------------------------------

def small_rational(rng: random.Random, bound: int = 20, nonzero: bool = True) -> Fraction:
    while True:
        v = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if v or not nonzero:
            return v


def random_connection(rng: random.Random, q=None, bound: int = 20) -> ConnectionData:
    while True:
        qq = q if q is not None else Fraction(rng.randint(1, bound - 1), bound)
        if q is None and qq.denominator == 1:
            continue
        a = [small_rational(rng, bound) for _ in range(3)]
        k1, k2, l1 = (small_rational(rng, bound) for _ in range(3))
        l2 = -k1 * k2 * a[0] * a[1] * a[2] / l1
        try:
            return ConnectionData(*a, k1, k2, l1, l2, qq)
        except DomainError:
            continue


def random_state(rng: random.Random, q=None, bound: int = 20, accept=None):
    """Random generic (M, s); ``accept`` may veto a draw (resampled)."""
    while True:
        M = random_connection(rng, q, bound)
        s = SurfaceState(*(small_rational(rng, bound) for _ in range(3)))
        try:
            check_state(M, s)
            derive_aux(M, s)
        except (DomainError, ZeroDivisionError):
            continue
        if accept is not None and not accept(M, s):
            continue
        return M, s
