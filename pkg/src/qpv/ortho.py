"""Orthogonal polynomials for the generalized big q-Laguerre weight

    w(x) = x^sigma (x/a1, x/a3; q)_inf / (x/a2; q)_inf,

with the linear form L(f) = Jackson integral of w f from q a1 to q a3.

Moments go to Hankel determinants, these give the recurrence data, and
the closed forms of Theta_n and Omega_n then produce the Lax matrices and
the special solutions (y_n, z_n) of q-P_V.

Hankel determinants are badly conditioned (Delta_8 is about 1e-81 at the
default parameters), so a pipeline runs at more digits than requested:
it evaluates the recurrence data at two working precisions 20 digits
apart and keeps raising the precision until they agree to the requested
number of digits.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .exact import DomainError, Poly, rat, rat_str
from .linprob import ConnectionData, SurfaceState, eval_A
from .qfun import PrecisionCtx, jackson_integral, phi_rs, qpoch, sum_series, to_mpf
from .deform import qpv_map, qpv_R0


class MomentError(ArithmeticError):
    """Vanishing Hankel determinant or inconsistent moment routes."""


@dataclass(frozen=True)
class WeightParams:
    a1: Fraction
    a2: Fraction
    a3: Fraction
    sigma: Fraction
    q: Fraction

    def __post_init__(self):
        for n in ("a1", "a2", "a3", "sigma", "q"):
            object.__setattr__(self, n, rat(getattr(self, n)))
        if not 0 < abs(self.q) < 1:
            raise DomainError("need 0 < |q| < 1")
        if 0 in (self.a1, self.a2, self.a3):
            raise DomainError("a_i must be nonzero")
        if self.a1 == self.a3:
            raise DomainError("support endpoints q a1 and q a3 coincide")
        if self.sigma.denominator != 1 and (self.a1 < 0 or self.a3 < 0 or self.q < 0):
            raise DomainError("fractional sigma needs a positive support")

    def with_(self, **kw) -> "WeightParams":
        return replace(self, **kw)

    def qpv_shifted(self) -> "WeightParams":
        return replace(self, a1=self.q * self.a1, a2=self.q * self.a2)

    def to_json(self) -> dict:
        return {
            "q": rat_str(self.q),
            "a": [rat_str(self.a1), rat_str(self.a2), rat_str(self.a3)],
            "sigma": rat_str(self.sigma),
        }

    @classmethod
    def from_json(cls, obj) -> "WeightParams":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            a = obj["a"]
            if len(a) != 3:
                raise DomainError("need three a's")
            return cls(rat(a[0]), rat(a[1]), rat(a[2]), rat(obj.get("sigma", "0")), rat(obj["q"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed weight JSON: {exc}") from exc


DEFAULT_WEIGHT = WeightParams(Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(1, 5))


def _qpow(q, e):
    """q**e with e rational, exact when possible."""
    e = Fraction(e)
    if e.denominator == 1:
        return Fraction(q) ** int(e)
    return mp.power(to_mpf(q), to_mpf(e))


def weight(params: WeightParams, x, ctx: PrecisionCtx):
    with ctx.work():
        x = to_mpf(x)
        a1, a2, a3, q = (to_mpf(v) for v in (params.a1, params.a2, params.a3, params.q))
        num = qpoch(x / a1, q, None, ctx) * qpoch(x / a3, q, None, ctx)
        if num == 0:
            return mp.mpf(0)
        return mp.power(x, to_mpf(params.sigma)) * num / qpoch(x / a2, q, None, ctx)


class LinearForm:
    """L(f) as a Jackson sum over the two geometric node sets q a1 q^k, q a3 q^k.

    The weight is evaluated once per node; the truncation point follows the
    generic series rule applied to the f = 1 integrand.
    """

    def __init__(self, params: WeightParams, ctx: PrecisionCtx):
        self.params, self.ctx = params, ctx
        with ctx.work():
            a1, a2, a3, q = (to_mpf(v) for v in (params.a1, params.a2, params.a3, params.q))
            qs = mp.power(q, to_mpf(params.sigma))
            self.nodes, self.coef = [], []
            for z0, sign in ((params.q * params.a1, 1), (params.q * params.a3, -1)):
                z = to_mpf(z0)
                vals = []

                def terms(vals=vals, z=z):
                    # w(qt) = w(t) q^sigma (1 - t/a2) / ((1 - t/a1)(1 - t/a3))
                    t, qk = z, mp.mpf(1)
                    wt = weight(params, t, ctx)
                    while True:
                        c = wt * qk
                        vals.append((t, c))
                        yield c
                        den = (1 - t / a1) * (1 - t / a3)
                        if den == 0 or wt == 0:
                            wt = weight(params, q * t, ctx)
                        else:
                            wt = wt * qs * (1 - t / a2) / den
                        t *= q
                        qk *= q

                sum_series(terms(), ctx, "moment Jackson sum")
                for t, c in vals:
                    self.nodes.append(t)
                    self.coef.append(sign * z * (1 - q) * c)

    def __call__(self, f):
        with self.ctx.work():
            return mp.fsum(c * f(t) for t, c in zip(self.nodes, self.coef))

    def moment(self, k: int):
        with self.ctx.work():
            return mp.fsum(c * t**k for t, c in zip(self.nodes, self.coef))


def jackson_form(params: WeightParams, f, ctx: PrecisionCtx):
    """L(f) through the generic Jackson integral (slow reference path)."""
    return jackson_integral(lambda t: weight(params, t, ctx) * f(t), params.q * params.a1, params.q * params.a3, params.q, ctx)


def moment_closed_form(params: WeightParams, k: int, ctx: PrecisionCtx):
    """Moment through Heine's integral representation of 2phi1 with c = 0.

    Returns None when sigma + k + 1 is a non-positive integer (singular prefactor)
    or when one of the two series lies outside its disc of convergence.
    """
    s = params.sigma + k + 1
    if s.denominator == 1 and s <= 0:
        return None
    # the c = 0 series needs |z| < 1 for both terms
    if max(abs(params.q * params.a1), abs(params.q * params.a3)) >= abs(params.a2):
        return None
    with ctx.work():
        a1, a2, a3, q = (to_mpf(v) for v in (params.a1, params.a2, params.a3, params.q))
        qs = mp.power(q, to_mpf(s))
        pref = (1 - q) * qpoch(q, q, None, ctx) / qpoch(qs, q, None, ctx)
        se = to_mpf(s)
        left = mp.power(q * a1, se) * phi_rs([a2 / a3, qs], [0], q, q * a1 / a2, ctx)
        right = mp.power(q * a3, se) * phi_rs([a2 / a1, qs], [0], q, q * a3 / a2, ctx)
        return pref * (left - right)


@dataclass
class MomentTable:
    params: WeightParams
    mu: list
    err: list  # |Jackson - closed form| where the closed form exists, else None
    digits: int


def moments(params: WeightParams, k_max: int, ctx: PrecisionCtx | None = None, check: bool = True) -> MomentTable:
    """mu_0..mu_kmax by direct Jackson sums, cross-checked against the closed form."""
    ctx = ctx or PrecisionCtx()
    form = LinearForm(params, ctx)
    mu = [form.moment(k) for k in range(k_max + 1)]
    err = []
    with ctx.work():
        tol = mp.mpf(10) ** (-(ctx.digits - 10))
        for k in range(k_max + 1):
            cf = moment_closed_form(params, k, ctx) if check else None
            if cf is None:
                err.append(None)
                continue
            d = abs(mu[k] - cf)
            err.append(d)
            if d > tol * max(1, abs(cf)):
                raise MomentError(f"moment {k}: Jackson and closed form differ by {mp.nstr(d, 5)}")
    return MomentTable(params, mu, err, ctx.digits)


def hankel_det(mu, n: int, shifted: bool = False):
    """det(mu_{i+j}) (or with the last column index raised by one) by Bareiss elimination."""
    if n == 0:
        return mp.mpf(0) if shifted else mp.mpf(1)
    m = [[mu[i + (j if not shifted or j < n - 1 else n)] for j in range(n)] for i in range(n)]
    prev = mp.mpf(1)
    for k in range(n - 1):
        piv = m[k][k]
        if piv == 0:
            raise MomentError(f"zero pivot at step {k} (a leading Hankel minor vanishes)")
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * piv - m[i][k] * m[k][j]) / prev
        prev = piv
    return m[n - 1][n - 1]


@dataclass
class RecurrenceData:
    delta: list
    sigma: list
    a2: list      # a_n^2, index 0 unused (0)
    b: list
    gamma: list
    rho: list     # may be complex for an indefinite form
    a: list       # principal square roots of a_n^2, index 0 unused

    @property
    def n_max(self) -> int:
        return len(self.b) - 1


def recurrence(table: MomentTable, n_max: int) -> RecurrenceData:
    """Hankel data up to Delta_{n_max+1}, Sigma_{n_max+1}, and b_n, a_n for n <= n_max."""
    mu = table.mu
    if len(mu) < 2 * n_max + 2:
        raise MomentError("not enough moments")
    D, S = [], []
    for n in range(n_max + 2):
        D.append(hankel_det(mu, n))
        S.append(hankel_det(mu, n, shifted=True))
        if D[-1] == 0:
            raise MomentError(f"Delta_{n} vanishes")
    gamma = [S[n] / D[n] for n in range(n_max + 2)]
    b = [gamma[n + 1] - gamma[n] for n in range(n_max + 1)]
    a2 = [mp.mpf(0)] + [D[n - 1] * D[n + 1] / D[n] ** 2 for n in range(1, n_max + 1)]
    a = [mp.mpf(0)] + [mp.sqrt(v) if v >= 0 else mp.sqrt(mp.mpc(v)) for v in a2[1:]]
    r0 = 1 / D[1]
    rho = [mp.sqrt(r0) if r0 >= 0 else mp.sqrt(mp.mpc(r0))]
    for n in range(1, n_max + 1):
        rho.append(rho[n - 1] / a[n])
    return RecurrenceData(D, S, a2, b, gamma, rho, a)


def eval_pn(rec: RecurrenceData, n: int, x, monic: bool = False):
    """Orthonormal p_n(x) by the three-term recurrence (monic P_n if asked)."""
    if n > rec.n_max:
        raise DomainError(f"recurrence data only reaches n = {rec.n_max}")
    pm, pc = 0, rec.rho[0]
    for k in range(n):
        pm, pc = pc, ((x - rec.b[k]) * pc - (rec.a[k] * pm if k else 0)) / rec.a[k + 1]
    if monic:
        out = pc / rec.rho[n]
        return out.real if isinstance(out, mp.mpc) else out
    return pc


def eval_monic(rec: RecurrenceData, n: int, x):
    """Monic P_n from x P_k = P_{k+1} + b_k P_k + a_k^2 P_{k-1}; real arithmetic."""
    pm, pc = mp.mpf(0), mp.mpf(1)
    for k in range(n):
        pm, pc = pc, (x - rec.b[k]) * pc - (rec.a2[k] * pm if k else 0)
    return pc


def _big_q_laguerre_terms(a, b, n, x, q):
    """Terms of (aq, bq; q)_n 3phi2(q^-n, 0, x; aq, bq; q; q), k = 0..n."""
    norm = 1
    for j in range(n):
        norm = norm * (1 - a * q ** (j + 1)) * (1 - b * q ** (j + 1))
    t = norm
    out = [t]
    for k in range(n):
        # 0 in the upper row kills nothing since r = s + 1 (no extra q-power)
        num = (1 - q ** (k - n)) * (1 - x * q**k)
        den = (1 - q ** (k + 1)) * (1 - a * q ** (k + 1)) * (1 - b * q ** (k + 1))
        t = t * num * q / den
        out.append(t)
    return out


def eval_big_q_laguerre(a, b, n: int, x, q, ctx: PrecisionCtx | None = None):
    """Monic big q-Laguerre polynomial (aq, bq; q)_n 3phi2(q^-n, 0, x; aq, bq; q; q).

    The series terminates after n + 1 terms.  Rational arguments are summed
    exactly, which sidesteps the heavy cancellation for larger n.
    """
    try:
        a, b, x, q = (rat(v) for v in (a, b, x, q))
        exact = True
    except TypeError:
        exact = False
    if exact:
        return Fraction(sum(_big_q_laguerre_terms(a, b, n, x, q)))
    ctx = ctx or PrecisionCtx()
    with ctx.work():
        a, b, x, q = (to_mpf(v) for v in (a, b, x, q))
        return mp.fsum(_big_q_laguerre_terms(a, b, n, x, q))


def spectral(params: WeightParams, ctx: PrecisionCtx | None = None):
    """(W, 2V) with W D_q w = 2 V w."""
    ctx = ctx or PrecisionCtx()
    a1, a2, a3, q = params.a1, params.a2, params.a3, params.q
    with ctx.work():
        qs = _qpow(q, params.sigma)
        if not isinstance(qs, Fraction):
            a1, a2, a3, q = (to_mpf(v) for v in (a1, a2, a3, q))
        W = Poly((0, (1 - q) * a2 * a1 * a3, -(1 - q) * a2 * (a1 + a3), (1 - q) * a2))
        twoV = Poly((a2 * a1 * a3 - qs * a1 * a3 * a2, -a2 * (a1 + a3) + qs * a1 * a3, a2))
    return W, twoV


def _mpoly(coeffs):
    return Poly([to_mpf(c) for c in coeffs])


def _rel(u, v):
    return abs(u - v) / max(abs(u), abs(v), mp.mpf(10) ** (-mp.mp.dps))


# kappa/lambda normalization for the polynomial system ------------------------

@dataclass(frozen=True)
class QMono:
    """c * q^e with c rational and e rational; used for exact bookkeeping."""

    c: Fraction
    e: Fraction

    def over(self, other: "QMono", q: Fraction):
        """Integer k with self = q^k other, or None."""
        r = self.c / other.c
        de = self.e - other.e
        for k in range(-6, 7):
            if r == Fraction(q) ** k and (de + k).denominator == 1:
                return int(de + k)
        return None


def connection_symbols(params: WeightParams, n: int):
    a1, a2, a3, s = params.a1, params.a2, params.a3, params.sigma
    return (
        QMono(a1, Fraction(0)), QMono(a2, Fraction(0)), QMono(a3, Fraction(0)),
        QMono(-1 / a2, Fraction(n)),
        QMono(1 / (a1 * a3), Fraction(-n) - s),
        QMono(Fraction(1), Fraction(0)),
        QMono(Fraction(1), -s),
    )


class OrthoPipeline:
    """Everything for one weight up to index n_max, at adaptive precision."""

    def __init__(self, params: WeightParams, n_max: int, ctx: PrecisionCtx | None = None, max_extra: int = 400):
        self.params = params
        self.n_max = n_max
        self.ctx = ctx or PrecisionCtx()
        self.extra, self.spread = self._choose_precision(max_extra)

    # precision -------------------------------------------------------------
    def _build(self, digits: int, check: bool = False):
        inner = PrecisionCtx(digits)
        with inner.work():
            table = moments(self.params, 2 * self.n_max + 5, inner, check=check)
            rec = recurrence(table, self.n_max + 1)
        return inner, table, rec

    def _choose_precision(self, max_extra: int):
        d = self.ctx.digits
        extra = 20
        while True:
            lo = self._build(d + extra)
            hi = self._build(d + extra + 20)
            with hi[0].work():
                spread = max(
                    max(_rel(u, v) for u, v in zip(lo[2].gamma, hi[2].gamma)),
                    max(_rel(u, v) for u, v in zip(lo[2].a2[1:], hi[2].a2[1:])),
                    max(_rel(u, v) for u, v in zip(lo[2].delta, hi[2].delta)),
                )
            target = mp.mpf(10) ** (-(d + 5))
            if spread <= target:
                self.inner, self.table, self.rec = hi
                # the closed-form cross-check only at the accepted precision
                with self.inner.work():
                    self.table = moments(self.params, 2 * self.n_max + 5, self.inner)
                return extra + 20, spread
            lost = int(math.ceil(float(mp.log10(spread / target)))) if spread > 0 else 0
            extra += lost + 10
            if extra > max_extra:
                raise MomentError(f"Hankel determinants need more than {max_extra} guard digits")

    def work(self):
        return self.inner.work()

    # basic data -------------------------------------------------------------
    def consts(self):
        p = self.params
        with self.work():
            a1, a2, a3, q = (to_mpf(v) for v in (p.a1, p.a2, p.a3, p.q))
            qs = mp.power(q, to_mpf(p.sigma))
        return a1, a2, a3, q, qs

    def _need(self, n: int, hi: int = 0):
        if n < 0 or n + hi > self.n_max + 1:
            raise DomainError(f"index {n} outside the computed range")

    def theta(self, n: int) -> Poly:
        """Theta_n (degree 1); uses Gamma_n and Gamma_{n+1}."""
        self._need(n)
        a1, a2, a3, q, qs = self.consts()
        G = self.rec.gamma
        with self.work():
            c0 = q**n * qs * a1 * a3 - a2 / q ** (n + 2) * (q * G[n] + q * a1 + q * a3 - G[n + 1])
            return Poly((c0, a2 / q ** (n + 1)))

    def omega(self, n: int) -> Poly:
        """Omega_n (degree 2)."""
        self._need(n)
        a1, a2, a3, q, qs = self.consts()
        G, a2n = self.rec.gamma, self.rec.a2
        with self.work():
            an2 = a2n[n] if n else mp.mpf(0)
            c0 = q ** (-n - 1) / 2 * (
                a1 * a3 * q**n * (a2 * q * (qs + 1) - 2 * q**n * qs * ((1 - q) * G[n] + a2 * q)) + 2 * a2 * an2
            )
            c1 = -(a2 * a3 + a1 * a2 + a1 * a3 * qs * (1 - 2 * q**n)) / 2
            return Poly((c0, c1, a2 / 2))

    def spectral(self):
        with self.work():
            W, twoV = spectral(self.params, self.inner)
            return _mpoly(W.coeffs), _mpoly(twoV.coeffs)

    def freud_residual(self, n: int):
        """Both Freud-Laguerre residual polynomials at index n >= 1."""
        if n < 1:
            raise DomainError("n >= 1")
        self._need(n, 1)
        _, _, _, q, _ = self.consts()
        W, twoV = self.spectral()
        b, a2n = self.rec.b, self.rec.a2
        with self.work():
            V = twoV.scale(mp.mpf(1) / 2)
            x = Poly.x()
            Om, Op, Omm = self.omega(n), self.omega(n + 1), self.omega(n - 1)
            Th, Tp, Tm = self.theta(n), self.theta(n + 1), self.theta(n - 1)
            r1 = (Om * (q * x - b[n]) + Op * (b[n] - x) - Tm.scale(a2n[n]) + Tp.scale(a2n[n + 1])
                  + (x * V).scale(q - 1) + W)
            r2 = Th * (q * x - b[n]) + Tm * (b[n - 1] - x) - Op + Omm
            return r1, r2

    @staticmethod
    def norm(p: Poly):
        return max((abs(c) for c in p.coeffs), default=mp.mpf(0))

    def A_entries(self, n: int):
        """Coefficient polynomials of A_n after the gauge to the linear problem."""
        if n < 1:
            raise DomainError("n >= 1")
        a1, a2, a3, q, qs = self.consts()
        _, twoV = self.spectral()
        b, a2n = self.rec.b, self.rec.a2
        with self.work():
            x = Poly.x()
            V = twoV.scale(mp.mpf(1) / 2)
            base = (x - a1) * (x - a3) * a2
            den = a1 * a2 * a3 * qs
            Om, Omm, Th, Tm = self.omega(n), self.omega(n - 1), self.theta(n), self.theta(n - 1)
            e11 = (base - Om - V).scale(1 / den)
            e12 = Th.scale(a2n[n] / den)
            e21 = Tm.scale(-1 / den)
            e22 = (base - V - Omm + Tm * (x - b[n - 1])).scale(1 / den)
            return e11, e12, e21, e22

    def L_at(self, n: int, x):
        """L_n(x) = I - x(1-q) calL_n(x) as a numeric 2x2 tuple."""
        a1, a2, a3, q, qs = self.consts()
        W, twoV = self.spectral()
        with self.work():
            V = twoV(x) / 2
            den = W(x) - 2 * x * (1 - q) * V
            an = self.rec.a[n]
            Om, Omm = self.omega(n)(x), self.omega(n - 1)(x)
            Th, Tm = self.theta(n)(x), self.theta(n - 1)(x)
            f = x * (1 - q) / den
            return (
                1 - f * (Om - V),
                f * an * Th,
                -f * an * Tm,
                1 - f * (Omm - V - (x - self.rec.b[n - 1]) * Tm),
            )

    def M_at(self, n: int, x):
        a, b = self.rec.a, self.rec.b
        return ((x - b[n]) / a[n + 1], -(a[n] if n else 0) / a[n + 1], 1, 0)

    # identification with the linear problem -----------------------------------
    def kappa_lambda(self, n: int):
        a1, a2, a3, q, qs = self.consts()
        with self.work():
            return -(q**n) / a2, 1 / (a1 * a3 * q**n * qs), mp.mpf(1), 1 / qs

    def extract_state(self, n: int):
        """(ConnectionData, SurfaceState) with y_n the root of Theta_n."""
        a1, a2, a3, q, qs = self.consts()
        k1, k2, l1, l2 = self.kappa_lambda(n)
        with self.work():
            th = self.theta(n)
            y = -th.coeffs[0] / th.coeffs[1]
            w = self.rec.a2[n] / q
            e11 = self.A_entries(n)[0]
            z1 = e11.coeffs[0] / k1 + y
            if z1 == 0:
                raise DomainError("z_{1,n} vanishes; no z_n")
            z = (a1 - y) * (a2 - y) / z1
            M = ConnectionData(a1, a2, a3, k1, k2, l1, l2, q)
            return M, SurfaceState(y, z, w)

    def printed_y_z1(self, n: int):
        """y_n and z_{1,n} straight from their closed forms in Gamma, a^2, b."""
        a1, a2, a3, q, qs = self.consts()
        k1, k2, _, _ = self.kappa_lambda(n)
        G, b = self.rec.gamma, self.rec.b
        with self.work():
            w = self.rec.a2[n] / q
            y = a1 + a3 - (b[n] + G[n]) / q + G[n] + q * k1 / k2
            z1 = a1 - a2 + a3 - (b[n] + 2 * G[n]) / q + 2 * G[n] + q * k1 / k2 - w * k2 / k1
            return y, z1

    def inverse_state(self, n: int, M: ConnectionData, s: SurfaceState):
        """(a_n^2, b_n, Gamma_n) back from (y_n, z_n, w_n).

        Solved from the closed forms of y_n and z_{1,n}: their difference
        fixes Gamma_n, then y_n gives Gamma_{n+1} = Gamma_n + b_n.
        """
        q = M.q
        k1, k2 = M.kappa1, M.kappa2
        with self.work():
            z1 = (M.a1 - s.y) * (M.a2 - s.y) / s.z
            an2 = q * s.w
            G = q * (s.y - z1 - M.a2 - s.w * k2 / k1) / (1 - q)
            bn = q * (M.a1 + M.a2 + M.a3 - 2 * s.y) + q * q * k1 / k2 + q * s.w * k2 / k1 + q * z1
            return an2, bn, G

    def special_solution(self, n: int):
        """(y_n, z_n) from the Hankel-determinant formulas."""
        if n < 1:
            raise DomainError("n >= 1")
        self._need(n)
        a1, a2, a3, q, qs = self.consts()
        k1, k2, _, _ = self.kappa_lambda(n)
        D, S = self.rec.delta, self.rec.sigma
        with self.work():
            y = a1 + a3 - S[n + 1] / (q * D[n + 1]) + S[n] / D[n] + q * k1 / k2
            den = k1 * D[n] * (q * D[n] * (y - a2) + (q - 1) * S[n]) - k2 * D[n - 1] * D[n + 1]
            if den == 0:
                raise MomentError(f"z_{n} denominator vanishes")
            z = q * k1 * D[n] ** 2 * (y - a1) * (y - a2) / den
            return y, z


@dataclass
class LaxData:
    """Lax matrices at one n.  L_n is stored as (numerator entries, common
    denominator) with the common factor x removed, so L_n(0) is defined."""

    n: int
    theta: Poly
    omega: Poly
    A: tuple
    L_num: tuple
    L_den: Poly
    M: tuple  # (M11, M12, M21, M22) as Polys in x

    def L_at(self, x):
        d = self.L_den(x)
        return tuple(e(x) / d for e in self.L_num)

    def A_at(self, x):
        return tuple(e(x) for e in self.A)

    def M_at(self, x):
        return tuple(e(x) for e in self.M)


def theta_omega(P: OrthoPipeline, n: int):
    return P.theta(n), P.omega(n)


def freud_residual(P: OrthoPipeline, n: int):
    return P.freud_residual(n)


def build_lax(P: OrthoPipeline, n: int) -> LaxData:
    if n < 1:
        raise DomainError("n >= 1")
    a1, a2, a3, q, qs = P.consts()
    W, twoV = P.spectral()
    rec = P.rec
    with P.work():
        x = Poly.x()
        V = twoV.scale(mp.mpf(1) / 2)
        # W - 2x(1-q)V and x(1-q) calL both carry a factor x; cancel it
        den = Poly((W - (x * twoV).scale(1 - q)).coeffs[1:])
        c = 1 - q
        Th, Tm = P.theta(n), P.theta(n - 1)
        N = (P.omega(n) - V, Th.scale(-rec.a[n]), Tm.scale(rec.a[n]), P.omega(n - 1) - V - (x - rec.b[n - 1]) * Tm)
        L_num = (den - N[0].scale(c), N[1].scale(-c), N[2].scale(-c), den - N[3].scale(c))
        an1 = rec.a[n + 1]
        M = ((x - rec.b[n]).scale(1 / an1), Poly((-rec.a[n] / an1,)), Poly((1,)), Poly())
        return LaxData(n, Th, P.omega(n), P.A_entries(n), L_num, den, M)


@lru_cache(maxsize=64)
def pipeline(params: WeightParams, n_max: int, digits: int = 60) -> OrthoPipeline:
    return OrthoPipeline(params, n_max, PrecisionCtx(digits))


def qpv_relations(M: ConnectionData, y, z, yt, zt):
    """Residuals of the two q-P_V relations between (y, z) and (y~, z~)."""
    a1, a2, a3 = M.a
    k1, k2, l1, l2, q = M.kappa1, M.kappa2, M.lambda1, M.lambda2, M.q
    rz = zt * z - q * k1 / k2 * (y - a1) * (y - a2) / (y - a3)
    ry = yt * y - a3 * (zt + q * l1 / (k2 * a3)) * (zt + q * l2 / (k2 * a3)) / (zt - q * k1 / k2)
    return ry, rz


def verify_special_step(params: WeightParams, n: int, digits: int = 60, n_max: int | None = None):
    """q-P_V residuals between the Hankel solutions for params and for (q a1, q a2)."""
    n_max = n_max or n
    P = pipeline(params, n_max, digits)
    Pt = pipeline(params.qpv_shifted(), n_max, digits)
    y, z = P.special_solution(n)
    yt, zt = Pt.special_solution(n)
    M, _ = P.extract_state(n)
    with P.work():
        return qpv_relations(M, y, z, yt, zt)


# weight deformations ---------------------------------------------------------

# (R, S) as coefficient lists in x and the new weight, plus the listed data change
DEFORMATIONS = ("Tsigma", "Ta1", "Ta3", "Ta2", "Tn", "QPV")

TABLE_DELTAS = {
    "Tsigma": (0, 0, 0, 0, -1, -1, 0),
    "Ta1": (1, 0, 0, 0, -1, 0, 0),
    "Ta3": (0, 0, 1, 0, -1, 0, 0),
    "Ta2": (0, 1, 0, -1, 0, 0, 0),
    "Tn": (0, 0, 0, 1, -1, 0, 0),
    "QPV": (1, 1, 0, -1, -1, 0, 0),
}


def deformed_params(def_id: str, params: WeightParams) -> WeightParams:
    q = params.q
    return {
        "Tsigma": lambda: params.with_(sigma=params.sigma + 1),
        "Ta1": lambda: params.with_(a1=q * params.a1),
        "Ta3": lambda: params.with_(a3=q * params.a3),
        "Ta2": lambda: params.with_(a2=q * params.a2),
        "Tn": lambda: params,
        "QPV": lambda: params.qpv_shifted(),
    }[def_id]()


def deformation_RS(def_id: str, params: WeightParams):
    """R and S (R w~ = S w) as (constant, x) coefficient pairs; None for Tn."""
    a1, a2, a3, q = params.a1, params.a2, params.a3, params.q
    return {
        "Tsigma": ((1, 0), (0, 1)),
        "Ta1": ((1, 0), (1, -1 / (q * a1))),
        "Ta3": ((1, 0), (1, -1 / (q * a3))),
        "Ta2": ((1, -1 / (q * a2)), (1, 0)),
        "Tn": None,
        "QPV": ((-q * a1 * a2, a1), (-q * a1 * a2, a2)),
    }[def_id]


def data_delta(def_id: str, params: WeightParams, n: int):
    """q-exponents of (a1, a2, a3, kappa1, kappa2, lambda1, lambda2) under a deformation."""
    new = deformed_params(def_id, params)
    m = n + 1 if def_id == "Tn" else n
    old_s = connection_symbols(params, n)
    new_s = connection_symbols(new, m)
    out = []
    for u, v in zip(new_s, old_s):
        k = u.over(v, params.q)
        if k is None:
            raise DomainError(f"{def_id}: change is not a power of q")
        out.append(k)
    return tuple(out)


def delta_matches_table(def_id: str, computed) -> bool:
    """Exact match, with lambda1 and lambda2 compared as an unordered pair.

    The table labels the moving lambda as lambda1 while the polynomial
    normalization fixes lambda1 = 1; the two differ by the r2 relabelling.
    """
    want = TABLE_DELTAS[def_id]
    return computed[:5] == want[:5] and sorted(computed[5:]) == sorted(want[5:])


@dataclass
class DeformationReport:
    def_id: str
    new_params: WeightParams
    delta: tuple
    table_match: bool
    xi: tuple = ()      # (Xi_n, Xi_{n-1}) as Polys
    phi: tuple = ()     # (Phi_n, Phi_{n-1})
    det_residual: object = None
    compat_residual: object = None
    R1: tuple = ()      # x-coefficient of R_n in the A_n gauge (q-P_V only)
    R1_residual: object = None
    regauged_residual: object = None
    samples: tuple = field(default_factory=tuple)


SAMPLE_X = (Fraction(7, 3), Fraction(-5, 4), Fraction(11, 6), Fraction(3, 11), Fraction(-9, 7))


def _xi_phi(P: OrthoPipeline, Pt: OrthoPipeline, RS, m: int):
    (r0, r1), (s0, s1) = RS
    with P.work():
        ratio = Pt.rec.rho[m] / P.rec.rho[m]
        phi = s1 * ratio - r1 / ratio
        xi = Poly((ratio * (s0 + s1 * (P.rec.gamma[m] - Pt.rec.gamma[m])), ratio * s1))
        return xi, phi


def calR_at(P, Pt, RS, n, x):
    """The matrix relating the two Psi systems, evaluated at x."""
    (r0, r1), (s0, s1) = RS
    with P.work():
        xi_n, phi_n = _xi_phi(P, Pt, RS, n)
        xi_m, phi_m = _xi_phi(P, Pt, RS, n - 1)
        an = P.rec.a[n]
        S = s0 + s1 * x
        return (
            xi_n(x) / S,
            -an * phi_n / S,
            an * phi_m / S,
            (xi_m(x) - (x - P.rec.b[n - 1]) * phi_m) / S,
        )


def _mul(A, B):
    return (A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3], A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3])


def _poly_eval4(entries, x):
    return tuple(e(x) for e in entries)


def weight_deformation(def_id: str, params: WeightParams, n: int, digits: int = 60, n_max: int | None = None) -> DeformationReport:
    if n < 1:
        raise DomainError("n >= 1")
    n_max = max(n_max or n, n)
    new = deformed_params(def_id, params)
    delta = data_delta(def_id, params, n)
    rep = DeformationReport(def_id, new, delta, delta_matches_table(def_id, delta))
    RS = deformation_RS(def_id, params)
    if RS is None:
        return rep
    P = pipeline(params, n_max, digits)
    Pt = pipeline(new, n_max, digits)
    (r0, r1), (s0, s1) = RS
    with P.work():
        xs = [to_mpf(v) for v in SAMPLE_X]
        rep.xi = (_xi_phi(P, Pt, RS, n)[0], _xi_phi(P, Pt, RS, n - 1)[0])
        rep.phi = (_xi_phi(P, Pt, RS, n)[1], _xi_phi(P, Pt, RS, n - 1)[1])
        det_res = []
        for x in xs:
            m = calR_at(P, Pt, RS, n, x)
            det = m[0] * m[3] - m[1] * m[2]
            want = P.rec.a[n] * (r0 + r1 * x) / (Pt.rec.a[n] * (s0 + s1 * x))
            det_res.append(abs(det - want))
        rep.det_residual = max(det_res)
        rep.samples = tuple(xs)
        if def_id == "QPV":
            _qpv_gauge_checks(rep, P, Pt, RS, n, xs)
    return rep


def _R_n_at(P, Pt, RS, n, x):
    """R_n in the A_n gauge: Y~ = R_n Y with Y = D^-1 Psi / (x/a2; q)_inf."""
    a1, a2, a3, q, _ = P.consts()
    m = calR_at(P, Pt, RS, n, x)
    d1, d2 = P.rec.rho[n], P.rec.rho[n - 1]
    e1, e2 = Pt.rec.rho[n], Pt.rec.rho[n - 1]
    f = 1 / (1 - x / (q * a2))
    return (f * m[0] * d1 / e1, f * m[1] * d2 / e1, f * m[2] * d1 / e2, f * m[3] * d2 / e2)


def _qpv_gauge_checks(rep, P, Pt, RS, n, xs):
    a1, a2, a3, q, _ = P.consts()
    comp = []
    for x in xs:
        Rn = _R_n_at(P, Pt, RS, n, x)
        Rq = _R_n_at(P, Pt, RS, n, q * x)
        A = _poly_eval4(P.A_entries(n), x)
        At = _poly_eval4(Pt.A_entries(n), x)
        lhs, rhs = _mul(At, Rn), _mul(Rq, A)
        comp.append(max(abs(u - v) for u, v in zip(lhs, rhs)))
    rep.compat_residual = max(comp)
    # x-coefficient of (x - q a1)(x - q a2) R_n(x): difference quotient is exact
    # because the numerator is linear in x
    def num(x):
        Rn = _R_n_at(P, Pt, RS, n, x)
        g = (x - q * a1) * (x - q * a2)
        return tuple(g * v for v in Rn)

    u, v = num(mp.mpf(1)), num(mp.mpf(2))
    R1 = tuple(vv - uu for uu, vv in zip(u, v))
    R1 = tuple(c.real if isinstance(c, mp.mpc) and abs(c.imag) < mp.mpf(10) ** (-(mp.mp.dps - 10)) else c for c in R1)
    rep.R1 = R1
    rep.R1_residual = max(abs(R1[0] - q * a2), abs(R1[1]), abs(R1[2]), abs(R1[3] - q * a2))
    # against the q-P_V step matrix once the second component of Y~ is rescaled
    M, s = P.extract_state(n)
    Mt, st = Pt.extract_state(n)
    _, st_thm = qpv_map(M, s)
    st_g = SurfaceState(st.y, st.z, st_thm.w)
    R0 = qpv_R0(M, s, Mt, st_g)
    g = R1[0] / R1[3]
    res = []
    for x in xs:
        Rn = num(x)
        scaled = (Rn[0] / R1[0], Rn[1] / R1[0], g * Rn[2] / R1[0], g * Rn[3] / R1[0])
        want = (x + R0[0], R0[1], R0[2], x + R0[3])
        res.append(max(abs(a - b) for a, b in zip(scaled, want)))
    rep.regauged_residual = max(res)


# correspondence with the lattice -----------------------------------------------

CORRESPONDENCE = {
    "T0": (("Ta2", 1), ("Ta3", 1)),
    "T1": (("Ta1", 1), ("Ta1", -1), ("Ta2", -2), ("Ta3", -1), ("Tn", -1)),
    "T2": (("Tsigma", 1), ("Tn", -1)),
    "T3": (("Ta1", 1), ("Ta2", 1)),
    "T4": (("Ta1", 1), ("Ta2", 1)),
}


def correspondence_check(params: WeightParams | None = None, n: int = 2):
    """Compare the weight-deformation words with the lattice data actions.

    Matches are tested exactly, modulo the trivial scaling of all kappa and
    lambda, and modulo both that and the lambda relabelling.  Report only.
    """
    from .deform import EXPONENTS

    params = params or DEFAULT_WEIGHT
    rows = []
    trivial = (0, 0, 0, 1, 1, 1, 1)
    for tag, word in CORRESPONDENCE.items():
        tot = [0] * 7
        for d, e in word:
            for i, v in enumerate(TABLE_DELTAS[d] if d != "Tn" else data_delta("Tn", params, n)):
                tot[i] += e * v
        want = EXPONENTS[tag]
        diff = [u - v for u, v in zip(tot, want)]
        exact = not any(diff)
        mod_trivial = all(d == diff[3] for d in diff[3:]) and not any(diff[:3])
        swapped = tot[:5] + [tot[6], tot[5]]
        diff2 = [u - v for u, v in zip(swapped, want)]
        mod_both = mod_trivial or (all(d == diff2[3] for d in diff2[3:]) and not any(diff2[:3]))
        rows.append({
            "tag": tag,
            "word": " ".join(f"{d}^{e}" if e != 1 else d for d, e in word),
            "weight_exponents": tuple(tot),
            "lattice_exponents": want,
            "exact": exact,
            "mod_trivial": mod_trivial,
            "mod_trivial_and_r2": mod_both,
        })
    return rows
