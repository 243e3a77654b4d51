"""One test per acceptance criterion; each records a PASS/FAIL line that is
repeated in the terminal summary.  Tolerances are pinned here."""
import random
import time

import mpmath as mp
import pytest

from conftest import record
from oracles import orders_gained, phi21_residual, qchar_residuals, special_points, theta_residuals
from qpv.exact import X, DomainError
from qpv.linprob import build_A, det_A_expected, random_state
from qpv.deform import GENERATORS, TranslationId, compose_word, qpv_step, step_compat, translate
from qpv.qfun import PrecisionCtx, to_mpf
from qpv.ortho import (
    DEFAULT_WEIGHT, LinearForm, WeightParams, build_lax, eval_big_q_laguerre,
    eval_monic, eval_pn, moments, pipeline, verify_special_step, weight_deformation,
)

E = lambda k: mp.mpf(10) ** (-k)

TRIALS = 25
SMALL_TRIALS = 10
N_PIPE = 9


def states(seed, count, fn):
    """count generic states for which fn succeeds; degenerate draws are redrawn."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        M, s = random_state(rng, bound=9)
        try:
            out.append((M, s, fn(M, s)))
        except (DomainError, ZeroDivisionError):
            continue
    return out


def test_criterion_01_qpv_lax_exact():
    t0 = time.perf_counter()
    runs = states(101, TRIALS, qpv_step)
    ok = all(step_compat(st).ok for _, _, st in runs)
    dt = time.perf_counter() - t0
    ok = ok and dt <= 10
    record(1, ok, f"q-P_V compatibility exact on {TRIALS} states in {dt:.2f}s (limit 10s)")
    assert ok


def test_criterion_02_generators_exact():
    bad = []
    for k, tag in enumerate(GENERATORS):
        def both(M, s, tag=tag):
            f = translate(TranslationId(tag), M, s)
            return f, translate(TranslationId(tag, -1), *f.after)

        for M, s, (f, b) in states(200 + k, TRIALS, both):
            if not (step_compat(f).ok and step_compat(b).ok and b.after == (M, s)):
                bad.append(tag)
    ok = not bad
    record(2, ok, f"{', '.join(GENERATORS)} and inverses compatible and round-trip exact, {TRIALS} trials each")
    assert ok


def test_criterion_03_determinants():
    runs = states(301, TRIALS, lambda M, s: (qpv_step(M, s), translate(TranslationId("Ta1l1"), M, s)))
    ok = True
    for M, s, (p, a) in runs:
        q = M.q
        ok &= build_A(M, s).det() == det_A_expected(M)
        ok &= p.R.det() == 1 / ((X - q * M.a1) * (X - q * M.a2))
        ok &= a.R.det() == X / (X - q * M.a1)
    record(3, ok, f"det A, det R_qpv, det R_a1l1 exact on {TRIALS} states")
    assert ok


def test_criterion_04_trivial_element():
    runs = states(401, SMALL_TRIALS, lambda M, s: compose_word("T0 T1 T2 T3 T4", M, s))
    ok = True
    for M, s, st in runs:
        Mt, t = st.after
        ok &= (t.y, t.z) == (s.y, s.z) and Mt == M.scaled((0, 0, 0, 1, 1, 1, 1))
    record(4, ok, f"T0 T1 T2 T3 T4 fixes (y, z) and scales kappa, lambda by q on {SMALL_TRIALS} states")
    assert ok


def test_criterion_05_factorization():
    word = "Ta1l1 Ta2l2 Tk1l1^-1 Tk2l2^-1"
    runs = states(501, SMALL_TRIALS, lambda M, s: (compose_word(word, M, s), qpv_step(M, s)))
    ok = all((w.after[1].y, w.after[1].z) == (d.after[1].y, d.after[1].z) for _, _, (w, d) in runs)
    record(5, ok, f"{word} equals the q-P_V step on (y, z) for {SMALL_TRIALS} states")
    assert ok


def test_criterion_06_special_functions():
    tol = E(50)
    pts = special_points(seed=6, count=10)
    worst = {"theta": 0.0, "qchar": 0.0, "phi21": 0.0}
    gain = {"theta": 1e9, "qchar": 1e9, "phi21": 1e9}
    printed_gap = mp.inf
    ok = True
    for p in pts:
        t60, tp = theta_residuals(*p["theta"], 60)
        t120, _ = theta_residuals(*p["theta"], 120)
        c60, cp = qchar_residuals(*p["qchar"], 60)
        c120, _ = qchar_residuals(*p["qchar"], 120)
        f60 = phi21_residual(*p["phi21"], 60)
        f120 = phi21_residual(*p["phi21"], 120)
        printed_gap = min(printed_gap, tp, cp)
        for key, lo, hi in (("theta", t60, t120), ("qchar", c60, c120), ("phi21", f60, f120)):
            ok &= lo < tol
            worst[key] = max(worst[key], float(lo))
            gain[key] = min(gain[key], orders_gained(lo, hi, 60, 120))
    ok &= min(gain.values()) >= 10
    detail = ", ".join(f"{k} max {worst[k]:.1e} gain {gain[k]:.0f}" for k in worst)
    record(6, ok, f"corrected theta/q-character relations and 2phi1 Jackson form at 60 digits "
                  f"(tol 1e-50, gain >= 10): {detail}; printed theta(qx)=qx theta(x) off by >= {mp.nstr(printed_gap, 3)}")
    assert ok


def test_criterion_07_orthogonal_polynomials():
    tab = moments(DEFAULT_WEIGHT, 12, PrecisionCtx(60))
    m_err = max(tab.err)
    P = pipeline(DEFAULT_WEIGHT, N_PIPE, 60)
    form = LinearForm(DEFAULT_WEIGHT, P.inner)
    with P.work():
        o_err = max(
            abs(form(lambda x: eval_pn(P.rec, i, x) * eval_pn(P.rec, j, x)) - (i == j))
            for i in range(7) for j in range(7)
        )
    a, b, q = 2, 3, mp.mpf(1) / 4
    Q = pipeline(WeightParams(a, 1, b, 0, "1/4"), 11, 60)
    with Q.work():
        l_err = max(
            abs(eval_monic(Q.rec, n, mp.mpf(1) / 2) - to_mpf(eval_big_q_laguerre(a, b, n, "1/2", "1/4")))
            for n in range(11)
        )
    ok = m_err < E(50) and o_err < E(45) and l_err < E(50)
    record(7, ok, f"moments k<=12 {mp.nstr(m_err, 3)} (1e-50), orthogonality i,j<=6 {mp.nstr(o_err, 3)} (1e-45), "
                  f"big q-Laguerre n<=10 {mp.nstr(l_err, 3)} (1e-50)")
    assert ok


def test_criterion_08_lax_freud():
    t0 = time.perf_counter()
    P = pipeline.__wrapped__(DEFAULT_WEIGHT, N_PIPE, 60)  # uncached, so the timing is honest
    a1, a2, a3, q, qs = P.consts()
    W, twoV = P.spectral()
    xs = [mp.mpf(k) / 7 + mp.mpf(1) / 3 for k in range(10)]
    fr = dl = tr = da = mp.mpf(0)
    with P.work():
        for n in range(1, 9):
            fr = max(fr, *(P.norm(r) for r in P.freud_residual(n)))
            lax = build_lax(P, n)
            e = lax.A
            tr = max(tr, abs(e[0](0) + e[3](0) - 1 - 1 / qs))
            for x in xs:
                L = lax.L_at(x)
                dl = max(dl, abs(L[0] * L[3] - L[1] * L[2] - W(x) / (W(x) - x * (1 - q) * twoV(x))))
                A = lax.A_at(x)
                da = max(da, abs(A[0] * A[3] - A[1] * A[2] + (x - a1) * (x - a2) * (x - a3) / (qs * a1 * a2 * a3)))
    dt = time.perf_counter() - t0
    ok = max(fr, dl, tr, da) < E(45) and dt <= 60
    record(8, ok, f"n<=8: Freud {mp.nstr(fr, 3)}, det L_n {mp.nstr(dl, 3)}, tr A_0 {mp.nstr(tr, 3)}, "
                  f"det A_n {mp.nstr(da, 3)} (all 1e-45), {dt:.1f}s (limit 60s)")
    assert ok


def test_criterion_09_special_solutions():
    worst60, gain = mp.mpf(0), 1e9
    for n in range(1, 7):
        r60 = verify_special_step(DEFAULT_WEIGHT, n, 60, N_PIPE)
        r120 = verify_special_step(DEFAULT_WEIGHT, n, 120, N_PIPE)
        for lo, hi in zip(r60, r120):
            worst60 = max(worst60, abs(lo))
            gain = min(gain, orders_gained(abs(lo), abs(hi), 60, 120))
    ok = worst60 < E(40) and gain >= 10
    record(9, ok, f"q-P_V residuals n<=6 at 60 digits {mp.nstr(worst60, 3)} (1e-40); "
                  f"at 120 digits at least {gain:.0f} orders smaller (>= 10)")
    assert ok


TABLE_IDS = ("Tsigma", "Ta1", "Ta3", "Ta2", "Tn")


def _table_and_det():
    deltas_ok, det_worst = True, mp.mpf(0)
    for d in TABLE_IDS:
        for n in (1, 3, 6):
            rep = weight_deformation(d, DEFAULT_WEIGHT, n, 60, N_PIPE)
            deltas_ok &= rep.table_match
            if rep.det_residual is not None:
                det_worst = max(det_worst, rep.det_residual)
    return deltas_ok, det_worst


def test_criterion_10_table_and_determinant():
    deltas_ok, det_worst = _table_and_det()
    assert deltas_ok and det_worst < E(45)


@pytest.mark.xfail(strict=True, reason="R_{1,n} = diag(-q a2, -q a1 rho_{n-1}^2/rho~_{n-1}^2) in the A_n gauge, "
                                       "not q a2 I; see the decisions ledger")
def test_criterion_10_R1_scalar():
    deltas_ok, det_worst = _table_and_det()
    worst = mp.mpf(0)
    regauged = mp.mpf(0)
    R1s = []
    for n in (1, 3, 6):
        rep = weight_deformation("QPV", DEFAULT_WEIGHT, n, 60, N_PIPE)
        worst = max(worst, rep.R1_residual)
        regauged = max(regauged, rep.regauged_residual)
        R1s.append(rep.R1)
    ok = deltas_ok and det_worst < E(45) and worst < E(45)
    r1 = R1s[0]
    record(10, ok, f"deformation deltas match the lattice table: {deltas_ok} (lambda pair unordered); det calR_n {mp.nstr(det_worst, 3)} (1e-45); "
                   f"R_1,n = q a2 I fails: n=1 gives diag({mp.nstr(r1[0], 6)}, {mp.nstr(r1[3], 6)}) vs q a2 = 0.4, "
                   f"off by {mp.nstr(worst, 3)}; after a diagonal regauge it equals the q-P_V matrix to {mp.nstr(regauged, 3)}")
    assert ok
