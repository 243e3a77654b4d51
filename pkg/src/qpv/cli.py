"""Command-line front end.

    qpv compat   random exact compatibility checks for every translation
    qpv orbit    iterate the q-P_V step (or a word) from a state
    qpv special  Hankel special solutions and their residuals
    qpv freud    Freud and Lax identities for the weight pipeline
    qpv lattice  lattice words, the trivial element and the factorization
    qpv eval     evaluate one q-special function

Exit status: 0 success, 1 verification failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction

import mpmath as mp

from . import deform, linprob, ortho, qfun
from .exact import DomainError, Mat2, rat, rat_str


class UsageError(Exception):
    pass


# formatting -------------------------------------------------------------

def fmt(v, digits: int) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, Fraction)):
        return rat_str(v)
    if isinstance(v, mp.mpc):
        if v.imag == 0:
            v = v.real
        else:
            return f"{mp.nstr(v.real, digits)}{'+' if v.imag >= 0 else '-'}{mp.nstr(abs(v.imag), digits)}j"
    if isinstance(v, mp.mpf):
        return mp.nstr(v, digits)
    if isinstance(v, (tuple, list)):
        return " ".join(fmt(u, digits) for u in v)
    return str(v)


def res(v) -> str:
    return mp.nstr(abs(v), 4) if v is not None else ""


def render(rows: list[dict], kind: str, meta: dict) -> str:
    if kind == "json":
        return json.dumps({**meta, "rows": rows}, indent=2) + "\n"
    cols = list(rows[0]) if rows else []
    if kind == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    if rows:
        widths = [max(len(c), *(len(str(r[c])) for r in rows)) for c in cols]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        for r in rows:
            lines.append("  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths)).rstrip())
    return "\n".join(lines) + "\n"


def emit(args, rows, meta):
    text = render(rows, args.format, meta)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_weight(args) -> ortho.WeightParams:
    if not args.params:
        return ortho.DEFAULT_WEIGHT
    try:
        return ortho.WeightParams.from_json(load_json(args.params))
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad weight parameters: {exc}") from exc


# subcommands --------------------------------------------------------------

COMPAT_TAGS = ("QPV",) + deform.TRANSLATIONS + deform.LATTICE


def _draw_step(rng, tag):
    for _ in range(1000):
        M, s = linprob.random_state(rng)
        try:
            return deform.translate(deform.TranslationId(tag), M, s)
        except (DomainError, ZeroDivisionError):
            continue
    raise RuntimeError(f"no nondegenerate draw for {tag}")


def cmd_compat(args) -> int:
    rng = random.Random(args.seed)
    rows, ok_all = [], True
    corrupt = args.corrupt
    for tag in COMPAT_TAGS:
        passed = failed = 0
        for _ in range(args.trials):
            step = _draw_step(rng, tag)
            R = step.R
            if corrupt:
                R = Mat2(R[0, 0] + 1, R[0, 1], R[1, 0], R[1, 1])
                corrupt = False
            (M, s), (Mt, st) = step.before, step.after
            rep = deform.verify_compat(linprob.build_A(M, s), linprob.build_A(Mt, st), R, M.q)
            passed += rep.ok
            failed += not rep.ok
        ok_all &= failed == 0
        rows.append({"tag": tag, "trials": args.trials, "passed": passed, "failed": failed})
    emit(args, rows, {"command": "compat", "seed": args.seed, "ok": ok_all})
    return 0 if ok_all else 1


ORBIT_COLS = ("n", "y", "z", "w", "a1", "a2", "kappa1", "kappa2")


def cmd_orbit(args) -> int:
    if args.params:
        try:
            M, s = linprob.state_from_json(load_json(args.params))
        except (DomainError, ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad state: {exc}") from exc
    else:
        M, s = linprob.random_state(random.Random(args.seed))
    word = deform.parse_word(args.word) if args.word else None

    def row(n, M, s):
        vals = (n, s.y, s.z, s.w, M.a1, M.a2, M.kappa1, M.kappa2)
        return {c: fmt(v, args.digits) for c, v in zip(ORBIT_COLS, vals)}

    rows = [row(0, M, s)]
    status, error = 0, None
    for n in range(1, args.steps + 1):
        try:
            if word is None:
                M, s = deform.qpv_step(M, s).after
            else:
                M, s = deform.compose_word(word, M, s, verify=False).after
        except (DomainError, ZeroDivisionError) as exc:
            status, error = 1, f"degenerate at step {n}: {exc}"
            break
        rows.append(row(n, M, s))
    meta = {"command": "orbit", "word": args.word or "QPV", "ok": status == 0}
    if error:
        meta["error"] = error
        print(error, file=sys.stderr)
    emit(args, rows, meta)
    return status


def _special_rows(params, n_max, digits):
    P = ortho.pipeline(params, n_max, digits)
    Pt = ortho.pipeline(params.qpv_shifted(), n_max, digits)
    rows, worst_q, worst_f = [], mp.mpf(0), mp.mpf(0)
    for n in range(1, n_max + 1):
        M, s = P.extract_state(n)
        y, z = P.special_solution(n)
        yt, zt = Pt.special_solution(n)
        with P.work():
            ry, rz = ortho.qpv_relations(M, y, z, yt, zt)
            f1, f2 = (P.norm(r) for r in P.freud_residual(n))
        worst_q = max(worst_q, abs(ry), abs(rz))
        worst_f = max(worst_f, f1, f2)
        rec = P.rec
        rows.append({
            "n": n,
            "Delta": fmt(rec.delta[n], digits),
            "Sigma": fmt(rec.sigma[n], digits),
            "a2": fmt(rec.a2[n], digits),
            "b": fmt(rec.b[n], digits),
            "Gamma": fmt(rec.gamma[n], digits),
            "y": fmt(y, digits),
            "z": fmt(z, digits),
            "w": fmt(s.w, digits),
            "freud_residual_1": res(f1),
            "freud_residual_2": res(f2),
            "qpv_residual_y": res(ry),
            "qpv_residual_z": res(rz),
        })
    return rows, worst_q, worst_f


def cmd_special(args) -> int:
    params = load_weight(args)
    try:
        rows, wq, wf = _special_rows(params, args.n_max, args.digits)
    except ortho.MomentError as exc:
        print(f"pipeline failed: {exc}", file=sys.stderr)
        return 1
    ok = wq < mp.mpf(10) ** (-(args.digits - 20)) and wf < mp.mpf(10) ** (-(args.digits - 15))
    emit(args, rows, {"command": "special", "params": params.to_json(), "digits": args.digits, "ok": bool(ok)})
    return 0 if ok else 1


def lax_rows(P: ortho.OrthoPipeline, n_max: int, digits: int):
    """Per n: Freud norms, det L_n and det A_n errors, tr A_{0,n} error."""
    a1, a2, a3, q, qs = P.consts()
    W, twoV = P.spectral()
    xs = [mp.mpf(k) / 7 + mp.mpf(1) / 3 for k in range(10)]
    rows = []
    with P.work():
        for n in range(1, n_max + 1):
            f1, f2 = (P.norm(r) for r in P.freud_residual(n))
            lax = ortho.build_lax(P, n)
            dl = mp.mpf(0)
            for x in xs:
                L = lax.L_at(x)
                dl = max(dl, abs(L[0] * L[3] - L[1] * L[2] - W(x) / (W(x) - x * (1 - q) * twoV(x))))
            e = lax.A
            da = mp.mpf(0)
            for x in xs:
                A = lax.A_at(x)
                want = -(x - a1) * (x - a2) * (x - a3) / (qs * a1 * a2 * a3)
                da = max(da, abs(A[0] * A[3] - A[1] * A[2] - want))
            tr = abs(e[0](0) + e[3](0) - 1 - 1 / qs)
            rows.append({"n": n, "freud_1": f1, "freud_2": f2, "det_L": dl, "det_A": da, "trace_A0": tr})
    return rows


def cmd_freud(args) -> int:
    params = load_weight(args)
    P = ortho.pipeline(params, args.n_max + 1, args.digits)
    rows = lax_rows(P, args.n_max, args.digits)
    tol = mp.mpf(10) ** (-(args.digits - 15))
    ok = all(max(v for k, v in r.items() if k != "n") < tol for r in rows)
    out = [{k: (v if k == "n" else res(v)) for k, v in r.items()} for r in rows]
    emit(args, out, {"command": "freud", "params": params.to_json(), "digits": args.digits, "ok": ok})
    return 0 if ok else 1


def cmd_lattice(args) -> int:
    rng = random.Random(args.seed)
    rows, ok = [], True
    for tag in deform.LATTICE:
        M, s = linprob.random_state(rng)
        b = deform.b_exponents(tag, M, s)
        rows.append({
            "tag": tag,
            "word": " ".join(f"{t}^{e}" if e != 1 else t for t, e in deform.expand_lattice(tag)),
            "exponents": fmt(deform.EXPONENTS[tag], 0),
            "b_exponents": fmt(b, 0),
            "b_listed": fmt(deform.B_TABLE[tag], 0),
            "b_match": b == deform.B_TABLE[tag],
        })
    trivial = factor = 0
    for _ in range(args.trials):
        while True:
            M, s = linprob.random_state(rng)
            try:
                st = deform.compose_word("T0 T1 T2 T3 T4", M, s)
                fac = deform.compose_word("Ta1l1 Ta2l2 Tk1l1^-1 Tk2l2^-1", M, s, verify=False)
                direct = deform.qpv_step(M, s)
                break
            except (DomainError, ZeroDivisionError):
                continue
        Mt, sn = st.after
        trivial += (sn.y, sn.z) == (s.y, s.z) and Mt == M.scaled((0, 0, 0, 1, 1, 1, 1))
        factor += (fac.after[1].y, fac.after[1].z) == (direct.after[1].y, direct.after[1].z)
    ok = trivial == factor == args.trials
    emit(args, rows, {
        "command": "lattice", "seed": args.seed, "trials": args.trials,
        "trivial_element_passed": trivial, "factorization_passed": factor, "ok": ok,
    })
    return 0 if ok else 1


EVAL_FUNCS = {
    # name: (arity range, callable(args, ctx))
    "qpoch": ((2, 3), lambda a, c: qfun.qpoch(a[0], a[1], int(a[2]) if len(a) > 2 else None, c)),
    "theta": ((2, 2), lambda a, c: qfun.theta(a[0], a[1], c)),
    "qchar": ((3, 3), lambda a, c: qfun.q_char(a[0], a[1], a[2], c)),
    "phi21": ((5, 5), lambda a, c: qfun.phi_rs(a[0:2], a[2:3], a[4], a[3], c)),
    "phi21-jackson": ((5, 5), lambda a, c: qfun.phi21_jackson(a[0], a[1], a[2], a[3], a[4], c)),
    "big-q-laguerre": ((5, 5), lambda a, c: ortho.eval_big_q_laguerre(a[0], a[1], int(a[2]), a[3], a[4], c)),
}


def cmd_eval(args) -> int:
    lo, hi = EVAL_FUNCS[args.func][0]
    if not lo <= len(args.args) <= hi:
        raise UsageError(f"{args.func} takes {lo}..{hi} arguments")
    try:
        vals = [rat(v) for v in args.args]
    except (DomainError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    ctx = qfun.PrecisionCtx(args.digits)
    try:
        v = EVAL_FUNCS[args.func][1](vals, ctx)
    except (DomainError, qfun.ConvergenceError) as exc:
        print(f"{args.func}: {exc}", file=sys.stderr)
        return 1
    if isinstance(v, Fraction):
        with ctx.work():
            v = qfun.to_mpf(v)
    row = {"func": args.func, "args": " ".join(args.args), "value": fmt(v, args.digits)}
    emit(args, [row], {"command": "eval", "digits": args.digits})
    return 0


# argument parsing -----------------------------------------------------------

def _default_digits() -> int:
    raw = os.environ.get("QPV_DIGITS")
    if raw is None:
        return qfun.DEFAULT_DIGITS
    try:
        return int(raw)
    except ValueError:
        return -1  # rejected by the range check below


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=_default_digits(), help="decimal digits (env QPV_DIGITS)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=5)
    common.add_argument("--n-max", type=int, default=6)
    common.add_argument("--params", metavar="FILE", help="JSON state or weight parameters")
    common.add_argument("--word", help='deformation word, e.g. "T0 T1 T2 T3 T4"')
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")

    p = argparse.ArgumentParser(prog="qpv", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("compat", parents=[common], help="exact compatibility checks")
    c.add_argument("--corrupt", action="store_true", help="perturb one R entry (must fail)")
    o = sub.add_parser("orbit", parents=[common], help="iterate the q-P_V step or a word")
    o.add_argument("--steps", type=int, default=10)
    sub.add_parser("special", parents=[common], help="Hankel special solutions")
    sub.add_parser("freud", parents=[common], help="Freud and Lax identities")
    sub.add_parser("lattice", parents=[common], help="lattice words and relations")
    e = sub.add_parser("eval", parents=[common], help="evaluate a q-function")
    e.add_argument("func", choices=sorted(EVAL_FUNCS))
    e.add_argument("args", nargs="*", help="rational arguments, e.g. 1/2")
    return p


COMMANDS = {
    "compat": cmd_compat,
    "orbit": cmd_orbit,
    "special": cmd_special,
    "freud": cmd_freud,
    "lattice": cmd_lattice,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.digits < 15:
        parser.error("--digits must be at least 15 (check QPV_DIGITS)")
    if args.trials < 1:
        parser.error("--trials must be at least 1")
    if args.n_max < 1:
        parser.error("--n-max must be at least 1")
    if getattr(args, "steps", 0) < 0:
        parser.error("--steps must be non-negative")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qpv {args.command}: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:  # e.g. a bad word token
        print(f"qpv {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
