"""Command line entry point: every operation prints JSON (or CSV for tables) on stdout."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import brjuno_complex as bc
from . import cf_complex, cf_real, dilog, mobius, operators
from .rational import parse_rational

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3


# --- output -------------------------------------------------------------------------

def _num(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return format(v, ".17g")


def _plain(obj):
    """Python objects to JSON-ready values; complex numbers become {re, im}."""
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):  # numpy scalars
        return _plain(obj.item())
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    obj = _plain(obj)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    return json.dumps(str(obj))


def _record(command, inp, value, tail, meta=None) -> dict:
    return {"command": command, "input": inp, "value": value, "tail": tail, "meta": meta or {}}


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# --- argument types -----------------------------------------------------------------

NAMED_REALS = {"golden": cf_real.CFDigits(0, (), (1,)), "sqrt2m1": cf_real.CFDigits(0, (), (2,))}


def real_arg(text: str):
    """'golden', 'sqrt2m1', 'p/q' (exact) or a float."""
    if text in NAMED_REALS:
        return NAMED_REALS[text]
    if "/" in text:
        r = parse_rational(text)
        return Fraction(r.num, r.den)
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("non-finite number")
    return v


def complex_arg(text: str) -> complex:
    """'x+yi' (or j), or a rational p/q."""
    if "/" in text:
        return complex(float(real_arg(text)))
    z = complex(text.replace(" ", "").replace("i", "j"))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("non-finite number")
    return z


def rational_arg(text: str):
    return parse_rational(text)


def matrix_arg(text: str):
    return mobius.parse_matrix(text)


def positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise ValueError("must be >= 1")
    return v


def heights_arg(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


# --- commands -----------------------------------------------------------------------

def cmd_real(a):
    v, tail = cf_real.brjuno_real(a.x, max_terms=a.depth)
    return _record("real", a.x_text, v, tail, {"depth": a.depth})


def cmd_finite(a):
    return _record("finite", str(a.r), cf_real.brjuno_finite(a.r), 0.0)


def cmd_cf(a):
    cf = cf_real.expand_cf(a.x, a.depth)
    return _record("cf", a.x_text, {"a0": cf.a0, "quotients": cf.quotients}, 0.0,
                   {"p": cf.p, "q": cf.q, "beta": cf.beta, "terminated": cf.terminated})


def cmd_ccf(a):
    r = cf_complex.ccf_expand(a.z, a.depth)
    return _record("ccf", a.z, r.m, 0.0, {"stop": r.stop.value, "p": r.p[2:], "q": r.q[2:],
                                           "z": r.z, "beta": r.beta,
                                           "classify": sorted(l.value for l in cf_complex.classify(a.z))})


def _z_from(a) -> complex:
    return complex(a.re, a.im)


def cmd_dilog(a):
    z = _z_from(a)
    return _record("dilog", z, complex(dilog.li2(z, dilog.CutSide.parse(a.side))), 0.0, {"side": a.side})


def _phi_cmd(name, funcs):
    def run(a):
        z = _z_from(a)
        v = funcs[a.deriv](z, dilog.CutSide.parse(a.side))
        return _record(name, z, complex(v), 0.0, {"side": a.side, "derivative": a.deriv})
    return run


cmd_phi0 = _phi_cmd("phi0", [dilog.phi0, dilog.phi0_deriv, dilog.phi0_deriv2])
cmd_phi1 = _phi_cmd("phi1", [dilog.phi1, dilog.phi1_deriv, dilog.phi1_deriv2])


def _eval(z, a):
    if a.method == "farey":
        return bc.brjuno_farey(z, qmax=a.qmax, window=a.window)
    return bc.brjuno_monoid(z, depth=a.depth, m_max=a.m_max, n_max=a.n_max)


def cmd_complex(a):
    ev = _eval(a.z, a)
    meta = {"method": ev.method.value, "truncation": ev.truncation, "window": ev.window,
            "terms_used": ev.terms_used}
    return _record("complex", a.z, ev.value, ev.tail_estimate, meta)


def cmd_jump(a):
    rep = bc.measure_jump(a.r, delta=a.delta, qmax=a.qmax, method=a.method)
    q = a.r.den
    etas = np.asarray(rep.meta["etas"])
    A = np.column_stack([(2 / math.pi) * np.arctan(etas / a.delta), etas])
    j2 = float(np.linalg.lstsq(A, np.asarray(rep.meta["differences"]), rcond=None)[0][0])
    meta = {"theta_slope": rep.theta_slope, "expected": math.pi / q, "expected_slope": -1.0 / q,
            "delta": a.delta, "method": a.method, "jump_without_log_term": j2}
    meta.update(rep.meta)
    # spread between the drift models stands in for the error
    return _record("jump", str(a.r), rep.jump_estimate, abs(rep.jump_estimate - j2), meta)


def cmd_cell(a):
    n, word, zk, pkm1, pk, qkm1, qk = cf_complex.cell_data(a.z)
    return _record("cell", a.z, {"n": n, "word": word}, 0.0,
                   {"z_k": zk, "p": [pkm1, pk], "q": [qkm1, qk]})


def _t510_row(z, a):
    kw = {"depth": a.depth, "m_max": a.m_max}
    bf, principal, rem, bound, meta = bc.theorem510_decompose(z, "monoid", **kw)
    return bf, principal, rem, bound, meta


def cmd_t510(a):
    if a.z is not None:
        bf, principal, rem, bound, meta = _t510_row(a.z, a)
        return _record("t510", a.z, {"B_finite": bf, "principal": principal, "remainder": rem,
                                     "bound": bound}, meta["tail"],
                       {"word": meta["word"], "n": meta["n"], "ratio": abs(rem) / bound})
    rows = []
    for z in bc.random_cells(a.random, seed=a.seed):
        bf, principal, rem, bound, meta = _t510_row(z, a)
        rows.append((z.real, z.imag, len(meta["word"]), bf, principal, rem, bound, abs(rem) / bound))
    return ("csv", ["re", "im", "k", "B_finite", "principal", "remainder", "bound", "ratio"], rows)


def cmd_boundary(a):
    kind = bc.PathKind(a.path)
    heights = a.heights or [10.0 ** -j for j in range(1, 5)]
    path = bc.BoundaryPath(kind, a.param, heights)
    kw = ({"qmax": a.qmax} if a.method == "farey" else {"depth": a.depth, "m_max": a.m_max})
    rows = bc.boundary_limit_experiment(a.alpha, path, a.method, **kw)
    out = [(w.real, w.imag, v, err) for w, v, err in rows]
    if a.format == "json":
        errs = [r[3] for r in out]
        return _record("boundary", a.alpha, [list(r) for r in out], errs[-1],
                       {"limit": bc.reference_brjuno(a.alpha), "inversions": bc.monotone_inversions(errs),
                        "path": a.path, "parameter": a.param, "columns": ["re_w", "im_w", "im_B", "error"]})
    return ("csv", ["re_w", "im_w", "im_B", "error"], out)


def cmd_spectral(a):
    length = 0.5 if a.even else 1.0
    step = operators.t_even_real_apply if a.even else operators.t_real_apply
    norm = "L2" if a.even else a.norm
    f = operators.RealGridFn.from_callable(lambda x: np.ones_like(x), a.n, length)
    n0 = operators.grid_norm(f, norm)
    norms = []
    for _ in range(a.k):
        f = step(f)
        norms.append(operators.grid_norm(f, norm))
    if n0 == 0:
        return _record("spectral", {}, 0.0, 0.0)
    est = (norms[-1] / n0) ** (1.0 / a.k)
    prev = (norms[-2] / n0) ** (1.0 / (a.k - 1)) if a.k > 1 else est
    # the change from k - 1 to k iterations is the error estimate
    return _record("spectral", {"k": a.k, "n": a.n, "norm": norm, "even": a.even}, est,
                   abs(est - prev), {"bound": cf_real.GOLDEN, "estimate_k_minus_1": prev})


def cmd_monoid(a):
    if a.action == "member":
        g = matrix_arg(a.arg)
        return _record("monoid", str(g), mobius.monoid_member(g), 0.0,
                       {"even": mobius.even_monoid_member(g)})
    if a.action == "factor":
        g = matrix_arg(a.arg)
        w = mobius.factorize(g)
        return _record("monoid", str(g), list(w.letters), 0.0,
                       {"rational": str(mobius.monoid_to_rational(w))})
    if a.action == "word":
        r = parse_rational(a.arg)
        w = mobius.rational_to_word(r)
        lo, hi = mobius.farey_interval_of(w)
        return _record("monoid", str(r), list(w.letters), 0.0,
                       {"matrix": str(w.matrix()), "farey_interval": [str(lo), str(hi)]})
    rows = []
    for w, g in mobius.enumerate_monoid(a.max_len, a.max_den):
        rows.append((" ".join(map(str, w.letters)), g.a, g.b, g.c, g.d, str(mobius.monoid_to_rational(w))))
    return ("csv", ["word", "a", "b", "c", "d", "rational"], rows)


def _neg_log(x: float) -> float:
    return -math.log(x)


def cmd_cocycle(a):
    g = a.g
    word = mobius.decompose_word(g, a.x0)
    v = mobius.cocycle_eval(_neg_log, g, a.x0, a.nu, a.eps)
    chi = mobius.automorphic_factor(g, a.x0, a.nu, a.eps)
    return _record("cocycle", {"matrix": str(g), "x0": a.x0}, v, 0.0,
                   {"word": word, "automorphic_factor": chi,
                    "automorphic_factor_closed": mobius.automorphic_factor_closed(g, a.x0, a.nu, a.eps)})


# --- parser ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _add_complex_opts(p):
    p.add_argument("--method", choices=["farey", "monoid"], default="monoid")
    p.add_argument("--qmax", type=positive_int, default=300)
    p.add_argument("--window", type=float, default=3.0)
    p.add_argument("--depth", type=positive_int, default=40)
    p.add_argument("--m-max", dest="m_max", type=positive_int, default=2000)
    p.add_argument("--n-max", dest="n_max", type=positive_int, default=8)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)
    ap = _Parser(prog="brjuno", description="Real and complex Brjuno functions", parents=[common])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("real", parents=[common], help="real Brjuno function")
    p.add_argument("x", type=real_arg)
    p.add_argument("--depth", type=positive_int, default=40)
    p.set_defaults(func=cmd_real)

    p = sub.add_parser("finite", parents=[common], help="truncated Brjuno sum at a rational")
    p.add_argument("r", type=lambda s: Fraction(str(parse_rational(s))))
    p.set_defaults(func=cmd_finite)

    p = sub.add_parser("cf", parents=[common], help="real continued fraction")
    p.add_argument("x", type=real_arg)
    p.add_argument("--depth", type=positive_int, default=20)
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("ccf", parents=[common], help="complex continued fraction")
    p.add_argument("z", type=complex_arg)
    p.add_argument("--depth", type=positive_int, default=60)
    p.set_defaults(func=cmd_ccf)

    for name, func in (("dilog", cmd_dilog), ("phi0", cmd_phi0), ("phi1", cmd_phi1)):
        p = sub.add_parser(name, parents=[common], help=f"{name} at re + i im")
        p.add_argument("re", type=float)
        p.add_argument("im", type=float, nargs="?", default=0.0)
        p.add_argument("--side", choices=["off", "above", "below"], default="off")
        if name != "dilog":
            p.add_argument("--deriv", type=int, choices=[0, 1, 2], default=0)
        p.set_defaults(func=func)

    p = sub.add_parser("complex", parents=[common], help="complex Brjuno function")
    p.add_argument("z", type=complex_arg)
    _add_complex_opts(p)
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("jump", parents=[common], help="jump of Re B at a rational")
    p.add_argument("r", type=rational_arg)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--qmax", type=positive_int, default=1000)
    p.add_argument("--method", choices=["farey", "monoid"], default="farey")
    p.set_defaults(func=cmd_jump)

    p = sub.add_parser("cell", parents=[common], help="locate the cell of a point of the strip")
    p.add_argument("z", type=complex_arg)
    p.set_defaults(func=cmd_cell)

    p = sub.add_parser("t510", parents=[common], help="cell decomposition of Im B")
    p.add_argument("z", type=complex_arg, nargs="?")
    p.add_argument("--random", type=positive_int, default=20, help="number of random cells when no z")
    p.add_argument("--depth", type=positive_int, default=20)
    p.add_argument("--m-max", dest="m_max", type=positive_int, default=1000)
    p.set_defaults(func=cmd_t510)

    p = sub.add_parser("boundary", parents=[common], help="Im B along a path to a real point")
    p.add_argument("alpha", choices=sorted(NAMED_REALS))
    p.add_argument("--path", choices=[k.value for k in bc.PathKind], default="vertical")
    p.add_argument("--param", type=float, default=2.0)
    p.add_argument("--heights", type=heights_arg, default=None)
    _add_complex_opts(p)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("spectral", parents=[common], help="growth rate of T^k applied to 1")
    p.add_argument("--k", type=positive_int, default=12)
    p.add_argument("--n", type=positive_int, default=10**5)
    p.add_argument("--norm", choices=["L2", "weighted"], default="L2")
    p.add_argument("--even", action="store_true")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("monoid", parents=[common], help="monoid membership, factorization, enumeration")
    p.add_argument("action", choices=["member", "factor", "word", "enumerate"])
    p.add_argument("arg", nargs="?", default=None, help="matrix a,b,c,d or rational p/q")
    p.add_argument("--max-len", dest="max_len", type=int, default=3)
    p.add_argument("--max-den", dest="max_den", type=positive_int, default=10)
    p.set_defaults(func=cmd_monoid)

    p = sub.add_parser("cocycle", parents=[common], help="Brjuno cocycle along the minimal word")
    p.add_argument("g", type=matrix_arg)
    p.add_argument("x0", type=float)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--eps", type=int, choices=[-1, 1], default=1)
    p.set_defaults(func=cmd_cocycle)
    return ap


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
        if a.command == "monoid" and a.action != "enumerate" and a.arg is None:
            ap.error("monoid member/factor/word need an argument")
    except _UsageError:
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    for key in ("x", "alpha"):
        if hasattr(a, key):
            a.__dict__[key + "_text"] = next((t for t in argv if not t.startswith("-")
                                              and t != a.command), str(getattr(a, key)))
    try:
        res = a.func(a)
    except (ValueError, ZeroDivisionError, OverflowError, ArithmeticError, RuntimeError) as e:
        sys.stderr.write(f"brjuno {a.command}: {e}\n")
        return EXIT_DOMAIN
    if isinstance(res, tuple) and res[0] == "csv":
        out.write(_csv(res[1], res[2]))
    elif a.format == "csv":
        rec = _plain(res)
        val = rec["value"]
        if isinstance(val, dict) and set(val) == {"re", "im"}:
            out.write(_csv(["re", "im", "tail"], [(val["re"], val["im"], float(rec["tail"]))]))
        elif isinstance(val, float):
            out.write(_csv(["value", "tail"], [(val, float(rec["tail"]))]))
        else:
            out.write(dumps(res) + "\n")
    else:
        out.write(dumps(res) + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
