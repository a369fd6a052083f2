"""Command-line interface.

Exit status is 0 when every requested check passes, 1 when a check fails and
2 on bad input; failures print one JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import asym, catalog, counting, lattice
from .catalog import Family, SpectralModel
from .exactpoly import Poly, T, as_rational


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = 2):
        super().__init__(message)
        self.kind = kind
        self.code = code


def fmt(x) -> str:
    """All floats leave the CLI with 17 significant digits."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


# -- parsing helpers --------------------------------------------------------------

_POLY_VARS = {"k", "t"}


def parse_poly(expr: str) -> Poly:
    """Parse an expression in k (or t) such as ``(2k+1)^2`` or ``k**2/4 + 1``."""
    src = expr.replace("^", "**")
    # allow implicit multiplication of a number by the variable, e.g. 2k
    out = []
    for i, ch in enumerate(src):
        if ch in _POLY_VARS and i > 0 and (src[i - 1].isdigit() or src[i - 1] == ")"):
            out.append("*")
        out.append(ch)
    try:
        tree = ast.parse("".join(out), mode="eval")
    except SyntaxError as exc:
        raise CliError("bad_polynomial", f"cannot parse polynomial {expr!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Poly.const(node.value)
        if isinstance(node, ast.Name) and node.id in _POLY_VARS:
            return T
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div) and (right.degree or 0) == 0 and not right.is_zero():
                return left / right.coeff(0)
            if isinstance(node.op, ast.Pow) and right.degree in (0, None):
                e = right.coeff(0)
                if e.denominator == 1 and e >= 0:
                    return left ** int(e)
        raise CliError("bad_polynomial", f"unsupported construct in polynomial {expr!r}")

    return ev(tree)


def parse_synthetic(spec: str) -> SpectralModel:
    fields = {}
    for part in spec.split(","):
        if "=" not in part:
            raise CliError("bad_synthetic", f"expected key=value, got {part!r}")
        key, _, val = part.partition("=")
        fields[key.strip()] = val.strip()
    try:
        d = int(fields.pop("d"))
        A = as_rational(fields.pop("A"))
        B = as_rational(fields.pop("B", "0"))
        C = as_rational(fields.pop("C", "0"))
        R = parse_poly(fields.pop("R"))
    except KeyError as exc:
        raise CliError("bad_synthetic", f"synthetic model is missing {exc.args[0]!r}") from exc
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError("bad_synthetic", str(exc)) from exc
    if fields:
        raise CliError("bad_synthetic", f"unknown synthetic fields {sorted(fields)}")
    try:
        return SpectralModel(name="synthetic", d=d, A=A, B=B, C=C, R=R)
    except ValueError as exc:
        raise CliError("bad_synthetic", str(exc)) from exc


def resolve(space: str) -> list[SpectralModel]:
    try:
        return catalog.parse_product(space)
    except ValueError as exc:
        raise CliError("bad_space", str(exc)) from exc


def parse_threshold(args) -> Fraction:
    try:
        if args.lambda2 is not None:
            return as_rational(args.lambda2)
        if args.lam is not None:
            lam = as_rational(args.lam)
            if lam < 0:
                raise CliError("bad_lambda", "lambda must be non-negative")
            return lam * lam
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError("bad_lambda", str(exc)) from exc
    raise CliError("bad_lambda", "give --lambda2 P/Q or --lambda X")


# -- output ----------------------------------------------------------------------

def emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError("unwritable_path", f"{out}: {exc.strerror}") from exc


def series_csv(series) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "count", "main_term", "remainder", "normalized_remainder"])
    for lam, n, main, rem, nrem in series.rows():
        w.writerow([fmt(lam), n, fmt(main), fmt(rem), fmt(nrem)])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, default=str) + "\n"


def _real(x):
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def report(space: str, d: int, c1, c2, exponent, windows, **extra) -> dict:
    out = {
        "space": space,
        "d": d,
        "c1": _real(c1),
        "c2": None if c2 is None else _real(c2),
        "exponent_fit": None if exponent is None else _real(exponent),
        "windows": windows,
    }
    out.update(extra)
    return out


# -- commands ---------------------------------------------------------------------

def _model_row(family: Family, param, m: SpectralModel) -> dict:
    rep = catalog.w_verify(m)
    lo = catalog.PARAM_MIN[family]
    return {
        "family": family.value,
        "param": param,
        "params": "-" if lo is None else f">={lo}",
        "name": m.name,
        "d": m.d,
        "A": str(m.A),
        "B": str(m.B),
        "C": str(m.C),
        "R": m.R.format("k"),
        "Q": rep.Q.format("t"),
        "checked_coefficient": str(rep.checked_coefficient),
        "status": "PASS" if rep.passed else "FAIL",
    }


def _table(rows: list[dict], cols: list[str]) -> str:
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    lines = ["  ".join(c.ljust(widths[c]) for c in cols)]
    for r in rows:
        lines.append("  ".join(str(r[c]).ljust(widths[c]) for c in cols))
    return "\n".join(lines) + "\n"


def cmd_catalog(args) -> int:
    if args.param_sweep:
        rows = [_model_row(f, p, m) for f, p, m in catalog.sweep_models()]
    else:
        rows = [_model_row(f, catalog.PARAM_MIN[f], catalog.default_model(f)) for f in Family]
    if args.format == "json":
        emit(dump_json(rows), args.out)
    else:
        emit(_table(rows, ["family", "param", "params", "name", "d", "A", "B", "C", "status", "R"]), args.out)
    return 0 if all(r["status"] == "PASS" for r in rows) else 1


def cmd_verify(args) -> int:
    if args.synthetic:
        m = parse_synthetic(args.synthetic)
    elif args.space:
        ms = resolve(args.space)
        if len(ms) != 1:
            raise CliError("bad_space", "verify takes a single space")
        m = ms[0]
    else:
        raise CliError("bad_space", "give a space or --synthetic")
    rep = catalog.w_verify(m)
    target = "constant term" if m.d == 2 else f"coefficient of t^{m.d - 2}"
    rec = {
        "space": m.name,
        "d": m.d,
        "shift": str(rep.shift),
        "Q": rep.Q.format("t"),
        "checked": target,
        "checked_coefficient": str(rep.checked_coefficient),
        "status": "PASS" if rep.passed else "FAIL",
    }
    if args.format == "json":
        emit(dump_json(rec), args.out)
    else:
        emit(
            f"{rec['status']}  {m.name} (d={m.d})\n"
            f"  shift B/(2A) = {rec['shift']}\n"
            f"  Q(t) = {rec['Q']}\n"
            f"  {target} = {rec['checked_coefficient']}\n",
            args.out,
        )
    return 0 if rep.passed else 1


def cmd_count(args) -> int:
    ms = resolve(args.space)
    L = parse_threshold(args)
    if len(ms) == 1:
        n = counting.count_single_fast(ms[0], L)
    else:
        n = lattice.count_product(lattice.product_model(ms), L, workers=args.threads)
    if args.format == "json":
        emit(dump_json({"space": args.space, "lambda2": str(L), "count": n}), args.out)
    else:
        emit(f"{n}\n", args.out)
    return 0


def _build_series(args, ms):
    if len(ms) == 1 and args.jumps is not None:
        if args.jumps < 1:
            raise CliError("bad_grid", "--jumps must be positive")
        return asym.jump_series(ms[0], args.jumps)
    if args.jumps is not None:
        raise CliError("bad_grid", "--jumps applies to single spaces only")
    try:
        if len(ms) == 1:
            m = ms[0]
            lmin, lmax = as_rational(args.lmin), as_rational(args.lmax)
            if not 0 < lmin < lmax:
                raise ValueError("need 0 < lmin < lmax")
            # jumps strictly above lmin up to lmax
            k_lo = counting.k_max(m, lmin * lmin)
            k_hi = counting.k_max(m, lmax * lmax)
            start = max((k_lo if k_lo is not None else -1) + 1, 1)
            if k_hi is None or k_hi < start:
                raise ValueError("no jumps in the requested lambda range")
            return asym.jump_series(m, k_hi, k_start=start)
        pm = lattice.product_model(ms)
        grid = asym.geometric_grid(as_rational(args.lmin), as_rational(args.lmax), args.points)
        return lattice.count_product_series(pm, grid, workers=args.threads)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise CliError("bad_grid", str(exc)) from exc


def _coeffs(ms):
    if len(ms) == 1:
        c = asym.two_term_coeffs(ms[0])
        return c.c1, c.c2
    return asym.lattice_c1(lattice.product_model(ms)), None


def cmd_series(args) -> int:
    ms = resolve(args.space)
    series = _build_series(args, ms)
    if args.format == "json":
        c1, c2 = _coeffs(ms)
        rows = [
            {"lambda": lam, "count": n, "main_term": main, "remainder": r, "normalized_remainder": _real(nr)}
            for lam, n, main, r, nr in series.rows()
        ]
        emit(dump_json(report(args.space, series.d, c1, c2, None, [], rows=rows)), args.out)
    else:
        emit(series_csv(series), args.out)
    return 0


def cmd_fit(args) -> int:
    ms = resolve(args.space)
    series = _build_series(args, ms)
    try:
        rep = asym.fit_exponent(series, args.window_ratio)
    except ValueError as exc:
        raise CliError("degenerate_fit", str(exc)) from exc
    c1, c2 = _coeffs(ms)
    windows = [
        {"lambda_lo": lo, "lambda_hi": hi, "lambda_mid": mid, "envelope": env}
        for (lo, hi), (mid, env) in zip(rep.bounds, rep.windows)
    ]
    ok = args.max_exponent is None or rep.exponent <= args.max_exponent
    rec = report(
        args.space, series.d, c1, c2, rep.exponent, windows,
        intercept=rep.intercept, r_squared=rep.r_squared, window_ratio=args.window_ratio,
        max_exponent=args.max_exponent, status="PASS" if ok else "FAIL",
    )
    if args.format == "json":
        emit(dump_json(rec), args.out)
    else:
        lines = [f"space {args.space}  d={series.d}  c1={fmt(float(c1))}",
                 f"exponent {fmt(rep.exponent)}  r^2 {fmt(rep.r_squared)}"]
        if args.max_exponent is not None:
            lines.append(f"bound {fmt(args.max_exponent)}  {rec['status']}")
        lines += [f"  [{fmt(w['lambda_lo'])}, {fmt(w['lambda_hi'])}]  {fmt(w['envelope'])}" for w in windows]
        emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def cmd_sharpness(args) -> int:
    ms = resolve(args.space)
    if len(ms) != 1:
        raise CliError("bad_space", "sharpness applies to single spaces")
    m = ms[0]
    if args.kmax < 2:
        raise CliError("bad_grid", "--kmax must be at least 2")
    series = asym.jump_series(m, args.kmax)
    try:
        stats = asym.sharpness_stat(series, args.window_ratio)
    except ValueError as exc:
        raise CliError("bad_grid", str(exc)) from exc
    ok = asym.non_decaying(stats, args.floor_fraction)
    c = asym.two_term_coeffs(m)
    windows = [{"lambda_lo": lo, "lambda_hi": hi, "max_normalized_remainder": v} for (lo, hi), v in stats]
    rec = report(args.space, m.d, c.c1, c.c2, None, windows,
                 floor_fraction=args.floor_fraction, non_decaying=ok, status="PASS" if ok else "FAIL")
    if args.format == "json":
        emit(dump_json(rec), args.out)
    else:
        lines = [f"space {args.space}  d={m.d}  c2={fmt(c.c2)}  {rec['status']}"]
        lines += [f"  [{fmt(w['lambda_lo'])}, {fmt(w['lambda_hi'])}]  {fmt(w['max_normalized_remainder'])}"
                  for w in windows]
        emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crossweyl", description="Exact Weyl-law counting on CROSSes and products.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("table", "json"), default=None):
        sp.add_argument("--format", choices=formats, default=default or formats[0])
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--threads", type=int, default=lattice.default_workers(),
                        help=f"worker pool size (default ${lattice.THREADS_ENV} or 1)")

    sp = sub.add_parser("catalog", help="list catalog spaces and their certificates")
    sp.add_argument("action", nargs="?", choices=["list"], default="list")
    sp.add_argument("--param-sweep", action="store_true", help="one row per swept model")
    common(sp)
    sp.set_defaults(fn=cmd_catalog)

    sp = sub.add_parser("verify", help="check the W-manifold certificate")
    sp.add_argument("space", nargs="?")
    sp.add_argument("--synthetic", help="e.g. d=2,A=1,B=0,C=0,R=k+1")
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("count", help="exact eigenvalue count N(lambda)")
    sp.add_argument("space")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda2", help="threshold lambda^2 as an exact rational, e.g. 3/4")
    g.add_argument("--lambda", dest="lam", help="lambda as a decimal, parsed exactly")
    common(sp, formats=("text", "json"))
    sp.set_defaults(fn=cmd_count)

    def grid(sp):
        sp.add_argument("--jumps", type=int, help="single space: the first N jump points")
        sp.add_argument("--lmin", default="50")
        sp.add_argument("--lmax", default="2000")
        sp.add_argument("--points", type=int, default=2000, help="product grid size")

    sp = sub.add_parser("series", help="counts and remainders on a lambda grid")
    sp.add_argument("space")
    grid(sp)
    common(sp, formats=("csv", "json"))
    sp.set_defaults(fn=cmd_series)

    sp = sub.add_parser("fit", help="fit the remainder growth exponent")
    sp.add_argument("space")
    grid(sp)
    sp.add_argument("--window-ratio", type=float, default=asym.DEFAULT_WINDOW_RATIO)
    sp.add_argument("--max-exponent", type=float, help="fail unless the fitted exponent is at most this")
    common(sp)
    sp.set_defaults(fn=cmd_fit)

    sp = sub.add_parser("sharpness", help="normalized remainder maxima at the jumps")
    sp.add_argument("space")
    sp.add_argument("--kmax", type=int, default=100000)
    sp.add_argument("--window-ratio", type=float, default=2.0)
    sp.add_argument("--floor-fraction", type=float, default=0.5)
    common(sp)
    sp.set_defaults(fn=cmd_sharpness)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", 1) < 1:
            raise CliError("bad_threads", "--threads must be >= 1")
        return args.fn(args)
    except CliError as exc:
        sys.stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return exc.code
    except catalog.CertificateError as exc:
        sys.stderr.write(json.dumps({"error": "not_w_manifold", "message": str(exc)}) + "\n")
        return 1
    except BrokenPipeError:
        # downstream reader went away (e.g. piped into head)
        sys.stderr.close()
        return 0


if __name__ == "__main__":
    sys.exit(main())
