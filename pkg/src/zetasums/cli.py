"""Batch front end: ``python -m zetasums <subcommand> ...``.

Machine-readable output goes to --out (or stdout); diagnostics and the
reproducibility line go to stderr. Exit codes: 0 success, 2 invalid
arguments, 1 computation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import mpmath
import numpy as np

from . import __version__
from .cache_store import CacheHandle
from .errors import ZetaSumsError

X_MAX_CLI = 1e6


class UsageError(ValueError):
    pass


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(params: dict, header, rows, extra_comments=()) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(params, sort_keys=True) + "\n")
    for line in extra_comments:
        buf.write("# " + line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(params: dict, body) -> str:
    return json.dumps({"params": params, "result": body}, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o)}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


@dataclass
class Context:
    args: argparse.Namespace
    cache: CacheHandle

    def e_table(self, x_max: float):
        from .mean_square import build_table

        return build_table(x_max, tol=self.args.tol, cache=self.cache, workers=self.args.workers)


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


# -- subcommands: each has validate(args) and run(ctx) -> (text, format) ----


def _v_x_max(a):
    _need(1 <= a.x_max <= X_MAX_CLI, f"--x-max must lie in [1, {X_MAX_CLI:g}]")


def _v_e_table(a):
    _v_x_max(a)
    _need(a.stride >= 1, "--stride must be >= 1")


def _r_e_table(ctx, params):
    a = ctx.args
    tb = ctx.e_table(a.x_max)
    n = np.arange(0, int(a.x_max) + 1, a.stride, dtype=float)
    idx = tb.index_of(n)
    rows = zip(n.astype(int), tb.e[idx], tb.cum_e[idx], tb.cum_psi_zeta[idx])
    return _csv_text(params, ["t", "E", "int_E", "int_psi_zeta_sq"], rows)


def _v_g_report(a):
    _v_e_table(a)
    _need(a.x_max >= 100, "--x-max must be >= 100")


def _r_g_report(ctx, params):
    from .mean_square import g_of

    a = ctx.args
    tb = ctx.e_table(a.x_max)
    x = np.arange(100, int(a.x_max) + 1, a.stride, dtype=float)
    g = g_of(x, tb)
    return _csv_text(params, ["x", "G", "G_over_x34"], zip(x.astype(int), g, g / x**0.75))


def _v_delta_report(a):
    _need(10 <= a.x_max <= 1e8, "--x-max must lie in [10, 1e8]")
    _need(a.points >= 2, "--points must be >= 2")


def _r_delta_report(ctx, params):
    from .divisor import delta_of, delta_summatory_identity, divisor_sieve, r1_of

    a = ctx.args
    tb = divisor_sieve(int(a.x_max))
    x = np.unique(np.round(np.geomspace(10, int(a.x_max), a.points))).astype(int)
    rows = [(int(v), delta_of(float(v), tb), r1_of(float(v), tb), delta_summatory_identity(int(v), tb)) for v in x]
    return _csv_text(params, ["x", "Delta", "R1", "summatory_residual"], rows)


def _v_afe(a):
    _need(len(a.T) >= 2, "--T needs at least two values")
    _need(all(1 <= t <= 1e5 for t in a.T), "--T values must lie in [1, 1e5]")
    _need(all(np.diff(a.T) > 0), "--T values must be increasing")


def _r_afe(ctx, params):
    from .afe import afe_meansquare_curve, fit_afe_meansquare
    from .divisor import divisor_sieve

    a = ctx.args
    table = divisor_sieve(int(max(a.T) / (2 * math.pi)) + 2)
    y = afe_meansquare_curve(a.T, table, tol=a.tol)
    fit = fit_afe_meansquare(a.T, y)
    note = f"slope={fit.scaling.slope!r} A={fit.A!r} A_lower={fit.A_lower_half!r} A_upper={fit.A_upper_half!r}"
    rows = zip(a.T, y, y / np.sqrt(a.T))
    return _csv_text(params, ["T", "int_R_sq", "over_sqrt_T"], rows, [note])


def _v_cf(a):
    from .cf_engine import M_LIMIT, TERMS_LIMIT

    _need(a.m != 0 and abs(a.m) <= M_LIMIT, f"--m must be non-zero with |m| <= {M_LIMIT}")
    _need(1 <= a.terms <= TERMS_LIMIT, f"--terms must lie in [1, {TERMS_LIMIT}]")


def _r_cf(ctx, params):
    from .cf_engine import cf_expand

    a = ctx.args
    cf = cf_expand(a.m, a.terms)
    if a.format == "csv":
        rows = ((cf.m, n, q, p, qq) for n, (q, (p, qq)) in enumerate(zip(cf.quotients, cf.convergents)))
        note = f"certified_len={cf.certified_len} working_digits={cf.working_digits}"
        return _csv_text(params, ["m", "n", "a_n", "p_n", "q_n"], rows, [note])
    return "".join(line + "\n" for line in cf.json_lines()[: cf.certified_len])


def _v_lemma1(a):
    _v_cf(argparse.Namespace(m=a.m, terms=a.n_max + 1))


def _r_lemma1(ctx, params):
    from .cf_engine import cf_expand, convergent_gap_check, lemma1_ratio

    a = ctx.args
    cf = cf_expand(a.m, a.n_max + 1)
    rep = lemma1_ratio(a.m, a.n_max, cf)
    gap = convergent_gap_check(cf)
    body = {
        "m": rep.m,
        "n_max": rep.n_max,
        "sup": rep.sup,
        "argsup": rep.argsup,
        "n_admissible": rep.n_admissible,
        "rows": [{"n": n, "a_n": str(q), "ratio": r} for n, q, r in rep.rows],
        "gap_check": {"all_pass": gap.all_pass, "tightest_ratio": gap.tightest_ratio},
    }
    return _json_text(params, body)


def _v_wilton(a):
    _need(1 <= a.m <= 8, "--m must lie in [1, 8]")
    _need(all(1e2 <= x <= 1e8 for x in a.x), "--x values must lie in [1e2, 1e8]")


def _r_wilton(ctx, params):
    from .divisor import divisor_sieve
    from .wilton import frac_exp_2pi_m, transform_residual

    a = ctx.args
    table = divisor_sieve(int(max(a.x)))
    eta = frac_exp_2pi_m(a.m)
    rows = []
    for x in a.x:
        r = transform_residual(x, eta, table)
        rows.append((x, float(eta.value), r.d_x.real, r.d_x.imag, abs(r.residual), r.ratio))
    return _csv_text(params, ["x", "eta", "D_re", "D_im", "abs_residual", "ratio"], rows)


def _v_theorem1(a):
    _need(1 <= a.m <= 8, "--m must lie in [1, 8]")
    _need(all(1e3 <= x <= 1e8 for x in a.x), "--x values must lie in [1e3, 1e8]")
    _need(a.C > 0, "--C must be positive")


def _r_theorem1(ctx, params):
    from .cf_engine import cf_expand
    from .divisor import divisor_sieve
    from .wilton import envelope_scan, eta_m, theorem1_ratio, wilton_sum

    a = ctx.args
    table = divisor_sieve(int(max(a.x)))
    cf = cf_expand(2 * a.m, 40)
    rows = []
    for x in a.x:
        d = wilton_sum(x, eta_m(a.m, 30 + int(math.log10(x))), table).value
        scan = envelope_scan(x, a.m, table, cf)
        rows.append(
            (x, a.m, d.real, d.imag, abs(d), scan.envelope, scan.best_N,
             abs(d) / (x * math.log(x)), theorem1_ratio(x, a.m, table, a.C))
        )
    header = ["x", "m", "re", "im", "abs", "envelope", "envelope_N", "abs_over_xlogx", "ratio_C"]
    return _csv_text(params, header, rows)


def _v_theorem2(a):
    _v_x_max(a)
    _need(all(1 <= x <= a.x_max for x in a.x), "--x values must lie in [1, --x-max]")


def _r_theorem2(ctx, params):
    from .summatory import theorem2_decomposition

    a = ctx.args
    tb = ctx.e_table(a.x_max)
    reports = [theorem2_decomposition(x, tb).as_dict() for x in a.x]
    for r in reports:
        r["mean_minus_pi"] = r["sum_e"] / r["x"] - math.pi
    body = {"rows": reports, "max_residual_scaled": max(r["residual_scaled"] for r in reports)}
    return _json_text(params, body)


def _v_moments(a):
    _v_x_max(a)
    _need(1 <= a.k <= 9, "--k must lie in 1..9")
    _need(a.x_min >= 2 and a.x_min < a.x_max, "--x-min must satisfy 2 <= x-min < x-max")
    _need(a.points >= 3, "--points must be >= 3")
    from .summatory import MIN_GRID_DECADES

    _need(math.log10(a.x_max / a.x_min) >= MIN_GRID_DECADES, f"grid must span >= {MIN_GRID_DECADES} decades")


def _r_moments(ctx, params):
    from .summatory import moment_fit

    a = ctx.args
    tb = ctx.e_table(a.x_max)
    grid = np.unique(np.round(np.geomspace(a.x_min, a.x_max, a.points)))
    m = moment_fit(a.k, grid, tb)
    lo, hi = m.half_coeffs()
    note = (
        f"fitted_exponent={m.fitted_exponent!r} stderr={m.fitted_exponent_stderr!r} "
        f"target={m.target_exponent!r} coeff={m.fitted_coeff!r} coeff_lower={lo!r} coeff_upper={hi!r}"
    )
    return _csv_text(params, ["x", "sum", "fit", "rel_residual"], m.csv_rows(), [note])


def _v_short(a):
    _need(a.T >= 1, "--T must be >= 1")
    _need(len(a.U) >= 1 and all(u >= 0 for u in a.U), "--U values must be >= 0")
    _need(2 * a.T + max(a.U) <= X_MAX_CLI, "2T+U exceeds the supported range")


def _r_short(ctx, params):
    from .divisor import delta_short_interval_sq, divisor_sieve
    from .summatory import e_short_interval_sq

    a = ctx.args
    top = 2 * a.T + max(a.U)
    dtable = divisor_sieve(top)
    tb = ctx.e_table(float(top))
    rows = []
    for u in a.U:
        d = delta_short_interval_sq(a.T, u, dtable)
        e = e_short_interval_sq(a.T, u, tb)
        e_ratio = e / d.main if d.main else float("nan")
        rows.append((a.T, u, d.sum, d.main, d.ratio, d.in_range, e, e_ratio))
    header = ["T", "U", "delta_sum", "delta_main", "delta_ratio", "in_range", "e_sum", "e_over_delta_main"]
    return _csv_text(params, header, rows)


SUBCOMMANDS = {
    "e-table": (_v_e_table, _r_e_table, "E(t), int E and int psi|zeta|^2 at integer t"),
    "g-report": (_v_g_report, _r_g_report, "G(x) = int_0^x (E - pi) and G/x^(3/4)"),
    "delta-report": (_v_delta_report, _r_delta_report, "divisor-problem Delta(x), R1(x) and summatory residual"),
    "afe-meansquare": (_v_afe, _r_afe, "mean square of the AFE remainder"),
    "cf-expand": (_v_cf, _r_cf, "certified continued fraction of exp(pi m)"),
    "lemma1": (_v_lemma1, _r_lemma1, "partial-quotient growth ratio report (JSON)"),
    "wilton-transform": (_v_wilton, _r_wilton, "Wilton transformation residuals"),
    "theorem1-ratio": (_v_theorem1, _r_theorem1, "|D(x, exp(-2 pi m))| ratios"),
    "theorem2": (_v_theorem2, _r_theorem2, "decomposition of sum E(n) (JSON)"),
    "moments": (_v_moments, _r_moments, "power-law fit of sum E(n)^k"),
    "short-interval": (_v_short, _r_short, "short-interval mean squares of Delta and E"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zetasums", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="output format")
    common.add_argument("--cache-dir", type=Path, default=None, help="cache root (env ZETASUMS_CACHE_DIR)")
    common.add_argument("--workers", type=int, default=1, help="cap on worker threads")
    common.add_argument("--tol", type=float, default=1e-6, help="quadrature tolerance")
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for name, (_, _, helptext) in SUBCOMMANDS.items():
        s = sub.add_parser(name, parents=[common], help=helptext)
        if name in ("e-table", "g-report", "theorem2", "moments"):
            s.add_argument("--x-max", type=float, default=2e4)
        if name in ("e-table", "g-report"):
            s.add_argument("--stride", type=int, default=1)
        if name == "delta-report":
            s.add_argument("--x-max", type=float, default=1e5)
            s.add_argument("--points", type=int, default=41)
        if name == "afe-meansquare":
            s.add_argument("--T", type=_float_list, default=[250.0, 500.0, 1000.0, 2000.0, 4000.0])
        if name in ("cf-expand", "lemma1", "wilton-transform", "theorem1-ratio"):
            s.add_argument("--m", type=int, default=1)
        if name == "cf-expand":
            s.add_argument("--terms", type=int, default=40)
        if name == "lemma1":
            s.add_argument("--n-max", type=int, default=40)
        if name == "wilton-transform":
            s.add_argument("--x", type=_float_list, default=[1e3, 3e3, 1e4, 3e4])
        if name == "theorem1-ratio":
            s.add_argument("--x", type=_float_list, default=[1e3, 1e4, 1e5])
            s.add_argument("--C", type=float, default=0.01)
        if name == "theorem2":
            s.add_argument("--x", type=_float_list, default=[1e2, 1e3, 1e4])
        if name == "moments":
            s.add_argument("--k", type=int, default=2)
            s.add_argument("--x-min", type=float, default=1e3)
            s.add_argument("--points", type=int, default=25)
        if name == "short-interval":
            s.add_argument("--T", type=int, default=10000)
            s.add_argument("--U", type=_int_list, default=[10, 50])
    return p


def _default_format(name: str) -> str:
    return {"theorem2": "json", "lemma1": "json", "cf-expand": "json"}.get(name, "csv")


def _params(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out", "cache_dir"):
            continue
        out[k] = v
    return out


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.format = args.format or _default_format(args.subcommand)
    validate, execute, _ = SUBCOMMANDS[args.subcommand]
    try:
        _need(args.workers >= 1, "--workers must be >= 1")
        _need(0 < args.tol < 1, "--tol must lie in (0, 1)")
        if args.format == "json" and args.subcommand not in ("theorem2", "lemma1", "cf-expand"):
            raise UsageError(f"{args.subcommand} writes csv only")
        if args.format == "csv" and args.subcommand in ("theorem2", "lemma1"):
            raise UsageError(f"{args.subcommand} writes json only")
        validate(args)
    except (UsageError, ValueError) as exc:
        print(f"zetasums {args.subcommand}: invalid arguments: {exc}", file=sys.stderr)
        return 2
    cache = CacheHandle(args.cache_dir)
    params = _params(args)
    params["version"] = __version__
    try:
        text = execute(Context(args, cache), params)
    except (ZetaSumsError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"zetasums {args.subcommand}: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(text.encode())
    print(
        f"zetasums {__version__} {args.subcommand} params={json.dumps(params, sort_keys=True)} "
        f"numpy={np.__version__} mpmath={mpmath.__version__} cache_dir={cache.root_dir} "
        f"cache_hits={cache.hits} cache_misses={cache.misses}",
        file=sys.stderr,
    )
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
