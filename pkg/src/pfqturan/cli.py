"""Command-line front end.

Exit codes: 0 success, 1 a theorem verification found a violation,
2 usage/configuration/hypothesis error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import mpmath as mp

from . import __version__
from .conditions import (
    esp_chain_decr,
    esp_chain_incr,
    muntz_nonneg,
    muntz_value,
    theorem2_case,
    theorem2_cases,
    weak_supermajorize,
)
from .errors import ConfigError, ConvergenceError, PfqError, TruncationError
from .hyperfn import (
    HyperParams,
    PrecisionCtx,
    eval_f_mu,
    eval_pFq,
    parse_vector,
    to_rational,
)
from .laguerre import (
    check_zeros_real_negative,
    find_zeros,
    laguerre_inequality,
    laguerre_Ln_all,
    lp_membership,
)
from .scan import TARGETS, default_digits, parse_config_text, run_scan
from .turanian import (
    ShiftSpec,
    delta_coeffs_exact,
    delta_coeffs_float_with_scale,
    delta_coeffs_proofsum,
    delta_f_with_scale,
    predicted_sign,
    verify_theorem1,
    verify_theorem3,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_DIGITS = 50


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--digits", type=int, help="working precision in decimal digits "
                   "(default: $PFQTURAN_DIGITS or 50)")
    g.add_argument("--eps", type=float, help="relative series truncation tolerance")
    g.add_argument("--order", type=int, help="coefficient order M")
    g.add_argument("--seed", type=int, help="scan seed")
    g.add_argument("--config", help="scan configuration file (key = value)")
    g.add_argument("--out", help="write output to this file instead of stdout")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _params_args(p, split=False):
    p.add_argument("--upper", required=True, help='upper parameters, e.g. "1,3/2" ("" for none)')
    p.add_argument("--lower", required=True, help="lower parameters")
    if split:
        p.add_argument("--split", help="sizes p1,q1 of the unshifted block")


def _shift_args(p):
    p.add_argument("--mu", default="0")
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="0")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="pfqturan", description="Turan-type inequalities for pFq.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    p = add("eval", "evaluate pFq(a; b; x)")
    _params_args(p)
    p.add_argument("--x", required=True)

    p = add("f-mu", "evaluate Gamma(a2+mu)/Gamma(b2+mu) pFq(a1, a2+mu; b1, b2+mu; x)")
    _params_args(p, split=True)
    p.add_argument("--mu", default="0")
    p.add_argument("--x", required=True)

    p = add("muntz", "nonnegativity of sum t^a_k - t^b_k on [0, 1]")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--t", help="also report the value at this t")
    p.add_argument("--grid", type=int, default=4097)

    p = add("majorize", "weak supermajorization: sorted prefix sums of a <= those of b")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = add("esp-chain", "elementary symmetric polynomial chain conditions")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--kind", choices=("incr", "decr", "auto"), default="auto")

    p = add("theorem2", "positivity cases A-D for the unshifted block")
    p.add_argument("--a1", required=True)
    p.add_argument("--b1", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--case", choices=("A", "B", "C", "D", "all"), default="all")

    p = add("turanian", "value and/or float coefficients of the generalized Turanian")
    _params_args(p, split=True)
    _shift_args(p)
    p.add_argument("--x", help="comma-separated evaluation points")
    p.add_argument("--coeffs", type=int, help="also print float coefficients up to this order")
    p.add_argument("--expect-sign", type=int, choices=(-1, 0, 1),
                   help="flag values whose sign contradicts this prediction")

    p = add("delta-coeffs", "exact rational coefficients of the scaled Turanian")
    _params_args(p)
    _shift_args(p)
    p.add_argument("--proofsum", action="store_true",
                   help="use the double-sum formula (requires alpha = 1)")

    p = add("verify-t1", "check 0 <= -delta_f <= f(mu)^2/4")
    _params_args(p, split=True)
    _shift_args(p)
    p.add_argument("--x", required=True)

    p = add("verify-t3", "check the coefficient and value signs forced by the ESP chains")
    _params_args(p)
    _shift_args(p)
    p.add_argument("--x", default="", help="comma-separated x >= 0")

    p = add("laguerre", "Laguerre inequality f'^2 - f f''")
    _params_args(p)
    p.add_argument("--x", required=True)

    p = add("ln", "extended Laguerre operators L_0..L_n")
    _params_args(p)
    p.add_argument("--x", required=True)
    p.add_argument("--n", type=int, default=1)

    p = add("lp-check", "Laguerre-Polya membership by integer-difference matching")
    _params_args(p)

    p = add("zeros", "zeros of an entire pFq (p <= q)")
    _params_args(p)
    p.add_argument("--radius", help="search disk radius")
    p.add_argument("--degree", type=int, help="truncation degree hint")

    p = add("scan", "seeded parameter-space scan")
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--samples", type=int, help="sample_count")
    p.add_argument("--workers", type=int)
    p.add_argument("--results-dir", help="append the report under DIR/<config-hash>/")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any configuration key")
    return parser


# -- helpers -------------------------------------------------------------------------


def _ctx(args) -> PrecisionCtx:
    digits = args.digits or default_digits() or DEFAULT_DIGITS
    # default eps matches the printed digits
    eps = args.eps if args.eps is not None else max(10.0 ** -digits, 1e-300)
    return PrecisionCtx(digits, eps)


def _num(v, ctx) -> str:
    return mp.nstr(v, ctx.digits)


def _params(args, split=False) -> HyperParams:
    return HyperParams.from_strings(args.upper, args.lower, getattr(args, "split", None) if split else None)


def _shifts(args) -> ShiftSpec:
    return ShiftSpec(to_rational(args.mu), to_rational(args.alpha), to_rational(args.beta))


def _emit(args, payload):
    """Serialize ``payload`` (a dict or list of flat dicts for csv)."""
    if isinstance(payload, str):
        text = payload
    elif args.format == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        keys = list(dict.fromkeys(k for r in rows for k in r))
        buf = io.StringIO()
        w = csv.DictWriter(buf, keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        text = buf.getvalue().rstrip("\n")
    else:
        text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- commands ------------------------------------------------------------------------


def cmd_eval(args):
    ctx = _ctx(args)
    v = eval_pFq(_params(args), to_rational(args.x), ctx)
    _emit(args, {"value": _num(v, ctx)})
    return EXIT_OK


def cmd_f_mu(args):
    ctx = _ctx(args)
    v = eval_f_mu(_params(args, True), to_rational(args.mu), to_rational(args.x), ctx)
    _emit(args, {"value": _num(v, ctx)})
    return EXIT_OK


def cmd_muntz(args):
    ctx = _ctx(args)
    a, b = parse_vector(args.a), parse_vector(args.b)
    out = muntz_nonneg(a, b, grid_size=args.grid, ctx=ctx).to_dict()
    if args.t is not None:
        out["value_at_t"] = _num(muntz_value(a, b, to_rational(args.t), ctx), ctx)
    _emit(args, out)
    return EXIT_OK


def cmd_majorize(args):
    res = weak_supermajorize(parse_vector(args.a), parse_vector(args.b))
    _emit(args, "true" if res else "false")
    return EXIT_OK


def cmd_esp_chain(args):
    a, b = parse_vector(args.a), parse_vector(args.b)
    kinds = [args.kind] if args.kind != "auto" else (
        (["decr"] if len(a) <= len(b) else []) + (["incr"] if len(a) >= len(b) else []))
    out = {}
    for kind in kinds:
        out[kind] = (esp_chain_incr if kind == "incr" else esp_chain_decr)(a, b).to_dict()
    _emit(args, out)
    return EXIT_OK


def cmd_theorem2(args):
    ctx = _ctx(args)
    a1, b1, x = parse_vector(args.a1), parse_vector(args.b1), to_rational(args.x)
    if args.case == "all":
        _emit(args, {"cases": theorem2_cases(a1, b1, x, ctx)})
    else:
        _emit(args, {"case": args.case, "holds": theorem2_case(args.case, a1, b1, x, ctx=ctx)})
    return EXIT_OK


def cmd_turanian(args):
    ctx = _ctx(args)
    params, shifts = _params(args, True), _shifts(args)
    expect = args.expect_sign
    if args.x is None and args.coeffs is None:
        raise ConfigError("give --x and/or --coeffs")
    tol_unit = 1000 * mp.mpf(ctx.eps)
    out = {"params": params.describe(), "shifts": shifts.to_dict(), "digits": ctx.digits}
    if params.split is None:
        sign, chain = predicted_sign(params)
        out["chain"], out["predicted_sign"] = chain, sign
    violations = []
    if args.x is not None:
        rows = []
        for x in parse_vector(args.x):
            d, scale = delta_f_with_scale(params, shifts, x, ctx)
            rows.append({"x": str(x), "delta_f": _num(d, ctx), "scale": mp.nstr(scale, 10)})
            if expect is not None and d * expect < -tol_unit * scale:
                violations.append({"x": str(x), "delta_f": _num(d, ctx)})
        out["values"] = rows
    if args.coeffs is not None:
        coeffs, scales = delta_coeffs_float_with_scale(params, shifts, args.coeffs, ctx)
        out["coeffs"] = [_num(c, ctx) for c in coeffs]
        if expect is not None:
            violations += [{"m": m, "delta_m": _num(c, ctx)} for m, (c, s) in enumerate(zip(coeffs, scales))
                           if c * expect < -tol_unit * s]
    if expect is not None:
        out["expected_sign"] = expect
        out["violations"] = violations
    _emit(args, out)
    return EXIT_OK


def cmd_delta_coeffs(args):
    params, shifts = _params(args), _shifts(args)
    order = args.order if args.order is not None else 30
    if args.proofsum:
        if shifts.alpha != 1:
            raise ConfigError("--proofsum needs alpha = 1")
        series = delta_coeffs_proofsum(params, shifts.mu, shifts.beta, order)
        out = {"coeffs": series.to_strings(), "method": "proofsum"}
    else:
        out = dict(delta_coeffs_exact(params, shifts, order).to_dict(), method="exact")
    _emit(args, out)
    return EXIT_OK


def cmd_verify_t1(args):
    ctx = _ctx(args)
    v = verify_theorem1(_params(args, True), _shifts(args), to_rational(args.x), ctx)
    _emit(args, dict(v.to_dict(), holds=v.holds))
    return EXIT_OK if v.holds else EXIT_VIOLATION


def cmd_verify_t3(args):
    ctx = _ctx(args)
    order = args.order if args.order is not None else 30
    v = verify_theorem3(_params(args), _shifts(args), order, parse_vector(args.x), ctx)
    _emit(args, dict(v.to_dict(), holds=v.holds))
    return EXIT_OK if v.holds else EXIT_VIOLATION


def cmd_laguerre(args):
    ctx = _ctx(args)
    v = laguerre_inequality(_params(args), to_rational(args.x), ctx)
    _emit(args, {"value": _num(v, ctx)})
    return EXIT_OK


def cmd_ln(args):
    ctx = _ctx(args)
    vals = laguerre_Ln_all(_params(args), to_rational(args.x), args.n, ctx, with_scale=True)
    _emit(args, {"x": args.x, "L": [_num(v, ctx) for v, _ in vals],
                 "scale": [mp.nstr(s, 10) for _, s in vals]})
    return EXIT_OK


def cmd_lp_check(args):
    _emit(args, lp_membership(_params(args)).to_dict())
    return EXIT_OK


def cmd_zeros(args):
    ctx = _ctx(args)
    radius = to_rational(args.radius) if args.radius is not None else None
    zs = find_zeros(_params(args), ctx, degree_hint=args.degree, radius=radius)
    ok, bad = check_zeros_real_negative(zs)
    out = zs.to_dict(digits=min(ctx.digits, 40))
    out["all_real_negative"] = ok
    if bad is not None:
        out["offending_zero"] = mp.nstr(bad, 20)
    _emit(args, out)
    return EXIT_OK


def cmd_scan(args):
    overrides = {"target": args.target, "seed": args.seed, "digits": args.digits, "eps": args.eps,
                 "order": args.order, "sample_count": args.samples, "workers": args.workers}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        overrides[key.strip().replace("-", "_")] = val.strip()
    text = ""
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    cfg = parse_config_text(text, **overrides)
    env_digits = default_digits()
    if env_digits is not None and args.digits is None and "digits" not in _config_keys(text):
        cfg = cfg.replace(digits=env_digits)
    report = run_scan(cfg)
    if args.results_dir:
        report.save(args.results_dir)
    _emit(args, report.to_csv().rstrip("\n") if args.format == "csv" else report.to_json())
    return report.exit_code


def _config_keys(text: str) -> set:
    keys = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        if "=" in line:
            keys.add(line.split("=", 1)[0].strip().replace("-", "_"))
    return keys


COMMANDS = {
    "eval": cmd_eval, "f-mu": cmd_f_mu, "muntz": cmd_muntz, "majorize": cmd_majorize,
    "esp-chain": cmd_esp_chain, "theorem2": cmd_theorem2, "turanian": cmd_turanian,
    "delta-coeffs": cmd_delta_coeffs, "verify-t1": cmd_verify_t1, "verify-t3": cmd_verify_t3,
    "laguerre": cmd_laguerre, "ln": cmd_ln, "lp-check": cmd_lp_check, "zeros": cmd_zeros,
    "scan": cmd_scan,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ConvergenceError, TruncationError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PfqError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
