"""Seeded parameter-space scans and their JSON reports.

A scan draws rational sample points from a scrambled Halton sequence (so a
given seed always yields the same points), evaluates a target predicate on
each, and collects verdicts plus witnesses: inputs on which a predicted sign
failed.  Every witness carries the command-line arguments that reproduce it
through a single-case subcommand.
"""
from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import hashlib
import io
import itertools
import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy.stats import qmc

from . import __version__
from .conditions import esp_chain_decr, esp_chain_incr, weak_supermajorize
from .errors import ConfigError, PfqError, TruncationError
from .hyperfn import HyperParams, PrecisionCtx, parse_vector, to_rational
from .laguerre import check_zeros_real_negative, find_zeros, laguerre_Ln_all, lp_membership
from .turanian import (
    ShiftSpec,
    delta_coeffs_float_with_scale,
    delta_f_with_scale,
    predicted_sign,
    verify_theorem1,
    verify_theorem3,
)

SCHEMA = 1
TARGETS = ("conj1", "conj2", "conj3", "counterexample_small_shifts",
           "theorem1", "theorem3", "corollary8")
THEOREM_TARGETS = ("theorem1", "theorem3", "corollary8")
MARGIN = 1000
HALTON_DIM = 32
NUM_DIGITS = 25  # digits written for floating values in reports

_TENTHS = tuple(Fraction(k, 10) for k in range(10))

# x-grids: the counterexample search stays inside (0, 5]; theorem 1 clips
# this grid per family to the convergence region.
_DEFAULT_X = {
    "conj1": "0,1/2,1,2,5",
    "conj2": "0,1/2,1,2,5",
    "counterexample_small_shifts": "1/4,1/2,1,2,5",
    "theorem1": "-49/10,-3,-2,-1/2,0,1/2,9/10",
    "theorem3": "0,1/2,1,2,5",
    "corollary8": ",".join(str(Fraction(k, 2)) for k in range(-40, 41)),
}


def _fr_pair(text) -> tuple[Fraction, Fraction]:
    vals = parse_vector(text) if isinstance(text, str) else tuple(to_rational(v) for v in text)
    if len(vals) != 2:
        raise ConfigError(f"range needs two bounds, got {text!r}")
    return vals


def _int_pair(text) -> tuple[int, int]:
    lo, hi = _fr_pair(text)
    if lo.denominator != 1 or hi.denominator != 1:
        raise ConfigError("integer range expected")
    return int(lo), int(hi)


@dataclass(frozen=True)
class ScanConfig:
    """Everything that determines a scan's verdicts.

    Ranges are closed rational intervals ``(lo, hi)``.  ``x_grid`` and
    ``families`` default per target when left empty.
    """

    target: str
    sample_count: int = 20
    seed: int = 0
    digits: int = 30
    eps: float | None = None
    order: int = 12
    p_range: tuple = (1, 2)
    q_range: tuple = (1, 2)
    param_range: tuple = (Fraction(1, 4), Fraction(4))
    mu_range: tuple = (Fraction(1), Fraction(3))
    shift_range: tuple = (Fraction(0), Fraction(2))
    x_grid: tuple = ()
    max_den: int = 64
    workers: int = 1
    families: tuple = ()
    seeded_families: int = 2
    micro_grid: tuple = _TENTHS
    zero_radius: Fraction | None = None
    ln_max: int = 4

    def __post_init__(self):
        conv = {
            "p_range": _int_pair, "q_range": _int_pair,
            "param_range": _fr_pair, "mu_range": _fr_pair, "shift_range": _fr_pair,
        }
        for name, fn in conv.items():
            object.__setattr__(self, name, fn(getattr(self, name)))
        grid = self.x_grid
        if isinstance(grid, str):
            grid = parse_vector(grid)
        if not grid:
            grid = parse_vector(_DEFAULT_X.get(self.target, "0,1/2,1,2,5"))
        object.__setattr__(self, "x_grid", tuple(to_rational(v) for v in grid))
        mg = self.micro_grid
        if isinstance(mg, str):
            mg = parse_vector(mg)
        object.__setattr__(self, "micro_grid", tuple(to_rational(v) for v in mg))
        fam = self.families
        if isinstance(fam, str):
            fam = tuple(s.strip() for s in fam.split(";") if s.strip())
        object.__setattr__(self, "families", tuple(fam))
        if self.zero_radius is not None:
            object.__setattr__(self, "zero_radius", to_rational(self.zero_radius))
        self._validate()

    def _validate(self):
        if self.target not in TARGETS:
            raise ConfigError(f"unknown target {self.target!r}; choose from {', '.join(TARGETS)}")
        if self.sample_count < 1:
            raise ConfigError("sample_count must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.digits < 25:
            raise ConfigError("digits must be >= 25")
        if self.order < 0 or self.max_den < 1 or self.workers < 1 or self.ln_max < 0:
            raise ConfigError("order, max_den, workers and ln_max must be positive")
        for name in ("p_range", "q_range", "param_range", "mu_range", "shift_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigError(f"{name} is empty")
        if self.p_range[0] < 0 or self.q_range[0] < 0:
            raise ConfigError("p and q must be nonnegative")
        if self.shift_range[0] < 0:
            raise ConfigError("shifts must be nonnegative")
        if not self.x_grid:
            raise ConfigError("x_grid is empty")
        t = self.target
        if t in ("conj1", "conj2") and self.mu_range[0] < 1:
            raise ConfigError("the conjecture concerns mu >= 1")
        if t in ("conj1", "conj2", "counterexample_small_shifts") and min(self.x_grid) < 0:
            raise ConfigError("sign predictions concern x >= 0")
        if t == "conj3" and (self.p_range[0] < 1 or self.p_range[0] >= self.q_range[1]):
            raise ConfigError("conj3 needs 1 <= p < q")
        if t in ("conj3", "corollary8", "conj1", "conj2") and self.param_range[0] <= 0:
            raise ConfigError("parameters must be positive")
        if t == "counterexample_small_shifts":
            if not self.micro_grid:
                raise ConfigError("micro_grid is empty")
            if any(v < 0 or v >= 1 for v in self.micro_grid):
                raise ConfigError("the small-shift region is 0 <= mu, alpha, beta < 1")

    @property
    def ctx(self) -> PrecisionCtx:
        eps = self.eps if self.eps is not None else 10.0 ** -(self.digits - 10)
        return PrecisionCtx(self.digits, eps)

    def to_dict(self, execution: bool = True) -> dict:
        """Plain-JSON view; ``execution=False`` drops settings that cannot change results."""
        out = {}
        for f in dataclasses.fields(self):
            if not execution and f.name in _EXECUTION_KEYS:
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = [str(e) for e in v]
            elif isinstance(v, Fraction):
                v = str(v)
            out[f.name] = v
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(execution=False), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def replace(self, **changes) -> "ScanConfig":
        return dataclasses.replace(self, **changes)


# worker count only changes scheduling; results are mapped back in order
_EXECUTION_KEYS = {"workers"}

_INT_KEYS = {"sample_count", "seed", "digits", "order", "max_den", "workers",
             "seeded_families", "ln_max"}


def parse_config_text(text: str, **overrides) -> ScanConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    fields = {f.name for f in dataclasses.fields(ScanConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in fields:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = val
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        for key in list(values):
            v = values[key]
            if key in _INT_KEYS and isinstance(v, str):
                values[key] = int(v)
            elif key == "eps" and isinstance(v, str):
                values[key] = float(v)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "target" not in values:
        raise ConfigError("target is required")
    try:
        return ScanConfig(**values)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, **overrides) -> ScanConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config_text(text, **overrides)


# -- sampling ----------------------------------------------------------------------


class _Sampler:
    """Rational points from a scrambled Halton sequence."""

    def __init__(self, seed: int, max_den: int):
        self._engine = qmc.Halton(d=HALTON_DIM, scramble=True, seed=np.random.default_rng(seed))
        self.max_den = max_den
        self._u = []

    def next_point(self):
        self._u = list(self._engine.random(1)[0])

    def u(self) -> float:
        if not self._u:
            raise ConfigError("sample needs more coordinates than the sequence provides")
        return self._u.pop(0)

    def rational(self, lo: Fraction, hi: Fraction) -> Fraction:
        v = Fraction(lo + (hi - lo) * Fraction(self.u())).limit_denominator(self.max_den)
        return min(max(v, lo), hi)

    def integer(self, lo: int, hi: int) -> int:
        return lo + min(int(self.u() * (hi - lo + 1)), hi - lo)

    def choice(self, options):
        return options[self.integer(0, len(options) - 1)]

    def vector(self, n: int, box) -> tuple:
        return tuple(self.rational(*box) for _ in range(n))


def _vec(v) -> str:
    return ",".join(str(e) for e in v)


def _num(v) -> str:
    return mp.nstr(v, NUM_DIGITS)


def _draw(cfg: ScanConfig, builder) -> list[dict]:
    sampler = _Sampler(cfg.seed, cfg.max_den)
    cases = []
    attempts = 0
    while len(cases) < cfg.sample_count:
        attempts += 1
        if attempts > 1000 * cfg.sample_count:
            raise ConfigError("the configured ranges admit too few valid samples")
        sampler.next_point()
        case = builder(sampler, cfg)
        if case is not None:
            cases.append(case)
    return cases


def _shifts(s: _Sampler, cfg: ScanConfig) -> dict:
    return {"mu": str(s.rational(*cfg.mu_range)),
            "alpha": str(s.rational(*cfg.shift_range)),
            "beta": str(s.rational(*cfg.shift_range))}


# conjecture 1: one block, decr (p <= q) or incr (p >= q), mu >= 1


def _draw_conj1(s: _Sampler, cfg: ScanConfig):
    decr = s.u() < 0.5
    p, q = s.integer(*cfg.p_range), s.integer(*cfg.q_range)
    if (decr and p > q) or (not decr and p < q) or (not decr and p == q + 1 and max(cfg.x_grid) >= 1):
        return None
    if p > q + 1:
        return None
    a, b = s.vector(p, cfg.param_range), s.vector(q, cfg.param_range)
    chain = esp_chain_decr(a, b) if decr else esp_chain_incr(a, b)
    if not chain.holds:
        return None
    return {"upper": _vec(a), "lower": _vec(b), "split": None, **_shifts(s, cfg)}


# conjecture 2: two blocks, each with p_i <= q_i and the decr chain


def _draw_conj2(s: _Sampler, cfg: ScanConfig):
    p1 = s.integer(0, 1)
    q1 = p1 + s.integer(0, 1)
    p2, q2 = s.integer(*cfg.p_range), s.integer(*cfg.q_range)
    if p2 < 1 or p2 > q2:
        return None
    a1, b1 = s.vector(p1, cfg.param_range), s.vector(q1, cfg.param_range)
    a2, b2 = s.vector(p2, cfg.param_range), s.vector(q2, cfg.param_range)
    if not (esp_chain_decr(a1, b1).holds and esp_chain_decr(a2, b2).holds):
        return None
    return {"upper": _vec(a1 + a2), "lower": _vec(b1 + b2), "split": f"{p1},{q1}",
            **_shifts(s, cfg)}


def _params(case) -> HyperParams:
    return HyperParams.from_strings(case["upper"], case["lower"], case.get("split"))


def _shift_spec(case) -> ShiftSpec:
    return ShiftSpec(to_rational(case["mu"]), to_rational(case["alpha"]), to_rational(case["beta"]))


def _turanian_cli(case, x=None, coeffs=None) -> list[str]:
    args = ["turanian", "--upper", case["upper"], "--lower", case["lower"],
            "--mu", case["mu"], "--alpha", case["alpha"], "--beta", case["beta"]]
    if case.get("split"):
        args += ["--split", case["split"]]
    if x is not None:
        args += ["--x", str(x)]
    if coeffs is not None:
        args += ["--coeffs", str(coeffs)]
    if case.get("sign") is not None:
        args += ["--expect-sign", str(case["sign"])]
    return args


def _sign_check(case, cfg: ScanConfig, sign: int, x_grid) -> dict:
    """Compare delta_f on ``x_grid`` and float coefficients to ``order`` with ``sign``."""
    params, shifts, ctx = _params(case), _shift_spec(case), cfg.ctx
    witnesses = []
    values = []
    with mp.workdps(ctx.digits + 10):
        tol_unit = MARGIN * mp.mpf(ctx.eps)
        for x in x_grid:
            d, scale = delta_f_with_scale(params, shifts, x, ctx)
            values.append([str(x), _num(d)])
            if d * sign < -tol_unit * scale:
                witnesses.append({"kind": "delta_f", "x": str(x), "value": _num(d),
                                  "scale": _num(scale),
                                  "cli": _turanian_cli(case, x=x)})
        coeffs, scales = delta_coeffs_float_with_scale(params, shifts, cfg.order, ctx)
        bad = [m for m, (c, sc) in enumerate(zip(coeffs, scales)) if c * sign < -tol_unit * sc]
        if bad:
            m = bad[0]
            witnesses.append({"kind": "coefficient", "m": m, "value": _num(coeffs[m]),
                              "scale": _num(scales[m]),
                              "cli": _turanian_cli(case, coeffs=cfg.order)})
    return {"delta_f": values, "coeff_signs": [(c > 0) - (c < 0) for c in coeffs],
            "first_bad_coeff": bad[0] if bad else None, "witnesses": witnesses}


def _eval_conj1(case, cfg: ScanConfig) -> dict:
    sign, chain = predicted_sign(_params(case))
    case = dict(case, sign=sign)
    res = _sign_check(case, cfg, sign, cfg.x_grid)
    res.update(chain=chain, predicted_sign=sign,
               verdict="violation" if res["witnesses"] else "consistent")
    return res


def _eval_conj2(case, cfg: ScanConfig) -> dict:
    # log-concavity in mu: delta_f >= 0 and nonnegative coefficients
    case = dict(case, sign=1)
    res = _sign_check(case, cfg, 1, cfg.x_grid)
    res.update(predicted_sign=1, verdict="violation" if res["witnesses"] else "consistent")
    return res


# conjecture 3: p < q, b > 0, a_k > b_k


def _draw_conj3(s: _Sampler, cfg: ScanConfig):
    p, q = s.integer(*cfg.p_range), s.integer(*cfg.q_range)
    if p < 1 or p >= q:
        return None
    b = s.vector(q, cfg.param_range)
    lo, hi = cfg.param_range
    a = tuple(b[k] + s.rational(Fraction(1, cfg.max_den), hi) for k in range(p))
    return {"upper": _vec(a), "lower": _vec(b)}


def _eval_conj3(case, cfg: ScanConfig) -> dict:
    params = _params(case)
    radius = cfg.zero_radius
    try:
        zs = find_zeros(params, cfg.ctx, radius=radius)
    except TruncationError as exc:
        return {"verdict": "truncation_error", "error": str(exc), "witnesses": []}
    ok, bad = check_zeros_real_negative(zs)
    res = {"zero_count": len(zs), "radius": _num(zs.radius),
           "zeros": [_num(mp.re(z)) if mp.im(z) == 0 else _num(z) for z in zs.zeros[:10]],
           "verdict": "real_negative" if ok else "violation", "witnesses": []}
    if not ok:
        args = ["zeros", "--upper", case["upper"], "--lower", case["lower"]]
        if radius is not None:
            args += ["--radius", str(radius)]
        res["witnesses"].append({"kind": "zero", "value": _num(bad), "cli": args})
    return res


# small-shift counterexample search: exhaustive micro-grid per family


def _seeded_family(s: _Sampler, cfg: ScanConfig):
    # p = 1, q = 2 with small parameters just inside the decr chain, where
    # log P(mu) is convex on a short initial stretch
    b = tuple(sorted(s.rational(Fraction(1, 20), Fraction(1, 2)) for _ in range(2)))
    boundary = b[0] * b[1] / (b[0] + b[1])
    a = Fraction(boundary * (1 + Fraction(s.u()) / 4)).limit_denominator(cfg.max_den)
    if not esp_chain_decr((a,), b).holds:
        return None
    return f"{a}|{_vec(b)}"


def _families(cfg: ScanConfig) -> list[str]:
    fams = list(cfg.families) or ["1|2"]
    if cfg.seeded_families:
        sampler = _Sampler(cfg.seed, cfg.max_den)
        extra = []
        for _ in range(1000 * cfg.seeded_families):
            if len(extra) == cfg.seeded_families:
                break
            sampler.next_point()
            fam = _seeded_family(sampler, cfg)
            if fam is not None and fam not in fams + extra:
                extra.append(fam)
        fams += extra
    return fams


def _counterexample_cases(cfg: ScanConfig) -> list[dict]:
    cases = []
    grid = sorted(set(cfg.micro_grid))
    for fam in _families(cfg):
        if "|" not in fam:
            raise ConfigError(f"family {fam!r} must look like 'upper|lower'")
        upper, lower = (t.strip() for t in fam.split("|", 1))
        params = HyperParams.from_strings(upper, lower)
        sign, chain = predicted_sign(params)
        if chain in ("none", "both"):
            raise ConfigError(f"family {fam!r} satisfies neither ESP chain")
        for mu in grid:
            for al, be in itertools.combinations_with_replacement(grid, 2):
                if al == 0:
                    continue  # alpha = 0 or beta = 0 makes delta_f vanish identically
                cases.append({"upper": _vec(params.upper), "lower": _vec(params.lower),
                              "mu": str(mu), "alpha": str(al), "beta": str(be),
                              "sign": sign, "chain": chain})
    return cases


def _eval_counterexample(case, cfg: ScanConfig) -> dict:
    res = _sign_check(case, cfg, case["sign"], cfg.x_grid)
    res["verdict"] = "witness" if res["witnesses"] else "consistent"
    return res


# theorem 1 families


def _majorized_pair(s: _Sampler, cfg: ScanConfig, q: int):
    b = tuple(sorted(s.vector(q, cfg.param_range)))
    a = tuple(Fraction(v * (1 - Fraction(s.u()) * 3 / 4)).limit_denominator(cfg.max_den) for v in b)
    if not weak_supermajorize(a, b):
        return None
    return a, b


_T1_FAMILIES = ("example2", "example3", "example3_qfq")


def _draw_theorem1(s: _Sampler, cfg: ScanConfig):
    fams = cfg.families or _T1_FAMILIES
    fam = s.choice(fams)
    if fam not in _T1_FAMILIES:
        raise ConfigError(f"unknown theorem1 family {fam!r}")
    q = s.integer(max(1, cfg.q_range[0]), max(1, cfg.q_range[1]))
    pair = _majorized_pair(s, cfg, q)
    if pair is None:
        return None
    a, b = pair
    if fam == "example2":
        sigma = s.rational(Fraction(-3), Fraction(3))
        upper, split = (sigma,) + a, "1,0"
    elif fam == "example3":
        extra = s.rational(*cfg.param_range)
        upper, split = a + (extra,), "0,0"
    else:
        upper, split = a, "0,0"
    shifts = s.rational(Fraction(0), cfg.mu_range[1]), s.rational(Fraction(1, cfg.max_den), cfg.shift_range[1]), \
        s.rational(Fraction(1, cfg.max_den), cfg.shift_range[1])
    return {"family": fam, "upper": _vec(upper), "lower": _vec(b), "split": split,
            "mu": str(shifts[0]), "alpha": str(shifts[1]), "beta": str(shifts[2])}


def theorem1_grid(params: HyperParams, x_grid) -> list:
    """The part of ``x_grid`` inside the convergence region (``|x| < 1`` when p = q+1)."""
    if params.p == params.q + 1:
        return [x for x in x_grid if abs(x) < 1]
    return list(x_grid)


def _eval_theorem1(case, cfg: ScanConfig) -> dict:
    params, shifts = _params(case), _shift_spec(case)
    rows, witnesses = [], []
    for x in theorem1_grid(params, cfg.x_grid):
        v = verify_theorem1(params, shifts, x, cfg.ctx)
        rows.append([str(x), _num(v.minus_delta), None if v.ratio is None else _num(v.ratio),
                     v.lower_holds, v.upper_holds])
        if not v.holds:
            witnesses.append({"kind": "theorem1", "x": str(x), "value": _num(v.minus_delta),
                              "cli": ["verify-t1", "--upper", case["upper"], "--lower", case["lower"],
                                      "--split", case["split"], "--mu", case["mu"],
                                      "--alpha", case["alpha"], "--beta", case["beta"],
                                      "--x", str(x)]})
    return {"rows": rows, "verdict": "violation" if witnesses else "holds", "witnesses": witnesses}


# theorem 3: exact coefficients plus grid signs


def _draw_theorem3(s: _Sampler, cfg: ScanConfig):
    decr = s.u() < 0.5
    p, q = s.integer(*cfg.p_range), s.integer(*cfg.q_range)
    if (decr and p > q) or (not decr and p < q) or p > q + 1:
        return None
    a, b = s.vector(p, cfg.param_range), s.vector(q, cfg.param_range)
    chain = esp_chain_decr(a, b) if decr else esp_chain_incr(a, b)
    if not chain.holds:
        return None
    sign, name = predicted_sign(HyperParams(a, b))
    if name in ("none", "both"):
        return None
    mu = s.choice((Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)))
    beta = s.choice((Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)))
    alpha = s.choice(tuple(k for k in (1, 2, 3) if k <= beta + 1))
    return {"upper": _vec(a), "lower": _vec(b), "mu": str(mu), "alpha": str(alpha),
            "beta": str(beta)}


def _eval_theorem3(case, cfg: ScanConfig) -> dict:
    params, shifts = _params(case), _shift_spec(case)
    grid = [x for x in cfg.x_grid if x >= 0 and (params.p <= params.q or x < 1)]
    v = verify_theorem3(params, shifts, cfg.order, grid, cfg.ctx)
    res = {"chain": v.chain, "predicted_sign": v.predicted_sign, "coeffs_hold": v.coeffs_hold,
           "first_bad_coeff": v.first_bad_coeff, "grid_hold": v.grid_hold,
           "verdict": "holds" if v.holds else "violation", "witnesses": []}
    if not v.holds:
        res["witnesses"].append({
            "kind": "theorem3", "first_bad_coeff": v.first_bad_coeff, "bad_x": [str(x) for x in v.bad_x],
            "cli": ["verify-t3", "--upper", case["upper"], "--lower", case["lower"], "--mu", case["mu"],
                    "--alpha", case["alpha"], "--beta", case["beta"], "--order", str(cfg.order),
                    "--x", _vec(grid)]})
    return res


# corollary 8: L_n >= 0 for Laguerre-Polya members


def _draw_corollary8(s: _Sampler, cfg: ScanConfig):
    q = s.integer(*cfg.q_range)
    p = s.integer(cfg.p_range[0], min(cfg.p_range[1], q))
    if q < 1 or p > q:
        return None
    b = s.vector(q, cfg.param_range)
    order = sorted(range(q), key=lambda _: s.u())
    a = tuple(b[order[k]] + s.integer(0, 3) for k in range(p))
    if not lp_membership(HyperParams(a, b)).member:
        return None
    return {"upper": _vec(a), "lower": _vec(b)}


def _eval_corollary8(case, cfg: ScanConfig) -> dict:
    params = _params(case)
    ctx = cfg.ctx
    worst = None
    witnesses = []
    with mp.workdps(ctx.digits + 10):
        tol_unit = MARGIN * mp.mpf(ctx.eps)
    for x in cfg.x_grid:
        vals = laguerre_Ln_all(params, x, cfg.ln_max, ctx, with_scale=True)
        for n, (v, scale) in enumerate(vals):
            if worst is None or v < worst[2]:
                worst = (str(x), n, v)
            if v < -tol_unit * scale:
                witnesses.append({"kind": "L_n", "n": n, "x": str(x), "value": _num(v),
                                  "scale": _num(scale),
                                  "cli": ["ln", "--upper", case["upper"], "--lower", case["lower"],
                                          "--x", str(x), "--n", str(n)]})
    return {"min_L": {"x": worst[0], "n": worst[1], "value": _num(worst[2])},
            "verdict": "violation" if witnesses else "holds", "witnesses": witnesses}


_BUILDERS = {
    "conj1": (_draw_conj1, _eval_conj1),
    "conj2": (_draw_conj2, _eval_conj2),
    "conj3": (_draw_conj3, _eval_conj3),
    "theorem1": (_draw_theorem1, _eval_theorem1),
    "theorem3": (_draw_theorem3, _eval_theorem3),
    "corollary8": (_draw_corollary8, _eval_corollary8),
    "counterexample_small_shifts": (None, _eval_counterexample),
}


def build_cases(cfg: ScanConfig) -> list[dict]:
    """The deterministic list of sample inputs for ``cfg``."""
    if cfg.target == "counterexample_small_shifts":
        return _counterexample_cases(cfg)
    return _draw(cfg, _BUILDERS[cfg.target][0])


def _evaluate(job):
    index, case, cfg = job
    evaluator = _BUILDERS[cfg.target][1]
    try:
        res = evaluator(case, cfg)
    except PfqError as exc:
        res = {"verdict": "numeric_failure", "error": f"{type(exc).__name__}: {exc}", "witnesses": []}
    return {"index": index, "inputs": {k: v for k, v in case.items() if v is not None}, **res}


# -- reports -------------------------------------------------------------------------


@dataclass
class ScanReport:
    config: ScanConfig
    results: list
    wall_clock: float = 0.0
    version: str = __version__
    witnesses: list = field(init=False)

    def __post_init__(self):
        self.witnesses = [dict(w, index=r["index"], inputs=r["inputs"])
                          for r in self.results for w in r.get("witnesses", ())]

    @property
    def counts(self) -> dict:
        out = {}
        for r in self.results:
            out[r["verdict"]] = out.get(r["verdict"], 0) + 1
        return dict(sorted(out.items()))

    @property
    def outcome(self) -> str:
        t = self.config.target
        if t == "counterexample_small_shifts":
            return "witness_found" if self.witnesses else "not found in searched region"
        if t in THEOREM_TARGETS:
            return "violation" if self.witnesses else "no_violation"
        return "completed"

    @property
    def exit_code(self) -> int:
        """1 only when a theorem-verification scan found a violation."""
        return 1 if self.config.target in THEOREM_TARGETS and self.witnesses else 0

    def verdict_body(self) -> dict:
        """The deterministic part of the report (everything except timing)."""
        return {
            "schema": SCHEMA,
            "tool": "pfqturan",
            "version": self.version,
            "config": self.config.to_dict(execution=False),
            "config_hash": self.config.config_hash(),
            "seed": self.config.seed,
            "results": self.results,
            "witnesses": self.witnesses,
            "summary": self._summary(),
        }

    def _summary(self) -> dict:
        out = {"samples": len(self.results), "counts": self.counts,
               "witnesses": len(self.witnesses), "outcome": self.outcome}
        if self.config.target == "theorem1":
            # observed sharpness of the quarter bound; recorded, never asserted
            ratios = [mp.mpf(r[2]) for res in self.results for r in res.get("rows", ())
                      if r[2] is not None and r[4] is not None]
            out["max_ratio"] = _num(max(ratios)) if ratios else None
        return out

    def to_dict(self) -> dict:
        return {**self.verdict_body(), "workers": self.config.workers, "wall_clock_seconds": round(self.wall_clock, 3)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def verdict_json(self) -> str:
        return json.dumps(self.verdict_body(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        """One row per sample: index, verdict, witness count and the inputs."""
        keys = sorted({k for r in self.results for k in r["inputs"]})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "verdict", "witnesses", *keys])
        for r in self.results:
            w.writerow([r["index"], r["verdict"], len(r.get("witnesses", ())),
                        *(r["inputs"].get(k, "") for k in keys)])
        return buf.getvalue()

    def save(self, results_dir) -> Path:
        """Write into ``results_dir/<config-hash>/`` without overwriting earlier runs."""
        folder = Path(results_dir) / self.config.config_hash()
        folder.mkdir(parents=True, exist_ok=True)
        n = len(list(folder.glob("run-*.json")))
        while True:
            path = folder / f"run-{n:04d}.json"
            try:
                with open(path, "x") as fh:
                    fh.write(self.to_json())
                return path
            except FileExistsError:
                n += 1


def run_scan(cfg: ScanConfig) -> ScanReport:
    """Draw the samples for ``cfg.target``, evaluate them and build the report."""
    start = time.perf_counter()
    cases = build_cases(cfg)
    jobs = [(i, c, cfg) for i, c in enumerate(cases)]
    if cfg.workers > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        results = [_evaluate(j) for j in jobs]
    return ScanReport(cfg, results, time.perf_counter() - start)


def scan_conjecture1(cfg: ScanConfig) -> ScanReport:
    return run_scan(cfg.replace(target="conj1"))


def scan_conjecture2(cfg: ScanConfig) -> ScanReport:
    return run_scan(cfg.replace(target="conj2"))


def scan_conjecture3(cfg: ScanConfig) -> ScanReport:
    return run_scan(cfg.replace(target="conj3"))


def scan_counterexample_small_shifts(cfg: ScanConfig) -> ScanReport:
    return run_scan(cfg.replace(target="counterexample_small_shifts"))


def default_digits() -> int | None:
    """Digits from ``PFQTURAN_DIGITS``, if set."""
    raw = os.environ.get("PFQTURAN_DIGITS")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError("PFQTURAN_DIGITS must be an integer") from None
