"""Acceptance suite: one test per criterion, each printing a DETAIL line.

The terminal summary (see conftest) lists PASS/FAIL per criterion.
"""
import io
import itertools
import json
import random
import time
from contextlib import redirect_stdout
from fractions import Fraction as Fr

import mpmath as mp
import pytest

from pfqturan.cli import main as cli_main
from pfqturan.conditions import (
    MuntzTag,
    esp_chain_decr,
    esp_chain_incr,
    muntz_nonneg,
    rpq_eval,
    weak_supermajorize,
)
from pfqturan.hyperfn import HyperParams, PrecisionCtx, derivative_pFq, eval_pFq
from pfqturan.laguerre import check_zeros_real_negative, find_zeros, laguerre_Ln_all, lp_membership
from pfqturan.scan import ScanConfig, run_scan
from pfqturan.turanian import (
    ShiftSpec,
    delta_coeffs_exact,
    delta_coeffs_proofsum,
    eval_f_mu,
    verify_theorem1,
)

CTX50 = PrecisionCtx(50, 1e-30)


def rat(rng, lo=Fr(1, 64), hi=Fr(4), den=64):
    n_lo, n_hi = int(lo * den), int(hi * den)
    return Fr(rng.randint(max(n_lo, 1), n_hi), den)


def vec(rng, n, **kw):
    return tuple(rat(rng, **kw) for _ in range(n))


def detail(text):
    print(f"DETAIL: {text}")


# 1 -------------------------------------------------------------------------------


def _theorem3_cases(seed, chain):
    rng = random.Random(seed)
    cases = []
    grid = (Fr(0), Fr(1, 2), Fr(1), Fr(2))
    while len(cases) < 100:
        q = rng.choice((1, 2, 3))
        if chain == "decr":
            p = rng.randint(1, q)
        else:
            q = rng.choice((1, 2))
            p = rng.randint(q, 3)
        a, b = vec(rng, p), vec(rng, q)
        ok = esp_chain_decr(a, b).holds if chain == "decr" else esp_chain_incr(a, b).holds
        if not ok:
            continue
        mu, beta = rng.choice(grid), rng.choice(grid)
        alpha = rng.choice([k for k in (1, 2, 3) if k <= beta + 1])
        cases.append((HyperParams(a, b), ShiftSpec(mu, alpha, beta)))
    return cases


@pytest.mark.criterion(1, "exact coefficient signs under the ESP chains, m <= 30")
def test_criterion1_exact_theorem3_suite():
    start = time.perf_counter()
    bad = []
    for chain, sign in (("decr", 1), ("incr", -1)):
        for params, shifts in _theorem3_cases(20261016 + sign, chain):
            coeffs = delta_coeffs_exact(params, shifts, 30).coeffs
            if any(c * sign < 0 for c in coeffs):
                bad.append((chain, params, shifts))
    elapsed = time.perf_counter() - start
    detail(f"200 parameter sets (100 decr, 100 incr), {len(bad)} with a wrong-sign coefficient, {elapsed:.1f}s")
    assert not bad, bad[:3]
    assert elapsed < 120


# 2 -------------------------------------------------------------------------------


@pytest.mark.criterion(2, "Cauchy-product coefficients equal the double-sum formula")
def test_criterion2_oracle_equivalence():
    rng = random.Random(2)
    n = 0
    mismatches = 0
    while n < 50:
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        a, b = vec(rng, p), vec(rng, q)
        mu = rat(rng, lo=Fr(0), hi=Fr(3), den=8) if rng.random() < 0.8 else Fr(0)
        beta = rat(rng, lo=Fr(0), hi=Fr(3), den=8) if rng.random() < 0.8 else Fr(0)
        params = HyperParams(a, b)
        exact = delta_coeffs_exact(params, ShiftSpec(mu, 1, beta), 30).coeffs.coeffs
        oracle = delta_coeffs_proofsum(params, mu, beta, 30).coeffs
        mismatches += exact != oracle
        n += 1
    detail(f"{n} cases, {mismatches} mismatches")
    assert mismatches == 0


# 3 -------------------------------------------------------------------------------

_X_QFQ = (Fr(-49, 10), Fr(-3), Fr(-1), Fr(0), Fr(1, 2), Fr(9, 10))
_X_Q1FQ = (Fr(-9, 10), Fr(-1, 2), Fr(0), Fr(1, 2), Fr(9, 10))


def _majorized(rng, q):
    while True:
        a, b = vec(rng, q, hi=Fr(3)), vec(rng, q, hi=Fr(3))
        if weak_supermajorize(a, b):
            return a, b


def _theorem1_cases(rng, count):
    fams = ("example2", "example3_qfq", "example3")
    for i in range(count):
        fam = fams[i % 3]
        q = rng.choice((1, 2))
        a, b = _majorized(rng, q)
        if fam == "example2":
            sigma = Fr(rng.randint(-192, 192), 64)
            params, grid, upper = HyperParams((sigma,) + a, b, (1, 0)), _X_Q1FQ, True
        elif fam == "example3_qfq":
            params, grid, upper = HyperParams(a, b, (0, 0)), _X_QFQ, True
        else:
            params, grid, upper = HyperParams(a + (rat(rng, hi=Fr(3)),), b, (0, 0)), _X_Q1FQ, False
        shifts = ShiftSpec(rat(rng, lo=Fr(0), hi=Fr(3)), rat(rng, hi=Fr(3)), rat(rng, hi=Fr(3)))
        yield fam, params, shifts, grid, upper


@pytest.mark.criterion(3, "two-sided Turanian bound on the worked example families")
def test_criterion3_theorem1_suite():
    rng = random.Random(3)
    checks = 0
    failures = []
    worst_ratio = 0
    for fam, params, shifts, grid, upper in _theorem1_cases(rng, 200):
        for x in grid:
            v = verify_theorem1(params, shifts, x, CTX50)
            md, sq = v.minus_delta, v.f_mu_squared
            checks += 1
            if md < 0:
                failures.append(("lower", fam, params, shifts, x, md))
            if upper:
                if md > sq / 4 + mp.mpf("1e-20"):
                    failures.append(("upper", fam, params, shifts, x, md - sq / 4))
                worst_ratio = max(worst_ratio, md / sq)
    detail(f"200 triples, {checks} (triple, x) checks, {len(failures)} failures, "
           f"max -delta/f^2 = {mp.nstr(worst_ratio, 6)}")
    assert not failures, failures[:3]


# 4 -------------------------------------------------------------------------------


def _lemma5_pair(rng, chain):
    # chain incr: p >= q with a q-subset a' of a such that b is weakly supermajorized by a'
    small = rng.randint(1, 3)
    extra = rng.randint(0, 2)
    while True:
        x, y = vec(rng, small), vec(rng, small)
        if weak_supermajorize(x, y):
            break
    others = vec(rng, extra)
    if chain == "incr":
        return x + others, y  # a = a' + extra, b
    return y, x + others  # mirror: a, b = b' + extra


@pytest.mark.criterion(4, "weak supermajorization implies the ESP chains and Muntz nonnegativity")
def test_criterion4_lemma5():
    rng = random.Random(4)
    chain_fail = 0
    for i in range(1000):
        chain = "incr" if i % 2 == 0 else "decr"
        a, b = _lemma5_pair(rng, chain)
        if chain == "incr":
            assert any(weak_supermajorize(s, b) for s in itertools.combinations(a, len(b)))
            chain_fail += not esp_chain_incr(a, b).holds
        else:
            assert any(weak_supermajorize(s, a) for s in itertools.combinations(b, len(a)))
            chain_fail += not esp_chain_decr(a, b).holds
    violations = 0
    tags = {}
    n = 0
    while n < 1000:
        k = rng.randint(1, 3)
        a, b = vec(rng, k), vec(rng, k)
        if not weak_supermajorize(a, b):
            continue
        n += 1
        tag = muntz_nonneg(a, b, ctx=CTX50).tag
        tags[tag.value] = tags.get(tag.value, 0) + 1
        violations += tag is MuntzTag.VIOLATION
    detail(f"1000 majorized pairs: {chain_fail} chain failures; 1000 Muntz checks: {tags}")
    assert chain_fail == 0 and violations == 0


# 5 -------------------------------------------------------------------------------


@pytest.mark.criterion(5, "ESP chains imply monotone R_pq on a log grid")
def test_criterion5_lemma3():
    rng = random.Random(5)
    worst = mp.mpf(0)
    n = 0
    with mp.workdps(60):
        xs = [mp.mpf(10) ** (mp.mpf(-3) + mp.mpf(6) * k / 60) for k in range(61)]
        while n < 200:
            chain = "incr" if n % 2 == 0 else "decr"
            q = rng.randint(1, 3)
            p = q + rng.randint(0, 2) if chain == "incr" else max(1, q - rng.randint(0, 2))
            a, b = vec(rng, p), vec(rng, q)
            verdict = esp_chain_incr(a, b) if chain == "incr" else esp_chain_decr(a, b)
            if not verdict.holds:
                continue
            n += 1
            sign = 1 if chain == "incr" else -1
            for x in xs:
                slack = sign * (rpq_eval(a, b, x + x / 100, CTX50) - rpq_eval(a, b, x, CTX50))
                worst = min(worst, slack)
    detail(f"200 chains, 61-point grid on [1e-3, 1e3], minimum slack {mp.nstr(worst, 5)}")
    assert worst >= -mp.mpf(10) ** -30


# 6 -------------------------------------------------------------------------------


def _lp_cases(rng):
    out = []
    while len(out) < 20:
        equal = len(out) % 2 == 1
        q = rng.randint(1, 2)
        p = q if equal else rng.randint(0, q - 1)
        b = vec(rng, q, hi=Fr(3), den=16)
        perm = rng.sample(range(q), q)
        a = tuple(b[perm[k]] + rng.randint(0, 3) for k in range(p))
        params = HyperParams(a, b)
        if lp_membership(params).member:
            out.append(params)
    return out


@pytest.mark.criterion(6, "extended Laguerre inequalities L_n >= 0 for Laguerre-Polya members")
def test_criterion6_corollary8():
    # eps is tightened below the default so series truncation stays below the
    # cancellation floor: the L_n terms reach ~1e22 near x = 20 while the
    # tolerance is absolute
    ctx = PrecisionCtx(50, 1e-55)
    rng = random.Random(6)
    start = time.perf_counter()
    worst = None
    xs = [Fr(k, 2) for k in range(-40, 41)]
    for params in _lp_cases(rng):
        for x in xs:
            for n, v in enumerate(laguerre_Ln_all(params, x, 4, ctx)):
                if worst is None or v < worst[0]:
                    worst = (v, params.upper, params.lower, x, n)
    elapsed = time.perf_counter() - start
    detail(f"20 members x 81 points x n<=4: minimum L_n = {mp.nstr(worst[0], 5)} "
           f"at a={[str(v) for v in worst[1]]}, b={[str(v) for v in worst[2]]}, x={worst[3]}, n={worst[4]}; "
           f"{elapsed:.0f}s")
    assert worst[0] >= -mp.mpf(10) ** -25
    assert elapsed < 300


# 7 -------------------------------------------------------------------------------


@pytest.mark.criterion(7, "known closed-form values at 40 digits")
def test_criterion7_known_values():
    ctx = PrecisionCtx(40, 1e-35)
    errs = []
    with mp.workdps(60):
        cases = [
            (HyperParams((), ()), 1, mp.e),
            (HyperParams((1,), ()), Fr(1, 2), mp.mpf(2)),
        ]
        for x in (1, -1, Fr(1, 3)):
            xm = mp.mpf(x.numerator if isinstance(x, Fr) else x) / (x.denominator if isinstance(x, Fr) else 1)
            cases.append((HyperParams((1,), (2,)), x, mp.expm1(xm) / xm))
        for params, x, ref in cases:
            errs.append(abs(eval_pFq(params, x, ctx) - ref) / abs(ref))
        residual = abs(eval_pFq(HyperParams((2,), (1,)), -1, ctx))
    detail(f"max relative error {mp.nstr(max(errs), 3)}, residual at -1: {mp.nstr(residual, 3)}")
    assert max(errs) < 1e-30
    assert residual < 1e-35


# 8 -------------------------------------------------------------------------------

_LP_ZERO_CASES = [
    ((), (1,)), ((3,), (1, 2)), ((Fr(5, 2),), (Fr(1, 2), Fr(3, 2))),
    ((2,), (1,)), ((Fr(13, 3),), (Fr(4, 3),)), ((4, Fr(7, 2)), (1, Fr(1, 2))), ((5, 3), (1, 1)),
]


@pytest.mark.criterion(8, "zero finder: Bessel oracle, real negative zeros, zero counts")
def test_criterion8_zero_finder():
    zs = find_zeros(HyperParams((), (1,)), CTX50)
    with mp.workdps(60):
        ref = -mp.besseljzero(0, 1) ** 2 / 4
        bessel_err = abs(zs.zeros[0] - ref) / abs(ref)
    assert bessel_err < 1e-20
    summary = []
    for upper, lower in _LP_ZERO_CASES:
        params = HyperParams(upper, lower)
        verdict = lp_membership(params)
        assert verdict.member
        zs = find_zeros(params, CTX50)
        ok, bad = check_zeros_real_negative(zs)
        assert ok, (upper, lower, bad)
        for z, res in zip(zs.zeros, zs.residuals):
            x = mp.re(z)
            with mp.workdps(60):
                slope = abs(derivative_pFq(params, x, 1, CTX50))
                assert res < mp.mpf(10) ** -30 * max(1, slope * abs(x))
        if params.p == params.q:
            expected = sum(n for _, _, n in verdict.matching)
            assert len(zs) == expected, (upper, lower, len(zs), expected)
        summary.append(len(zs))
    detail(f"Bessel relative error {mp.nstr(bessel_err, 3)}; zero counts {summary}")


# 9 -------------------------------------------------------------------------------


def _cli_json(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(argv)
    return code, json.loads(buf.getvalue())


@pytest.mark.criterion(9, "small-shift counterexamples found and re-verified at doubled precision")
def test_criterion9_counterexample_scan():
    cfg = ScanConfig(target="counterexample_small_shifts")
    report = run_scan(cfg)
    fams = sorted({(r["inputs"]["upper"], r["inputs"]["lower"]) for r in report.results})
    assert ("1", "2") in fams and len(fams) == 3
    assert report.witnesses, "no witness in the searched region"
    confirmed = 0
    for w in report.witnesses:
        argv = w["cli"] + ["--digits", str(2 * cfg.digits)]
        code, out = _cli_json(argv)
        assert code == 0
        if out["violations"]:
            confirmed += 1
    w = report.witnesses[0]
    detail(f"{len(report.witnesses)} witnesses over {len(report.results)} grid points in families {fams}; "
           f"{confirmed} re-verified at {2 * cfg.digits} digits; first: a={w['inputs']['upper']} "
           f"b={w['inputs']['lower']} mu={w['inputs']['mu']} alpha={w['inputs']['alpha']} "
           f"beta={w['inputs']['beta']} {w['kind']}={w['value']}")
    assert confirmed == len(report.witnesses)


# 10 ------------------------------------------------------------------------------


@pytest.mark.criterion(10, "re-running a scan with the same seed reproduces the verdicts byte for byte")
def test_criterion10_determinism():
    configs = [
        ScanConfig(target="conj1", sample_count=5, seed=2 ** 63 + 11),
        ScanConfig(target="theorem3", sample_count=5, seed=77, order=10),
        ScanConfig(target="conj3", sample_count=2, seed=5, q_range="2,2"),
        ScanConfig(target="counterexample_small_shifts", micro_grid="0,1/10,1/5", seed=9),
    ]
    for cfg in configs:
        first = run_scan(cfg).verdict_json()
        assert run_scan(cfg).verdict_json() == first
        assert run_scan(cfg.replace(workers=2)).verdict_json() == first
    detail(f"{len(configs)} scan targets re-run serially and with 2 workers: identical")
