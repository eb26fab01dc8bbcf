import json
from fractions import Fraction as Fr

import pytest

from pfqturan.errors import ConfigError
from pfqturan.scan import (
    ScanConfig,
    ScanReport,
    build_cases,
    parse_config_text,
    run_scan,
    scan_conjecture1,
    scan_conjecture2,
    scan_conjecture3,
    scan_counterexample_small_shifts,
)


def test_config_defaults_and_hash():
    cfg = ScanConfig(target="conj1")
    assert cfg.mu_range == (1, 3) and cfg.x_grid[0] == 0
    assert cfg.config_hash() == ScanConfig(target="conj1").config_hash()
    assert cfg.config_hash() != ScanConfig(target="conj1", seed=1).config_hash()


@pytest.mark.parametrize("kwargs", [
    {"target": "nope"}, {"target": "conj1", "sample_count": 0},
    {"target": "conj1", "mu_range": "1/2,2"}, {"target": "conj1", "param_range": "3,1"},
    {"target": "conj1", "seed": -1}, {"target": "conj1", "x_grid": "-1,2"},
    {"target": "conj3", "p_range": "0,1"},
    {"target": "counterexample_small_shifts", "micro_grid": "0,1/2,1"},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        ScanConfig(**kwargs)


def test_parse_config_text():
    cfg = parse_config_text("""
        # comment
        target = conj2
        sample_count = 3
        seed = 99
        param_range = 1/2, 3
        x_grid = 0, 1/3
    """)
    assert cfg.target == "conj2" and cfg.sample_count == 3 and cfg.seed == 99
    assert cfg.param_range == (Fr(1, 2), 3) and cfg.x_grid == (0, Fr(1, 3))
    with pytest.raises(ConfigError):
        parse_config_text("target = conj1\nbogus = 1")
    with pytest.raises(ConfigError):
        parse_config_text("sample_count = 3")
    with pytest.raises(ConfigError):
        parse_config_text("target = conj1\nsample_count = many")


def test_samples_are_rational_with_capped_denominators():
    cfg = ScanConfig(target="conj1", sample_count=6, max_den=16)
    for case in build_cases(cfg):
        for key in ("mu", "alpha", "beta"):
            assert Fr(case[key]).denominator <= 16
        assert Fr(case["mu"]) >= 1


def test_conjecture1_degenerate_shifts():
    cfg = ScanConfig(target="conj1", sample_count=3, shift_range="0,0")
    rep = scan_conjecture1(cfg)
    assert rep.counts == {"consistent": 3} and not rep.witnesses
    for r in rep.results:
        assert all(float(v) == 0 for _, v in r["delta_f"])


def test_conjecture1_moment_family_consistent():
    cfg = ScanConfig(target="conj1", sample_count=4, p_range="1,1", q_range="1,1",
                     param_range="1,2")
    rep = scan_conjecture1(cfg)
    assert rep.exit_code == 0 and rep.outcome == "completed"


def test_conjecture2_runs():
    rep = scan_conjecture2(ScanConfig(target="conj2", sample_count=3))
    assert len(rep.results) == 3 and rep.exit_code == 0
    assert all(r["inputs"]["split"] for r in rep.results)


def test_conjecture3_runs():
    rep = scan_conjecture3(ScanConfig(target="conj3", sample_count=2, q_range="2,2", digits=30))
    assert rep.counts.get("real_negative", 0) + rep.counts.get("violation", 0) + \
        rep.counts.get("truncation_error", 0) == 2


def test_counterexample_witnesses_have_reproduction_args():
    cfg = ScanConfig(target="counterexample_small_shifts", micro_grid="0,1/10", seeded_families=2)
    rep = scan_counterexample_small_shifts(cfg)
    assert rep.outcome == "witness_found"
    w = rep.witnesses[0]
    assert w["cli"][0] == "turanian" and "--expect-sign" in w["cli"]
    # 1|2 never produces a witness: f is a moment sequence and log-convex
    assert all(w["inputs"]["upper"] != "1" for w in rep.witnesses)


def test_counterexample_not_found_is_not_refutation():
    cfg = ScanConfig(target="counterexample_small_shifts", micro_grid="1/2,9/10", seeded_families=0)
    rep = run_scan(cfg)
    assert rep.outcome == "not found in searched region" and rep.exit_code == 0


def test_theorem_scans_exit_zero_when_holding():
    assert run_scan(ScanConfig(target="theorem3", sample_count=3, order=8)).exit_code == 0
    assert run_scan(ScanConfig(target="theorem1", sample_count=2, digits=30)).exit_code == 0


def test_determinism_and_serialisation(tmp_path):
    cfg = ScanConfig(target="conj1", sample_count=3, seed=12345)
    a, b = run_scan(cfg), run_scan(cfg)
    assert a.verdict_json() == b.verdict_json()
    body = json.loads(a.to_json())
    assert body["schema"] == 1 and body["seed"] == 12345 and "wall_clock_seconds" in body
    assert a.to_csv().splitlines()[0].startswith("index,verdict,witnesses")
    p1, p2 = a.save(tmp_path), b.save(tmp_path)
    assert p1 != p2 and p1.parent == p2.parent and p1.parent.name == cfg.config_hash()


def test_worker_pool_preserves_order():
    cfg = ScanConfig(target="conj1", sample_count=4, seed=7)
    serial = run_scan(cfg)
    pooled = run_scan(cfg.replace(workers=2))
    assert [r["index"] for r in pooled.results] == [0, 1, 2, 3]
    assert json.dumps(serial.results) == json.dumps(pooled.results)


def test_report_exit_code_for_theorem_violation():
    cfg = ScanConfig(target="theorem3", sample_count=1)
    rep = ScanReport(cfg, [{"index": 0, "inputs": {}, "verdict": "violation",
                            "witnesses": [{"kind": "theorem3"}]}])
    assert rep.exit_code == 1
    rep = ScanReport(ScanConfig(target="conj1"), [{"index": 0, "inputs": {}, "verdict": "violation",
                                                   "witnesses": [{"kind": "delta_f"}]}])
    assert rep.exit_code == 0
