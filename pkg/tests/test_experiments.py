import io
import json

import pytest

from rmpoly.certify import CertifyConfig
from rmpoly.experiments import (
    ExperimentConfig,
    exhaustive_function,
    lemma21_event_frequency,
    lemma21_indices,
    lemma21_rank,
    metadata,
    polygon_certificate_frequency,
    prime_walk_concentration,
    run_irreducibility_experiment,
    run_trials,
    summarize,
    summary_csv,
    turyn_experiment,
    wilson_interval,
    write_jsonl,
)
from rmpoly.multfunc import character_mult_function
from rmpoly.polycore import build_polynomial


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - 0.5 == pytest.approx(0.5 - lo)
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0) and 0.95 < lo < 1
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(k_range=(0,))
    with pytest.raises(ValueError):
        ExperimentConfig(k_range=(2,), A=3)
    with pytest.raises(ValueError):
        ExperimentConfig(k_range=(7,), exhaustive=True)
    cfg = ExperimentConfig(k_range=(10,), A=3, trials=5)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert "workers" not in cfg.to_dict()


def test_exhaustive_fractions():
    s = run_irreducibility_experiment(ExperimentConfig(k_range=(1, 2, 3), exhaustive=True))
    assert s.for_k(2).exact_irreducible_fraction == "1/2"
    assert s.for_k(2).T == 4
    assert s.for_k(3).T == 16 and s.for_k(3).counts["Unknown"] == 0


def test_exhaustive_n4_matches_rule():
    # irreducible iff f(2) != f(3)
    cfg = ExperimentConfig(k_range=(2,), exhaustive=True)
    for r in run_trials(cfg):
        f = exhaustive_function(4, r.trial)
        assert (r.verdict == "Irreducible") == (f(2) != f(3))


def test_summary_invariants():
    cfg = ExperimentConfig(master=3, k_range=(4, 5), trials=40, A=1)
    s = run_irreducibility_experiment(cfg)
    for ks in s.per_k:
        assert sum(ks.counts.values()) == ks.T == 40
        for v, (lo, hi) in ks.intervals.items():
            assert lo <= ks.probabilities[v] <= hi
        assert ks.lemma21_theoretical == 0.5


def test_unknown_rate_ceiling():
    s = run_irreducibility_experiment(ExperimentConfig(master=5, k_range=(4, 6, 8), trials=60))
    assert all(ks.unknown_rate < 0.05 for ks in s.per_k)


def test_records_reproducible_and_worker_invariant():
    cfg = ExperimentConfig(master=9, k_range=(4, 6), trials=30)
    a = [r.to_json() for r in run_trials(cfg)]
    b = [r.to_json() for r in run_trials(ExperimentConfig(master=9, k_range=(4, 6), trials=30, workers=3))]
    assert a == b
    assert [json.loads(x)["trial"] for x in a[:30]] == list(range(30))


def test_summary_order_independent():
    cfg = ExperimentConfig(master=9, k_range=(4,), trials=30)
    recs = run_trials(cfg)
    assert summarize(cfg, recs).to_json() == summarize(cfg, recs[::-1]).to_json()


def test_lemma21_set_and_rank():
    assert lemma21_indices(3) == [19, 21, 25]
    assert lemma21_indices(1) == [7]
    assert lemma21_rank(1024, 3) == 3
    assert lemma21_rank(1024, 1) == 1


def test_lemma21_frequency_small_and_guard():
    rep = lemma21_event_frequency(ExperimentConfig(k_range=(10,), A=1, trials=400))
    assert rep["theoretical"] == 0.5 and abs(rep["z"]) < 4
    rep = lemma21_event_frequency(ExperimentConfig(k_range=(10,), A=3, trials=0))
    assert rep["frequency"] is None and rep["T"] == 0


def test_polygon_frequency():
    out = polygon_certificate_frequency(ExperimentConfig(k_range=(2,), exhaustive=True), A_values=[1, 2])
    assert out[2][2] == 1.0 or out[2][2] >= out[2][1]
    cfg = ExperimentConfig(master=1, k_range=(6,), trials=60)
    freq = polygon_certificate_frequency(cfg, A_values=[1, 2, 3, 4, 5, 6])[6]
    vals = [freq[a] for a in sorted(freq)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    # every N = 4 polynomial from f = 1 has its edge at j = 1
    ones = polygon_certificate_frequency(ExperimentConfig(k_range=(2,), exhaustive=True), A_values=[1])
    assert ones[2][1] > 0


def test_prime_walk():
    rep = prime_walk_concentration(ExperimentConfig(k_range=(2,), trials=2000))
    assert rep["ell"] == 1 and rep["parity_ok"]
    assert rep["max_point_mass"] == pytest.approx(0.5, abs=0.05)
    rep = prime_walk_concentration(ExperimentConfig(k_range=(9,), trials=500))
    assert rep["parity_ok"] and rep["ell"] == 97 - 54


def test_turyn():
    out = turyn_experiment([2, 8], (11, 1000), 20, master=4)
    assert out["per_d"][2]["counts"]["Irreducible"] == 20
    d8 = out["per_d"][8]
    assert d8["coefficients_pm1"] and d8["multiplicative_audit"] and d8["witnesses_divide"]
    f = character_mult_function(101, 8)
    assert build_polynomial(f, 8).deg == 7
    assert [f(a) for a in range(1, 9)] == [pow(a, 50, 101) if pow(a, 50, 101) == 1 else -1 for a in range(1, 9)]
    with pytest.raises(ValueError):
        turyn_experiment([8], (3, 5), 5)
    with pytest.raises(ValueError):
        turyn_experiment([8], (24, 28), 5)


def test_jsonl_and_csv_outputs():
    cfg = ExperimentConfig(master=2, k_range=(3,), trials=5)
    s, recs = run_irreducibility_experiment(cfg, return_records=True)
    buf = io.StringIO()
    write_jsonl(buf, metadata("experiment", cfg.to_dict(), cfg.master), recs, s)
    lines = [json.loads(x) for x in buf.getvalue().splitlines()]
    assert lines[0]["type"] == "meta" and lines[0]["config"]["trials"] == 5
    assert [x["type"] for x in lines[1:-1]] == ["trial"] * 5
    assert "wall_time" not in lines[1]
    rows = summary_csv(s)
    assert rows[0] == ["k", "N", "T", "irr_count", "red_count", "unk_count", "irr_lo", "irr_hi"]
    assert rows[1][:3] == [3, 8, 5]


def test_certify_config_flows_into_trials():
    cfg = ExperimentConfig(master=2, k_range=(5,), trials=20, certify=CertifyConfig(small_factor_bound=2, modp_count=1))
    s = run_irreducibility_experiment(cfg)
    assert sum(s.for_k(5).counts.values()) == 20
