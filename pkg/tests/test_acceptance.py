"""Acceptance gate: one PASS/FAIL line per criterion, at its stated tolerance and budget.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed even
when output capture is on.
"""

import time

import pytest

from hgut import corpus, harness
from hgut.grid import Distribution
from hgut.pisier import ROBUST_PISIER_C_EMP, calibrate_robust_pisier
from hgut.testers import TesterConfig
from hgut import verification as vf

SEED = 0
RUNS: dict = {}


@pytest.fixture
def say(capsys):
    def emit(num, ok, elapsed, budget, note=""):
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n[criterion {num:>2}] {status} {elapsed:7.1f}s (budget {budget}s) {note}")
    return emit


def _hard(reports):
    return vf.hard_failures(reports)


def _check(num, reports, budget, say, t0, tol=None, extra=""):
    elapsed = time.perf_counter() - t0
    bad = _hard(reports)
    if tol is not None:
        bad += [r for r in reports if r.kind != "monitored" and r.tol > tol]
    ok = not bad and elapsed < budget
    say(num, ok, elapsed, budget, f"{len(reports)} reports, {len(bad)} failing{extra}")
    assert not bad, [r.to_dict() for r in bad[:3]]
    assert elapsed < budget


def _fingerprint(reports):
    return [(r.name, r.lhs, r.rhs, r.holds) for r in reports]


def _verify_runs():
    return {
        1: lambda: vf.fourier_reports(SEED, 50),
        2: lambda: vf.subpart_reports(SEED, 50, max_cells=36),
        3: lambda: vf.orientation_identity_reports(SEED, 50),
        4: lambda: vf.lemma_reports(SEED, 20),
        5: lambda: vf.restriction_tv_reports(SEED, 50),
        6: lambda: vf.projection_bias_reports(SEED, 30),
        7: lambda: vf.robust_pisier_reports(SEED, 100),
    }


def test_c01_fourier_identities(say):
    t0 = time.perf_counter()
    reps = _verify_runs()[1]()
    RUNS[1] = _fingerprint(reps)
    assert {tuple(r.instance["shape"]) for r in reps} == set(vf.FOURIER_SHAPES)
    assert all(r.instance["count"] == 50 for r in reps)
    _check(1, reps, 10, say, t0, tol=1e-9)


def test_c02_subpart_pair_identity(say):
    t0 = time.perf_counter()
    reps = _verify_runs()[2]()
    RUNS[2] = _fingerprint(reps)
    assert len(reps) == 50
    _check(2, reps, 30, say, t0, tol=1e-8)


def test_c03_orientation_grouping_identity(say):
    t0 = time.perf_counter()
    reps = _verify_runs()[3]()
    RUNS[3] = _fingerprint(reps)
    assert len(reps) == 50
    _check(3, reps, 60, say, t0, tol=1e-8)


def test_c04_explicit_constant_lemmas(say):
    t0 = time.perf_counter()
    reps = _verify_runs()[4]()
    RUNS[4] = _fingerprint(reps)
    names = {r.name for r in reps}
    assert {"relative_difference_bound", "indegree_bound", "bias_edge_class",
            "two_uneven_arcs", "fibre_bias"} <= names
    probes = [r for r in reps if r.name == "indegree_bound"]
    assert len(probes) == 60 and sum(r.details["checked"] for r in probes) > 0
    _check(4, reps, 300, say, t0)


def test_c05_restriction_tv_bound(say):
    t0 = time.perf_counter()
    reps = _verify_runs()[5]()
    RUNS[5] = _fingerprint(reps)
    assert len(reps) == 150
    _check(5, reps, 60, say, t0, tol=1e-9)


def test_c06_projection_bias_bound(say):
    t0 = time.perf_counter()
    reps = _verify_runs()[6]()
    RUNS[6] = _fingerprint(reps)
    assert len(reps) == 30
    _check(6, reps, 30, say, t0, tol=1e-9)


def test_c07_robust_pisier_calibrated(say):
    t0 = time.perf_counter()
    frozen = calibrate_robust_pisier(vf.CALIBRATION_SEEDS)
    assert frozen <= ROBUST_PISIER_C_EMP
    reps = _verify_runs()[7]()
    RUNS[7] = _fingerprint(reps)
    held = [r.instance["seed"] for r in reps if r.kind != "monitored"]
    assert len(held) == 100 and not set(held) & set(vf.CALIBRATION_SEEDS)
    trend = reps[-1].details["mean_ratio_by_n"]
    trend_text = ", ".join(f"n={n}:{v:.3f}" for n, v in trend.items())
    _check(7, reps, 300, say, t0,
           extra=f"; calibration max {frozen:.3f}; mean ratio trend {trend_text}")


def _rate_runs():
    cfg = TesterConfig.practical()
    return {
        "8a": (corpus.make("uniform", (3, 3, 3, 3)), cfg),
        "8b": (corpus.make("uniform", (2,) * 16), cfg),
        "9a": (corpus.make("heavy_atom", (3, 3, 3), {"weight": 0.35}), cfg),
        "9b": (corpus.make("product_biased", (2,) * 16, {"k": 8, "bias": 0.5}), cfg),
    }


def _trials(key):
    p, cfg = _rate_runs()[key]
    return harness.run_trials(p, 0.25, cfg, 100, SEED, threads=1)


def test_c08_completeness(say):
    t0 = time.perf_counter()
    counts = {}
    for key in ("8a", "8b"):
        res = _trials(key)
        RUNS[key] = [(r.verdict, r.ledger) for r in res]
        counts[key] = sum(r.verdict == "accept" for r in res)
    elapsed = time.perf_counter() - t0
    ok = all(c >= 67 for c in counts.values()) and elapsed < 600
    say(8, ok, elapsed, 600, f"accepts 3^4: {counts['8a']}/100, 2^16: {counts['8b']}/100")
    assert ok


def test_c09_soundness(say):
    t0 = time.perf_counter()
    counts = {}
    for key in ("9a", "9b"):
        p, _ = _rate_runs()[key]
        assert corpus.exact_tv(p) >= 0.3
        res = _trials(key)
        RUNS[key] = [(r.verdict, r.ledger) for r in res]
        counts[key] = sum(r.verdict == "reject" for r in res)
    elapsed = time.perf_counter() - t0
    ok = all(c >= 67 for c in counts.values()) and elapsed < 900
    say(9, ok, elapsed, 900, f"rejects heavy atom: {counts['9a']}/100, "
                             f"biased product: {counts['9b']}/100")
    assert ok


def test_c10_query_scaling_monitored(say):
    t0 = time.perf_counter()
    rep = harness.sweep(ns=(16, 64, 256), eps=0.25, trials=20, seed=SEED)
    rel = ", ".join(f"n={n}:{v:.3f}" for n, v in zip(rep["n"], rep["queries_over_sqrt_n_relative"]))
    note = (f"(monitored, never fails) within factor {rep['factor']}: {rep['within_factor']}; "
            f"queries/sqrt(n) relative {rel}")
    say(10, rep["within_factor"], time.perf_counter() - t0, "-", note)
    assert len(rep["mean_queries"]) == 3


def test_c11_determinism(say):
    t0 = time.perf_counter()
    missing = [k for k in list(range(1, 8)) + ["8a", "8b", "9a", "9b"] if k not in RUNS]
    if missing:
        pytest.skip(f"criteria not run in this session: {missing}")
    diffs = []
    for num, fn in _verify_runs().items():
        if _fingerprint(fn()) != RUNS[num]:
            diffs.append(num)
    for key in ("8a", "8b", "9a", "9b"):
        if [(r.verdict, r.ledger) for r in _trials(key)] != RUNS[key]:
            diffs.append(key)
    say(11, not diffs, time.perf_counter() - t0, "-", f"reruns differing: {diffs or 'none'}")
    assert not diffs
