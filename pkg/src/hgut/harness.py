"""Experiment orchestration: seeded trial batches, grids, scaling sweeps, reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import corpus
from .grid import Distribution, as_shape
from .oracle import PHASES, DistributionOracle
from .testers import TesterConfig, sub_cond_uni

TRIAL_SCHEMA = "hgut-trials/1"
RESULT_SCHEMA = "hgut-results/1"
TRIAL_COLUMNS = ["trial", "verdict", "queries_total"] + [f"queries_{p}" for p in PHASES] + \
    ["depth_max", "wall_ms"]
RESULT_COLUMNS = ["experiment", "generator", "shape", "n", "m", "eps", "mode", "d_tv",
                  "accept_count", "trials", "mean_queries", "p95_queries"]


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("HGUT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class TrialResult:
    trial: int
    verdict: str
    queries_total: int
    queries_by_phase: dict
    depth_max: int
    wall_ms: float
    ledger: dict = field(default_factory=dict, repr=False)

    def row(self) -> dict:
        r = {"trial": self.trial, "verdict": self.verdict, "queries_total": self.queries_total}
        r.update({f"queries_{p}": self.queries_by_phase.get(p, 0) for p in PHASES})
        r.update(depth_max=self.depth_max, wall_ms=round(self.wall_ms, 3))
        return r


def trial_seeds(seed: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(trials)


def run_one(p: Distribution, eps: float, cfg: TesterConfig, ss: np.random.SeedSequence,
            index: int) -> TrialResult:
    oracle = DistributionOracle(p, np.random.default_rng(ss))
    t0 = time.perf_counter()
    v = sub_cond_uni(oracle, eps, cfg)
    ms = 1000 * (time.perf_counter() - t0)
    return TrialResult(index, v.decision, v.ledger["total"], v.ledger["by_phase"],
                       v.depth_max, ms, v.ledger)


def run_trials(p: Distribution, eps: float, cfg: TesterConfig, trials: int, seed: int,
               threads: Optional[int] = None) -> list[TrialResult]:
    """Independent seeded tester runs; the outcome does not depend on ``threads``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seeds = trial_seeds(seed, trials)
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        return [run_one(p, eps, cfg, s, k) for k, s in enumerate(seeds)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(run_one, p, eps, cfg, s, k) for k, s in enumerate(seeds)]
        return sorted((f.result() for f in futs), key=lambda r: r.trial)


# ---------------------------------------------------------------------------


@dataclass
class ExperimentSpec:
    name: str
    generator: dict
    eps_grid: list
    shapes: list
    trials: int
    mode: str = "practical"
    seed: int = 0
    out: Optional[str] = None
    expect: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.eps_grid or not self.shapes:
            raise ValueError("eps and shape grids must be nonempty")
        if self.generator.get("name") not in corpus.GENERATORS:
            raise KeyError(f"unknown generator {self.generator.get('name')!r}")
        if self.mode not in ("theory", "practical"):
            raise ValueError("mode must be theory or practical")
        unknown = set(self.expect) - {"min_accept_rate", "max_accept_rate"}
        if unknown:
            raise ValueError(f"unknown expectations {sorted(unknown)}")
        self.shapes = [tuple(as_shape(s).dims) for s in self.shapes]

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        if "shapes" not in d:
            ns, ms = d.pop("n_grid", None), d.pop("m_grid", [2])
            if ns is None:
                raise ValueError("give shapes or n_grid")
            d["shapes"] = [(m,) * n for n in ns for m in ms]
        d.pop("n_grid", None)
        d.pop("m_grid", None)
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def tester_config(self) -> TesterConfig:
        return TesterConfig.for_mode(self.mode, seed=self.seed, **self.config)


@dataclass
class ResultRow:
    experiment: str
    generator: str
    shape: str
    n: int
    m: int
    eps: float
    mode: str
    d_tv: float
    accept_count: int
    trials: int
    mean_queries: float
    p95_queries: float
    wall_s: float = 0.0

    def __post_init__(self):
        if self.accept_count > self.trials:
            raise ValueError("accept_count cannot exceed trials")

    @property
    def accept_rate(self) -> float:
        return self.accept_count / self.trials

    def row(self) -> dict:
        d = asdict(self)
        d.pop("wall_s")
        return d


def summarize(name: str, gen: str, shape, eps: float, mode: str, d_tv: float,
              results: list[TrialResult], wall_s: float = 0.0) -> ResultRow:
    q = np.array([r.queries_total for r in results], dtype=np.float64)
    shape = tuple(shape)
    return ResultRow(name, gen, "x".join(map(str, shape)), len(shape), max(shape), eps, mode,
                     round(d_tv, 12), sum(r.verdict == "accept" for r in results), len(results),
                     float(q.mean()), float(np.percentile(q, 95)), wall_s)


def run_experiment(spec: ExperimentSpec) -> tuple[list[ResultRow], bool]:
    """Every (shape, eps) cell, ``spec.trials`` seeded runs; returns rows and pass flag."""
    cfg = spec.tester_config()
    gen = spec.generator
    rows = []
    for ci, (dims, eps) in enumerate((d, e) for d in spec.shapes for e in spec.eps_grid):
        p = corpus.make(gen["name"], dims, gen.get("params"), int(gen.get("seed", spec.seed)))
        t0 = time.perf_counter()
        res = run_trials(p, float(eps), cfg, spec.trials, spec.seed + ci)
        rows.append(summarize(spec.name, gen["name"], dims, float(eps), spec.mode,
                              corpus.exact_tv(p), res, time.perf_counter() - t0))
    rows.sort(key=lambda r: (r.n, r.m, r.shape, r.eps))
    ok = all(_meets(r, spec.expect) for r in rows)
    if spec.out:
        write_results(rows, spec.out)
    return rows, ok


def _meets(row: ResultRow, expect: dict) -> bool:
    lo = expect.get("min_accept_rate")
    hi = expect.get("max_accept_rate")
    return (lo is None or row.accept_rate >= lo) and (hi is None or row.accept_rate <= hi)


# ---------------------------------------------------------------------------
# scaling


def sweep(ns=(16, 64, 256), eps: float = 0.25, trials: int = 20, seed: int = 0,
          generator: Optional[dict] = None, mode: str = "practical",
          config: Optional[dict] = None, factor: float = 2.5) -> dict:
    """Mean queries over a product family as n grows, against sqrt(n) growth."""
    gen = generator or {"name": "product_biased", "params": {"k": 8, "bias": 0.5}}
    spec = ExperimentSpec("sweep", gen, [eps], [(2,) * n for n in ns], trials, mode, seed,
                          config=config or {})
    rows, _ = run_experiment(spec)
    ns_ = [r.n for r in rows]
    means = [r.mean_queries for r in rows]
    normalized = [mq / math.sqrt(n) for mq, n in zip(means, ns_)]
    rel = [v / normalized[0] for v in normalized]
    return {
        "generator": gen, "eps": eps, "trials": trials, "seed": seed,
        "n": ns_, "d_tv": [r.d_tv for r in rows], "mean_queries": means,
        "accept_rate": [r.accept_rate for r in rows],
        "queries_over_sqrt_n_relative": rel,
        "within_factor": bool(max(rel) / min(rel) <= factor), "factor": factor,
        "rows": [r.row() for r in rows],
    }


# ---------------------------------------------------------------------------
# output


def _csv_text(schema: str, columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r[c] for c in columns})
    return buf.getvalue()


def _write(text: str, path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from None


def write_results(rows: list[ResultRow], path) -> None:
    """CSV or JSON by suffix; wall times go to a ``.meta.json`` sidecar."""
    path = Path(path)
    data = [r.row() for r in rows]
    if path.suffix == ".json":
        _write(json.dumps({"schema": RESULT_SCHEMA, "rows": data}, indent=1) + "\n", path)
    else:
        _write(_csv_text(RESULT_SCHEMA, RESULT_COLUMNS, data), path)
    meta = {"written": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "wall_s": {f"{r.shape}@{r.eps}": round(r.wall_s, 3) for r in rows}}
    _write(json.dumps(meta, indent=1) + "\n", str(path) + ".meta.json")


def trials_text(results: list[TrialResult], fmt: str) -> str:
    rows = [r.row() for r in results]
    if fmt == "json":
        for r, t in zip(rows, results):
            r["queries_by_phase"] = t.queries_by_phase
            r["ledger"] = t.ledger
        return json.dumps({"schema": TRIAL_SCHEMA, "rows": rows}, indent=1) + "\n"
    return _csv_text(TRIAL_SCHEMA, TRIAL_COLUMNS, rows)


# ---------------------------------------------------------------------------
# verification driver

generate_corpus = corpus.generate_corpus


def run_verification(suite: str, seed: int = 0, corpus_size: Optional[int] = None,
                     max_cells: int = 36, inject_fault: bool = False) -> tuple[list, int]:
    """JSON-ready report list and exit code (0 iff no hard assertion failed)."""
    from .verification import hard_failures, run_suite
    reports = run_suite(suite, seed, corpus_size, max_cells, inject_fault)
    return [r.to_dict() for r in reports], (1 if hard_failures(reports) else 0)
