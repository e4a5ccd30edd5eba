"""Seeded verification suites over the analytic side of the package.

Each suite returns a list of ``VerificationReport``.  Reports of kind
"monitored" are informational; every other report is a hard assertion.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional

import numpy as np

from . import fourier as fr
from .edges import (
    SUB_U,
    Orientation,
    build_orientation,
    check_indegree_bound,
    orientation_violations,
    relative_difference_sides,
    reverse_subgraph,
)
from .grid import Distribution, in_marginal_band, verify_projection_bias_bound, \
    verify_restriction_tv_bound
from .pisier import (
    BERNSTEIN_C_EMP,
    ROBUST_PISIER_C_EMP,
    VerificationReport,
    bernstein_instance,
    check_bernstein_chain,
    check_bias_edge_class,
    check_degree_scale_chain,
    check_fibre_bias,
    check_orientation_identity,
    check_subpart_pair_identity,
    check_two_uneven_arcs,
    robust_pisier_ratios,
)

SUITES = ("identities", "inequalities", "lemmas", "all")
FOURIER_SHAPES = [(3, 2), (2, 2, 2), (3, 3), (4, 3)]
PAIR_SHAPES = [(2, 2), (3, 2), (3, 3), (2, 2, 2), (4, 3), (3, 2, 2), (2, 2, 2, 2), (3, 3, 2),
               (4, 3, 3)]
TV_SHAPES = [(2, 2), (3, 2), (2, 2, 2), (3, 3), (2, 3, 2), (2, 2, 2, 2)]
BAND_SHAPES = [(2, 2), (3, 2), (3, 3), (2, 2, 2), (3, 2, 3)]
LEMMA_SHAPES = [(2, 2, 2), (3, 3), (2, 3, 2)]
CALIBRATION_SEEDS = range(100)


def _rng(tag: int, seed: int, k: int = 0) -> np.random.Generator:
    return np.random.default_rng([tag, seed, k])


def _cfield(rng, dims, mean_zero=False) -> np.ndarray:
    f = rng.normal(size=dims) + 1j * rng.normal(size=dims)
    return f - f.mean() if mean_zero else f


def _agg(name, errs, tol, **instance) -> VerificationReport:
    worst = float(max(errs)) if errs else 0.0
    return VerificationReport(name, worst, tol, worst <= tol, tol, "identity",
                              dict(instance, count=len(errs)))


# ---------------------------------------------------------------------------
# identities


def fourier_reports(seed: int = 0, count: int = 50, shapes=FOURIER_SHAPES,
                    tol: float = 1e-9) -> list[VerificationReport]:
    out = []
    for dims in shapes:
        errs: dict[str, list] = {k: [] for k in
                                 ("round_trip", "parseval", "brute_dft", "laplacian",
                                  "noise_operator", "two_point")}
        for k in range(count):
            rng = _rng(11, seed, k)
            f = _cfield(rng, dims)
            F = fr.dft(f)
            errs["round_trip"].append(np.abs(fr.idft(F) - f).max())
            errs["parseval"].append(abs(np.mean(np.abs(f) ** 2) - np.sum(np.abs(F) ** 2)))
            errs["brute_dft"].append(np.abs(fr.dft_bruteforce(f) - F).max())
            errs["laplacian"].append(max(np.abs(fr.laplacian(f, i)
                                                - fr.laplacian_spectral(f, i)).max()
                                         for i in range(len(dims))))
            rho = float(rng.uniform())
            errs["noise_operator"].append(
                np.abs(fr.noise_operator(f, rho) - fr.noise_operator_spectral(f, rho)).max())
            t = float(rng.uniform())
            x = tuple(int(rng.integers(m)) for m in dims)
            y = tuple(int(rng.integers(m)) for m in dims)
            table = fr.two_point_table(f, t)
            direct = fr.two_point_smooth(f, t, x, y)
            errs["two_point"].append(max(abs(direct - fr.two_point_smooth_spectral(f, t, x, y)),
                                         abs(direct - table[x + y])))
        for name, e in errs.items():
            out.append(_agg(f"fourier_{name}", e, tol, shape=list(dims), seed=seed))
    return out


def subpart_reports(seed: int = 0, count: int = 50, max_cells: int = 36,
                    tol: float = 1e-8) -> list[VerificationReport]:
    shapes = [d for d in PAIR_SHAPES if math.prod(d) <= max_cells]
    out = []
    for k in range(count):
        rng = _rng(13, seed, k)
        dims = shapes[k % len(shapes)]
        f, g = _cfield(rng, dims, mean_zero=True), _cfield(rng, dims)
        t = float(rng.uniform(0.05, 0.95))
        gamma = float(rng.choice([0.0, 0.5, 1.0, 2.0]))
        out.append(check_subpart_pair_identity(f, g, t, gamma, tol, seed=seed, index=k))
    return out


def orientation_identity_reports(seed: int = 0, count: int = 50, max_cells: int = 36,
                                 tol: float = 1e-8) -> list[VerificationReport]:
    shapes = [d for d in PAIR_SHAPES if math.prod(d) <= max_cells]
    out = []
    for k in range(count):
        rng = _rng(17, seed, k)
        dims = shapes[k % len(shapes)]
        f, g = _cfield(rng, dims, mean_zero=True), _cfield(rng, dims)
        t = float(rng.uniform(0.05, 0.95))
        gamma = float(rng.choice([0.0, 1.0, 2.0]))
        if k % 2:
            E, kind = Orientation.random(dims, rng), "random"
        else:
            ell = rng.dirichlet(np.full(math.prod(dims), 0.5)).reshape(dims)
            E, kind = build_orientation(ell), "mass"
        out.append(check_orientation_identity(f, g, t, gamma, E, tol, seed=seed, index=k,
                                              orientation=kind))
    return out


# ---------------------------------------------------------------------------
# inequalities


def _report_from(ineq, **instance) -> VerificationReport:
    return VerificationReport(ineq.name, ineq.lhs, ineq.rhs, ineq.holds, ineq.tol,
                              "inequality", instance)


def restriction_tv_reports(seed: int = 0, count: int = 50,
                           sigmas=(0.25, 0.5, 0.75)) -> list[VerificationReport]:
    out = []
    for k in range(count):
        rng = _rng(19, seed, k)
        dims = TV_SHAPES[k % len(TV_SHAPES)]
        alpha = float(rng.choice([0.2, 1.0, 5.0]))
        p = Distribution.dense(rng.dirichlet(np.full(math.prod(dims), alpha)).reshape(dims))
        for s in sigmas:
            out.append(_report_from(verify_restriction_tv_bound(p, s), shape=list(dims),
                                    sigma=s, seed=seed, index=k))
    return out


def banded_instance(rng, dims) -> Distribution:
    """Dirichlet draw conditioned on every marginal lying in [1/(4m_i), 4/m_i]."""
    while True:
        alpha = float(rng.choice([0.5, 1.0, 3.0, 10.0]))
        p = Distribution.dense(rng.dirichlet(np.full(math.prod(dims), alpha)).reshape(dims))
        if in_marginal_band(p):
            return p


def projection_bias_reports(seed: int = 0, count: int = 30) -> list[VerificationReport]:
    out = []
    for k in range(count):
        rng = _rng(23, seed, k)
        dims = BAND_SHAPES[k % len(BAND_SHAPES)]
        p = banded_instance(rng, dims)
        out.append(_report_from(verify_projection_bias_bound(p), shape=list(dims), seed=seed,
                                index=k))
    return out


def robust_pisier_reports(seed: int = 0, count: int = 100,
                          c_emp: float = ROBUST_PISIER_C_EMP) -> list[VerificationReport]:
    """Held-out check of the calibrated constant plus the ratio trend by n."""
    held_out = range(100 + 1000 * seed, 100 + 1000 * seed + count)
    out = []
    by_n: dict[int, list] = {}
    for s in held_out:
        rows = robust_pisier_ratios(s)
        worst = max(rows, key=lambda r: r["ratio"])
        by_n.setdefault(worst["n"], []).extend(r["ratio"] for r in rows)
        out.append(VerificationReport(
            "robust_pisier", worst["lhs"], c_emp * worst["rhs"],
            worst["ratio"] <= c_emp, 1e-12, "calibrated",
            {"seed": s, "shape": worst["shape"], "orientation": worst["orientation"]},
            {"c_emp": c_emp, "ratio": worst["ratio"]}))
    trend = {n: float(np.mean(v)) for n, v in sorted(by_n.items())}
    out.append(VerificationReport("robust_pisier_trend", 0.0, 0.0, True, 0.0, "monitored",
                                  {"held_out": [held_out.start, held_out.stop]},
                                  {"mean_ratio_by_n": trend}))
    return out


def bernstein_reports(seed: int = 0, count: int = 100,
                      c_emp: float = BERNSTEIN_C_EMP) -> list[VerificationReport]:
    base = 100 + 1000 * seed
    return [check_bernstein_chain(bernstein_instance(s), c_emp, seed=s)
            for s in range(base, base + count)]


# ---------------------------------------------------------------------------
# lemmas


def lemma_instance(seed: int, dims, k: int) -> np.ndarray:
    """Half Dirichlet draws, half near-uniform tables (to reach the small-bias premises)."""
    rng = _rng(29, seed, 1000 * k + math.prod(dims))
    N = math.prod(dims)
    if k % 2 == 0:
        return rng.dirichlet(np.full(N, float(rng.choice([0.3, 1.0, 3.0])))).reshape(dims)
    t = 1.0 + float(rng.choice([0.02, 0.05, 0.1])) * rng.uniform(-1, 1, size=N)
    return (t / t.sum()).reshape(dims)


def indegree_probe_reports(E, rng, probes: int = 100, **instance) -> VerificationReport:
    dims = E.dims
    points = list(itertools.product(*(range(m) for m in dims)))
    kappas = E.kappas()
    checked = fails = 0
    for _ in range(probes):
        if not kappas:
            break
        kap = int(rng.choice(kappas))
        v = points[int(rng.integers(len(points)))]
        nbrs = [v[:i] + (b,) + v[i + 1:] for i in range(len(dims)) for b in range(dims[i])
                if b != v[i]]
        pick = rng.random(len(nbrs)) < 0.6
        U = [u for u, keep in zip(nbrs, pick) if keep]
        g = int(rng.integers(0, 4))
        res = check_indegree_bound(E, kap, U, v, g)
        if res is None:
            continue
        checked += 1
        fails += not res
    return VerificationReport("indegree_bound", float(fails), 0.0, fails == 0, 0.0,
                              "enumeration", instance, {"checked": checked})


def lemma_reports(seed: int = 0, per_shape: int = 20, shapes=LEMMA_SHAPES, ts=(1, 2),
                  inject_fault: bool = False) -> list[VerificationReport]:
    out = []
    for dims in shapes:
        for k in range(per_shape):
            ell = lemma_instance(seed, dims, k)
            inst = {"shape": list(dims), "seed": seed, "index": k}
            E = build_orientation(ell)
            if inject_fault:
                E = reverse_subgraph(E, SUB_U)
            bad = orientation_violations(E)
            out.append(VerificationReport("orientation_rules", float(len(bad)), 0.0, not bad,
                                          0.0, "enumeration", inst, {"violations": bad[:5]}))
            lhs, rhs = relative_difference_sides(build_orientation(ell))
            slack = float((lhs - rhs).max())
            out.append(VerificationReport("relative_difference_bound", float(lhs.max()),
                                          float(rhs.max()), slack <= 1e-9, 1e-9,
                                          "inequality", inst, {"max_excess": slack}))
            out.append(indegree_probe_reports(build_orientation(ell), _rng(31, seed, k), **inst))
            out.append(check_degree_scale_chain(ell, **inst))
            for t in ts:
                out.append(check_bias_edge_class(ell, t, **inst))
                out.append(check_two_uneven_arcs(ell, t, **inst))
                for kappa in (1, 2):
                    for gamma in (1.0, 2.0):
                        out.append(check_fibre_bias(ell, t, kappa, gamma, **inst))
    return out


# ---------------------------------------------------------------------------


def run_suite(suite: str, seed: int = 0, corpus_size: Optional[int] = None,
              max_cells: int = 36, inject_fault: bool = False) -> list[VerificationReport]:
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {SUITES}")
    c = corpus_size
    reports = []
    if suite in ("identities", "all"):
        reports += fourier_reports(seed, c or 50)
        reports += subpart_reports(seed, c or 50, max_cells)
        reports += orientation_identity_reports(seed, c or 50, max_cells)
    if suite in ("inequalities", "all"):
        reports += restriction_tv_reports(seed, c or 50)
        reports += projection_bias_reports(seed, c or 30)
        reports += robust_pisier_reports(seed, c or 100)
        reports += bernstein_reports(seed, c or 100)
    if suite in ("lemmas", "all"):
        reports += lemma_reports(seed, c or 20, inject_fault=inject_fault)
    return reports


def hard_failures(reports) -> list[VerificationReport]:
    return [r for r in reports if r.kind != "monitored" and not r.holds]
