"""Uniformity testers over hypergrids with subcube conditional access.

The stack, bottom up:

* ``mean_tester``: pairwise inner-product statistic on a +-1 sample stream.
* ``coarse_test``: rejects if some symbol's marginal frequency is far off 1/m_i.
* ``projected_test_mean``: coarse test, then the mean tester on every +-1
  projection p^(k), k = 1..m^2, with majority votes.
* ``sub_cond_uni``: random restrictions feeding projected_test_mean, plus
  recursion into restricted distributions; small instances fall back to a
  collision tester over the flattened domain.

All sample counts are deterministic functions of (n, m, eps, cfg).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .grid import Restriction
from .oracle import SubcubeOracle


class ConfigError(ValueError):
    """Tester configuration cannot produce a valid run."""


class RecursionDepthError(RuntimeError):
    """Recursion went deeper than TesterConfig.max_depth."""


def _odd(k: int) -> int:
    k = max(1, int(k))
    return k if k % 2 else k + 1


@dataclass(frozen=True)
class TesterConfig:
    """Every constant of the tester stack.

    sigma(eps) = 1 / (c0 * log2(16/eps)^sigma_log_power); the recursive main
    case runs when exp(-sigma n / regime_divisor) <= eps/8.
    L = l_const * m^l_m_power * sqrt(n) / eps.
    """

    __test__ = False  # keep pytest from collecting the class

    mode: str = "practical"
    c0: float = 0.5
    sigma_log_power: float = 1.0
    regime_divisor: float = 1.5
    l_const: float = 0.25
    l_m_power: float = 1.0
    s1_mult: float = 1.0 / 16
    s2_mult: float = 1.0 / 64
    r_mult: float = 0.5
    t_rep_mult: float = 0.5
    c_pr: float = 1.0
    c_mt: float = 8.0
    tau: float = 0.5
    c_ct: float = 20.0
    c_bc: float = 8.0
    tau_bc: float = 0.5
    base_case_cap: int = 2**20
    max_depth: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("theory", "practical"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        for name in ("c0", "regime_divisor", "l_const", "s1_mult", "s2_mult", "r_mult",
                     "t_rep_mult", "c_pr", "c_mt", "tau", "c_ct", "c_bc", "tau_bc"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_depth < 0 or self.base_case_cap < 1:
            raise ConfigError("max_depth and base_case_cap must be nonnegative")

    @classmethod
    def practical(cls, **kw) -> "TesterConfig":
        return cls(**kw)

    @classmethod
    def theory(cls, **kw) -> "TesterConfig":
        base = dict(mode="theory", c0=2.0 * (32**2 * 100) ** 2, sigma_log_power=4.0,
                    regime_divisor=10.0, l_const=1.0, l_m_power=8.5, s1_mult=1.0,
                    s2_mult=1.0, r_mult=1.0, t_rep_mult=100.0, c_pr=1.0)
        base.update(kw)
        return cls(**base)

    @classmethod
    def for_mode(cls, mode: str, **kw) -> "TesterConfig":
        return cls.theory(**kw) if mode == "theory" else cls.practical(**kw)

    def with_(self, **kw) -> "TesterConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    # derived quantities
    def sigma(self, eps: float) -> float:
        s = 1.0 / (self.c0 * math.log2(16.0 / eps) ** self.sigma_log_power)
        if not 0 < s <= 1:
            raise ConfigError(f"sigma({eps}) = {s} is outside (0, 1]")
        return s

    def main_case(self, n: int, eps: float) -> bool:
        return math.exp(-self.sigma(eps) * n / self.regime_divisor) <= eps / 8.0

    def L(self, n: int, m: int, eps: float) -> float:
        return self.l_const * m**self.l_m_power * math.sqrt(n) / eps

    def loop1_rounds(self, L: float) -> int:
        return max(1, math.ceil(math.log2(2 * L)))

    def s1(self, j: int, L: float) -> int:
        return math.ceil(self.s1_mult * 8 * L * math.log2(2 * L) * 2.0**-j)

    def loop2_rounds(self, eps: float) -> int:
        return math.ceil(math.log2(4.0 / eps))

    def s2(self, j: int, eps: float) -> int:
        return math.ceil(self.s2_mult * (32.0 / eps) * math.log2(4.0 / eps) * 2.0**-j)

    def r(self, n: int, m: int, eps: float) -> int:
        return _odd(math.ceil(self.r_mult * math.log2(n * m / eps)))

    def t_rep(self, eps: float) -> int:
        return _odd(math.ceil(self.t_rep_mult * math.log2(16.0 / eps)))

    def ptm_reps(self, m: int) -> int:
        return _odd(math.ceil(self.c_pr * math.log2(m + 1)))

    def mt_samples(self, n: int, eps: float) -> int:
        N = math.ceil(self.c_mt * max(1.0 / (eps * eps * math.sqrt(n)), 1.0 / eps))
        if N < 2:
            raise ConfigError("mean tester needs at least two samples")
        return N

    def ct_samples(self, n: int, m: int) -> int:
        return math.ceil(self.c_ct * m * math.log(m * n + 1))

    def bc_samples(self, total: int, eps: float) -> int:
        N = math.ceil(self.c_bc * math.sqrt(total) / (eps * eps))
        if N < 2:
            raise ConfigError("collision tester needs at least two samples")
        return N


@dataclass
class Verdict:
    decision: str
    ledger: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)

    @property
    def accept(self) -> bool:
        return self.decision == "accept"

    @property
    def depth_max(self) -> int:
        return _trace_depth(self.trace)


def _trace_depth(tr: dict) -> int:
    d = tr.get("depth", 0)
    for ch in tr.get("children", ()):
        d = max(d, _trace_depth(ch))
    return d


def _decide(reject: bool) -> str:
    return "reject" if reject else "accept"


# ---------------------------------------------------------------------------


def mean_statistic(x: np.ndarray) -> float:
    """(2 / (N(N-1))) sum_{j<k} <x_j, x_k>, unbiased for ||E x||^2."""
    N = x.shape[0]
    s = x.sum(axis=0, dtype=np.int64).astype(np.float64)
    sq = float((x.astype(np.float64) ** 2).sum())
    return (float(s @ s) - sq) / (N * (N - 1))


def mean_tester(stream: Callable[[int], np.ndarray], n: int, eps: float,
                cfg: TesterConfig) -> Verdict:
    """Accept iff the pairwise statistic is at most tau * eps^2 * n."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be positive")
    N = cfg.mt_samples(n, eps)
    Z = mean_statistic(stream(N))
    thr = cfg.tau * eps * eps * n
    return Verdict(_decide(Z > thr), trace={"kind": "mean", "N": N, "Z": Z, "threshold": thr})


def coarse_test(oracle: SubcubeOracle, cfg: TesterConfig) -> Verdict:
    """Reject when some symbol count leaves [N/(2 m_i), 2N/m_i]."""
    dims = oracle.shape.dims
    n, m = len(dims), max(dims)
    N = cfg.ct_samples(n, m)
    with oracle.ledger.phase("coarse"):
        x = oracle.sample_batch(None, N)
    offsets = np.concatenate([[0], np.cumsum(dims)[:-1]])
    counts = np.bincount((x + offsets).ravel(), minlength=sum(dims))
    side = np.repeat(np.asarray(dims, dtype=np.float64), dims)
    bad = (counts > 2.0 * N / side) | (counts < N / (2.0 * side))
    return Verdict(_decide(bool(bad.any())), trace={"kind": "coarse", "N": N,
                                                    "violations": int(bad.sum())})


def projected_test_mean(oracle: SubcubeOracle, eps: float, cfg: TesterConfig) -> Verdict:
    """Coarse test, then a majority vote of mean testers on each projection."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    ct = coarse_test(oracle, cfg)
    if not ct.accept:
        return Verdict("reject", trace={"kind": "ptm", "rejected_by": "coarse"})
    n, m = oracle.shape.n, oracle.shape.max_side
    reps = cfg.ptm_reps(m)
    with oracle.ledger.phase("mean"):
        for k in range(1, m * m + 1):
            stream = oracle.projected_sample_stream(k)
            rejects = sum(not mean_tester(stream, n, eps / (2 * m), cfg).accept
                          for _ in range(reps))
            if 2 * rejects > reps:
                return Verdict("reject", trace={"kind": "ptm", "rejected_by": "mean", "k": k})
    return Verdict("accept", trace={"kind": "ptm"})


def base_case_tester(oracle: SubcubeOracle, eps: float, cfg: TesterConfig) -> Verdict:
    """Collision-count uniformity test over the flattened domain."""
    D = oracle.shape.total_size
    if D > cfg.base_case_cap:
        raise ConfigError(f"base case on {D} cells exceeds cap {cfg.base_case_cap}")
    N = cfg.bc_samples(D, eps)
    with oracle.ledger.phase("base"):
        x = oracle.sample_batch(None, N)
    flat = np.ravel_multi_index(tuple(x.T), oracle.shape.dims)
    _, counts = np.unique(flat, return_counts=True)
    coll = float((counts * (counts - 1) / 2).sum()) / (N * (N - 1) / 2)
    thr = (1.0 + cfg.tau_bc * eps * eps) / D
    return Verdict(_decide(coll > thr), trace={"kind": "base", "N": N, "collision": coll,
                                               "threshold": thr})


def _draw_restriction(oracle: SubcubeOracle, sigma: float) -> Restriction:
    with oracle.ledger.phase("recurse"):
        x = oracle.sample_batch(None, 1)[0]
    starred = oracle.rng.random(oracle.shape.n) < sigma
    return Restriction(tuple(None if s else int(v) for s, v in zip(starred, x)))


def sub_cond_uni(oracle: SubcubeOracle, eps: float, cfg: TesterConfig,
                 depth: int = 0) -> Verdict:
    """Recursive uniformity tester; returns accept only if no phase rejects."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if depth > cfg.max_depth:
        raise RecursionDepthError(f"depth {depth} exceeds max_depth {cfg.max_depth}")
    with oracle.ledger.depth(depth):
        verdict = _sub_cond_uni(oracle, eps, cfg, depth)
    if depth == 0:
        verdict.ledger = oracle.ledger.snapshot()
    return verdict


def _sub_cond_uni(oracle, eps, cfg, depth) -> Verdict:
    n, m = oracle.shape.n, oracle.shape.max_side
    node = {"depth": depth, "n": n, "eps": eps}
    if not cfg.main_case(n, eps):
        v = base_case_tester(oracle, eps, cfg)
        node.update(branch="base", decision=v.decision, N=v.trace["N"])
        return Verdict(v.decision, trace=node)

    node["branch"] = "main"
    sigma = cfg.sigma(eps)
    L = cfg.L(n, m, eps)
    children = []
    node["children"] = children

    for j in range(1, cfg.loop1_rounds(L) + 1):
        for _ in range(cfg.s1(j, L)):
            rho = _draw_restriction(oracle, sigma)
            if not rho.stars:
                continue
            view = oracle.restricted_view(rho)
            r = cfg.r(n, m, eps)
            rejects = sum(not projected_test_mean(view, 2.0**-j, cfg).accept
                          for _ in range(r))
            if 2 * rejects > r:
                node.update(decision="reject", rejected_in="loop1", round=j)
                return Verdict("reject", trace=node)

    for j in range(1, cfg.loop2_rounds(eps) + 1):
        for _ in range(cfg.s2(j, eps)):
            rho = _draw_restriction(oracle, sigma)
            k = len(rho.stars)
            if not 0 < k <= 2 * sigma * n:
                continue
            view = oracle.restricted_view(rho)
            t = cfg.t_rep(eps)
            rejects = 0
            for _ in range(t):
                child = sub_cond_uni(view, 2.0**-j, cfg, depth + 1)
                children.append(child.trace)
                rejects += not child.accept
            if 2 * rejects > t:
                node.update(decision="reject", rejected_in="loop2", round=j)
                return Verdict("reject", trace=node)

    node["decision"] = "accept"
    return Verdict("accept", trace=node)


# ---------------------------------------------------------------------------
# analytic query counts


def ptm_queries_on_accept(n: int, m: int, eps: float, cfg: TesterConfig) -> int:
    """Queries spent by projected_test_mean when every subtest accepts."""
    return cfg.ct_samples(n, m) + m * m * cfg.ptm_reps(m) * cfg.mt_samples(n, eps / (2 * m))


def base_case_queries(total: int, eps: float, cfg: TesterConfig) -> int:
    return cfg.bc_samples(total, eps)


def query_budget(n: int, m: int, eps: float, C: float = 1.0, c: float = 4.0) -> float:
    """C * m^21 * sqrt(n) / eps^2 * log(n m / eps)^c."""
    return C * float(m) ** 21 * math.sqrt(n) / eps**2 * math.log(n * m / eps + 1) ** c


def depth_bound(n: int, eps: float, cfg: TesterConfig) -> int:
    """Deepest recursion the control flow allows, over every star count and round."""
    memo: dict = {}

    def go(k: int, e: float) -> int:
        key = (k, e)
        if key not in memo:
            if k < 1 or not cfg.main_case(k, e):
                memo[key] = 0
            else:
                cap = math.floor(2 * cfg.sigma(e) * k)
                memo[key] = 1 + max(go(cap, 2.0**-j) for j in range(1, cfg.loop2_rounds(e) + 1))
        return memo[key]

    return go(n, eps)
