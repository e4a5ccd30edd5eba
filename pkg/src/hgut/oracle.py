"""Subcube conditional sampling oracles and query accounting."""

from __future__ import annotations

import json
import threading
from contextlib import contextmanager
from typing import Optional

import numpy as np

from .grid import (
    Distribution,
    GridShape,
    Restriction,
    ZeroMassSubcube,
    _sample_product,
    pair_for_k,
)

PHASES = ("coarse", "mean", "recurse", "base", "other")


class QueryLedger:
    """Counts oracle queries, split by recursion depth and by tester phase.

    Increments are lock protected so a ledger can be shared by threads; the
    current phase/depth labels belong to whoever drives the tester.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.total = 0
        self.by_phase = {ph: 0 for ph in PHASES}
        self.by_depth: dict[int, int] = {}
        self._phase = "other"
        self._depth = 0

    def bill(self, k: int = 1) -> None:
        if k < 0:
            raise ValueError("cannot bill a negative number of queries")
        with self._lock:
            self.total += k
            self.by_phase[self._phase] += k
            self.by_depth[self._depth] = self.by_depth.get(self._depth, 0) + k

    @contextmanager
    def phase(self, name: str):
        if name not in self.by_phase:
            raise ValueError(f"unknown phase {name!r}")
        prev, self._phase = self._phase, name
        try:
            yield self
        finally:
            self._phase = prev

    @contextmanager
    def depth(self, d: int):
        prev, self._depth = self._depth, int(d)
        try:
            yield self
        finally:
            self._depth = prev

    def snapshot(self) -> dict:
        with self._lock:
            deepest = max(self.by_depth, default=-1)
            return {
                "total": self.total,
                "by_depth": [self.by_depth.get(d, 0) for d in range(deepest + 1)],
                "by_phase": dict(self.by_phase),
            }

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True)


class SubcubeOracle:
    """Interface: conditional samples from a hidden distribution over Z_M.

    ``sample_batch(rho, k)`` returns k points (full-dimensional, fixed
    coordinates echoed) and bills exactly k queries.
    """

    shape: GridShape
    ledger: QueryLedger
    rng: np.random.Generator

    def sample_batch(self, rho: Optional[Restriction], size: int) -> np.ndarray:
        raise NotImplementedError

    def subcube_mass(self, rho: Restriction) -> float:
        """Simulator-side mass of a subcube (not a query, never billed)."""
        raise NotImplementedError

    def sample(self, rho: Optional[Restriction] = None) -> tuple[int, ...]:
        return tuple(int(v) for v in self.sample_batch(rho, 1)[0])

    def restricted_view(self, rho: Restriction) -> "RestrictedView":
        return RestrictedView(self, rho)

    def projected_sample_stream(self, k: int) -> "ProjectedStream":
        return ProjectedStream(self, k)

    def _norm_rho(self, rho: Optional[Restriction]) -> Restriction:
        if rho is None:
            return Restriction.all_stars(self.shape.n)
        return rho.validate(self.shape)


class DistributionOracle(SubcubeOracle):
    """Exact simulator backed by a dense table or a product-form distribution."""

    def __init__(self, p: Distribution, rng: np.random.Generator | int | None = None,
                 ledger: Optional[QueryLedger] = None):
        self.p = p
        self.shape = p.shape
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._cdf_cache: dict = {}
        if not p.is_product:
            self._table = np.asarray(p.table, dtype=np.float64)

    def subcube_mass(self, rho: Restriction) -> float:
        return float(self.p.mass(self._norm_rho(rho)))

    def sample_batch(self, rho: Optional[Restriction], size: int) -> np.ndarray:
        rho = self._norm_rho(rho)
        size = int(size)
        if size < 0:
            raise ValueError("size must be nonnegative")
        out = self._draw(rho, size)
        self.ledger.bill(size)
        return out

    def _draw(self, rho: Restriction, size: int) -> np.ndarray:
        n = self.shape.n
        stars = rho.stars
        out = np.empty((size, n), dtype=np.int64)
        for i in rho.fixed:
            out[:, i] = rho.entries[i]
        if self.p.is_product:
            margs = self.p.marginals
            for i in rho.fixed:
                if margs[i][rho.entries[i]] <= 0:
                    raise ZeroMassSubcube(f"subcube {rho} has zero mass")
            if stars:
                out[:, list(stars)] = _sample_product([margs[i] for i in stars], self.rng, size)
            return out
        key = rho.entries
        cdf = self._cdf_cache.get(key)
        if cdf is None:
            sub = np.asarray(self._table[rho.index()], dtype=np.float64)
            cdf = np.cumsum(sub.ravel())
            if cdf[-1] <= 0:
                raise ZeroMassSubcube(f"subcube {rho} has zero mass")
            if len(self._cdf_cache) > 4096:
                self._cdf_cache.clear()
            self._cdf_cache[key] = cdf
        if not stars:
            return out
        idx = np.searchsorted(cdf, self.rng.random(size) * cdf[-1], side="right")
        idx = np.minimum(idx, cdf.size - 1)
        sub_dims = tuple(self.shape.dims[i] for i in stars)
        cols = np.unravel_index(idx, sub_dims)
        for pos, i in enumerate(stars):
            out[:, i] = cols[pos]
        return out


class RestrictedView(SubcubeOracle):
    """Oracle for p_{|rho} over the star coordinates of ``rho``.

    Queries compose with ``rho`` and are billed to the parent's ledger.
    """

    def __init__(self, parent: SubcubeOracle, rho: Restriction):
        rho = rho.validate(parent.shape)
        if not rho.stars:
            raise ValueError("a restricted view needs at least one star")
        self.parent = parent
        self.rho = rho
        self.stars = rho.stars
        self.shape = parent.shape.sub(self.stars)
        self.ledger = parent.ledger
        self.rng = parent.rng
        try:
            mass = parent.subcube_mass(rho)
        except NotImplementedError:
            mass = None
        if mass is not None and mass <= 0:
            raise ZeroMassSubcube(f"subcube {rho} has zero mass")

    def subcube_mass(self, rho: Restriction) -> float:
        inner = self._norm_rho(rho)
        return self.parent.subcube_mass(self.rho.compose(inner)) / \
            self.parent.subcube_mass(self.rho)

    def sample_batch(self, rho: Optional[Restriction], size: int) -> np.ndarray:
        inner = self._norm_rho(rho)
        pts = self.parent.sample_batch(self.rho.compose(inner), size)
        return pts[:, list(self.stars)]


class ProjectedStream:
    """Sampler of the +-1 projection p^(k); one oracle query per emitted point.

    Symbol c_i maps to +1, d_i to -1, anything else (and every symbol of a
    diagonal pair) to a fresh fair bit.
    """

    def __init__(self, oracle: SubcubeOracle, k: int):
        m = oracle.shape.max_side
        if not 1 <= k <= m * m:
            raise ValueError(f"k={k} must lie in [1, {m * m}]")
        self.oracle = oracle
        self.k = k
        self.n = oracle.shape.n
        pairs = [pair_for_k(mi, k) for mi in oracle.shape.dims]
        self._c = np.array([c for c, _ in pairs])
        self._d = np.array([d for _, d in pairs])
        self._live = self._c != self._d

    def draw(self, size: int) -> np.ndarray:
        x = self.oracle.sample_batch(None, size)
        coin = self.oracle.rng.integers(0, 2, size=x.shape, dtype=np.int8) * 2 - 1
        z = coin.astype(np.int8)
        hit_c = (x == self._c) & self._live
        hit_d = (x == self._d) & self._live
        z[hit_c] = 1
        z[hit_d] = -1
        return z

    __call__ = draw


def sample(oracle: SubcubeOracle, rho: Optional[Restriction] = None) -> tuple[int, ...]:
    return oracle.sample(rho)


def restricted_view(oracle: SubcubeOracle, rho: Restriction) -> RestrictedView:
    return oracle.restricted_view(rho)


def projected_sample_stream(oracle: SubcubeOracle, k: int) -> ProjectedStream:
    return oracle.projected_sample_stream(k)
