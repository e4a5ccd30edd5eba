"""Distribution files, named generators and exact distance annotations.

File layout (JSON)::

    {"shape": [m1, ..., mn],
     "kind": "dense" | "product" | "generator",
     "data": flat row-major table | list of marginals | null,
     "generator": {"name": ..., "params": {...}, "seed": int},
     "annotations": {"d_tv": float}}
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .grid import DENSE_CAP, CapacityError, Distribution, as_shape, tv_to_uniform

GENERATORS: dict[str, Callable] = {}
FAR_KINDS = ("dirichlet", "biased_coord", "heavy_atom", "perturbed_uniform", "product_biased")
UNIFORM_ATOL = 1e-15


def generator(name):
    def deco(fn):
        GENERATORS[name] = fn
        return fn
    return deco


@generator("uniform")
def gen_uniform(shape, rng, product: Optional[bool] = None):
    shape = as_shape(shape)
    if product is None:
        product = shape.total_size > DENSE_CAP
    return Distribution.uniform(shape.dims, product=product)


@generator("biased_coord")
def gen_biased_coord(shape, rng, coord: int = 0, marginal=None, bias: float = 0.5):
    """One coordinate with a given marginal, the rest uniform (product form)."""
    shape = as_shape(shape)
    margs = [np.full(m, 1.0 / m) for m in shape.dims]
    m = shape.dims[coord]
    if marginal is None:
        q = (1.0 - bias) * margs[coord]
        q[0] += bias
    else:
        q = np.asarray(marginal, dtype=np.float64)
        if q.shape != (m,):
            raise ValueError(f"marginal must have {m} entries")
    margs[coord] = q / q.sum()
    return Distribution.product(margs)


@generator("product_biased")
def gen_product_biased(shape, rng, k: int = 8, bias: float = 0.5):
    """The first k coordinates mix uniform with a point mass on symbol 0.

    With m_i = 2 and bias 0.5 each biased marginal is (0.75, 0.25).
    """
    shape = as_shape(shape)
    if not 0 <= k <= shape.n:
        raise ValueError("k must lie in [0, n]")
    margs = []
    for i, m in enumerate(shape.dims):
        q = np.full(m, 1.0 / m)
        if i < k:
            q = (1.0 - bias) * q
            q[0] += bias
        margs.append(q)
    return Distribution.product(margs)


@generator("dirichlet")
def gen_dirichlet(shape, rng, alpha: float = 1.0):
    shape = as_shape(shape)
    if shape.total_size > DENSE_CAP:
        raise CapacityError("dirichlet generator needs a dense table")
    t = rng.dirichlet(np.full(shape.total_size, float(alpha)))
    return Distribution.dense(t.reshape(shape.dims))


@generator("heavy_atom")
def gen_heavy_atom(shape, rng, weight: float = 0.35, atom=None):
    """(1 - weight) * uniform + weight * point mass; the atom defaults to the origin."""
    shape = as_shape(shape)
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight must lie in [0, 1]")
    t = np.full(shape.dims, (1.0 - weight) / shape.total_size)
    t[shape.check_point(atom if atom is not None else (0,) * shape.n)] += weight
    return Distribution.dense(t)


@generator("perturbed_uniform")
def gen_perturbed_uniform(shape, rng, delta: float = 0.5):
    """Cell weights 1 + delta * u with u uniform on [-1, 1], normalised."""
    shape = as_shape(shape)
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    t = 1.0 + delta * rng.uniform(-1.0, 1.0, size=shape.dims)
    return Distribution.dense(t / t.sum())


def make(name: str, shape, params: Optional[dict] = None, seed: int = 0) -> Distribution:
    if name not in GENERATORS:
        raise KeyError(f"unknown generator {name!r}; known: {sorted(GENERATORS)}")
    return GENERATORS[name](shape, np.random.default_rng(seed), **(params or {}))


def exact_tv(p: Distribution) -> float:
    """d_TV(p, uniform) by the dense path.

    Product inputs are reduced to their non-uniform factors, whose dense
    table is then compared with uniform; uniform factors do not change the
    distance.
    """
    if not p.is_product:
        return float(tv_to_uniform(p))
    block = [q for q, m in zip(p.marginals, p.shape.dims)
             if np.abs(q - 1.0 / m).max() > UNIFORM_ATOL]
    if not block:
        return 0.0
    if math.prod(len(q) for q in block) > DENSE_CAP:
        raise CapacityError("non-uniform block too large for the dense distance")
    t = block[0]
    for q in block[1:]:
        t = np.multiply.outer(t, q)
    return float(0.5 * np.abs(t - 1.0 / t.size).sum())


# ---------------------------------------------------------------------------
# files


def to_record(p: Distribution, generator_spec: Optional[dict] = None,
              annotate: bool = True) -> dict:
    rec: dict = {"shape": list(p.shape.dims)}
    if generator_spec is not None:
        rec.update(kind="generator", data=None, generator=generator_spec)
    elif p.is_product:
        rec.update(kind="product", data=[[float(v) for v in q] for q in p.marginals])
    else:
        rec.update(kind="dense", data=[float(v) for v in np.asarray(p.table, float).ravel()])
    if annotate:
        rec["annotations"] = {"d_tv": exact_tv(p)}
    return rec


def from_record(rec: dict) -> Distribution:
    try:
        shape = as_shape(rec["shape"])
        kind = rec["kind"]
    except KeyError as e:
        raise ValueError(f"distribution record lacks {e}") from None
    if kind == "dense":
        t = np.asarray(rec["data"], dtype=np.float64)
        if t.size != shape.total_size:
            raise ValueError("dense data length does not match the shape")
        return Distribution.dense(t.reshape(shape.dims))
    if kind == "product":
        margs = [np.asarray(q, dtype=np.float64) for q in rec["data"]]
        if tuple(len(q) for q in margs) != shape.dims:
            raise ValueError("marginal lengths do not match the shape")
        return Distribution.product(margs)
    if kind == "generator":
        g = rec["generator"]
        return make(g["name"], shape.dims, g.get("params"), int(g.get("seed", 0)))
    raise ValueError(f"unknown distribution kind {kind!r}")


def save(p_or_rec, path) -> None:
    rec = p_or_rec if isinstance(p_or_rec, dict) else to_record(p_or_rec)
    Path(path).write_text(json.dumps(rec, sort_keys=True) + "\n")


def load(path) -> Distribution:
    return from_record(json.loads(Path(path).read_text()))


def generate_corpus(kind: str, params: dict, seed: int, count: int = 1,
                    floor: Optional[float] = None, out_dir=None,
                    max_attempts: Optional[int] = None) -> list[dict]:
    """Seeded corpus of distribution records, each annotated with its exact d_TV.

    ``params`` must contain "shape"; remaining keys go to the generator.
    Candidates below ``floor`` are discarded.  Records are written as
    ``<kind>_<index>.json`` when ``out_dir`` is given.
    """
    params = dict(params)
    if "shape" not in params:
        raise ValueError("params must include a shape")
    shape = tuple(params.pop("shape"))
    if kind not in GENERATORS:
        raise KeyError(f"unknown generator {kind!r}; known: {sorted(GENERATORS)}")
    if count < 1:
        raise ValueError("count must be positive")
    seeds = np.random.SeedSequence(seed)
    attempts = max_attempts or 50 * count
    out = []
    for child in seeds.spawn(attempts):
        s = int(child.generate_state(1, dtype=np.uint32)[0])
        p = make(kind, shape, params, s)
        rec = to_record(p)
        rec["generator"] = {"name": kind, "params": params, "seed": s}
        if floor is not None and rec["annotations"]["d_tv"] < floor:
            continue
        out.append(rec)
        if len(out) == count:
            break
    if len(out) < count:
        raise ValueError(f"only {len(out)} of {count} instances cleared d_tv >= {floor}")
    if out_dir is not None:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for j, rec in enumerate(out):
            save(rec, d / f"{kind}_{j:03d}.json")
    return out
