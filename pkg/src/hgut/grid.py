"""Distributions over hypergrids Z_{m_1} x ... x Z_{m_n}.

Symbols are 0-based and coordinates are 0-based throughout.  A distribution
is stored either as a dense probability table (float64, or Fraction objects
for exact small-case checks) or in product form as one categorical weight
vector per coordinate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

DENSE_CAP = 10**6
EXACT_CAP = 10**4
MASS_TOL = 1e-12


class CapacityError(ValueError):
    """Requested computation exceeds a configured size cap."""


class ZeroMassSubcube(ValueError):
    """Conditioning on a subcube that carries no probability mass."""


@dataclass(frozen=True)
class GridShape:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(m) for m in self.dims)
        if len(dims) < 1:
            raise ValueError("a grid needs at least one coordinate")
        if any(m < 2 for m in dims):
            raise ValueError(f"every side must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total_size(self) -> int:
        return math.prod(self.dims)

    @property
    def max_side(self) -> int:
        return max(self.dims)

    def sub(self, coords: Iterable[int]) -> "GridShape":
        return GridShape(tuple(self.dims[i] for i in coords))

    def points(self) -> Iterable[tuple[int, ...]]:
        """All points in row-major (lexicographic) order."""
        return itertools.product(*(range(m) for m in self.dims))

    def flat_index(self, x: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(int(v) for v in x), self.dims))

    def unflat(self, idx: int) -> tuple[int, ...]:
        return tuple(int(v) for v in np.unravel_index(int(idx), self.dims))

    def check_point(self, x: Sequence[int]) -> tuple[int, ...]:
        x = tuple(int(v) for v in x)
        if len(x) != self.n or any(not 0 <= v < m for v, m in zip(x, self.dims)):
            raise ValueError(f"point {x} is not in grid {self.dims}")
        return x


def as_shape(shape) -> GridShape:
    return shape if isinstance(shape, GridShape) else GridShape(tuple(shape))


STAR = None


@dataclass(frozen=True)
class Restriction:
    """Partial assignment: ``entries[i]`` is a symbol, or ``None`` for a star."""

    entries: tuple[Optional[int], ...]

    def __post_init__(self):
        ent = tuple(None if v is None else int(v) for v in self.entries)
        object.__setattr__(self, "entries", ent)

    @classmethod
    def all_stars(cls, n: int) -> "Restriction":
        return cls((None,) * n)

    @classmethod
    def from_stars(cls, point: Sequence[int], stars: Iterable[int]) -> "Restriction":
        s = set(stars)
        return cls(tuple(None if i in s else int(v) for i, v in enumerate(point)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def stars(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.entries) if v is None)

    @property
    def fixed(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.entries) if v is not None)

    def validate(self, shape: GridShape) -> "Restriction":
        if self.n != shape.n:
            raise ValueError(f"restriction has length {self.n}, grid has n={shape.n}")
        for v, m in zip(self.entries, shape.dims):
            if v is not None and not 0 <= v < m:
                raise ValueError(f"fixed value {v} out of range for side {m}")
        return self

    def compose(self, inner: "Restriction") -> "Restriction":
        """Fill this restriction's stars with the entries of ``inner``."""
        st = self.stars
        if inner.n != len(st):
            raise ValueError("inner restriction must cover exactly the stars")
        out = list(self.entries)
        for pos, v in zip(st, inner.entries):
            out[pos] = v
        return Restriction(tuple(out))

    def index(self):
        """numpy index selecting the subcube (stars become full slices)."""
        return tuple(slice(None) if v is None else v for v in self.entries)

    def __str__(self):
        return "(" + ",".join("*" if v is None else str(v) for v in self.entries) + ")"


def _as_table(table, exact: bool) -> np.ndarray:
    if exact:
        arr = np.empty(np.shape(table), dtype=object)
        src = np.asarray(table, dtype=object)
        for idx in np.ndindex(arr.shape):
            arr[idx] = Fraction(src[idx])
        return arr
    arr = np.array(table, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class Distribution:
    """A probability distribution over Z_M, dense or product form.

    Instances are immutable; use the classmethod constructors.
    """

    def __init__(self, shape, *, table=None, marginals=None, exact=False, cap=DENSE_CAP):
        self.shape = as_shape(shape)
        if (table is None) == (marginals is None):
            raise ValueError("give exactly one of table or marginals")
        self._table = None
        self._marginals = None
        if table is not None:
            if self.shape.total_size > cap:
                raise CapacityError(
                    f"dense table of {self.shape.total_size} cells exceeds cap {cap}")
            if exact and self.shape.total_size > EXACT_CAP:
                raise CapacityError("exact mode is limited to 10^4 cells")
            t = _as_table(table, exact)
            if t.shape != self.shape.dims:
                raise ValueError(f"table shape {t.shape} != grid {self.shape.dims}")
            if exact:
                if any(v < 0 for v in t.flat) or sum(t.flat) != 1:
                    raise ValueError("exact table must be nonnegative and sum to 1")
            else:
                if not np.all(np.isfinite(t)) or t.min() < 0:
                    raise ValueError("masses must be finite and nonnegative")
                if abs(t.sum() - 1.0) > MASS_TOL:
                    raise ValueError(f"total mass {t.sum()!r} is not 1")
            self._table = t
        else:
            ms = []
            if len(marginals) != self.shape.n:
                raise ValueError("need one marginal per coordinate")
            for q, m in zip(marginals, self.shape.dims):
                q = np.array(q, dtype=np.float64)
                if q.shape != (m,):
                    raise ValueError(f"marginal of length {q.shape} for side {m}")
                if q.min() < 0 or abs(q.sum() - 1.0) > MASS_TOL:
                    raise ValueError("each marginal must be a probability vector")
                q.setflags(write=False)
                ms.append(q)
            self._marginals = tuple(ms)
        self.exact = bool(exact)

    # constructors
    @classmethod
    def dense(cls, table, exact=False) -> "Distribution":
        table = np.asarray(table, dtype=object if exact else np.float64)
        return cls(table.shape, table=table, exact=exact)

    @classmethod
    def product(cls, marginals) -> "Distribution":
        marginals = [np.asarray(q, dtype=np.float64) for q in marginals]
        return cls(tuple(len(q) for q in marginals), marginals=marginals)

    @classmethod
    def uniform(cls, dims, product=False) -> "Distribution":
        shape = as_shape(dims)
        if product:
            return cls(shape, marginals=[np.full(m, 1.0 / m) for m in shape.dims])
        return cls(shape, table=np.full(shape.dims, 1.0 / shape.total_size))

    @classmethod
    def point_mass(cls, dims, point) -> "Distribution":
        shape = as_shape(dims)
        t = np.zeros(shape.dims)
        t[shape.check_point(point)] = 1.0
        return cls(shape, table=t)

    # access
    @property
    def kind(self) -> str:
        return "dense" if self._table is not None else "product"

    @property
    def is_product(self) -> bool:
        return self._marginals is not None

    @property
    def marginals(self):
        return self._marginals

    @property
    def table(self) -> np.ndarray:
        """Dense table (expanding product form when under the cap)."""
        if self._table is not None:
            return self._table
        if self.shape.total_size > DENSE_CAP:
            raise CapacityError(
                f"expanding {self.shape.total_size} cells exceeds cap {DENSE_CAP}")
        t = self._marginals[0]
        for q in self._marginals[1:]:
            t = np.multiply.outer(t, q)
        t = np.asarray(t, dtype=np.float64)
        t.setflags(write=False)
        return t

    def to_dense(self) -> "Distribution":
        if self._table is not None:
            return self
        return Distribution(self.shape, table=self.table)

    def marginal(self, i: int) -> np.ndarray:
        if self._marginals is not None:
            return self._marginals[i]
        axes = tuple(j for j in range(self.shape.n) if j != i)
        return self._table.sum(axis=axes) if axes else self._table.copy()

    def mass(self, rho: Restriction) -> float:
        """Probability of the subcube picked out by ``rho``."""
        rho.validate(self.shape)
        if self._marginals is not None:
            return float(math.prod(self._marginals[i][v] for i, v in enumerate(rho.entries)
                                   if v is not None))
        sub = self._table[rho.index()]
        return sub.sum() if isinstance(sub, np.ndarray) else sub

    def pmf(self, x) -> float:
        x = self.shape.check_point(x)
        if self._marginals is not None:
            return float(math.prod(q[v] for q, v in zip(self._marginals, x)))
        return self._table[x]

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """``size`` independent points as an int array of shape (size, n)."""
        if self._marginals is not None:
            return _sample_product(self._marginals, rng, size)
        cdf = np.cumsum(np.asarray(self._table, dtype=np.float64).ravel())
        idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
        idx = np.minimum(idx, cdf.size - 1)
        return np.stack(np.unravel_index(idx, self.shape.dims), axis=1)

    def __repr__(self):
        return f"Distribution({self.kind}, dims={self.shape.dims})"


def _sample_product(marginals, rng, size) -> np.ndarray:
    n = len(marginals)
    out = np.empty((size, n), dtype=np.int64)
    groups: dict[bytes, list[int]] = {}
    for i, q in enumerate(marginals):
        groups.setdefault(q.tobytes(), []).append(i)
    for cols in groups.values():
        q = marginals[cols[0]]
        cdf = np.cumsum(q)
        u = rng.random((size, len(cols))) * cdf[-1]
        draw = np.searchsorted(cdf, u, side="right")
        out[:, cols] = np.minimum(draw, len(q) - 1)
    return out


def tv_to_uniform(p: Distribution):
    """Total variation distance between ``p`` and the uniform distribution."""
    t = p.table
    N = p.shape.total_size
    if p.exact:
        u = Fraction(1, N)
        return sum(abs(v - u) for v in t.flat) / 2
    return float(0.5 * np.abs(t - 1.0 / N).sum())


def _check_coords(shape: GridShape, S) -> tuple[int, ...]:
    S = tuple(sorted(set(int(i) for i in S)))
    if not S:
        raise ValueError("coordinate set must be nonempty")
    if S[0] < 0 or S[-1] >= shape.n:
        raise ValueError(f"coordinates {S} out of range for n={shape.n}")
    return S


def project(p: Distribution, S) -> Distribution:
    """Marginal of ``p`` on the coordinates ``S`` (kept in increasing order)."""
    S = _check_coords(p.shape, S)
    if p.is_product:
        return Distribution.product([p.marginals[i] for i in S])
    other = tuple(i for i in range(p.shape.n) if i not in S)
    t = p.table.sum(axis=other) if other else p.table
    return Distribution(p.shape.sub(S), table=t, exact=p.exact)


def restrict(p: Distribution, rho: Restriction) -> Distribution:
    """Conditional law of x_{stars(rho)} given the fixed coordinates of ``rho``."""
    rho.validate(p.shape)
    st = rho.stars
    if not st:
        raise ValueError("restriction has no stars")
    if p.is_product:
        for i in rho.fixed:
            if p.marginals[i][rho.entries[i]] <= 0:
                raise ZeroMassSubcube(f"subcube {rho} has zero mass")
        return Distribution.product([p.marginals[i] for i in st])
    sub = p.table[rho.index()]
    z = sub.sum()
    if z <= 0:
        raise ZeroMassSubcube(f"subcube {rho} has zero mass")
    return Distribution(p.shape.sub(st), table=sub / z, exact=p.exact)


def bias(p: Distribution, i: int, c: int, d: int):
    """Normalised marginal difference between symbols ``c`` and ``d`` at ``i``."""
    if not 0 <= i < p.shape.n:
        raise ValueError(f"coordinate {i} out of range")
    m = p.shape.dims[i]
    if not (0 <= c < m and 0 <= d < m):
        raise ValueError(f"symbols ({c}, {d}) out of range for side {m}")
    if c == d:
        return 0
    q = p.marginal(i)
    return _pair_bias(q[c], q[d])


def _pair_bias(a, b):
    s = a + b
    if s == 0:
        return 0
    return (a - b) / s


@dataclass(frozen=True)
class BiasVector:
    """Per-coordinate antisymmetric matrices of pairwise biases."""

    mats: tuple[np.ndarray, ...]

    def norm(self) -> float:
        return math.sqrt(sum(float((b.astype(float) ** 2).sum()) for b in self.mats))

    def norm_sq(self):
        return sum((b * b).sum() for b in self.mats)


def _bias_matrix(q) -> np.ndarray:
    q = np.asarray(q)
    if q.dtype == object:
        m = len(q)
        out = np.empty((m, m), dtype=object)
        for c in range(m):
            for d in range(m):
                out[c, d] = _pair_bias(q[c], q[d]) if c != d else Fraction(0)
        return out
    num = q[:, None] - q[None, :]
    den = q[:, None] + q[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    np.fill_diagonal(out, 0.0)
    return out


def bias_vector(p: Distribution) -> BiasVector:
    return BiasVector(tuple(_bias_matrix(p.marginal(i)) for i in range(p.shape.n)))


def bias_norm(p: Distribution) -> float:
    return bias_vector(p).norm()


def draw_restriction_sigma(p: Distribution, sigma: float, rng: np.random.Generator,
                           x: Optional[np.ndarray] = None) -> Restriction:
    """Draw from D_sigma(p): each coordinate is a star independently w.p. sigma."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    if x is None:
        x = p.sample(rng, 1)[0]
    starred = rng.random(p.shape.n) < sigma
    return Restriction(tuple(None if s else int(v) for s, v in zip(starred, x)))


def draw_restriction_t(p: Distribution, t: int, rng: np.random.Generator) -> Restriction:
    """Draw from D(t, p): a uniform t-subset of stars, the rest from y ~ p."""
    n = p.shape.n
    if not 0 <= t <= n:
        raise ValueError(f"t={t} must lie in [0, {n}]")
    y = p.sample(rng, 1)[0]
    S = rng.choice(n, size=t, replace=False) if t else []
    return Restriction.from_stars(y, S)


def pair_for_k(m_i: int, k: int) -> tuple[int, int]:
    """The (c, d) symbol pair used at a side-``m_i`` coordinate for index k (1-based)."""
    if k < 1:
        raise ValueError("k is 1-based")
    kk = min(k, m_i * m_i) - 1
    return kk // m_i, kk % m_i


def projection_matrix(m_i: int, k: int) -> np.ndarray:
    """2 x m_i column-stochastic map from a symbol to a bit (row 0 = +1, row 1 = -1).

    For a diagonal pair (c, c) every symbol becomes a fair coin, which keeps the
    projected coordinate unbiased in line with mu^{c,c} = 0.
    """
    c, d = pair_for_k(m_i, k)
    T = np.full((2, m_i), 0.5)
    if c != d:
        T[:, c] = (1.0, 0.0)
        T[:, d] = (0.0, 1.0)
    return T


def hypercube_projection(p: Distribution, k: int) -> Distribution:
    """Exact law of the +-1 projection p^(k), as a distribution on shape (2,...,2).

    Index 0 stands for +1 and index 1 for -1.
    """
    m = p.shape.max_side
    if not 1 <= k <= m * m:
        raise ValueError(f"k={k} must lie in [1, {m * m}]")
    mats = [projection_matrix(mi, k) for mi in p.shape.dims]
    if p.is_product:
        return Distribution.product([T @ q for T, q in zip(mats, p.marginals)])
    t = np.asarray(p.table, dtype=np.float64)
    for i, T in enumerate(mats):
        t = np.moveaxis(np.tensordot(T, t, axes=([1], [i])), 0, i)
    return Distribution.dense(t / t.sum())


def hypercube_means(q: Distribution) -> np.ndarray:
    """E[z_i] for a distribution over (2,...,2) read as {+1,-1}^n."""
    return np.array([q.marginal(i)[0] - q.marginal(i)[1] for i in range(q.shape.n)])


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    holds: bool
    tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))
        object.__setattr__(self, "holds", bool(self.holds))


def _tv_table(t: np.ndarray) -> float:
    return float(0.5 * np.abs(t - 1.0 / t.size).sum())


def verify_restriction_tv_bound(p: Distribution, sigma: float) -> InequalityReport:
    """Exact two-sided check of the restriction bound for d_TV(p, U).

    rhs = E_S d_TV(p_{complement S}, U) + E_{rho ~ D_sigma(p)} d_TV(p_{|rho}, U),
    both expectations summed exactly.
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    n = p.shape.n
    if n > 6 or p.shape.total_size > 4096:
        raise CapacityError("exhaustive evaluation is limited to n <= 6, 4096 cells")
    t = np.asarray(p.table, dtype=np.float64)
    lhs = _tv_table(t)
    rhs = 0.0
    for r in range(n + 1):
        w = sigma**r * (1.0 - sigma) ** (n - r)
        if w == 0.0:
            continue
        for S in itertools.combinations(range(n), r):
            Sbar = tuple(i for i in range(n) if i not in S)
            # first term: marginal on the complement
            if Sbar:
                marg = t.sum(axis=S) if S else t
                first = _tv_table(marg)
            else:
                first = 0.0
            # second term: conditional on each fixing of the complement
            second = 0.0
            if S:
                moved = np.moveaxis(t, Sbar, tuple(range(len(Sbar))))
                k = math.prod(p.shape.dims[i] for i in Sbar) if Sbar else 1
                blocks = moved.reshape(k, -1)
                masses = blocks.sum(axis=1)
                for blk, mass in zip(blocks, masses):
                    if mass > 0:
                        second += mass * _tv_table(blk / mass)
            rhs += w * (first + second)
    return InequalityReport("restriction_tv_bound", lhs, rhs, lhs <= rhs + 1e-9)


def verify_projection_bias_bound(p: Distribution) -> InequalityReport:
    """Check sum_k ||mu(p^(k))||^2 >= ||mu(p)||^2 / (4 m^2) on the hypercube side.

    The left side uses the +-1 mean vector of each projection.
    """
    m = p.shape.max_side
    lhs_sum = 0.0
    for k in range(1, m * m + 1):
        lhs_sum += float((hypercube_means(hypercube_projection(p, k)) ** 2).sum())
    target = bias_vector(p).norm_sq() / (4.0 * m * m)
    return InequalityReport("projection_bias_bound", float(target), lhs_sum,
                            float(target) <= lhs_sum + 1e-9)


def in_marginal_band(p: Distribution) -> bool:
    """Every symbol's marginal lies in [1/(4 m_i), 4/m_i]."""
    for i, mi in enumerate(p.shape.dims):
        q = p.marginal(i)
        if q.min() < 1.0 / (4 * mi) or q.max() > 4.0 / mi:
            return False
    return True
