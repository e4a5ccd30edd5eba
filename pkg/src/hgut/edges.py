"""Edge classes of the hypergrid graph and the mass-driven orientation.

Two points are adjacent when they differ in exactly one coordinate.  Edges
are stored per coordinate i as arrays of shape dims + (m_i,): entry
[x, b] describes the edge from x to x with coordinate i replaced by b (the
entries with b == x_i are unused).  Points are ordered lexicographically,
which is also numpy's row-major flat order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .grid import CapacityError, Distribution, as_shape

EDGE_CAP = 10**4
ZERO_RTOL = 1e-12

# tag codes
NONE, ZERO, UNEVEN, EVEN = -1, 0, 1, 2
# subgraph labels for directed edges (kappa >= 1 labels the scale subgraph)
SUB_Z, SUB_U, SUB_R = -1, -2, -3
_SUB_NAMES = {"z": SUB_Z, "u": SUB_U, "r": SUB_R}


def _axis_shape(ndim: int, i: int, m: int) -> list[int]:
    s = [1] * ndim
    s[i] = m
    return s


def neighbor_values(arr: np.ndarray, i: int) -> np.ndarray:
    """V[x, b] = arr[x with coordinate i set to b], shape arr.shape + (m_i,)."""
    moved = np.moveaxis(arr, i, -1)
    return np.broadcast_to(np.expand_dims(moved, axis=i), arr.shape + (arr.shape[i],))


def self_mask(dims: Sequence[int], i: int) -> np.ndarray:
    """True at [x, b] when b == x_i (no edge)."""
    n = len(dims)
    xi = np.arange(dims[i]).reshape(_axis_shape(n, i, dims[i]) + [1])
    b = np.arange(dims[i]).reshape([1] * n + [dims[i]])
    return np.broadcast_to(xi == b, tuple(dims) + (dims[i],))


def lex_smaller_mask(dims: Sequence[int], i: int) -> np.ndarray:
    """True at [x, b] when x precedes its neighbour, i.e. x_i < b."""
    n = len(dims)
    xi = np.arange(dims[i]).reshape(_axis_shape(n, i, dims[i]) + [1])
    b = np.arange(dims[i]).reshape([1] * n + [dims[i]])
    return np.broadcast_to(xi < b, tuple(dims) + (dims[i],))


@dataclass(frozen=True)
class EdgeClass:
    tag: str
    weight: float
    kappa: int = 0


def kappa_cap(m: int, total_size: int) -> int:
    return math.ceil(10 * math.log(total_size * 1e6) / math.log(m))


def edge_weight(a: float, b: float) -> float:
    hi = max(a, b)
    return 0.0 if hi == 0 else abs(a - b) / hi


def classify_weight(w: float, m: int, kmax: int) -> EdgeClass:
    """Class of an edge with relative gap ``w`` under side bound ``m``."""
    if w <= ZERO_RTOL:
        return EdgeClass("zero", 0.0)
    if w >= m / (m + 1):
        return EdgeClass("uneven", w)
    return EdgeClass("even", w, _kappa_scalar(w, m, kmax))


def _kappa_scalar(w: float, m: int, kmax: int) -> int:
    k = int(math.floor(-math.log(w) / math.log(m))) + 1
    k = max(k, 1)
    while float(m) ** (-k) >= w:
        k += 1
    while k > 1 and float(m) ** (-(k - 1)) < w:
        k -= 1
    return min(k, kmax)


@dataclass
class _Classes:
    weight: list
    tag: list
    kappa: list
    m: int
    kmax: int


def _classify_arrays(ell: np.ndarray, m: int) -> _Classes:
    dims = ell.shape
    kmax = kappa_cap(m, ell.size)
    weights, tags, kappas = [], [], []
    for i in range(len(dims)):
        own = ell[..., None]
        nb = neighbor_values(ell, i)
        hi = np.maximum(own, nb)
        diff = np.abs(own - nb)
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(hi > 0, diff / np.where(hi > 0, hi, 1.0), 0.0)
        zero = diff <= ZERO_RTOL * hi
        w = np.where(zero, 0.0, w)
        tag = np.where(zero, ZERO, np.where(w >= m / (m + 1), UNEVEN, EVEN)).astype(np.int8)
        tag[self_mask(dims, i)] = NONE
        kap = np.zeros(w.shape, dtype=np.int64)
        ev = tag == EVEN
        if ev.any():
            kap[ev] = [_kappa_scalar(float(v), m, kmax) for v in w[ev]]
        weights.append(w)
        tags.append(tag)
        kappas.append(kap)
    return _Classes(weights, tags, kappas, m, kmax)


def _dense_ell(ell) -> np.ndarray:
    if isinstance(ell, Distribution):
        arr = np.asarray(ell.table, dtype=np.float64)
    else:
        arr = np.asarray(ell, dtype=np.float64)
    if arr.size > EDGE_CAP:
        raise CapacityError(f"{arr.size} cells exceeds the edge cap {EDGE_CAP}")
    return arr


def classify_edges(ell, m: Optional[int] = None) -> dict:
    """Map each undirected edge, keyed (x, i, b) with x_i < b, to its EdgeClass.

    ``m`` is the side bound used in the class thresholds; it defaults to
    the largest side of ell's own grid.
    """
    arr = _dense_ell(ell)
    m = int(m) if m is not None else max(arr.shape)
    cl = _classify_arrays(arr, m)
    names = {ZERO: "zero", UNEVEN: "uneven", EVEN: "even"}
    out = {}
    for i in range(arr.ndim):
        canon = lex_smaller_mask(arr.shape, i)
        for idx in zip(*np.nonzero(canon)):
            x, b = tuple(int(v) for v in idx[:-1]), int(idx[-1])
            out[(x, i, b)] = EdgeClass(names[int(cl.tag[i][idx])], float(cl.weight[i][idx]),
                                       int(cl.kappa[i][idx]))
    return out


@dataclass
class OrientedEdgeSet:
    """An orientation of every hypergrid edge, partitioned into subgraphs.

    ``label[i][x, b]`` is 0 when (x -> x^{i->b}) is not a directed edge of G,
    otherwise SUB_Z / SUB_U / SUB_R, or the scale kappa >= 1.
    """

    dims: tuple
    m: int
    ell: np.ndarray
    label: list
    weight: list
    tag: list
    kappa: list
    orders: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def masks(self) -> tuple:
        return tuple(lab != 0 for lab in self.label)

    def kappas(self) -> list[int]:
        ks = set()
        for lab in self.label:
            ks.update(int(v) for v in np.unique(lab) if v > 0)
        return sorted(ks)

    def _select(self, sub) -> list:
        if sub == "all":
            return [lab != 0 for lab in self.label]
        if sub == "prime":
            return [(lab == SUB_U) | (lab == SUB_R) | (lab > 0) for lab in self.label]
        code = _SUB_NAMES[sub] if isinstance(sub, str) else int(sub)
        if isinstance(sub, int) and code < 1:
            raise ValueError("scale subgraphs are indexed by kappa >= 1")
        return [lab == code for lab in self.label]

    def arcs(self, sub="all") -> list[tuple]:
        """Directed edges (x, i, b) of the selected subgraph."""
        out = []
        for i, mask in enumerate(self._select(sub)):
            for idx in zip(*np.nonzero(mask)):
                out.append((tuple(int(v) for v in idx[:-1]), i, int(idx[-1])))
        return out

    def outdegree_array(self, sub="all") -> np.ndarray:
        deg = np.zeros(self.dims, dtype=np.int64)
        for mask in self._select(sub):
            deg += mask.sum(axis=-1)
        return deg

    def outdegree(self, x, sub="all") -> int:
        x = tuple(int(v) for v in x)
        return int(sum(mask[x].sum() for mask in self._select(sub)))

    def to_dot(self) -> str:
        names = {SUB_Z: "z", SUB_U: "u", SUB_R: "r"}
        lines = ["digraph G {"]
        for i, lab in enumerate(self.label):
            for idx in zip(*np.nonzero(lab)):
                x = tuple(int(v) for v in idx[:-1])
                y = list(x)
                y[i] = int(idx[-1])
                code = int(lab[idx])
                name = names.get(code, f"k{code}")
                lines.append(f'  "{"".join(map(str, x))}" -> "{"".join(map(str, y))}" '
                             f'[label="{name}"];')
        lines.append("}")
        return "\n".join(lines)


def degree_order(dims, edge_masks: list) -> np.ndarray:
    """Rank of each point under repeated deletion of a max-degree vertex.

    ``edge_masks[i][x, b]`` marks the (symmetric) undirected edges.  Ties go
    to the lexicographically smaller point.  Returns rank per flat index.
    """
    N = int(np.prod(dims))
    adj: list[list[int]] = [[] for _ in range(N)]
    for i, mask in enumerate(edge_masks):
        canon = mask & lex_smaller_mask(dims, i)
        for idx in zip(*np.nonzero(canon)):
            x = tuple(int(v) for v in idx[:-1])
            y = list(x)
            y[i] = int(idx[-1])
            a = int(np.ravel_multi_index(x, dims))
            b = int(np.ravel_multi_index(tuple(y), dims))
            adj[a].append(b)
            adj[b].append(a)
    deg = np.array([len(a) for a in adj], dtype=np.int64)
    rank = np.full(N, -1, dtype=np.int64)
    step = 0
    while step < N:
        v = int(np.argmax(deg))
        if deg[v] <= 0:
            # everything left is isolated: lexicographic order
            rest = np.nonzero(rank < 0)[0]
            rank[rest] = np.arange(step, step + rest.size)
            break
        rank[v] = step
        step += 1
        deg[v] = -1
        for w in adj[v]:
            if deg[w] > 0:
                deg[w] -= 1
    return rank


def build_orientation(ell, m: Optional[int] = None) -> OrientedEdgeSet:
    """Orient every edge following the mass-driven construction.

    Uneven edges point from higher to lower mass; zero edges leave the
    lexicographically smaller endpoint; a scale-kappa even edge whose
    endpoints have no outgoing uneven edge along its direction is oriented
    by the max-degree deletion order of that scale's graph; the remaining
    even edges leave an endpoint that has an outgoing uneven edge along the
    same direction (lexicographically smaller one if both do).
    """
    arr = _dense_ell(ell)
    dims = arr.shape
    n = arr.ndim
    m = int(m) if m is not None else max(dims)
    cl = _classify_arrays(arr, m)
    label = [np.zeros(dims + (dims[i],), dtype=np.int64) for i in range(n)]

    has_u = []
    for i in range(n):
        own = arr[..., None]
        nb = neighbor_values(arr, i)
        up = (cl.tag[i] == UNEVEN) & (own > nb)
        label[i][up] = SUB_U
        label[i][(cl.tag[i] == ZERO) & lex_smaller_mask(dims, i)] = SUB_Z
        has_u.append(up.any(axis=-1))

    in_h = []
    for i in range(n):
        hu_x = has_u[i][..., None]
        hu_y = neighbor_values(has_u[i], i)
        even = cl.tag[i] == EVEN
        h = even & ~hu_x & ~hu_y
        in_h.append(h)
        rem = even & ~h & hu_x & (~hu_y | lex_smaller_mask(dims, i))
        label[i][rem] = SUB_R

    orders = {}
    scales = sorted({int(k) for i in range(n) for k in np.unique(cl.kappa[i][in_h[i]])})
    for kap in scales:
        masks = [in_h[i] & (cl.kappa[i] == kap) for i in range(n)]
        rank = degree_order(dims, masks).reshape(dims)
        orders[kap] = rank.ravel()
        for i in range(n):
            fwd = masks[i] & (rank[..., None] < neighbor_values(rank, i))
            label[i][fwd] = kap

    return OrientedEdgeSet(tuple(dims), m, arr, label, cl.weight, cl.tag, cl.kappa, orders)


@dataclass
class Orientation:
    """Bare orientation: ``masks[i][x, b]`` true when x -> x^{i->b} is an arc."""

    dims: tuple
    masks: tuple

    @classmethod
    def random(cls, dims, rng: np.random.Generator) -> "Orientation":
        dims = tuple(dims)
        masks = []
        for i in range(len(dims)):
            coin = rng.random(dims + (dims[i],)) < 0.5
            canon = lex_smaller_mask(dims, i)
            fwd = canon & coin
            # the reverse arc lives at the neighbour, with b = x_i
            back = canon & ~coin
            masks.append(fwd | _reverse(back, i))
        return cls(dims, tuple(masks))

    @classmethod
    def of(cls, E: OrientedEdgeSet) -> "Orientation":
        return cls(E.dims, E.masks)

    def reversed(self) -> "Orientation":
        return Orientation(self.dims, tuple(_reverse(mk, i) for i, mk in enumerate(self.masks)))


def _reverse(mask: np.ndarray, i: int) -> np.ndarray:
    """Flip every arc of a per-coordinate mask: [x, b] -> [x^{i->b}, x_i]."""
    # swapping the axis i of x with the trailing b axis maps arc (x, b) to (y, x_i)
    return np.swapaxes(mask, i, -1).copy()


def is_full_orientation(dims, masks) -> bool:
    """Each undirected edge carries exactly one direction."""
    for i, mk in enumerate(masks):
        if (mk & self_mask(dims, i)).any():
            return False
        both = mk & _reverse(mk, i)
        either = mk | _reverse(mk, i)
        if both.any() or not (either | self_mask(dims, i)).all():
            return False
    return True


def relative_difference_sides(E: OrientedEdgeSet) -> tuple[np.ndarray, np.ndarray]:
    """Per-point sides of the relative-difference bound over G' = G minus G^[z].

    lhs(x) = sum over arcs out of x in G' of ((l(x) - l(y)) / l(x))^2,
    rhs(x) = m^3 outdeg_u(x) + sum_kappa 4 m^(4 - 2 kappa) outdeg_kappa(x).
    """
    m = float(E.m)
    lhs = np.zeros(E.dims)
    own = E.ell[..., None]
    for i, lab in enumerate(E.label):
        sel = (lab == SUB_U) | (lab == SUB_R) | (lab > 0)
        nb = neighbor_values(E.ell, i)
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(sel, ((own - nb) / np.where(own > 0, own, 1.0)) ** 2, 0.0)
        lhs += rel.sum(axis=-1)
    rhs = m**3 * E.outdegree_array("u").astype(float)
    for kap in E.kappas():
        rhs += 4.0 * m ** (4 - 2 * kap) * E.outdegree_array(kap)
    return lhs, rhs


def check_relative_difference_bound(E: OrientedEdgeSet, tol: float = 1e-9) -> bool:
    lhs, rhs = relative_difference_sides(E)
    return bool(np.all(lhs <= rhs * (1 + tol) + tol))


def check_indegree_bound(E: OrientedEdgeSet, kappa: int, U: Iterable, v, g: int) -> Optional[bool]:
    """In-degree of v from U inside G^[kappa] is at most g.

    Returns None (vacuous) when v is in U or some u in U has out-degree
    above g in G^[kappa].
    """
    v = tuple(int(a) for a in v)
    U = {tuple(int(a) for a in u) for u in U}
    if v in U:
        return None
    for u in U:
        if E.outdegree(u, kappa) > g:
            return None
    count = 0
    for u in U:
        diff = [i for i in range(E.n) if u[i] != v[i]]
        if len(diff) == 1:
            i = diff[0]
            if E.label[i][u + (v[i],)] == kappa:
                count += 1
    return count <= g


def orientation_violations(E: OrientedEdgeSet) -> list[str]:
    """Re-check the construction rules on a finished orientation.

    Returns one message per broken rule (empty when E is well formed).
    """
    dims, n = E.dims, E.n
    out = []
    if not is_full_orientation(dims, E.masks):
        out.append("partition: some edge is unoriented or oriented twice")
    own = E.ell[..., None]
    for i, lab in enumerate(E.label):
        tag, kap = E.tag[i], E.kappa[i]
        if ((lab == SUB_Z) & (tag != ZERO)).any():
            out.append(f"coord {i}: non-zero edge in the zero subgraph")
        if ((lab == SUB_U) & (tag != UNEVEN)).any():
            out.append(f"coord {i}: non-uneven edge in the uneven subgraph")
        if (((lab == SUB_R) | (lab > 0)) & (tag != EVEN)).any():
            out.append(f"coord {i}: non-even edge in an even subgraph")
        if ((lab > 0) & (lab != kap)).any():
            out.append(f"coord {i}: scale label differs from the edge scale")
        if ((lab == SUB_U) & ~(own > neighbor_values(E.ell, i))).any():
            out.append(f"coord {i}: uneven arc points toward the heavier endpoint")
        if ((lab == SUB_Z) & ~lex_smaller_mask(dims, i)).any():
            out.append(f"coord {i}: zero arc leaves the lexicographically larger endpoint")

    has_u = [(lab == SUB_U).any(axis=-1) for lab in E.label]
    for i, lab in enumerate(E.label):
        src_u = has_u[i][..., None]
        dst_u = neighbor_values(has_u[i], i)
        scaled = lab > 0
        if (scaled & (src_u | dst_u)).any():
            out.append(f"coord {i}: scale arc touches a vertex with an uneven arc along {i}")
        if ((lab == SUB_R) & ~src_u).any():
            out.append(f"coord {i}: remaining arc source has no uneven arc along {i}")
        for k in np.unique(lab[scaled]):
            rank = E.orders.get(int(k))
            if rank is None:
                out.append(f"scale {k}: no deletion order recorded")
                continue
            r = np.asarray(rank).reshape(dims)
            if ((lab == k) & ~(r[..., None] < neighbor_values(r, i))).any():
                out.append(f"coord {i}: scale-{k} arc against the deletion order")
    for k, rank in E.orders.items():
        if sorted(np.asarray(rank).tolist()) != list(range(int(np.prod(dims)))):
            out.append(f"scale {k}: deletion order is not a bijection")
    return out


def reverse_subgraph(E: OrientedEdgeSet, code: int) -> OrientedEdgeSet:
    """Copy of E with every arc of one subgraph flipped (fault injection)."""
    label = []
    for i, lab in enumerate(E.label):
        sel = lab == code
        new = np.where(sel, 0, lab)
        new[_reverse(sel, i)] = code
        label.append(new)
    return OrientedEdgeSet(E.dims, E.m, E.ell, label, E.weight, E.tag, E.kappa, dict(E.orders))
