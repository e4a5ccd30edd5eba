import itertools
import math

import numpy as np
import pytest

from hgut.edges import (
    SUB_R,
    SUB_U,
    SUB_Z,
    Orientation,
    build_orientation,
    check_indegree_bound,
    check_relative_difference_bound,
    classify_edges,
    classify_weight,
    degree_order,
    is_full_orientation,
    orientation_violations,
    relative_difference_sides,
    reverse_subgraph,
)
from hgut.grid import CapacityError, Distribution

from conftest import dirichlet_table


def nb(x, i, b):
    y = list(x)
    y[i] = b
    return tuple(y)


def arc_label(E, x, i, b):
    return int(E.label[i][tuple(x) + (b,)])


def test_classify_uniform_all_zero():
    cl = classify_edges(Distribution.uniform((3, 2)))
    assert len(cl) == 6 * 3 / 2 and all(c.tag == "zero" for c in cl.values())


def test_classify_uneven_and_even_examples():
    assert classify_weight(abs(0.8 - 0.2) / 0.8, 2, 50).tag == "uneven"
    c = classify_weight(abs(0.5 - 0.4) / 0.5, 3, 50)
    assert (c.tag, c.kappa) == ("even", 2)


def test_kappa_bracket_edges():
    # w exactly m^{-k+1} belongs to scale k
    assert classify_weight(1 / 3, 3, 50).kappa == 2
    assert classify_weight(1 / 9, 3, 50).kappa == 3
    assert classify_weight(0.5, 3, 50).kappa == 1


def test_capacity():
    with pytest.raises(CapacityError):
        classify_edges(np.full((10, 10, 10, 11), 1 / 11000))


def test_uniform_orientation_all_zero_subgraph():
    E = build_orientation(Distribution.uniform((3, 3)))
    assert len(E.arcs("z")) == 18
    assert not E.arcs("u") and not E.arcs("r") and not E.kappas()
    assert np.all(E.outdegree_array("u") == 0)


def test_point_mass_two_by_two():
    E = build_orientation(Distribution.point_mass((2, 2), (0, 0)))
    assert sorted(E.arcs("u")) == [((0, 0), 0, 1), ((0, 0), 1, 1)]
    assert len(E.arcs("z")) == 2


def test_point_mass_outdegree():
    E = build_orientation(Distribution.point_mass((2, 3), (1, 2)))
    assert E.outdegree((1, 2), "u") == 3


def test_handshake(rng):
    for dims in [(3, 3), (2, 3, 2), (4, 2)]:
        E = build_orientation(dirichlet_table(rng, dims, 0.5))
        undirected = math.prod(dims) * sum(m - 1 for m in dims) // 2
        assert E.outdegree_array("all").sum() == undirected
        assert is_full_orientation(dims, E.masks)


def greedy_order_is_valid(dims, E, kap):
    """Replay max-degree deletion on H^[kappa] and compare with the stored order."""
    pts = list(itertools.product(*(range(m) for m in dims)))
    adj = {x: set() for x in pts}
    for x in pts:
        for i, m in enumerate(dims):
            for b in range(m):
                if b != x[i] and arc_label(E, x, i, b) == kap:
                    y = nb(x, i, b)
                    adj[x].add(y)
                    adj[y].add(x)
    rank = E.orders[kap].reshape(dims)
    order = sorted(pts, key=lambda x: rank[x])
    alive = set(pts)
    for x in order:
        deg = {y: len(adj[y] & alive) for y in alive}
        best = max(deg.values())
        if best == 0:
            # isolated remainder in lexicographic order
            rest = sorted(alive)
            return [rank[y] for y in rest] == sorted(rank[y] for y in rest)
        top = min(y for y in alive if deg[y] == best)
        if x != top:
            return False
        alive.discard(x)
    return True


def test_rule_recheck_on_dirichlet_corpus():
    for s in range(30):
        rng = np.random.default_rng(s)
        ell = dirichlet_table(rng, (3, 3), 0.7)
        E = build_orientation(ell)
        cls = classify_edges(ell)
        has_u = {}
        for (x, i, b), c in cls.items():
            y = nb(x, i, b)
            if c.tag == "uneven":
                src = x if ell[x] > ell[y] else y
                has_u[(src, i)] = True
        for (x, i, b), c in cls.items():
            y = nb(x, i, b)
            fwd, back = arc_label(E, x, i, b), arc_label(E, y, i, x[i])
            assert (fwd == 0) != (back == 0), "each edge exactly once"
            lab = fwd or back
            src = x if fwd else y
            if c.tag == "zero":
                assert lab == SUB_Z and src == x
            elif c.tag == "uneven":
                assert lab == SUB_U and ell[src] > ell[nb(src, i, (y if src == x else x)[i])]
            else:
                hx, hy = has_u.get((x, i), False), has_u.get((y, i), False)
                if not hx and not hy:
                    assert lab == c.kappa
                    rank = E.orders[lab].reshape(ell.shape)
                    dst = y if src == x else x
                    assert rank[src] < rank[dst]
                else:
                    assert lab == SUB_R
                    assert has_u.get((src, i), False)
                    if hx and hy:
                        assert src == x
        for kap in E.kappas():
            assert greedy_order_is_valid(ell.shape, E, kap)
        assert orientation_violations(E) == []


def test_rule_checker_catches_reversal(rng):
    hits = 0
    for _ in range(10):
        E = build_orientation(dirichlet_table(rng, (3, 3), 0.3))
        bad = orientation_violations(reverse_subgraph(E, SUB_U))
        if E.arcs("u"):
            hits += 1
            assert any("heavier" in msg for msg in bad)
    assert hits > 0


def test_degree_order_is_a_bijection(rng):
    E = build_orientation(dirichlet_table(rng, (3, 3, 2), 3.0))
    for rank in E.orders.values():
        assert sorted(rank.tolist()) == list(range(18))


def test_random_orientation_is_full(rng):
    o = Orientation.random((3, 2, 2), rng)
    assert is_full_orientation(o.dims, o.masks)
    assert is_full_orientation(o.dims, o.reversed().masks)


def test_relative_difference_bound_per_point():
    for s in range(30):
        rng = np.random.default_rng(100 + s)
        E = build_orientation(dirichlet_table(rng, [(3, 3), (2, 3, 2), (2, 2, 2)][s % 3], 0.5))
        lhs, rhs = relative_difference_sides(E)
        assert np.all(lhs <= rhs + 1e-9)
        assert check_relative_difference_bound(E)


def test_indegree_bound_cases():
    ell = dirichlet_table(np.random.default_rng(3), (3, 3), 3.0)
    E = build_orientation(ell)
    kaps = E.kappas()
    assert kaps
    kap = kaps[0]
    assert check_indegree_bound(E, kap, [], (0, 0), 0) is True
    assert check_indegree_bound(E, kap, [(0, 0)], (0, 0), 5) is None
    # v ranked first among U + {v}: no arcs come in
    rank = E.orders[kap].reshape(3, 3)
    v = min(itertools.product(range(3), range(3)), key=lambda x: rank[x])
    U = [nb(v, i, b) for i in range(2) for b in range(3) if b != v[i]]
    res = check_indegree_bound(E, kap, U, v, 10)
    assert res is True


def test_indegree_bound_random_probes():
    checked = 0
    for s in range(100):
        rng = np.random.default_rng(200 + s)
        E = build_orientation(dirichlet_table(rng, (3, 3), 2.0))
        for kap in E.kappas():
            v = (int(rng.integers(3)), int(rng.integers(3)))
            U = [nb(v, i, b) for i in range(2) for b in range(3) if b != v[i]]
            g = max(E.outdegree(u, kap) for u in U)
            res = check_indegree_bound(E, kap, U, v, g)
            assert res is not False
            checked += res is True
    assert checked > 50


def test_dot_dump():
    E = build_orientation(Distribution.point_mass((2, 2), (0, 0)))
    dot = E.to_dot()
    assert dot.startswith("digraph") and '"00" -> "10" [label="u"]' in dot
