import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hgut.grid import (
    CapacityError,
    Distribution,
    GridShape,
    Restriction,
    ZeroMassSubcube,
    as_shape,
    bias,
    bias_norm,
    bias_vector,
    draw_restriction_sigma,
    draw_restriction_t,
    hypercube_means,
    hypercube_projection,
    in_marginal_band,
    pair_for_k,
    project,
    restrict,
    tv_to_uniform,
    verify_projection_bias_bound,
    verify_restriction_tv_bound,
)

from conftest import dirichlet_table


shapes = st.lists(st.integers(2, 4), min_size=1, max_size=3).map(tuple)


@st.composite
def dense_dists(draw, max_cells=64):
    dims = draw(shapes.filter(lambda d: np.prod(d) <= max_cells))
    seed = draw(st.integers(0, 2**32 - 1))
    alpha = draw(st.sampled_from([0.2, 1.0, 5.0]))
    return Distribution.dense(dirichlet_table(np.random.default_rng(seed), dims, alpha))


# --- shapes and restrictions ---------------------------------------------------

def test_shape_rejects_side_one():
    with pytest.raises(ValueError):
        GridShape((2, 1))
    with pytest.raises(ValueError):
        GridShape(())


def test_shape_totals():
    s = as_shape((2, 3, 4))
    assert (s.n, s.total_size, s.max_side) == (3, 24, 4)
    assert s.unflat(s.flat_index((1, 2, 3))) == (1, 2, 3)


def test_restriction_compose_and_stars():
    rho = Restriction((None, 1, None))
    assert rho.stars == (0, 2) and rho.fixed == (1,)
    assert rho.compose(Restriction((0, None))).entries == (0, 1, None)
    assert str(rho) == "(*,1,*)"
    with pytest.raises(ValueError):
        Restriction((5,)).validate(as_shape((3,)))


def test_dense_requires_unit_mass():
    with pytest.raises(ValueError):
        Distribution.dense(np.full((2, 2), 0.3))
    with pytest.raises(ValueError):
        Distribution.dense(np.array([[1.2, -0.2], [0.0, 0.0]]))


def test_product_expansion_respects_cap():
    p = Distribution.uniform((2,) * 30, product=True)
    with pytest.raises(CapacityError):
        p.table


# --- total variation ----------------------------------------------------------------

def test_tv_uniform_is_zero():
    assert tv_to_uniform(Distribution.uniform((2, 3))) == 0


def test_tv_point_mass_two_by_two():
    assert tv_to_uniform(Distribution.point_mass((2, 2), (0, 0))) == pytest.approx(0.75, abs=1e-15)


def test_tv_matches_direct_sum(rng):
    t = dirichlet_table(rng, (3, 3))
    direct = 0.0
    for x in itertools.product(range(3), range(3)):
        direct += abs(t[x] - 1 / 9)
    assert tv_to_uniform(Distribution.dense(t)) == pytest.approx(direct / 2, abs=1e-12)


def test_tv_exact_mode():
    t = np.array([[Fraction(1, 2), Fraction(1, 4)], [Fraction(1, 8), Fraction(1, 8)]], dtype=object)
    assert tv_to_uniform(Distribution.dense(t, exact=True)) == Fraction(1, 4)


@settings(max_examples=40, deadline=None)
@given(dense_dists())
def test_tv_in_range(p):
    v = tv_to_uniform(p)
    assert -1e-15 <= v <= 1 - 1 / p.shape.total_size + 1e-12


# --- projection and restriction -----------------------------------------------------

def test_project_uniform_stays_uniform():
    q = project(Distribution.uniform((2, 3, 4)), [0, 2])
    assert q.shape.dims == (2, 4)
    assert np.allclose(q.table, 1 / 8)


def test_project_product_picks_marginal():
    margs = [np.array([0.2, 0.8]), np.array([0.1, 0.3, 0.6]), np.array([0.5, 0.5])]
    q = project(Distribution.product(margs), [1])
    assert np.allclose(q.table, margs[1])


def test_project_dense_matches_sum(rng):
    t = dirichlet_table(rng, (2, 2, 2))
    q = project(Distribution.dense(t), [0])
    assert np.allclose(q.table, [t[0].sum(), t[1].sum()], atol=1e-15)


def test_project_empty_set_rejected():
    with pytest.raises(ValueError):
        project(Distribution.uniform((2, 2)), [])


def test_restrict_conditional_row(rng):
    t = dirichlet_table(rng, (2, 3))
    q = restrict(Distribution.dense(t), Restriction((1, None)))
    assert np.allclose(q.table, t[1] / t[1].sum(), atol=1e-15)


def test_restrict_all_stars_is_identity(rng):
    t = dirichlet_table(rng, (2, 3))
    q = restrict(Distribution.dense(t), Restriction.all_stars(2))
    assert np.allclose(q.table, t)


def test_restrict_uniform_stays_uniform():
    q = restrict(Distribution.uniform((3, 2, 4)), Restriction((2, None, None)))
    assert np.allclose(q.table, 1 / 8)


def test_restrict_zero_mass_raises():
    p = Distribution.point_mass((2, 2), (0, 0))
    with pytest.raises(ZeroMassSubcube):
        restrict(p, Restriction((1, None)))


@settings(max_examples=40, deadline=None)
@given(dense_dists(), st.data())
def test_restrict_then_project_commutes(p, data):
    n = p.shape.n
    if n < 2:
        return
    fixed_i = data.draw(st.integers(0, n - 1))
    val = data.draw(st.integers(0, p.shape.dims[fixed_i] - 1))
    entries = [None] * n
    entries[fixed_i] = val
    rho = Restriction(tuple(entries))
    if p.mass(rho) <= 0:
        return
    r = restrict(p, rho)
    assert abs(r.table.sum() - 1) < 1e-12
    # brute force: keep the first remaining coordinate
    keep = rho.stars[0]
    sub = np.take(p.table, val, axis=fixed_i)
    brute = sub.sum(axis=tuple(a for a in range(n - 1) if a != rho.stars.index(keep)))
    assert np.allclose(project(r, [0]).table, brute / brute.sum(), atol=1e-12)


# --- bias -------------------------------------------------------------------------

def test_bias_point_mass():
    p = Distribution.point_mass((2, 2), (0, 0))
    assert bias(p, 0, 0, 1) == 1
    assert bias_norm(p) == pytest.approx(2.0)


def test_bias_diagonal_and_formula():
    p = Distribution.product([np.array([0.5, 0.25, 0.25]), np.array([0.5, 0.5])])
    assert bias(p, 0, 1, 1) == 0
    assert bias(p, 0, 0, 1) == pytest.approx(1 / 3)


def test_bias_both_zero_convention():
    p = Distribution.product([np.array([1.0, 0.0, 0.0])])
    assert bias(p, 0, 1, 2) == 0


def test_bias_norm_matches_loop(rng):
    p = Distribution.dense(dirichlet_table(rng, (3, 3)))
    acc = 0.0
    for i in range(2):
        q = p.table.sum(axis=1 - i)
        for c in range(3):
            for d in range(3):
                if q[c] + q[d] > 0:
                    acc += ((q[c] - q[d]) / (q[c] + q[d])) ** 2
    assert bias_norm(p) == pytest.approx(np.sqrt(acc), abs=1e-12)


def test_uniform_has_zero_bias():
    assert bias_norm(Distribution.uniform((3, 4, 2))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(dense_dists())
def test_bias_antisymmetric(p):
    for b in bias_vector(p).mats:
        assert np.array_equal(b, -b.T)
        assert np.all(np.abs(b) <= 1)
        assert np.all(np.diag(b) == 0)


# --- restriction draws ----------------------------------------------------------------

def test_sigma_extremes(rng):
    p = Distribution.dense(dirichlet_table(rng, (2, 3)))
    assert draw_restriction_sigma(p, 1.0, rng).stars == (0, 1)
    assert draw_restriction_sigma(p, 0.0, rng).stars == ()


def test_sigma_star_frequency(rng):
    p = Distribution.uniform((2, 2, 2))
    hits = np.zeros(3)
    draws = 100_000
    for _ in range(draws):
        for i in draw_restriction_sigma(p, 0.5, rng).stars:
            hits[i] += 1
    assert np.all(np.abs(hits / draws - 0.5) < 0.01)


def test_t_extremes_and_range(rng):
    p = Distribution.uniform((2, 3, 2))
    assert draw_restriction_t(p, 3, rng).stars == (0, 1, 2)
    assert draw_restriction_t(p, 0, rng).stars == ()
    with pytest.raises(ValueError):
        draw_restriction_t(p, 4, rng)


def test_t_one_star_uniform(rng):
    p = Distribution.uniform((2, 2, 2))
    hits = np.zeros(3)
    draws = 100_000
    for _ in range(draws):
        hits[draw_restriction_t(p, 1, rng).stars[0]] += 1
    assert np.all(np.abs(hits / draws - 1 / 3) < 0.01)


# --- hypercube projections -----------------------------------------------------------

def test_pair_ordering_row_major():
    assert [pair_for_k(2, k) for k in range(1, 5)] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert pair_for_k(2, 9) == (1, 1)


def test_projection_of_uniform_is_uniform():
    p = Distribution.uniform((3, 2, 3))
    for k in range(1, 10):
        assert np.allclose(hypercube_projection(p, k).table, 1 / 8)


def test_projection_single_binary_coordinate():
    p = Distribution.dense(np.array([0.7, 0.3]))
    q = hypercube_projection(p, 2)  # pair (0, 1)
    assert hypercube_means(q)[0] == pytest.approx(0.4)


def test_projection_matches_bruteforce_pushforward(rng):
    t = dirichlet_table(rng, (3, 3))
    p = Distribution.dense(t)
    for k in range(1, 10):
        c, d = pair_for_k(3, k)
        out = np.zeros((2, 2))
        for x in itertools.product(range(3), range(3)):
            free = [j for j in range(2) if c == d or x[j] not in (c, d)]
            for bits in itertools.product((0, 1), repeat=len(free)):
                z = [0, 0]
                for j in range(2):
                    if j not in free:
                        z[j] = 0 if x[j] == c else 1
                for j, b in zip(free, bits):
                    z[j] = b
                out[tuple(z)] += t[x] / 2 ** len(free)
        assert np.allclose(hypercube_projection(p, k).table, out, atol=1e-14)


# --- exact inequality checks ----------------------------------------------------------

def test_restriction_bound_uniform_is_tight():
    rep = verify_restriction_tv_bound(Distribution.uniform((2, 3)), 0.4)
    assert rep.lhs == pytest.approx(0) and rep.rhs == pytest.approx(0) and rep.holds


def test_restriction_bound_sigma_zero_equality(rng):
    p = Distribution.dense(dirichlet_table(rng, (2, 2, 3)))
    rep = verify_restriction_tv_bound(p, 0.0)
    assert rep.rhs == pytest.approx(rep.lhs, abs=1e-12)


@pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
def test_restriction_bound_random(sigma):
    for s in range(50):
        p = Distribution.dense(dirichlet_table(np.random.default_rng(s), (2, 2, 3)))
        rep = verify_restriction_tv_bound(p, sigma)
        assert rep.holds, (s, rep)
        assert isinstance(rep.holds, bool)


def test_restriction_bound_capacity():
    with pytest.raises(CapacityError):
        verify_restriction_tv_bound(Distribution.uniform((2,) * 7), 0.5)


def test_projection_bias_bound_on_banded_instances():
    count = 0
    for s in range(200):
        rng = np.random.default_rng(s)
        dims = [(2, 2), (3, 3), (3, 2, 3), (2, 2, 2)][s % 4]
        p = Distribution.dense(dirichlet_table(rng, dims, 2.0))
        if not in_marginal_band(p):
            continue
        count += 1
        assert verify_projection_bias_bound(p).holds
    assert count >= 30
