"""Tree matrix model: scalar identity, determinant, exponents, saddle."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from melonforge.bubbles import ColorSet
from melonforge.errors import LogDomain, OrderCap
from melonforge.gluing import PlaneTree, TreeEdge, TreeVertex, single_edge_tree
from melonforge.largen import solve_covariance
from melonforge.matrixmodel import (
    determinant_lemma_check,
    eta_exponents,
    expand_log_interaction,
    expand_log_numeric_check,
    gradient_analytic,
    hs_scalar_check,
    is_totally_unbalanced_tree,
    potential_eval,
    random_plane_tree,
    saddle_point,
    solve_w_fixed_point,
    tree_model,
)


def melonic_path_tree():
    """Rank-3 path with edge sets {1}, {2}: the 6-vertex melonic bubble."""
    return PlaneTree(
        3,
        (TreeVertex((0,), 0), TreeVertex((1, 2), 0), TreeVertex((3,), 0)),
        (TreeEdge(0, 1, ColorSet(3, (1,))), TreeEdge(2, 3, ColorSet(3, (2,)))),
    )


def test_tree_model_invariants():
    tm = tree_model(melonic_path_tree())
    assert tm.n_vertices_bubble == 6
    assert tm.s == Fraction(-4)
    assert math.prod(tm.epsilons.values()) == -1


def test_hs_identity_trivial_and_generic():
    lhs, rhs, err = hs_scalar_check(0.0, 0.0)
    assert err == 0.0
    for z1, z2 in ((0.3, 0.2), (0.5j, -0.4), (0.5, -0.5)):
        _, _, err = hs_scalar_check(z1, z2)
        assert err <= 1e-6


def test_determinant_lemma_single_edge_scalar():
    err = determinant_lemma_check(single_edge_tree(3, (1,)), n=1, trials=10, seed=1)
    assert err < 1e-12


def test_determinant_lemma_path_and_random_trees():
    assert determinant_lemma_check(melonic_path_tree(), n=2, trials=100, seed=2) <= 1e-9
    rng = random.Random(5)
    for _ in range(10):
        t = random_plane_tree(rng, rng.choice([3, 4, 5]), rng.randint(1, 6))
        assert determinant_lemma_check(t, n=3, trials=10, seed=rng.randrange(10 ** 6)) <= 1e-9


def test_eta_exponents_path_all_zero():
    eta = eta_exponents(tree_model(melonic_path_tree()))
    assert all(v == 0 for v in eta.values())


def test_eta_constraints_random_trees():
    rng = random.Random(6)
    for _ in range(50):
        t = random_plane_tree(rng, rng.choice([3, 4, 5, 6]), rng.randint(1, 6))
        eta_exponents(tree_model(t))  # constraint families asserted inside


def test_saddle_path_tree():
    tm = tree_model(melonic_path_tree())
    sol = saddle_point(tm, 0.02)
    assert sol.gradient_norm <= 1e-8
    assert abs(sol.w - 1 + 3 * 0.02 * sol.w ** 3) < 1e-12
    assert abs(sol.w - solve_w_fixed_point(tm, 0.02)) < 1e-11
    # the saddle value is the large-N 2-point function at flipped coupling
    assert abs(sol.w - solve_covariance([(-0.02, 6)]).value) < 1e-12


def test_saddle_zero_coupling_is_free():
    sol = saddle_point(tree_model(melonic_path_tree()), 0.0)
    assert sol.w == 1.0
    assert all(v == 0.0 for v in sol.y.values())
    assert sol.gradient_norm == 0.0


def test_saddle_random_unbalanced_trees():
    rng = random.Random(7)
    for _ in range(10):
        t = random_plane_tree(rng, 5, rng.randint(1, 4), max_set_size=2)
        assert is_totally_unbalanced_tree(t)
        saddle_point(tree_model(t), 0.01)


def test_gradient_analytic_matches_finite_differences_off_saddle():
    tm = tree_model(melonic_path_tree())
    y = {h: 0.05 * (i + 1) for i, h in enumerate(sorted(tm.epsilons))}
    grad = gradient_analytic(tm, y, 0.02)
    for h in y:
        plus, minus = dict(y), dict(y)
        plus[h] += 1e-6
        minus[h] -= 1e-6
        fd = (potential_eval(tm, plus, 0.02) - potential_eval(tm, minus, 0.02)) / 2e-6
        assert abs(fd - grad[h]) < 1e-6


def test_potential_log_domain():
    tm = tree_model(single_edge_tree(3, (1,)))
    hs = sorted(tm.epsilons)
    y = {hs[0]: -2.0, hs[1]: 2.0}  # eps product makes the log argument negative
    with pytest.raises(LogDomain):
        potential_eval(tm, y, 0.1)


def test_expand_log_order_one_and_cyclic_terms():
    tm = tree_model(melonic_path_tree())
    order1 = expand_log_interaction(tm, 1)
    assert order1 == [((0,), 1), ((1,), 1), ((2,), 1)]
    dedup = expand_log_interaction(tm, 3, dedupe=True)
    abc = [x for x in dedup if sorted(x[0]) == [0, 1, 2]]
    # two cyclic classes of three rotations each, 3 * (1/3) = 1
    assert abc == [((0, 1, 2), 1), ((0, 2, 1), 1)]
    with pytest.raises(OrderCap):
        expand_log_interaction(tm, 9)


def test_expand_log_matches_dense_log_det():
    tm = tree_model(melonic_path_tree())
    for seed in (1, 2, 3):
        diff, bound = expand_log_numeric_check(tm, 6, seed=seed)
        assert diff <= max(bound, 1e-12)
