"""Decorated maps: faces, genus, the quartic bijection, dominance rules."""

from __future__ import annotations

import itertools
import random

import pytest

from melonforge.bubbles import ColorSet, all_admissible_colorsets, quartic
from melonforge.errors import EdgeIsBridge
from melonforge.feynman import bicolored_cycles, enumerate_feynman
from melonforge.maps import (
    DecoratedMap,
    MapEdge,
    blocks,
    bridges,
    classify_dominant,
    faces_of_color,
    is_connected_map,
    is_planar,
    j_inverse,
    j_quartic,
    map_delta,
    map_from_json,
    map_to_json,
    single_edge_map,
    submap,
    total_faces,
    unhook,
)


def test_trivial_vertex_has_d_faces():
    m = DecoratedMap(3, ((),), ())
    assert total_faces(m) == 3


def test_self_loop_face_counts():
    m = single_edge_map(3, ColorSet(3, (1,)), loop=True)
    assert [faces_of_color(m, c) for c in (1, 2, 3)] == [2, 1, 1]


def test_plane_tree_face_sum_formula():
    # path with two edges labeled {1}, {2} at rank 3
    m = DecoratedMap(
        3,
        ((0,), (1, 2), (3,)),
        (MapEdge(0, 1, ColorSet(3, (1,))), MapEdge(2, 3, ColorSet(3, (2,)))),
    )
    d = 3
    expected = d + sum(d - e.colors.size for e in m.edges)
    assert total_faces(m) == expected
    assert is_planar(m)


def test_bijection_identity_and_roundtrip_exhaustive_pairs():
    for d in (3, 4):
        csets = all_admissible_colorsets(d)
        for combo in itertools.combinations_with_replacement(csets, 2):
            parts = [(f"{i}", quartic(d, c), 1) for i, c in enumerate(combo)]
            for g in enumerate_feynman(parts):
                m = j_quartic(g)
                assert is_connected_map(m)
                for c in range(1, d + 1):
                    assert bicolored_cycles(g, c) == faces_of_color(m, c)
                assert j_inverse(m).matching == g.matching


def test_unhook_monotonicity_and_bridge_error():
    loop = single_edge_map(3, ColorSet(3, (1,)), loop=True)
    after = unhook(loop, 0, 1)
    assert map_delta(loop) < map_delta(after)
    path = single_edge_map(3, ColorSet(3, (1,)))
    with pytest.raises(EdgeIsBridge):
        unhook(path, 0, 1)


def test_unhook_weak_monotonicity_for_balanced_loop():
    loop = single_edge_map(4, ColorSet(4, (1, 2)), loop=True)
    after = unhook(loop, 0, 2)
    assert map_delta(loop) <= map_delta(after)


def test_classify_dominant_examples():
    tree = DecoratedMap(
        3,
        ((0,), (1, 2), (3,)),
        (MapEdge(0, 1, ColorSet(3, (1,))), MapEdge(2, 3, ColorSet(3, (2,)))),
    )
    assert classify_dominant(tree) == (True, None)

    cycle_same = DecoratedMap(
        4,
        ((0, 2), (1, 3)),
        (MapEdge(0, 1, ColorSet(4, (1, 2))), MapEdge(2, 3, ColorSet(4, (1, 2)))),
    )
    verdict, diag = classify_dominant(cycle_same)
    assert verdict and map_delta(cycle_same) == 4

    cycle_mixed = DecoratedMap(
        4,
        ((0, 2), (1, 3)),
        (MapEdge(0, 1, ColorSet(4, (1, 2))), MapEdge(2, 3, ColorSet(4, (1, 3)))),
    )
    verdict, diag = classify_dominant(cycle_mixed)
    assert not verdict and diag is not None
    assert map_delta(cycle_mixed) < 4


def test_non_bridge_small_set_violates_condition():
    loop = single_edge_map(3, ColorSet(3, (1,)), loop=True)
    verdict, diag = classify_dominant(loop)
    assert not verdict
    assert "bridge" in diag


def test_bridges_and_blocks():
    # two loops joined at one vertex plus a pendant edge
    m = DecoratedMap(
        3,
        ((0, 1, 2, 3, 4), (5,)),
        (
            MapEdge(0, 1, ColorSet(3, (1,))),
            MapEdge(2, 3, ColorSet(3, (2,))),
            MapEdge(4, 5, ColorSet(3, (3,))),
        ),
    )
    assert bridges(m) == {2}
    blks = blocks(m)
    assert sorted(sorted(b) for b in blks) == [[0], [1], [2]]


def test_submap_delta_monotone_on_random_instances():
    rng = random.Random(17)
    csets = all_admissible_colorsets(3)
    for _ in range(10):
        combo = [rng.choice(csets) for _ in range(3)]
        parts = [(f"{i}", quartic(3, c), 1) for i, c in enumerate(combo)]
        g = rng.choice(list(enumerate_feynman(parts)))
        m = j_quartic(g)
        for k in range(1, len(m.edges) + 1):
            for idxs in itertools.combinations(range(len(m.edges)), k):
                sm = submap(m, idxs)
                if is_connected_map(sm):
                    assert map_delta(m) <= map_delta(sm)


def test_map_json_roundtrip():
    m = single_edge_map(4, ColorSet(4, (1, 3)), loop=True)
    assert map_from_json(map_to_json(m)) == m
