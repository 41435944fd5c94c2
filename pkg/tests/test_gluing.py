"""Quartic gluings, the boundary contraction, and plane-tree form."""

from __future__ import annotations

import random

import pytest

from melonforge.bubbles import iso_check, random_gm_bubble, recognize_gm, two_vertex_bubble
from melonforge.errors import CertificateMismatch, NotATreeGluing
from melonforge.gluing import (
    boundary,
    decompose,
    from_plane_tree,
    gluing_from_json,
    gluing_to_json,
    is_tree_gluing,
    plane_tree_canonical,
    plane_tree_from_json,
    plane_tree_to_json,
    to_plane_tree,
)


def test_decompose_boundary_roundtrip():
    rng = random.Random(2)
    for _ in range(40):
        d = rng.choice([3, 4, 5])
        b = random_gm_bubble(rng, d, rng.randint(1, 4))
        cert = recognize_gm(b)
        g = decompose(b, cert)
        assert is_tree_gluing(g)
        assert len(g.quartics) == b.n_vertices // 2 - 1
        assert len(g.dashed) == b.n_vertices // 2 - 2
        assert iso_check(boundary(g), b)
        assert sorted(q.colors for q in g.quartics) == list(cert.multiset())


def test_decompose_rejects_stale_certificate():
    rng = random.Random(4)
    b1 = random_gm_bubble(rng, 3, 2)
    b2 = random_gm_bubble(rng, 3, 3)
    with pytest.raises(CertificateMismatch):
        decompose(b1, recognize_gm(b2))


def test_two_vertex_bubble_has_no_decomposition():
    b = two_vertex_bubble(3)
    with pytest.raises(CertificateMismatch):
        decompose(b, recognize_gm(b))


def test_plane_tree_roundtrip():
    rng = random.Random(6)
    for _ in range(40):
        d = rng.choice([3, 4])
        b = random_gm_bubble(rng, d, rng.randint(1, 4))
        g = decompose(b, recognize_gm(b))
        t = to_plane_tree(g)
        assert len(t.vertices) == len(t.edges) + 1
        g2 = from_plane_tree(t)
        t2 = to_plane_tree(g2)
        assert plane_tree_canonical(t2) == plane_tree_canonical(t)
        assert iso_check(boundary(g2), b)


def test_non_tree_gluing_rejected_for_tree_form():
    rng = random.Random(8)
    b = random_gm_bubble(rng, 3, 2)
    g = decompose(b, recognize_gm(b))
    # close a dashed cycle by adding a second dashed line between the
    # free white/black of the same quartic pair
    free_w = sorted(boundary(g).whites)
    free_b = sorted(boundary(g).blacks)
    bad = type(g)(g.d, g.quartics, g.dashed + ((free_w[0], free_b[0]), (free_w[1], free_b[1])))
    assert not is_tree_gluing(bad)
    with pytest.raises(NotATreeGluing):
        to_plane_tree(bad)


def test_json_roundtrips():
    rng = random.Random(10)
    b = random_gm_bubble(rng, 4, 3)
    g = decompose(b, recognize_gm(b))
    assert gluing_from_json(gluing_to_json(g)) == g
    t = to_plane_tree(g)
    assert plane_tree_from_json(plane_tree_to_json(t)) == t
