"""Colored-graph core: validation, bidipole moves, recognition, scaling."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from melonforge.bubbles import (
    Bubble,
    ColorSet,
    all_admissible_colorsets,
    bubble_from_json,
    bubble_to_dot,
    bubble_to_json,
    canonical_pairing,
    certificate_from_json,
    certificate_to_json,
    find_bidipoles,
    insert_bidipole,
    is_totally_unbalanced,
    iso_check,
    quartic,
    random_gm_bubble,
    recognize_gm,
    recognize_gm_exhaustive,
    remove_bidipole,
    scaling_coefficient,
    two_vertex_bubble,
    validate,
)
from melonforge.errors import (
    EmptyOrFullColorSet,
    NotConnected,
    NotRegular,
    ValidationError,
)


def test_colorset_normalizes_to_admissible_representative():
    c = ColorSet(4, (3, 4))
    assert c.members == (1, 2)
    assert ColorSet(3, (2, 3)).members == (1,)
    assert ColorSet(5, (1, 2)).members == (1, 2)


def test_colorset_rejects_empty_and_full():
    with pytest.raises(EmptyOrFullColorSet):
        ColorSet(3, ())
    with pytest.raises(EmptyOrFullColorSet):
        ColorSet(3, (1, 2, 3))


def test_validate_catches_missing_color():
    with pytest.raises(NotRegular):
        validate({"d": 3, "whites": [0], "blacks": [1], "edges": [[1, 0, 1], [2, 0, 1]]})


def test_validate_catches_disconnected():
    b1 = two_vertex_bubble(3, 0, 1)
    b2 = two_vertex_bubble(3, 2, 3)
    edges = b1.edges + b2.edges
    with pytest.raises(NotConnected):
        validate({"d": 3, "whites": [0, 2], "blacks": [1, 3], "edges": [list(e) for e in edges]})


def test_insert_then_remove_is_identity():
    rng = random.Random(1)
    for _ in range(30):
        d = rng.choice([3, 4, 5])
        b = random_gm_bubble(rng, d, rng.randint(0, 3))
        v = rng.choice(b.whites + b.blacks)
        cs = rng.choice(all_admissible_colorsets(d))
        bigger = insert_bidipole(b, v, cs)
        dips = [x for x in find_bidipoles(bigger) if x.w == v and x.colors == cs]
        assert dips
        smaller, _ = remove_bidipole(bigger, dips[0])
        assert iso_check(smaller, b)


def test_quartic_has_four_bidipoles():
    q = quartic(3, ColorSet(3, (1,)))
    assert len(find_bidipoles(q)) == 4


def test_recognition_of_random_gm_bubbles_is_exact():
    rng = random.Random(7)
    for _ in range(40):
        d = rng.choice([3, 4, 5, 6])
        b = random_gm_bubble(rng, d, rng.randint(1, 4))
        cert = recognize_gm(b)
        assert cert is not None
        assert cert.replay() == b


def test_k33_is_not_gm():
    # complete bipartite 3x3 with a proper 3-edge-coloring (latin square)
    edges = []
    for i in range(3):
        for j in range(3):
            edges.append(((i + j) % 3 + 1, 10 + i, 20 + j))
    k33 = Bubble(3, (10, 11, 12), (20, 21, 22), tuple(edges))
    assert recognize_gm(k33) is None
    assert recognize_gm_exhaustive(k33) == set()


def test_exhaustive_recognizer_agrees_with_greedy():
    rng = random.Random(3)
    for _ in range(25):
        d = rng.choice([3, 4])
        b = random_gm_bubble(rng, d, rng.randint(1, 3))
        cert = recognize_gm(b)
        multisets = recognize_gm_exhaustive(b)
        assert multisets == {cert.multiset()}


def test_scaling_of_quartics():
    for d in (3, 4, 5, 6):
        for cs in all_admissible_colorsets(d):
            cert = recognize_gm(quartic(d, cs))
            assert scaling_coefficient(cert) == cs.size - d


def test_totally_unbalanced_flag():
    cert = recognize_gm(quartic(3, ColorSet(3, (1,))))
    assert is_totally_unbalanced(cert)
    cert = recognize_gm(quartic(4, ColorSet(4, (1, 2))))
    assert not is_totally_unbalanced(cert)


def test_canonical_pairing_is_involution_across_classes():
    rng = random.Random(5)
    b = random_gm_bubble(rng, 4, 3)
    cert = recognize_gm(b)
    pairing = canonical_pairing(cert)
    whites, blacks = set(b.whites), set(b.blacks)
    for v, w in pairing.items():
        assert pairing[w] == v
        assert (v in whites) != (w in whites)
        assert v in whites or v in blacks


def test_json_roundtrip():
    rng = random.Random(9)
    b = random_gm_bubble(rng, 5, 2)
    assert bubble_from_json(bubble_to_json(b)) == b
    cert = recognize_gm(b)
    assert certificate_from_json(certificate_to_json(cert)) == cert


def test_dot_export_mentions_every_vertex():
    b = quartic(3, ColorSet(3, (1,)))
    dot = bubble_to_dot(b)
    for v in b.whites + b.blacks:
        assert f"v{v}" in dot
