"""Shared fixtures: the quartic Feynman-graph ensemble reused by the
bijection-identity and dominance tests."""

from __future__ import annotations

import itertools
import random

import pytest

from melonforge.bubbles import all_admissible_colorsets, quartic
from melonforge.feynman import (
    FeynmanGraph,
    build_family,
    delta,
    enumerate_feynman,
    is_connected,
)


def _random_connected_matchings(fam, rng, n_samples):
    seen = set()
    out = []
    attempts = 0
    while len(out) < n_samples and attempts < 20 * n_samples:
        attempts += 1
        perm = list(range(fam.n))
        rng.shuffle(perm)
        key = tuple(perm)
        if key in seen:
            continue
        seen.add(key)
        g = FeynmanGraph(fam, key)
        if is_connected(g):
            out.append(g)
    return out


@pytest.fixture(scope="session")
def quartic_ensemble():
    """Connected quartic Feynman graphs with their degree: exhaustive for
    up to 3 quartics at ranks 3 and 4, plus seeded samples of 4-quartic
    families (full enumeration at 4 quartics is out of pure-Python reach)."""
    entries = []
    rng = random.Random(20260823)
    for d in (3, 4):
        csets = all_admissible_colorsets(d)
        for b in range(1, 4):
            for combo in itertools.combinations_with_replacement(csets, b):
                parts = [(f"{i}", quartic(d, c), 1) for i, c in enumerate(combo)]
                scalings = {f"{i}": c.size - d for i, c in enumerate(combo)}
                for g in enumerate_feynman(parts, connected_only=True):
                    entries.append((d, g, delta(g, scalings).n_exponent))
        for combo in [
            tuple(rng.choice(csets) for _ in range(4)) for _ in range(3)
        ]:
            parts = [(f"{i}", quartic(d, c), 1) for i, c in enumerate(combo)]
            scalings = {f"{i}": c.size - d for i, c in enumerate(combo)}
            fam = build_family(parts)
            for g in _random_connected_matchings(fam, rng, 1500):
                entries.append((d, g, delta(g, scalings).n_exponent))
    return entries
