"""Feynman graphs: bubbles glued by a color-0 perfect matching.

Covers matching enumeration, bicolored-cycle counting, the large-N degree
delta = sum_c L_{0c} + sum_r s_r b_r, the quartic-to-general surjection, the
explicit tree-family construction and the 2-cut property checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .bubbles import Bubble, canonical_pairing, recognize_gm, scaling_coefficient
from .errors import CapExceeded, EnumerationCap, MissingScaling
from .gluing import boundary


@dataclass(frozen=True)
class GraphFamily:
    """Shared skeleton for all matchings over a fixed list of bubble copies.

    Bubble copies are relabeled onto dense indices: whites and blacks each
    get positions 0..n-1. Precomputes, per color, the black position adjacent
    to each white position, so cycle counting is a permutation orbit count.
    """

    d: int
    parts: tuple  # (interaction id, Bubble) per copy, original ids
    white_ids: tuple  # global id per white position
    black_ids: tuple
    copy_of_white: tuple  # copy index per white position
    copy_of_black: tuple
    color_wb: tuple  # color_wb[c-1][w_pos] = black position joined by color c

    @property
    def n(self):
        return len(self.white_ids)


def build_family(parts):
    """Assemble copies into a GraphFamily. `parts` is a list of
    (interaction id, Bubble, count)."""
    d = parts[0][1].d
    copies = []
    for r, b, count in parts:
        if b.d != d:
            raise MissingScaling(f"mixed ranks: {b.d} vs {d}")
        copies.extend((r, b) for _ in range(count))
    white_ids, black_ids = [], []
    copy_of_white, copy_of_black = [], []
    wpos, bpos = {}, {}
    for i, (r, b) in enumerate(copies):
        for w in b.whites:
            wpos[(i, w)] = len(white_ids)
            white_ids.append((i, w))
            copy_of_white.append(i)
        for bl in b.blacks:
            bpos[(i, bl)] = len(black_ids)
            black_ids.append((i, bl))
            copy_of_black.append(i)
    n = len(white_ids)
    color_wb = [[None] * n for _ in range(d)]
    for i, (r, b) in enumerate(copies):
        for c, w, bl in b.edges:
            color_wb[c - 1][wpos[(i, w)]] = bpos[(i, bl)]
    return GraphFamily(
        d,
        tuple(copies),
        tuple(white_ids),
        tuple(black_ids),
        tuple(copy_of_white),
        tuple(copy_of_black),
        tuple(tuple(row) for row in color_wb),
    )


@dataclass(frozen=True)
class FeynmanGraph:
    """A matching on a family: matching[w_pos] = b_pos (color-0 edges)."""

    family: GraphFamily
    matching: tuple

    @property
    def d(self):
        return self.family.d

    def b_counts(self):
        out = {}
        for r, _ in self.family.parts:
            out[r] = out.get(r, 0) + 1
        return out


def bicolored_cycles(g, c):
    """Number of cycles alternating color 0 and color c: orbits of the
    composition of the two matchings on white positions."""
    step = g.family.color_wb[c - 1]
    # white -> (color c) -> black -> (color 0, inverse) -> white
    inv = [0] * len(g.matching)
    for w, b in enumerate(g.matching):
        inv[b] = w
    seen = [False] * len(g.matching)
    count = 0
    for start in range(len(g.matching)):
        if seen[start]:
            continue
        count += 1
        w = start
        while not seen[w]:
            seen[w] = True
            w = inv[step[w]]
    return count


def total_cycles(g):
    return sum(bicolored_cycles(g, c) for c in range(1, g.d + 1))


def is_connected(g):
    """Connectivity of the bubbles-plus-matching graph, at copy granularity
    (each bubble copy is internally connected)."""
    fam = g.family
    k = len(fam.parts)
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for w, b in enumerate(g.matching):
        a, z = find(fam.copy_of_white[w]), find(fam.copy_of_black[b])
        if a != z:
            parent[a] = z
    return len({find(i) for i in range(k)}) == 1


@dataclass(frozen=True)
class Amplitude:
    n_exponent: Fraction
    b_counts: dict

    def __eq__(self, other):
        return (self.n_exponent, self.b_counts) == (other.n_exponent, other.b_counts)


def delta(g, scalings):
    """Large-N degree: sum_c L_{0c} + sum_r s_r b_r, exact rational."""
    counts = g.b_counts()
    for r in counts:
        if r not in scalings:
            raise MissingScaling(f"no scaling coefficient for interaction {r!r}")
    shift = sum(Fraction(scalings[r]) * k for r, k in counts.items())
    return Amplitude(Fraction(total_cycles(g)) + shift, counts)


def enumerate_feynman(parts, connected_only=True, cap=9):
    """Stream every perfect matching of the given bubble copies.

    `parts` is a list of (interaction id, Bubble, count); matchings are
    generated in lexicographic order of white-position targets. The number
    of white vertices must not exceed `cap` (factorial growth)."""
    fam = build_family(parts)
    if fam.n > cap:
        raise CapExceeded(f"{fam.n} white vertices exceeds cap {cap}")
    for perm in itertools.permutations(range(fam.n)):
        g = FeynmanGraph(fam, perm)
        if connected_only and not is_connected(g):
            continue
        yield g


def gmax_filter(graphs, scalings):
    """Graphs attaining the maximal degree in a finite stream."""
    best = None
    out = []
    for g in graphs:
        a = delta(g, scalings).n_exponent
        if best is None or a > best:
            best = a
            out = [g]
        elif a == best:
            out.append(g)
    return out


def canonical_matching_graph(b, cert):
    """Single-bubble graph whose color-0 edges follow the canonical pairing."""
    fam = build_family([("B", b, 1)])
    pairing = canonical_pairing(cert)
    pos_b = {fam.black_ids[i][1]: i for i in range(fam.n)}
    matching = tuple(pos_b[pairing[fam.white_ids[i][1]]] for i in range(fam.n))
    return FeynmanGraph(fam, matching)


def tree_family(b, cert, b_count):
    """Chain of b copies of the canonically matched graph, glued by cutting
    one color-0 edge per junction. Its cycle total is
    (d(V-2)/2 - sum |C| b_C) * b_count + d."""
    fam = build_family([("B", b, b_count)])
    pairing = canonical_pairing(cert)
    pos_b = {fam.black_ids[i]: i for i in range(fam.n)}
    matching = [None] * fam.n
    for w_pos in range(fam.n):
        copy, w = fam.white_ids[w_pos]
        matching[w_pos] = pos_b[(copy, pairing[w])]
    if b_count > 1:
        # cut the base pair's color-0 edge in consecutive copies and reglue
        w0, b0 = cert.base
        for copy in range(b_count - 1):
            i = fam.white_ids.index((copy, w0))
            j = fam.white_ids.index((copy + 1, w0))
            matching[i], matching[j] = matching[j], matching[i]
    return FeynmanGraph(fam, tuple(matching))


def surjection_s(gluings, matching):
    """Replace each gluing copy by its boundary bubble, rerouting the
    color-0 matching through the contractions.

    `gluings` is a list of (interaction id, GluingGraph); `matching` pairs
    the free vertices across copies as ((copy_w, white), (copy_b, black)).
    Returns the quartic-level graph and the bubble-level graph; both carry
    the same bicolored cycle counts."""
    quartic_parts = []
    free_w, free_b = {}, {}
    for i, (r, g) in enumerate(gluings):
        for q in g.quartics:
            bub = Bubble(
                g.d,
                (q.w1, q.w2),
                (q.b1, q.b2),
                tuple(
                    (c, w, bl)
                    for c in range(1, g.d + 1)
                    for w, bl in (
                        [(q.w1, q.b1), (q.w2, q.b2)]
                        if c in q.colors.members
                        else [(q.w1, q.b2), (q.w2, q.b1)]
                    )
                ),
            )
            quartic_parts.append(((i, q.colors), bub, 1, i))
    fam_q = build_family([(r, bub, k) for r, bub, k, _ in quartic_parts])
    # positions are keyed by (copy index within fam_q, original id); we need
    # (gluing copy, original id) instead, so rebuild the lookup
    owner = [entry[3] for entry in quartic_parts]
    wpos = {(owner[ci], w): p for p, (ci, w) in enumerate(fam_q.white_ids)}
    bpos = {(owner[ci], bl): p for p, (ci, bl) in enumerate(fam_q.black_ids)}
    match_q = [None] * fam_q.n
    for i, (r, g) in enumerate(gluings):
        for w, bl in g.dashed:
            match_q[wpos[(i, w)]] = bpos[(i, bl)]
    for (cw, w), (cb, bl) in matching:
        match_q[wpos[(cw, w)]] = bpos[(cb, bl)]
    graph_q = FeynmanGraph(fam_q, tuple(match_q))

    bubble_parts = [(r, boundary(g), 1) for r, g in gluings]
    fam_b = build_family(bubble_parts)
    wpos_b = {fam_b.white_ids[p]: p for p in range(fam_b.n)}
    bpos_b = {fam_b.black_ids[p]: p for p in range(fam_b.n)}
    match_b = [None] * fam_b.n
    for (cw, w), (cb, bl) in matching:
        match_b[wpos_b[(cw, w)]] = bpos_b[(cb, bl)]
    graph_b = FeynmanGraph(fam_b, tuple(match_b))
    return graph_q, graph_b


def enumerate_pairings(b, cap=10):
    """All single-bubble Wick pairings (graphs on one copy of b)."""
    fam = build_family([("B", b, 1)])
    if fam.n > cap:
        raise EnumerationCap(f"{fam.n} white vertices exceeds pairing cap {cap}")
    for perm in itertools.permutations(range(fam.n)):
        yield FeynmanGraph(fam, perm)


def gmax_pairings(b, cap=10):
    """Dominant single-bubble pairings: (max cycle total, list of graphs)."""
    best = -1
    out = []
    for g in enumerate_pairings(b, cap):
        t = total_cycles(g)
        if t > best:
            best, out = t, [g]
        elif t == best:
            out.append(g)
    return best, out


def _is_2_edge_cut(g, w1, w2):
    """True if the two color-0 edges at white positions w1, w2 disconnect
    the graph (copy-level) when both removed."""
    fam = g.family
    k = len(fam.parts)
    adj = {i: [] for i in range(k)}
    for w, b in enumerate(g.matching):
        if w in (w1, w2):
            continue
        a, z = fam.copy_of_white[w], fam.copy_of_black[b]
        adj[a].append(z)
        adj[z].append(a)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) != k


MAXIMAL_2CUT = "Maximal2Cut"
TWO_CUT_ONLY = "2CutOnly"
NEITHER = "Neither"


def maximal_2cut_check(g, marked_copy, cap=10):
    """Classify the marked bubble copy inside a connected graph.

    Searches for a pairing pi of the marked bubble such that every pair is
    joined by a direct color-0 edge or by a color-0 2-edge-cut. Returns
    Maximal2Cut when some such pi is dominant among the marked bubble's own
    pairings, 2CutOnly when only non-dominant pi qualify, else Neither."""
    fam = g.family
    marked_bubble = fam.parts[marked_copy][1]
    best, dominant = gmax_pairings(marked_bubble, cap)
    dominant_matchings = {gg.matching for gg in dominant}
    mw = [p for p in range(fam.n) if fam.copy_of_white[p] == marked_copy]
    mb = [p for p in range(fam.n) if fam.copy_of_black[p] == marked_copy]
    sub_fam = build_family([("B", marked_bubble, 1)])
    wpos = {sub_fam.white_ids[p][1]: p for p in range(sub_fam.n)}
    bpos = {sub_fam.black_ids[p][1]: p for p in range(sub_fam.n)}

    found_2cut = False
    for perm in itertools.permutations(mb):
        ok = True
        for w_pos, b_pos in zip(mw, perm):
            if g.matching[w_pos] == b_pos:
                continue
            # the two color-0 edges leaving w_pos and entering b_pos must cut
            w_other = g.matching.index(b_pos)
            if not _is_2_edge_cut(g, w_pos, w_other):
                ok = False
                break
        if not ok:
            continue
        found_2cut = True
        local = [None] * sub_fam.n
        for w_pos, b_pos in zip(mw, perm):
            w = fam.white_ids[w_pos][1]
            bl = fam.black_ids[b_pos][1]
            local[wpos[w]] = bpos[bl]
        if tuple(local) in dominant_matchings:
            return MAXIMAL_2CUT
    return TWO_CUT_ONLY if found_2cut else NEITHER


def tree_family_cycle_formula(cert, b_count):
    """(d(V-2)/2 - sum |C| b_C) * b + d, the tree-family cycle total."""
    d, V = cert.d, cert.n_vertices
    tot = sum(step.colors.size for step in cert.sequence)
    return (Fraction(d * (V - 2), 2) - tot) * b_count + d


def graph_to_json(g):
    fam = g.family
    return {
        "bubbles": [{"r": str(r), "V": b.n_vertices} for r, b in fam.parts],
        "matching": [
            [list(fam.white_ids[w]), list(fam.black_ids[b])]
            for w, b in enumerate(g.matching)
        ],
    }
