"""Edge-colored bubble graphs and the bidipole calculus.

A bubble is a connected bipartite graph whose vertices all have degree d,
with edges properly colored by {1..d} (each color exactly once per vertex).
This module provides validation, the quartic bubbles, bidipole insertion and
removal moves, recognition of bubbles reachable from the 2-vertex bubble by
those moves, the canonical pairing, and the scaling coefficient.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    EmptyOrFullColorSet,
    NotConnected,
    NotBipartite,
    NotProperlyColored,
    NotRegular,
    SizeLimitExceeded,
    ValidationError,
    VertexNotFound,
)


@dataclass(frozen=True, order=True)
class ColorSet:
    """Admissible representative of a color subset C of {1..d}.

    C and its complement describe the same quartic pattern, so the stored
    members are normalized: |C| <= d/2, and 1 in C whenever |C| == d/2.
    """

    d: int
    members: tuple

    def __post_init__(self):
        colors = frozenset(self.members)
        if not colors or len(colors) >= self.d:
            raise EmptyOrFullColorSet(
                f"color set must be a nonempty proper subset of 1..{self.d}, got {sorted(colors)}"
            )
        if not all(isinstance(c, int) and 1 <= c <= self.d for c in colors):
            raise EmptyOrFullColorSet(f"colors out of range 1..{self.d}: {sorted(colors)}")
        if 2 * len(colors) > self.d or (2 * len(colors) == self.d and 1 not in colors):
            colors = frozenset(range(1, self.d + 1)) - colors
        object.__setattr__(self, "members", tuple(sorted(colors)))

    @property
    def size(self):
        return len(self.members)

    @property
    def complement(self):
        """The complementary colors, as a plain frozenset (not admissible)."""
        return frozenset(range(1, self.d + 1)) - frozenset(self.members)

    def __contains__(self, c):
        return c in self.members

    def __iter__(self):
        return iter(self.members)

    def __str__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class Bubble:
    """Immutable bubble graph. Vertex ids are arbitrary integers."""

    d: int
    whites: tuple
    blacks: tuple
    edges: tuple  # (color, white id, black id)

    def __post_init__(self):
        object.__setattr__(self, "whites", tuple(sorted(self.whites)))
        object.__setattr__(self, "blacks", tuple(sorted(self.blacks)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        adj = {}
        for c, w, b in self.edges:
            adj[(w, c)] = b
            adj[(b, c)] = w
        object.__setattr__(self, "_adj", adj)

    @property
    def n_vertices(self):
        return len(self.whites) + len(self.blacks)

    def neighbor(self, v, c):
        return self._adj[(v, c)]

    def is_white(self, v):
        return v in set(self.whites)

    def connecting_colors(self, u, v):
        """Set of colors on edges between u and v."""
        return frozenset(c for c in range(1, self.d + 1) if self._adj.get((u, c)) == v)

    def neighbors(self, v):
        """Distinct neighbors of v."""
        return {self._adj[(v, c)] for c in range(1, self.d + 1)}


def validate(data):
    """Check raw graph data (dict or Bubble) and return a Bubble.

    Raises NotRegular, NotProperlyColored, NotBipartite or NotConnected,
    naming the first violating vertex or edge.
    """
    if isinstance(data, Bubble):
        data = {
            "d": data.d,
            "whites": list(data.whites),
            "blacks": list(data.blacks),
            "edges": [{"c": c, "w": w, "b": b} for c, w, b in data.edges],
        }
    d = data["d"]
    if not isinstance(d, int) or d < 3:
        raise ValidationError(f"d must be an integer >= 3, got {d!r}")
    whites = list(data["whites"])
    blacks = list(data["blacks"])
    if set(whites) & set(blacks):
        v = sorted(set(whites) & set(blacks))[0]
        raise NotBipartite(f"vertex {v} appears in both classes")
    if len(set(whites)) != len(whites) or len(set(blacks)) != len(blacks):
        raise ValidationError("duplicate vertex ids")
    edges = []
    for e in data["edges"]:
        if isinstance(e, dict):
            c, w, b = e["c"], e["w"], e["b"]
        else:
            c, w, b = e
        edges.append((c, w, b))
    white_set, black_set = set(whites), set(blacks)
    seen = {}
    for c, w, b in edges:
        if not 1 <= c <= d:
            raise NotProperlyColored(f"edge ({c},{w},{b}) has color outside 1..{d}")
        if w not in white_set:
            raise NotBipartite(f"edge ({c},{w},{b}): {w} is not a white vertex")
        if b not in black_set:
            raise NotBipartite(f"edge ({c},{w},{b}): {b} is not a black vertex")
        for v in (w, b):
            if (v, c) in seen:
                raise NotProperlyColored(f"color {c} incident twice on vertex {v}")
            seen[(v, c)] = True
    for v in itertools.chain(whites, blacks):
        missing = [c for c in range(1, d + 1) if (v, c) not in seen]
        if missing:
            raise NotRegular(f"vertex {v} is missing color {missing[0]}")
    if len(whites) != len(blacks):
        raise NotRegular(f"{len(whites)} white vs {len(blacks)} black vertices")
    bubble = Bubble(d, tuple(whites), tuple(blacks), tuple(edges))
    if whites:
        reached = {whites[0]}
        stack = [whites[0]]
        while stack:
            v = stack.pop()
            for u in bubble.neighbors(v):
                if u not in reached:
                    reached.add(u)
                    stack.append(u)
        for v in itertools.chain(whites, blacks):
            if v not in reached:
                raise NotConnected(f"vertex {v} is not reachable from {whites[0]}")
    return bubble


def two_vertex_bubble(d, white=0, black=1):
    """The unique 2-vertex bubble: all d colors between one pair."""
    return Bubble(d, (white,), (black,), tuple((c, white, black) for c in range(1, d + 1)))


def quartic(d, colors):
    """The 4-vertex bubble determined by the split colors / complement.

    Layout: whites (0, 2), blacks (1, 3); 0-1 and 2-3 carry the admissible
    set, 0-3 and 2-1 carry the complement.
    """
    cs = colors if isinstance(colors, ColorSet) else ColorSet(d, tuple(colors))
    edges = []
    for c in cs.members:
        edges.append((c, 0, 1))
        edges.append((c, 2, 3))
    for c in sorted(cs.complement):
        edges.append((c, 0, 3))
        edges.append((c, 2, 1))
    return Bubble(d, (0, 2), (1, 3), tuple(edges))


@dataclass(frozen=True)
class Bidipole:
    """A removable triple: vbar joined to w by `colors` and to v by the rest.

    {v, vbar} is the canonical pair (joined by the complement, which has
    >= d/2 colors and excludes color 1 in the tie case).
    """

    v: int
    vbar: int
    w: int
    colors: ColorSet


def _is_canonical_pair(d, joining):
    """True if two vertices joined by `joining` colors form a canonical pair."""
    if 2 * len(joining) > d:
        return True
    return 2 * len(joining) == d and 1 not in joining


def find_bidipoles(b):
    """All bidipoles of b, sorted by (w, colors)."""
    out = []
    for vbar in itertools.chain(b.whites, b.blacks):
        nbrs = b.neighbors(vbar)
        if len(nbrs) != 2:
            continue
        x, y = sorted(nbrs)
        cx = b.connecting_colors(vbar, x)
        if _is_canonical_pair(b.d, cx):
            v, w, cw = x, y, b.connecting_colors(vbar, y)
        else:
            v, w, cw = y, x, cx
        out.append(Bidipole(v, vbar, w, ColorSet(b.d, tuple(cw))))
    out.sort(key=lambda t: (t.w, t.colors))
    return out


def insert_bidipole(b, v, colors, new_ids=None):
    """Insert a bidipole at vertex v: v's `colors` edges move to a new vertex
    of the same class, joined through a new opposite-class partner back to v.

    Returns a bubble with two more vertices. `new_ids`, if given, fixes the
    ids (same-class vertex, partner) of the two new vertices.
    """
    cs = colors if isinstance(colors, ColorSet) else ColorSet(b.d, tuple(colors))
    all_ids = set(b.whites) | set(b.blacks)
    if v not in all_ids:
        raise VertexNotFound(f"vertex {v} not in bubble")
    if new_ids is None:
        nxt = max(all_ids) + 1
        new_same, new_partner = nxt, nxt + 1
    else:
        new_same, new_partner = new_ids
        if {new_same, new_partner} & all_ids or new_same == new_partner:
            raise ValidationError(f"new ids {new_ids} clash with existing vertices")
    v_white = v in set(b.whites)
    chat = sorted(cs.complement)
    edges = []
    for c, w, bl in b.edges:
        if c in cs.members and (w == v or bl == v):
            if v_white:
                edges.append((c, new_same, bl))
            else:
                edges.append((c, w, new_same))
        else:
            edges.append((c, w, bl))
    for c in chat:
        if v_white:
            edges.append((c, new_same, new_partner))
        else:
            edges.append((c, new_partner, new_same))
    for c in cs.members:
        if v_white:
            edges.append((c, v, new_partner))
        else:
            edges.append((c, new_partner, v))
    if v_white:
        whites = b.whites + (new_same,)
        blacks = b.blacks + (new_partner,)
    else:
        whites = b.whites + (new_partner,)
        blacks = b.blacks + (new_same,)
    return Bubble(b.d, whites, blacks, tuple(edges))


def remove_bidipole(b, bidipole):
    """Inverse of insert_bidipole: deletes {v, vbar} and reattaches v's
    outer edges to w. Returns (smaller bubble, canonical pair (v, vbar))."""
    v, vbar, w, cs = bidipole.v, bidipole.vbar, bidipole.w, bidipole.colors
    edges = []
    for c, wh, bl in b.edges:
        if vbar in (wh, bl):
            continue
        if wh == v:
            edges.append((c, w, bl))
        elif bl == v:
            edges.append((c, wh, w))
        else:
            edges.append((c, wh, bl))
    whites = tuple(x for x in b.whites if x not in (v, vbar))
    blacks = tuple(x for x in b.blacks if x not in (v, vbar))
    return Bubble(b.d, whites, blacks, tuple(edges)), (v, vbar)


@dataclass(frozen=True)
class InsertionStep:
    target: int
    colors: ColorSet
    new_same: int  # new vertex of the same class as target
    new_partner: int  # its canonical partner


@dataclass(frozen=True)
class GmCertificate:
    """Witness that a bubble is reachable from the 2-vertex bubble.

    `sequence` replays the construction exactly (ids included); `base` is the
    remaining 2-vertex bubble (white id, black id). The insertion multiset
    has one entry per step, hence (V-2)/2 entries in total.
    """

    d: int
    base: tuple
    sequence: tuple  # of InsertionStep
    n_vertices: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n_vertices", 2 + 2 * len(self.sequence))

    def multiset(self):
        """Insertion color sets, as a sorted tuple (a multiset with order fixed)."""
        return tuple(sorted(step.colors for step in self.sequence))

    def counts(self):
        """Map ColorSet -> number of insertions with that set."""
        out = {}
        for step in self.sequence:
            out[step.colors] = out.get(step.colors, 0) + 1
        return out

    def replay(self):
        """Rebuild the bubble from the 2-vertex bubble, ids and all."""
        b = two_vertex_bubble(self.d, *self.base)
        for step in self.sequence:
            b = insert_bidipole(b, step.target, step.colors, (step.new_same, step.new_partner))
        return b


def recognize_gm(b, order_picker=None):
    """Greedy recognition: repeatedly remove any bidipole.

    Returns a GmCertificate, or None if the bubble is not reachable from the
    2-vertex bubble. The resulting multiset is removal-order independent;
    `order_picker(candidates) -> Bidipole` can force a particular order.
    """
    steps = []
    cur = b
    while cur.n_vertices > 2:
        cands = find_bidipoles(cur)
        if not cands:
            return None
        pick = cands[0] if order_picker is None else order_picker(cands)
        cur, (v, vbar) = remove_bidipole(cur, pick)
        steps.append(InsertionStep(pick.w, pick.colors, v, vbar))
    base = (cur.whites[0], cur.blacks[0])
    return GmCertificate(b.d, base, tuple(reversed(steps)))


def recognize_gm_exhaustive(b, _memo=None):
    """Backtracking recognizer: explores every removal order.

    Returns the set of insertion multisets reachable by complete reductions
    (empty set if none). Used to cross-check the greedy algorithm on small
    bubbles; exponential without the memo on canonical forms.
    """
    if _memo is None:
        _memo = {}
    if b.n_vertices == 2:
        return {()}
    key = canonical_key(b)
    if key in _memo:
        return _memo[key]
    _memo[key] = set()  # cycle guard (removals shrink, so never hit)
    results = set()
    for bd in find_bidipoles(b):
        smaller, _ = remove_bidipole(b, bd)
        for ms in recognize_gm_exhaustive(smaller, _memo):
            results.add(tuple(sorted(ms + (bd.colors,))))
    _memo[key] = results
    return results


def canonical_pairing(cert):
    """The unique fixed-point-free black/white involution of the bubble:
    base pair plus one pair per insertion step."""
    pairing = {cert.base[0]: cert.base[1], cert.base[1]: cert.base[0]}
    for step in cert.sequence:
        pairing[step.new_same] = step.new_partner
        pairing[step.new_partner] = step.new_same
    return pairing


def is_totally_unbalanced(cert):
    """True iff every insertion set has strictly fewer than d/2 colors."""
    return all(2 * step.colors.size < cert.d for step in cert.sequence)


def scaling_coefficient(cert, d=None, n_vertices=None):
    """s = sum |C| b_C - d(V-2)/2, exact rational."""
    d = cert.d if d is None else d
    V = cert.n_vertices if n_vertices is None else n_vertices
    total = sum(step.colors.size for step in cert.sequence)
    return Fraction(total) - Fraction(d * (V - 2), 2)


def canonical_key(b, max_vertices=256):
    """Canonical form of a bubble under color- and class-preserving
    isomorphism. Proper edge coloring makes the graph rigid once a root is
    fixed, so a BFS relabeling per white root suffices; we take the minimum."""
    if b.n_vertices > max_vertices:
        raise SizeLimitExceeded(f"{b.n_vertices} vertices exceeds limit {max_vertices}")
    best = None
    for root in b.whites:
        index = {root: 0}
        order = [root]
        for v in order:
            for c in range(1, b.d + 1):
                u = b.neighbor(v, c)
                if u not in index:
                    index[u] = len(order)
                    order.append(u)
        code = tuple(
            tuple(index[b.neighbor(v, c)] for c in range(1, b.d + 1)) for v in order
        )
        if best is None or code < best:
            best = code
    return (b.d, best)


def iso_check(a, b, max_vertices=256):
    """Color-preserving, class-preserving isomorphism test."""
    if a.d != b.d or a.n_vertices != b.n_vertices:
        return False
    return canonical_key(a, max_vertices) == canonical_key(b, max_vertices)


def random_gm_bubble(rng, d, n_insertions, max_set_size=None, colorsets=None):
    """Random bubble built by `n_insertions` bidipole insertions.

    Returns the bubble; recover its certificate with recognize_gm. The
    insertion sets are drawn uniformly from `colorsets` when given, otherwise
    from all admissible sets with at most `max_set_size` colors.
    """
    if colorsets is None:
        colorsets = all_admissible_colorsets(d, max_set_size)
    b = two_vertex_bubble(d)
    for _ in range(n_insertions):
        v = rng.choice(sorted(set(b.whites) | set(b.blacks)))
        b = insert_bidipole(b, v, rng.choice(colorsets))
    return b


def all_admissible_colorsets(d, max_size=None):
    """Every admissible color set at rank d, sorted."""
    limit = d // 2 if max_size is None else min(max_size, d // 2)
    out = set()
    for k in range(1, limit + 1):
        for combo in itertools.combinations(range(1, d + 1), k):
            try:
                out.add(ColorSet(d, combo))
            except EmptyOrFullColorSet:
                pass
    return sorted(out)


def bubble_to_json(b):
    return {
        "d": b.d,
        "whites": list(b.whites),
        "blacks": list(b.blacks),
        "edges": [{"c": c, "w": w, "b": bl} for c, w, bl in b.edges],
    }


def bubble_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    return validate(data)


def certificate_to_json(cert):
    return {
        "d": cert.d,
        "base": list(cert.base),
        "multiset": [list(cs.members) for cs in cert.multiset()],
        "pairing": {str(k): v for k, v in canonical_pairing(cert).items()},
        "sequence": [
            {
                "target": s.target,
                "colors": list(s.colors.members),
                "new_same": s.new_same,
                "new_partner": s.new_partner,
            }
            for s in cert.sequence
        ],
    }


def certificate_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    d = data["d"]
    seq = tuple(
        InsertionStep(s["target"], ColorSet(d, tuple(s["colors"])), s["new_same"], s["new_partner"])
        for s in data["sequence"]
    )
    return GmCertificate(d, tuple(data["base"]), seq)


def bubble_to_dot(b):
    lines = ["graph bubble {"]
    for v in b.whites:
        lines.append(f'  v{v} [shape=circle, label="{v}"];')
    for v in b.blacks:
        lines.append(f'  v{v} [shape=circle, style=filled, fillcolor=black, fontcolor=white, label="{v}"];')
    for c, w, bl in b.edges:
        lines.append(f'  v{w} -- v{bl} [label="{c}"];')
    lines.append("}")
    return "\n".join(lines)
