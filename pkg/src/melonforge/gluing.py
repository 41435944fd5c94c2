"""Quartic gluings, the boundary operator, and plane trees with marked corners.

A gluing graph is a collection of quartic bubbles joined by dashed lines
(at most one per vertex). When every dashed line is an edge-cut the gluing
is a tree of quartics; such gluings are in bijection with plane trees
carrying one marked corner per vertex, where quartics become edges,
canonical vertex pairs become half-edges and dashed lines become unmarked
corners.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .bubbles import Bubble, ColorSet, two_vertex_bubble
from .errors import CertificateMismatch, NotATreeGluing, ValidationError


@dataclass(frozen=True)
class QuarticBlock:
    """One quartic bubble inside a gluing. Edges: w1-b1 and w2-b2 carry the
    color set, w1-b2 and w2-b1 carry the complement. Canonical pairs are
    (w1, b2) and (w2, b1)."""

    colors: ColorSet
    w1: int
    b1: int
    w2: int
    b2: int

    @property
    def vertices(self):
        return (self.w1, self.b1, self.w2, self.b2)

    @property
    def pairs(self):
        return ((self.w1, self.b2), (self.w2, self.b1))


@dataclass(frozen=True)
class GluingGraph:
    d: int
    quartics: tuple  # of QuarticBlock
    dashed: tuple  # of (white id, black id)

    def __post_init__(self):
        seen = set()
        for q in self.quartics:
            for v in q.vertices:
                if v in seen:
                    raise ValidationError(f"vertex {v} used by two quartics")
                seen.add(v)
        used = set()
        for w, b in self.dashed:
            if w not in seen or b not in seen:
                raise ValidationError(f"dashed line ({w},{b}) touches an unknown vertex")
            if w in used or b in used:
                raise ValidationError(f"vertex with two dashed lines in ({w},{b})")
            used.update((w, b))
        if self.quartics and not _gluing_connected(self):
            raise ValidationError("gluing graph is not connected")

    @property
    def free_vertices(self):
        used = {v for line in self.dashed for v in line}
        return tuple(v for q in self.quartics for v in q.vertices if v not in used)

    def whites(self):
        return {v for q in self.quartics for v in (q.w1, q.w2)}


def _quartic_adjacency(g):
    """Quartic index per vertex, and the dashed lines as index pairs."""
    owner = {}
    for i, q in enumerate(g.quartics):
        for v in q.vertices:
            owner[v] = i
    links = [(owner[w], owner[b]) for w, b in g.dashed]
    return owner, links


def _gluing_connected(g):
    owner, links = _quartic_adjacency(g)
    n = len(g.quartics)
    adj = {i: set() for i in range(n)}
    for i, j in links:
        adj[i].add(j)
        adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def is_tree_gluing(g):
    """True iff every dashed line is an edge-cut: the quartic-contraction
    graph (quartics as nodes, dashed lines as links) is a tree."""
    return len(g.dashed) == len(g.quartics) - 1


def boundary(g):
    """Contract all dashed lines: remove both endpoints and reconnect the
    colored half-edges by color. Order-independent; returns a Bubble."""
    d = g.d
    adj = {}
    whites, blacks = set(), set()
    for q in g.quartics:
        whites.update((q.w1, q.w2))
        blacks.update((q.b1, q.b2))
        for c in range(1, d + 1):
            if c in q.colors.members:
                pairs = [(q.w1, q.b1), (q.w2, q.b2)]
            else:
                pairs = [(q.w1, q.b2), (q.w2, q.b1)]
            for w, b in pairs:
                adj[(w, c)] = b
                adj[(b, c)] = w
    for w, b in g.dashed:
        # splice: every color-c edge at w joins the color-c edge at b
        for c in range(1, d + 1):
            u, v = adj[(w, c)], adj[(b, c)]
            adj[(u, c)] = v
            adj[(v, c)] = u
        whites.discard(w)
        blacks.discard(b)
        for c in range(1, d + 1):
            del adj[(w, c)]
            del adj[(b, c)]
    edges = tuple((c, w, adj[(w, c)]) for w in whites for c in range(1, d + 1))
    return Bubble(d, tuple(whites), tuple(blacks), edges)


def decompose(b, cert):
    """Build a tree gluing whose boundary is isomorphic to b, by replaying
    the certificate: one quartic per insertion step, joined by dashed lines.

    The quartic multiset equals the certificate's insertion multiset."""
    if cert.replay() != b:
        raise CertificateMismatch("certificate does not replay to the given bubble")
    if not cert.sequence:
        raise CertificateMismatch("a 2-vertex bubble has no quartic decomposition")
    first = cert.sequence[0]
    w0, b0 = cert.base
    rep = {}  # bubble vertex id -> current free vertex of the gluing
    fresh = itertools.count(max(max(s.new_same, s.new_partner) for s in cert.sequence)
                            + max(w0, b0) + 1)
    if first.target == w0:
        # white target: quartic (w1=w0, b1=partner, w2=new, b2=b0)
        q = QuarticBlock(first.colors, w0, first.new_partner, first.new_same, b0)
    elif first.target == b0:
        q = QuarticBlock(first.colors, w0, first.new_same, first.new_partner, b0)
    else:
        raise CertificateMismatch("first step does not target the base bubble")
    quartics = [q]
    dashed = []
    for v in q.vertices:
        rep[v] = v
    for step in cert.sequence[1:]:
        w1, b1, w2, b2 = (next(fresh) for _ in range(4))
        q = QuarticBlock(step.colors, w1, b1, w2, b2)
        quartics.append(q)
        target_rep = rep[step.target]
        if target_rep in {x for qq in quartics[:-1] for x in (qq.w1, qq.w2)}:
            # white target: dashed line lands on b1; after contraction
            # w1 plays the new same-class vertex, b2 its partner, w2 the target
            dashed.append((target_rep, b1))
            rep[step.new_same] = w1
            rep[step.new_partner] = b2
            rep[step.target] = w2
        else:
            dashed.append((w1, target_rep))
            rep[step.new_same] = b1
            rep[step.new_partner] = w2
            rep[step.target] = b2
    return GluingGraph(b.d, tuple(quartics), tuple(dashed))


@dataclass(frozen=True)
class TreeEdge:
    h1: int
    h2: int
    colors: ColorSet


@dataclass(frozen=True)
class TreeVertex:
    halfedges: tuple  # ids in counter-clockwise order
    marked_corner: int  # corner index i sits between halfedges[i] and halfedges[i+1]


@dataclass(frozen=True)
class PlaneTree:
    d: int
    vertices: tuple  # of TreeVertex
    edges: tuple  # of TreeEdge

    def __post_init__(self):
        hs = [h for v in self.vertices for h in v.halfedges]
        if len(hs) != len(set(hs)):
            raise ValidationError("half-edge id used twice")
        ends = {h for e in self.edges for h in (e.h1, e.h2)}
        if ends != set(hs) or len(ends) != 2 * len(self.edges):
            raise ValidationError("half-edges and edges do not match up")
        if len(self.vertices) != len(self.edges) + 1:
            raise ValidationError("not a tree: vertex count must exceed edge count by one")
        for v in self.vertices:
            if not 0 <= v.marked_corner < len(v.halfedges):
                raise ValidationError(f"marked corner {v.marked_corner} out of range")

    @property
    def n_edges(self):
        return len(self.edges)

    def partner(self, h):
        for e in self.edges:
            if e.h1 == h:
                return e.h2
            if e.h2 == h:
                return e.h1
        raise KeyError(h)

    def vertex_of(self, h):
        for i, v in enumerate(self.vertices):
            if h in v.halfedges:
                return i
        raise KeyError(h)

    def path_order(self, v):
        """Half-edges of vertex v in traversal order: counter-clockwise
        starting right after the marked corner."""
        hs, m = v.halfedges, v.marked_corner
        k = len(hs)
        return tuple(hs[(m + 1 + i) % k] for i in range(k))


def to_plane_tree(g):
    """Bijection from tree gluings to plane trees with marked corners."""
    if not is_tree_gluing(g):
        raise NotATreeGluing("some dashed line is not an edge-cut")
    pair_of = {}
    halfedge_pair = {}
    edges = []
    for i, q in enumerate(g.quartics):
        p1, p2 = q.pairs
        halfedge_pair[2 * i] = p1
        halfedge_pair[2 * i + 1] = p2
        pair_of[p1[0]] = 2 * i
        pair_of[p1[1]] = 2 * i
        pair_of[p2[0]] = 2 * i + 1
        pair_of[p2[1]] = 2 * i + 1
        edges.append(TreeEdge(2 * i, 2 * i + 1, q.colors))
    dash_from_black = {b: w for w, b in g.dashed}
    used_whites = {w for w, _ in g.dashed}
    vertices = []
    for q in g.quartics:
        for white, black in q.pairs:
            if white in used_whites:
                continue
            # start of a path: walk pair -> black end -> dashed -> next pair
            hs = []
            cur_white, cur_black = white, black
            while True:
                hs.append(pair_of[cur_white])
                if cur_black not in dash_from_black:
                    break
                nxt = dash_from_black[cur_black]
                h = pair_of[nxt]
                cur_white, cur_black = halfedge_pair[h]
            vertices.append(TreeVertex(tuple(hs), len(hs) - 1))
    return PlaneTree(g.d, tuple(vertices), tuple(edges))


def from_plane_tree(t):
    """Inverse of to_plane_tree, with deterministic fresh vertex ids."""
    hindex = {}
    blocks = []
    for j, e in enumerate(t.edges):
        q = QuarticBlock(e.colors, 4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3)
        blocks.append(q)
        hindex[e.h1] = q.pairs[0]
        hindex[e.h2] = q.pairs[1]
    dashed = []
    for v in t.vertices:
        order = [hindex[h] for h in t.path_order(v)]
        for (w_a, b_a), (w_b, b_b) in zip(order, order[1:]):
            dashed.append((w_b, b_a))
    return GluingGraph(t.d, tuple(blocks), tuple(dashed))


def plane_tree_canonical(t):
    """Canonical code, invariant under half-edge relabeling and vertex
    reordering. There is no rerooting freedom: marked corners linearize each
    vertex, so the code is the minimum over root choices of a planted
    encoding."""

    vert_of = {}
    for i, v in enumerate(t.vertices):
        for h in v.halfedges:
            vert_of[h] = i
    partner = {}
    colors_of = {}
    for e in t.edges:
        partner[e.h1] = e.h2
        partner[e.h2] = e.h1
        colors_of[e.h1] = colors_of[e.h2] = e.colors.members

    def encode(vi, h_in):
        order = t.vertices[vi]
        lin = t.path_order(order)
        pos = None if h_in is None else lin.index(h_in)
        subs = []
        for h in lin:
            if h == h_in:
                continue
            h2 = partner[h]
            subs.append((lin.index(h), colors_of[h], encode(vert_of[h2], h2)))
        return (pos, tuple(subs))

    return min(encode(i, None) for i in range(len(t.vertices)))


def single_edge_tree(d, colors):
    """The tree image of one quartic: one edge, both corners marked."""
    cs = colors if isinstance(colors, ColorSet) else ColorSet(d, tuple(colors))
    return PlaneTree(
        d,
        (TreeVertex((0,), 0), TreeVertex((1,), 0)),
        (TreeEdge(0, 1, cs),),
    )


def plane_tree_to_json(t):
    return {
        "d": t.d,
        "vertices": [
            {"halfedges": list(v.halfedges), "marked_corner": v.marked_corner}
            for v in t.vertices
        ],
        "edges": [{"h1": e.h1, "h2": e.h2, "C": list(e.colors.members)} for e in t.edges],
    }


def plane_tree_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    d = data["d"]
    vertices = tuple(
        TreeVertex(tuple(v["halfedges"]), v["marked_corner"]) for v in data["vertices"]
    )
    edges = tuple(TreeEdge(e["h1"], e["h2"], ColorSet(d, tuple(e["C"]))) for e in data["edges"])
    return PlaneTree(d, vertices, edges)


def gluing_to_json(g):
    return {
        "d": g.d,
        "quartics": [
            {"C": list(q.colors.members), "w1": q.w1, "b1": q.b1, "w2": q.w2, "b2": q.b2}
            for q in g.quartics
        ],
        "dashed": [list(line) for line in g.dashed],
    }


def gluing_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    d = data["d"]
    quartics = tuple(
        QuarticBlock(ColorSet(d, tuple(q["C"])), q["w1"], q["b1"], q["w2"], q["b2"])
        for q in data["quartics"]
    )
    return GluingGraph(d, quartics, tuple(tuple(line) for line in data["dashed"]))


def plane_tree_to_dot(t):
    lines = ["graph tree {"]
    for i, v in enumerate(t.vertices):
        lines.append(f'  n{i} [label="{i} (mark {v.marked_corner})"];')
    vert_of = {h: i for i, v in enumerate(t.vertices) for h in v.halfedges}
    for e in t.edges:
        label = ",".join(map(str, e.colors.members))
        lines.append(f'  n{vert_of[e.h1]} -- n{vert_of[e.h2]} [label="{{{label}}}"];')
    lines.append("}")
    return "\n".join(lines)


def gluing_to_dot(g):
    lines = ["graph gluing {"]
    for i, q in enumerate(g.quartics):
        label = ",".join(map(str, q.colors.members))
        for v in (q.w1, q.w2):
            lines.append(f'  v{v} [shape=circle, label="{v}"];')
        for v in (q.b1, q.b2):
            lines.append(f'  v{v} [shape=circle, style=filled, fillcolor=black, fontcolor=white, label="{v}"];')
        lines.append(f'  v{q.w1} -- v{q.b1} [label="{{{label}}}"];')
        lines.append(f'  v{q.w2} -- v{q.b2} [label="{{{label}}}"];')
        lines.append(f'  v{q.w1} -- v{q.b2} [label="^"];')
        lines.append(f'  v{q.w2} -- v{q.b1} [label="^"];')
    for w, b in g.dashed:
        lines.append(f"  v{w} -- v{b} [style=dashed];")
    lines.append("}")
    return "\n".join(lines)
