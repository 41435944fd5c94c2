"""Decorated combinatorial maps and the quartic intermediate-field bijection.

A DecoratedMap is a rotation system (counter-clockwise half-edge order per
vertex) whose edges each carry an admissible ColorSet. Quartic Feynman
graphs map bijectively onto these, turning bicolored cycle counts into face
counts, which reduces the dominance question to planarity-type conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bubbles import ColorSet, quartic
from .errors import EdgeIsBridge, NonQuarticBubble, NotConnected, ValidationError
from .feynman import FeynmanGraph, build_family


@dataclass(frozen=True)
class MapEdge:
    h1: int
    h2: int
    colors: ColorSet


@dataclass(frozen=True)
class DecoratedMap:
    d: int
    vertices: tuple  # tuple of tuples of half-edge ids, ccw order
    edges: tuple  # tuple of MapEdge

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for v in self.vertices:
            for h in v:
                if h in seen:
                    raise ValidationError(f"half-edge {h} listed twice")
                seen.add(h)
        in_edges = set()
        for e in self.edges:
            for h in (e.h1, e.h2):
                if h not in seen:
                    raise ValidationError(f"half-edge {h} not at any vertex")
                if h in in_edges:
                    raise ValidationError(f"half-edge {h} in two edges")
                in_edges.add(h)
            if e.colors.d != self.d:
                raise ValidationError("edge color set has wrong rank")
        if in_edges != seen:
            raise ValidationError("half-edge without an edge")

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def vertex_of(self, h):
        for i, v in enumerate(self.vertices):
            if h in v:
                return i
        raise ValidationError(f"unknown half-edge {h}")

    def alpha(self, h):
        """Edge involution."""
        for e in self.edges:
            if e.h1 == h:
                return e.h2
            if e.h2 == h:
                return e.h1
        raise ValidationError(f"unknown half-edge {h}")


def _sigma_table(vertices):
    """next-half-edge-ccw lookup for a (possibly restricted) rotation."""
    nxt = {}
    for v in vertices:
        k = len(v)
        for i, h in enumerate(v):
            nxt[h] = v[(i + 1) % k]
    return nxt


def _alpha_table(edges):
    a = {}
    for e in edges:
        a[e.h1], a[e.h2] = e.h2, e.h1
    return a


def _count_faces(vertices, edges):
    """Orbits of sigma∘alpha over the given rotation; empty vertices count
    one face each."""
    sigma = _sigma_table(vertices)
    alpha = _alpha_table(edges)
    faces = sum(1 for v in vertices if not v)
    seen = set()
    for h0 in sigma:
        if h0 in seen:
            continue
        faces += 1
        h = h0
        while h not in seen:
            seen.add(h)
            h = sigma[alpha[h]]
    return faces


def _restrict(m, keep):
    """Rotation restricted to a subset of edges (vertices kept, possibly
    emptied)."""
    kept_h = {h for e in keep for h in (e.h1, e.h2)}
    vertices = tuple(tuple(h for h in v if h in kept_h) for v in m.vertices)
    return vertices, tuple(keep)


def faces_of_color(m, c):
    """Faces of the submap keeping edges whose color set contains c."""
    keep = [e for e in m.edges if c in e.colors]
    vertices, edges = _restrict(m, keep)
    return _count_faces(vertices, edges)


def total_faces(m):
    return sum(faces_of_color(m, c) for c in range(1, m.d + 1))


def map_delta(m):
    """Large-N degree through the map side: sum_c F_c + sum_e (|C_e| - d)."""
    return Fraction(total_faces(m)) + sum(e.colors.size - m.d for e in m.edges)


def _components(m, edges=None):
    """Vertex components of the skeleton; returns list of vertex-index sets."""
    if edges is None:
        edges = m.edges
    owner = {}
    for i, v in enumerate(m.vertices):
        for h in v:
            owner[h] = i
    parent = list(range(len(m.vertices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = find(owner[e.h1]), find(owner[e.h2])
        if a != b:
            parent[a] = b
    comps = {}
    for i in range(len(m.vertices)):
        comps.setdefault(find(i), set()).add(i)
    return list(comps.values())


def is_connected_map(m):
    return len(_components(m)) == 1


def genus_by_component(m):
    """Euler genus (2 - V + E - F)/2 of each skeleton component."""
    owner = {}
    for i, v in enumerate(m.vertices):
        for h in v:
            owner[h] = i
    out = []
    for comp in _components(m):
        edges = [e for e in m.edges if owner[e.h1] in comp]
        vertices = [m.vertices[i] for i in comp]
        f = _count_faces(vertices, edges)
        g = Fraction(2 - len(comp) + len(edges) - f, 2)
        out.append(g)
    return out


def is_planar(m):
    return all(g == 0 for g in genus_by_component(m))


def _skeleton_adj(m):
    owner = {}
    for i, v in enumerate(m.vertices):
        for h in v:
            owner[h] = i
    adj = {i: [] for i in range(len(m.vertices))}
    for idx, e in enumerate(m.edges):
        a, b = owner[e.h1], owner[e.h2]
        adj[a].append((b, idx))
        adj[b].append((a, idx))
    return adj


def bridges(m):
    """Indices of bridge edges (self-loops are never bridges)."""
    adj = _skeleton_adj(m)
    n = len(m.vertices)
    disc = [0] * n
    low = [0] * n
    visited = [False] * n
    out = set()
    timer = [1]

    def dfs(root):
        stack = [(root, -1, iter(adj[root]))]
        visited[root] = True
        disc[root] = low[root] = timer[0]
        timer[0] += 1
        while stack:
            u, pe, it = stack[-1]
            advanced = False
            for v, idx in it:
                if idx == pe:
                    continue
                if visited[v]:
                    low[u] = min(low[u], disc[v])
                else:
                    visited[v] = True
                    disc[v] = low[v] = timer[0]
                    timer[0] += 1
                    stack.append((v, idx, iter(adj[v])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    pu = stack[-1][0]
                    low[pu] = min(low[pu], low[u])
                    if low[u] > disc[pu]:
                        out.add(pe)

    for r in range(n):
        if not visited[r]:
            dfs(r)
    return out


def blocks(m):
    """Biconnected components as sets of edge indices; each self-loop is its
    own block."""
    adj = _skeleton_adj(m)
    n = len(m.vertices)
    disc = [0] * n
    low = [0] * n
    visited = [False] * n
    timer = [1]
    out = []
    loop_blocks = []
    owner = {}
    for i, v in enumerate(m.vertices):
        for h in v:
            owner[h] = i
    for idx, e in enumerate(m.edges):
        if owner[e.h1] == owner[e.h2]:
            loop_blocks.append({idx})

    estack = []

    def dfs(root):
        stack = [(root, -1, iter(adj[root]))]
        visited[root] = True
        disc[root] = low[root] = timer[0]
        timer[0] += 1
        while stack:
            u, pe, it = stack[-1]
            advanced = False
            for v, idx in it:
                if idx == pe or v == u:
                    continue
                if visited[v]:
                    if disc[v] < disc[u]:
                        estack.append(idx)
                        low[u] = min(low[u], disc[v])
                else:
                    estack.append(idx)
                    visited[v] = True
                    disc[v] = low[v] = timer[0]
                    timer[0] += 1
                    stack.append((v, idx, iter(adj[v])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    pu = stack[-1][0]
                    low[pu] = min(low[pu], low[u])
                    if low[u] >= disc[pu]:
                        blk = set()
                        while estack:
                            top = estack.pop()
                            blk.add(top)
                            if top == pe:
                                break
                        out.append(blk)

    for r in range(n):
        if not visited[r]:
            dfs(r)
    return out + loop_blocks


DOMINANT_CONDITIONS = (
    "map is planar",
    "every edge with |C_e| < d/2 is a bridge",
    "every single-color-set submap is planar",
    "every block carries a single color set",
)


def classify_dominant(m):
    """Check the four dominance conditions; returns (verdict, diagnostics)
    where diagnostics names the first violated condition or is None."""
    if not is_connected_map(m):
        raise NotConnected("dominance classification needs a connected map")
    d = m.d
    if not is_planar(m):
        return False, DOMINANT_CONDITIONS[0]
    bridge_set = bridges(m)
    for idx, e in enumerate(m.edges):
        if 2 * e.colors.size < d and idx not in bridge_set:
            return False, DOMINANT_CONDITIONS[1]
    for cset in {e.colors for e in m.edges}:
        keep = [e for e in m.edges if e.colors == cset]
        vertices, edges = _restrict(m, keep)
        sub = DecoratedMap(d, tuple(v for v in vertices), edges)
        if not is_planar(sub):
            return False, DOMINANT_CONDITIONS[2]
    for blk in blocks(m):
        if len({m.edges[i].colors for i in blk}) > 1:
            return False, DOMINANT_CONDITIONS[3]
    return True, None


def unhook(m, edge_index, end):
    """Detach one end of a non-bridge edge and hang it on a fresh leaf
    vertex. `end` is 1 or 2, naming the half-edge of the edge to move."""
    if edge_index in bridges(m):
        raise EdgeIsBridge(f"edge {edge_index} is a bridge")
    e = m.edges[edge_index]
    h = e.h1 if end == 1 else e.h2
    vertices = [tuple(x for x in v if x != h) for v in m.vertices]
    vertices.append((h,))
    return DecoratedMap(m.d, tuple(vertices), m.edges)


def submap(m, edge_indices):
    """Submap spanned by the chosen edges; vertices left isolated are
    dropped."""
    keep = [m.edges[i] for i in sorted(edge_indices)]
    vertices, edges = _restrict(m, keep)
    vertices = tuple(v for v in vertices if v)
    return DecoratedMap(m.d, vertices, edges)


def _canonical_pairs(b):
    """The two canonical pairs (white, black) of a quartic bubble, smaller
    white id first, plus the edge color set (complement of the joining
    colors)."""
    if b.n_vertices != 4:
        raise NonQuarticBubble(f"bubble has {b.n_vertices} vertices")
    pairs = []
    label = None
    for w in b.whites:
        for bl in b.blacks:
            joining = b.connecting_colors(w, bl)
            k = len(joining)
            if 2 * k > b.d or (2 * k == b.d and 1 not in joining):
                pairs.append((w, bl))
                comp = frozenset(range(1, b.d + 1)) - joining
                label = ColorSet(b.d, tuple(sorted(comp)))
    if len(pairs) != 2:
        raise NonQuarticBubble("bubble is not a quartic interaction")
    pairs.sort()
    return pairs, label


def j_quartic(g):
    """Intermediate-field bijection: quartic copies become edges, cycles
    alternating canonical pairs and color-0 edges become vertices."""
    fam = g.family
    pairs_of_copy = []
    labels = []
    for r, b in fam.parts:
        pairs, label = _canonical_pairs(b)
        pairs_of_copy.append(pairs)
        labels.append(label)
    # half-edge 2i / 2i+1 for the two pairs of copy i
    wpos = {fam.white_ids[p]: p for p in range(fam.n)}
    bpos = {fam.black_ids[p]: p for p in range(fam.n)}
    half_at_white = {}
    black_of_half = {}
    for i, pairs in enumerate(pairs_of_copy):
        for j, (w, bl) in enumerate(pairs):
            h = 2 * i + j
            half_at_white[wpos[(i, w)]] = h
            black_of_half[h] = bpos[(i, bl)]
    matched_white = {b: w for w, b in enumerate(g.matching)}
    vertices = []
    seen = set()
    for h0 in sorted(black_of_half):
        if h0 in seen:
            continue
        cycle = []
        h = h0
        while h not in seen:
            seen.add(h)
            cycle.append(h)
            h = half_at_white[matched_white[black_of_half[h]]]
        vertices.append(tuple(cycle))
    edges = tuple(MapEdge(2 * i, 2 * i + 1, labels[i]) for i in range(len(labels)))
    return DecoratedMap(g.d, tuple(vertices), edges)


def j_inverse(m):
    """Rebuild the quartic Feynman graph; edge i of the map becomes copy i
    of the standard quartic bubble with its color set."""
    parts = []
    for i, e in enumerate(m.edges):
        if {e.h1, e.h2} != {2 * i, 2 * i + 1}:
            raise ValidationError("expected half-edges 2i, 2i+1 on edge i")
        parts.append((str(e.colors), quartic(m.d, e.colors), 1))
    fam = build_family(parts)
    pairs_of_copy = [_canonical_pairs(b)[0] for _, b in fam.parts]
    wpos = {fam.white_ids[p]: p for p in range(fam.n)}
    bpos = {fam.black_ids[p]: p for p in range(fam.n)}
    matching = [None] * fam.n
    for v in m.vertices:
        k = len(v)
        for idx, h in enumerate(v):
            h_next = v[(idx + 1) % k]
            w_next = pairs_of_copy[h_next // 2][h_next % 2][0]
            b_here = pairs_of_copy[h // 2][h % 2][1]
            matching[wpos[(h_next // 2, w_next)]] = bpos[(h // 2, b_here)]
    return FeynmanGraph(fam, tuple(matching))


def single_edge_map(d, colors, loop=False):
    """One edge: either a self-loop on one vertex or a path on two."""
    e = (MapEdge(0, 1, colors),)
    if loop:
        return DecoratedMap(d, ((0, 1),), e)
    return DecoratedMap(d, ((0,), (1,)), e)


def map_to_json(m):
    return {
        "d": m.d,
        "vertices": [list(v) for v in m.vertices],
        "edges": [
            {"h1": e.h1, "h2": e.h2, "C": sorted(e.colors.members)} for e in m.edges
        ],
    }


def map_from_json(data):
    d = data["d"]
    edges = tuple(
        MapEdge(e["h1"], e["h2"], ColorSet(d, tuple(e["C"]))) for e in data["edges"]
    )
    return DecoratedMap(d, tuple(tuple(v) for v in data["vertices"]), edges)


def map_to_dot(m):
    lines = ["graph decorated_map {"]
    owner = {}
    for i, v in enumerate(m.vertices):
        lines.append(f'  v{i} [shape=point, label=""];')
        for h in v:
            owner[h] = i
    for e in m.edges:
        label = "".join(str(c) for c in sorted(e.colors.members))
        lines.append(f'  v{owner[e.h1]} -- v{owner[e.h2]} [label="{{{label}}}"];')
    lines.append("}")
    return "\n".join(lines)
