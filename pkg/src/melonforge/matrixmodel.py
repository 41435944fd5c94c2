"""Tree-indexed matrix model: numeric and exact verification layer.

A GM bubble corresponds to a plane tree with one marked corner per vertex
and an admissible color set per edge. The interaction rewrites as a matrix
model whose potential involves -tr ln(1 - sum over vertices of the ccw
product of half-edge matrices). This module verifies the pieces of that
rewriting: the scalar Gaussian-linearization identity, the corner-indexed
block determinant, the per-half-edge rescaling exponents, the saddle-point
solution, and the word expansion of the log interaction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    GradientTooLarge,
    LogDomain,
    NoConvergence,
    OrderCap,
    QuadratureDiverged,
    SingularDiagnostic,
)
from .gluing import PlaneTree, TreeEdge, TreeVertex


@dataclass(frozen=True)
class TreeModel:
    """Plane tree plus sign assignment; V and s follow from the edge data."""

    tree: PlaneTree
    epsilons: dict  # half-edge id -> +1 / -1, product over all = -1

    def __post_init__(self):
        prod = 1
        hs = {h for e in self.tree.edges for h in (e.h1, e.h2)}
        for h in hs:
            prod *= self.epsilons[h]
        if prod != -1 or set(self.epsilons) != hs:
            raise ValueError("epsilons must cover all half-edges with product -1")

    @property
    def d(self):
        return self.tree.d

    @property
    def n_vertices_bubble(self):
        """V of the underlying bubble: the tree has V/2 - 1 edges."""
        return 2 * (self.tree.n_edges + 1)

    @property
    def s(self):
        """Scaling coefficient: sum |C_e| - d(V-2)/2."""
        v = self.n_vertices_bubble
        return sum(Fraction(e.colors.size) for e in self.tree.edges) - Fraction(
            self.d * (v - 2), 2
        )


def tree_model(tree, epsilons=None):
    """Wrap a plane tree; by default the lexicographically first half-edge
    carries the -1 sign."""
    hs = sorted(h for e in tree.edges for h in (e.h1, e.h2))
    if epsilons is None:
        epsilons = {h: (-1 if h == hs[0] else 1) for h in hs}
    return TreeModel(tree, dict(epsilons))


def is_totally_unbalanced_tree(tree):
    return all(2 * e.colors.size < tree.d for e in tree.edges)


# ---------------------------------------------------------------------------
# Scalar Gaussian linearization identity


def hs_scalar_check(z1, z2, radial_nodes=80, angular_nodes=128, radius=6.0):
    """Check (1/pi) * integral over C of exp(-|z|^2 - z*Z1 + conj(z)*Z2)
    against exp(-Z1*Z2) by polar quadrature on a truncated disk.

    The quadrature is normalized by its own value at Z1 = Z2 = 0 so the
    trivial case is exactly 1. Returns (lhs, rhs, |lhs - rhs|)."""
    nodes, weights = np.polynomial.legendre.leggauss(radial_nodes)
    r = 0.5 * radius * (nodes + 1.0)
    wr = 0.5 * radius * weights
    theta = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    z = r[:, None] * np.exp(1j * theta[None, :])

    def quad(a, b):
        f = np.exp(-np.abs(z) ** 2 - z * a + np.conj(z) * b)
        return np.sum(f * r[:, None] * wr[:, None]) * (2.0 * np.pi / angular_nodes)

    norm = quad(0.0, 0.0)
    lhs = quad(z1, z2) / norm
    rhs = np.exp(-z1 * z2)
    if not (np.isfinite(lhs.real) and np.isfinite(lhs.imag)):
        raise QuadratureDiverged(f"quadrature not finite at Z1={z1}, Z2={z2}")
    return complex(lhs), complex(rhs), abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Corner-indexed block determinant


def _corner_indices(tree):
    """Map (vertex index, corner index) -> block index; every marked corner
    maps to 0, unmarked corners get 1..U."""
    idx = {}
    nxt = 1
    for vi, v in enumerate(tree.vertices):
        for ci in range(len(v.halfedges)):
            if ci == v.marked_corner:
                idx[(vi, ci)] = 0
            else:
                idx[(vi, ci)] = nxt
                nxt += 1
    return idx, nxt


def block_matrix(tree, y0, y):
    """The corner-indexed block matrix: identity diagonal blocks, one Y_h
    block per half-edge placed at (corner before h, corner after h) in ccw
    order; block (0,0) collects Y_0 plus the Y_h of half-edges both of
    whose corners are marked (the leaves)."""
    idx, n_blocks = _corner_indices(tree)
    n = y0.shape[0]
    p = np.zeros((n_blocks * n, n_blocks * n), dtype=y0.dtype)
    for k in range(1, n_blocks):
        p[k * n:(k + 1) * n, k * n:(k + 1) * n] = np.eye(n)
    p[0:n, 0:n] = y0.copy()
    for vi, v in enumerate(tree.vertices):
        k = len(v.halfedges)
        for i, h in enumerate(v.halfedges):
            row = idx[(vi, (i - 1) % k)]
            col = idx[(vi, i)]
            p[row * n:(row + 1) * n, col * n:(col + 1) * n] += y[h]
    return p


def compact_determinant(tree, y0, y):
    """det of Y_0 + sum_v (-1)^(deg v - 1) * ccw product of Y_h from the
    marked corner."""
    acc = y0.copy()
    for v in tree.vertices:
        prod = np.eye(y0.shape[0], dtype=y0.dtype)
        for h in tree.path_order(v):
            prod = prod @ y[h]
        acc = acc + (-1) ** (len(v.halfedges) - 1) * prod
    return np.linalg.det(acc)


def determinant_lemma_check(tree, n=3, trials=100, seed=0):
    """Max relative error between the block determinant and the compact
    form over random matrix draws."""
    rng = np.random.default_rng(seed)
    hs = [h for e in tree.edges for h in (e.h1, e.h2)]
    worst = 0.0
    for _ in range(trials):
        for attempt in range(6):
            y0 = rng.uniform(-1, 1, (n, n)) + 0.5 * np.eye(n)
            y = {h: rng.uniform(-1, 1, (n, n)) + 0.5 * np.eye(n) for h in hs}
            det_block = np.linalg.det(block_matrix(tree, y0, y))
            det_compact = compact_determinant(tree, y0, y)
            scale = max(abs(det_block), abs(det_compact))
            if scale > 1e-6:
                break
        else:
            raise SingularDiagnostic("repeated near-singular random draws")
        worst = max(worst, abs(det_block - det_compact) / scale)
    return worst


# ---------------------------------------------------------------------------
# Rescaling exponents


def _subtree_edges(tree, h):
    """Edges of the branch T_h: the edge containing h plus every edge of
    the component holding h's partner vertex once that edge is removed."""
    hp = tree.partner(h)
    own = next(e for e in tree.edges if h in (e.h1, e.h2))
    root = tree.vertex_of(hp)
    reached = {root}
    stack = [root]
    incident = {}
    for e in tree.edges:
        if e is own:
            continue
        a, b = tree.vertex_of(e.h1), tree.vertex_of(e.h2)
        incident.setdefault(a, []).append((b, e))
        incident.setdefault(b, []).append((a, e))
    edges = [own]
    while stack:
        u = stack.pop()
        for w, e in incident.get(u, []):
            if w not in reached:
                reached.add(w)
                edges.append(e)
                stack.append(w)
    return edges


def eta_exponents(tm):
    """Exact per-half-edge rescaling exponents
    eta_h = (d + 2s/(V-2)) E(T_h) - sum over edges of T_h of |C_e|,
    asserted against both exact constraint families."""
    tree = tm.tree
    d, v, s = tm.d, tm.n_vertices_bubble, tm.s
    coef = Fraction(d) + Fraction(2) * s / (v - 2)
    eta = {}
    for e in tree.edges:
        for h in (e.h1, e.h2):
            branch = _subtree_edges(tree, h)
            eta[h] = coef * len(branch) - sum(Fraction(b.colors.size) for b in branch)
    for e in tree.edges:
        assert eta[e.h1] + eta[e.h2] == coef - Fraction(e.colors.size)
    for vert in tree.vertices:
        assert sum(eta[h] for h in vert.halfedges) == 0
    return eta


# ---------------------------------------------------------------------------
# Saddle point


def solve_w(tm, t, tol=1e-14, max_iter=100):
    """Newton from W = 1 on W = 1 - (V/2) t W^{V/2}.

    The V/2 factor is the number of tree vertices contributing to the log
    term; it is required for the finite-difference gradient of the
    potential to vanish at the resulting point. The same equation is the
    large-N 2-point function equation at coupling -t, so W(t) equals the
    covariance C evaluated at -t."""
    half_v = tm.n_vertices_bubble // 2
    w = 1.0
    for _ in range(max_iter):
        f = w - 1.0 + half_v * t * w ** half_v
        if abs(f) <= tol:
            return w
        df = 1.0 + half_v * t * half_v * w ** (half_v - 1)
        w -= f / df
    raise NoConvergence(f"W iteration stalled at {w}")


def solve_w_fixed_point(tm, t, tol=1e-13, max_iter=100000):
    """Independent plain iteration for the same branch."""
    half_v = tm.n_vertices_bubble // 2
    w = 1.0
    for _ in range(max_iter):
        w_new = 1.0 - half_v * t * w ** half_v
        if abs(w_new - w) <= tol:
            return w_new
        w = w_new
    raise NoConvergence(f"W fixed point stalled at {w}")


def potential_eval(tm, y, t):
    """t^{-2/(V-2)} sum_e y_{h1} y_{h2} + ln(1 - sum_v prod_h eps_h y_h)."""
    tree = tm.tree
    v = tm.n_vertices_bubble
    quad = sum(y[e.h1] * y[e.h2] for e in tree.edges)
    total = 0.0
    for vert in tree.vertices:
        total += math.prod(tm.epsilons[h] * y[h] for h in vert.halfedges)
    arg = 1.0 - total
    if arg <= 0.0:
        raise LogDomain(f"log argument {arg} not positive")
    return t ** (-2.0 / (v - 2)) * quad + math.log(arg)


def gradient_analytic(tm, y, t):
    """d potential / d y_h for every half-edge."""
    tree = tm.tree
    v = tm.n_vertices_bubble
    total = 0.0
    for vert in tree.vertices:
        total += math.prod(tm.epsilons[h] * y[h] for h in vert.halfedges)
    w_hat = 1.0 / (1.0 - total)
    grad = {}
    for e in tree.edges:
        for h, hp in ((e.h1, e.h2), (e.h2, e.h1)):
            vert = tree.vertices[tree.vertex_of(h)]
            others = math.prod(
                tm.epsilons[g] * y[g] for g in vert.halfedges if g != h
            )
            grad[h] = (
                t ** (-2.0 / (v - 2)) * y[hp]
                - tm.epsilons[h] * others * w_hat
            )
    return grad


@dataclass(frozen=True)
class SaddleSolution:
    w: float
    y: dict
    gradient_norm: float


def saddle_point(tm, t, tol=1e-8, fd_step=1e-6):
    """Solve the saddle equations and verify the stationary point by
    central finite differences."""
    tree = tm.tree
    v = tm.n_vertices_bubble
    hs = sorted(h for e in tree.edges for h in (e.h1, e.h2))
    if t == 0.0:
        return SaddleSolution(1.0, {h: 0.0 for h in hs}, 0.0)
    w = solve_w(tm, t)
    eps_e = {}
    for e in tree.edges:
        eps_e[(e.h1, e.h2)] = tm.epsilons[e.h1] * tm.epsilons[e.h2]
    y = {}
    for h in hs:
        branch = _subtree_edges(tm.tree, h)
        sign = math.prod(eps_e[(e.h1, e.h2)] for e in branch)
        y[h] = (sign / tm.epsilons[h]) * (t ** (2.0 / (v - 2)) * w) ** len(branch)
    worst = 0.0
    for h in hs:
        plus = dict(y)
        minus = dict(y)
        plus[h] += fd_step
        minus[h] -= fd_step
        g = (potential_eval(tm, plus, t) - potential_eval(tm, minus, t)) / (
            2 * fd_step
        )
        worst = max(worst, abs(g))
    if worst > tol:
        raise GradientTooLarge(f"finite-difference gradient norm {worst:.3e}")
    return SaddleSolution(w, y, worst)


# ---------------------------------------------------------------------------
# Log-interaction word expansion


def expand_log_interaction(tm, order, dedupe=False):
    """Formal expansion of -tr ln(1 - sum_v A_v) in noncommuting vertex
    symbols: every word of length k carries coefficient 1/k; with dedupe,
    one representative per cyclic class carries class_size/k."""
    if order > 8:
        raise OrderCap(f"order {order} exceeds the cap of 8")
    n = len(tm.tree.vertices)
    terms = []
    for k in range(1, order + 1):
        if dedupe:
            seen = {}
            for word in _all_words(n, k):
                rep = min(word[i:] + word[:i] for i in range(k))
                seen[rep] = seen.get(rep, 0) + 1
            for rep, size in sorted(seen.items()):
                terms.append((rep, Fraction(size, k)))
        else:
            for word in _all_words(n, k):
                terms.append((word, Fraction(1, k)))
    return terms


def _all_words(n, k):
    out = [()]
    for _ in range(k):
        out = [w + (i,) for w in out for i in range(n)]
    return out


def expand_log_numeric_check(tm, order, n=2, seed=0, scale=0.04):
    """Instantiate the vertex symbols with random matrices of small norm
    and compare the truncated word sum with -tr ln(1 - sum A_v).
    Returns (|difference|, bound ~ r^(order+1))."""
    rng = np.random.default_rng(seed)
    nv = len(tm.tree.vertices)
    mats = [rng.uniform(-scale, scale, (n, n)) for _ in range(nv)]
    total = sum(mats)
    eig = np.linalg.eigvals(np.eye(n) - total)
    exact = -np.sum(np.log(eig.astype(complex))).real
    approx = 0.0
    for word, coeff in expand_log_interaction(tm, order):
        prod = np.eye(n)
        for i in word:
            prod = prod @ mats[i]
        approx += float(coeff) * np.trace(prod)
    radius = max(abs(np.linalg.eigvals(total)))
    return abs(exact - approx), radius ** (order + 1) * n / max(1e-12, 1 - radius)


# ---------------------------------------------------------------------------
# Random trees for tests


def random_plane_tree(rng, d, n_edges, max_set_size=None, colorsets=None):
    """Uniform-ish random plane tree with admissible edge color sets."""
    from .bubbles import all_admissible_colorsets

    if colorsets is None:
        colorsets = all_admissible_colorsets(d, max_size=max_set_size)
    halfedges_at = [[] ]  # per vertex, in ccw order
    edges = []
    for i in range(n_edges):
        parent = rng.randrange(len(halfedges_at))
        h1, h2 = 2 * i, 2 * i + 1
        pos = rng.randint(0, len(halfedges_at[parent]))
        halfedges_at[parent].insert(pos, h1)
        halfedges_at.append([h2])
        edges.append(TreeEdge(h1, h2, rng.choice(colorsets)))
    vertices = tuple(
        TreeVertex(tuple(hs), rng.randrange(len(hs))) for hs in halfedges_at
    )
    return PlaneTree(d, vertices, tuple(edges))
