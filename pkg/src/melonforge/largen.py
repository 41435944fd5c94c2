"""Large-N covariance equation, exact series, and Gaussian universality.

The large-N 2-point function C({t_r}) solves C = 1 + sum_r (1/2) t_r V_r
C^{V_r/2} on the branch with C = 1 at t = 0. This module solves it
numerically (Newton) and formally (exact rational series), and cross-checks
the Gaussian-universality statement against brute-force graph enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bubbles import is_totally_unbalanced, recognize_gm, scaling_coefficient, two_vertex_bubble
from .errors import EnumerationCap, NoConvergence, NotTotallyUnbalanced, OutsideBranch
from .feynman import delta, enumerate_feynman, gmax_pairings


@dataclass(frozen=True)
class SeriesPoly:
    """Finitely supported multivariate series with exact coefficients,
    truncated at a total degree."""

    n_vars: int
    order: int
    coefficients: tuple  # sorted tuple of (exponent tuple, Fraction)

    @staticmethod
    def from_dict(n_vars, order, coeffs):
        kept = {
            k: Fraction(v)
            for k, v in coeffs.items()
            if sum(k) <= order and v != 0
        }
        return SeriesPoly(n_vars, order, tuple(sorted(kept.items())))

    def as_dict(self):
        return dict(self.coefficients)

    @staticmethod
    def constant(n_vars, order, value):
        return SeriesPoly.from_dict(n_vars, order, {(0,) * n_vars: Fraction(value)})

    @staticmethod
    def variable(n_vars, order, i):
        exp = tuple(1 if j == i else 0 for j in range(n_vars))
        return SeriesPoly.from_dict(n_vars, order, {exp: Fraction(1)})

    def __add__(self, other):
        out = self.as_dict()
        for k, v in other.coefficients:
            out[k] = out.get(k, Fraction(0)) + v
        return SeriesPoly.from_dict(self.n_vars, self.order, out)

    def scale(self, factor):
        return SeriesPoly.from_dict(
            self.n_vars, self.order,
            {k: v * Fraction(factor) for k, v in self.coefficients},
        )

    def __mul__(self, other):
        out = {}
        for k1, v1 in self.coefficients:
            for k2, v2 in other.coefficients:
                k = tuple(a + b for a, b in zip(k1, k2))
                if sum(k) > self.order:
                    continue
                out[k] = out.get(k, Fraction(0)) + v1 * v2
        return SeriesPoly.from_dict(self.n_vars, self.order, out)

    def power(self, n):
        result = SeriesPoly.constant(self.n_vars, self.order, 1)
        for _ in range(n):
            result = result * self
        return result

    def coefficient(self, exponent):
        return dict(self.coefficients).get(tuple(exponent), Fraction(0))

    def evaluate(self, values):
        return sum(float(v) * math.prod(t ** e for t, e in zip(values, k))
                   for k, v in self.coefficients)


@dataclass(frozen=True)
class CovarianceSolution:
    value: float
    residual: float


def _residual(c, interactions):
    return c - 1.0 - sum(0.5 * t * v * c ** (v // 2) for t, v in interactions)


def solve_covariance(interactions, tol=1e-12, max_iter=100):
    """Newton iteration from C = 1 for C = 1 + sum (1/2) t V C^{V/2}.

    Raises NoConvergence after max_iter, OutsideBranch when the residual
    stops decreasing (the iterate left the branch connected to C(0)=1)."""
    for t, v in interactions:
        if v % 2 != 0 or v < 2:
            raise ValueError(f"vertex count must be even and >= 2, got {v}")
    c = 1.0
    last = abs(_residual(c, interactions))
    for _ in range(max_iter):
        r = _residual(c, interactions)
        if abs(r) <= tol:
            return CovarianceSolution(c, abs(r))
        dr = 1.0 - sum(0.25 * t * v * v * c ** (v // 2 - 1) for t, v in interactions)
        if dr == 0.0:
            raise OutsideBranch(f"flat residual derivative at C={c}")
        c_new = c - r / dr
        r_new = abs(_residual(c_new, interactions))
        if r_new > last * (1 + 1e-9) and r_new > tol:
            raise OutsideBranch(
                f"residual grew from {last:.3e} to {r_new:.3e} at C={c_new}"
            )
        c, last = c_new, r_new
    raise NoConvergence(f"no fixed point after {max_iter} iterations; last C={c}")


def covariance_series(vertex_counts, order):
    """Exact formal solution, one series variable per interaction."""
    n = len(vertex_counts)
    s = SeriesPoly.constant(n, order, 1)
    for _ in range(order):
        new = SeriesPoly.constant(n, order, 1)
        for i, v in enumerate(vertex_counts):
            term = SeriesPoly.variable(n, order, i) * s.power(v // 2)
            new = new + term.scale(Fraction(v, 2))
        s = new
    return s


def gaussian_expectation_leading(b, cov, cap=10):
    """Leading Gaussian moment data of a bubble: the number of dominant
    Wick pairings and |G_max(B)| * C^{V/2}. The overall power of N is not
    part of the result."""
    _, dominant = gmax_pairings(b, cap)
    count = len(dominant)
    return count, count * cov.value ** (b.n_vertices // 2)


@dataclass(frozen=True)
class CrosscheckReport:
    orders: tuple
    enumerated: tuple  # Fraction per order (labeled count / b!)
    series: tuple  # Fraction per order after sign fix
    sign: int
    match: bool
    first_mismatch: int | None


def universality_crosscheck(b, order, cap=9):
    """Compare dominant 2-point graph counts with the covariance series.

    Order k counts connected graphs made of one 2-vertex source bubble and
    k copies of b that attain the maximal degree, divided by k!. The series
    variable's sign is fixed at order 1 and applied uniformly."""
    cert = recognize_gm(b)
    if cert is None or not is_totally_unbalanced(cert):
        raise NotTotallyUnbalanced("bubble must be a totally unbalanced GM bubble")
    d = b.d
    src = two_vertex_bubble(d)
    s_b = scaling_coefficient(cert)
    scalings = {"src": Fraction(0), "B": s_b}
    series = covariance_series([b.n_vertices], order)

    enumerated = [Fraction(1)]
    for k in range(1, order + 1):
        n_whites = 1 + k * (b.n_vertices // 2)
        if n_whites > cap:
            raise EnumerationCap(
                f"order {k} needs {n_whites} white vertices, cap is {cap}"
            )
        parts = [("src", src, 1), ("B", b, k)]
        graphs = list(enumerate_feynman(parts, connected_only=True, cap=cap))
        best = max(delta(g, scalings).n_exponent for g in graphs)
        count = sum(1 for g in graphs if delta(g, scalings).n_exponent == best)
        enumerated.append(Fraction(count, math.factorial(k)))

    c1 = series.coefficient((1,))
    sign = 1 if enumerated[1] == c1 else -1
    fixed = [series.coefficient((k,)) * sign ** k for k in range(order + 1)]
    first_mismatch = None
    for k in range(order + 1):
        if enumerated[k] != fixed[k]:
            first_mismatch = k
            break
    return CrosscheckReport(
        tuple(range(order + 1)),
        tuple(enumerated),
        tuple(fixed),
        sign,
        first_mismatch is None,
        first_mismatch,
    )


def solve_covariance_fixed_point(interactions, tol=1e-12, max_iter=10000):
    """Independent plain fixed-point iteration used to cross-verify the
    Newton solver."""
    c = 1.0
    for _ in range(max_iter):
        c_new = 1.0 + sum(0.5 * t * v * c ** (v // 2) for t, v in interactions)
        if abs(c_new - c) <= tol:
            return CovarianceSolution(c_new, abs(_residual(c_new, interactions)))
        c = c_new
    raise NoConvergence(f"fixed point did not settle; last C={c}")
