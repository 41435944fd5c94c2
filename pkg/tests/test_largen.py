"""Covariance equation, exact series, and the universality cross-check."""

from __future__ import annotations

from fractions import Fraction

import pytest

from melonforge.bubbles import ColorSet, quartic, two_vertex_bubble
from melonforge.errors import NotTotallyUnbalanced, OutsideBranch
from melonforge.largen import (
    CovarianceSolution,
    covariance_series,
    gaussian_expectation_leading,
    solve_covariance,
    solve_covariance_fixed_point,
    universality_crosscheck,
)


def test_zero_coupling_gives_one():
    sol = solve_covariance([(0.0, 4)])
    assert sol.value == 1.0


def test_quartic_covariance_matches_closed_form():
    t = 0.1
    sol = solve_covariance([(t, 4)])
    root = (1 - (1 - 8 * t) ** 0.5) / (4 * t)
    assert abs(sol.value - root) < 1e-10
    assert sol.residual < 1e-12


def test_newton_and_fixed_point_agree():
    interactions = [(0.03, 4), (0.01, 6)]
    a = solve_covariance(interactions)
    b = solve_covariance_fixed_point(interactions)
    assert abs(a.value - b.value) < 1e-10


def test_large_coupling_leaves_branch():
    with pytest.raises(OutsideBranch):
        solve_covariance([(10.0, 4)])


def test_series_coefficients_quartic_and_sextic():
    s4 = covariance_series([4], 3)
    assert [s4.coefficient((k,)) for k in range(4)] == [1, 2, 8, 40]
    s6 = covariance_series([6], 2)
    assert [s6.coefficient((k,)) for k in range(3)] == [1, 3, 27]
    # integrality of single-interaction coefficients
    for series in (covariance_series([4], 8), covariance_series([6], 6)):
        for _, v in series.coefficients:
            assert v.denominator == 1


def test_series_matches_newton_at_small_coupling():
    series = covariance_series([4], 8)
    for t in (0.005, 0.01):
        numeric = solve_covariance([(t, 4)]).value
        # truncation bound plus double-precision roundoff floor
        assert abs(series.evaluate([t]) - numeric) <= t ** 9 * 1e7 + 1e-13


def test_multivariable_series_order_one():
    s = covariance_series([4, 6], 1)
    assert s.coefficient((1, 0)) == 2
    assert s.coefficient((0, 1)) == 3


def test_gaussian_expectation_counts():
    cov = CovarianceSolution(1.1, 0.0)
    count, value = gaussian_expectation_leading(two_vertex_bubble(3), cov)
    assert count == 1 and abs(value - 1.1) < 1e-12
    count, _ = gaussian_expectation_leading(quartic(4, ColorSet(4, (1, 2))), cov)
    assert count == 2


def test_universality_crosscheck_melonic():
    rep = universality_crosscheck(quartic(3, ColorSet(3, (1,))), 3)
    assert rep.match
    assert rep.enumerated == (1, 2, 8, 40)
    assert rep.series == (1, 2, 8, 40)


def test_balanced_quartic_rejected():
    with pytest.raises(NotTotallyUnbalanced):
        universality_crosscheck(quartic(4, ColorSet(4, (1, 2))), 1)
