"""Two-level indicators, bulk marking, and the adaptive driver."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbem.adapt import (ErrorIndicators, SolutionPair, adaptive_solve,
                            dorfler_mark, local_indicators, project_p0,
                            project_p1)
from hyperbem.geometry import Ellipse, build_initial_mesh, uniform_refine
from hyperbem.kernels import KernelContext, PointSource
from hyperbem.medium import MaterialPair
from hyperbem.quadrature import AdaptiveBudget


def _indicators(values):
    arr = np.asarray(values, dtype=float)
    half = 0.5 * arr
    return ErrorIndicators(rho1=half, rho2=half,
                           eta_tilde=float(np.sqrt(arr.sum())))


def test_dorfler_minimal_prefix():
    # 4+3 >= 0.6*10 while 4 alone is not, so exactly two elements
    marked = dorfler_mark(_indicators([4.0, 3.0, 2.0, 1.0]), 0.6)
    assert marked.tolist() == [0, 1]


def test_dorfler_small_gamma_marks_single_element():
    marked = dorfler_mark(_indicators([1.0, 5.0, 2.0]), 1e-6)
    assert marked.tolist() == [1]


def test_dorfler_equal_indicators_tie_break():
    marked = dorfler_mark(_indicators(np.ones(10)), 0.5)
    assert marked.tolist() == [0, 1, 2, 3, 4]


def test_dorfler_rejects_bad_gamma():
    with pytest.raises(ValueError):
        dorfler_mark(_indicators([1.0]), 0.0)
    with pytest.raises(ValueError):
        dorfler_mark(_indicators([1.0]), 1.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1e6), min_size=1, max_size=40),
       st.floats(min_value=0.01, max_value=0.99))
def test_dorfler_minimality_property(values, gamma):
    ind = _indicators(values)
    totals = ind.totals()
    marked = dorfler_mark(ind, gamma)
    target = gamma * totals.sum()
    if totals.sum() == 0.0:
        assert marked.size == 0
        return
    assert totals[marked].sum() >= target * (1.0 - 1e-9)
    # dropping the smallest marked indicator must break the bulk property
    if marked.size > 1:
        weakest = marked[np.argmin(totals[marked])]
        rest = totals[marked].sum() - totals[weakest]
        assert rest < target * (1.0 + 1e-9)


@pytest.fixture(scope="module")
def fine_pair():
    coarse = build_initial_mesh(Ellipse(2.0, 1.0), 16)
    fine = uniform_refine(coarse)
    return coarse, fine


def test_projections_reproduce_coarse_functions(fine_pair):
    coarse, fine = fine_pair
    rng = np.random.default_rng(0)
    p1_coeffs = rng.normal(size=coarse.node_count) + 1j * rng.normal(size=coarse.node_count)
    # lift to the fine space: even fine nodes coincide with coarse nodes,
    # odd ones are parameter midpoints
    lift = np.empty(fine.node_count, dtype=complex)
    lift[0::2] = p1_coeffs
    lift[1::2] = 0.5 * (p1_coeffs + np.roll(p1_coeffs, -1))
    p0_coeffs = rng.normal(size=coarse.element_count) + 0j
    sol = SolutionPair(fine, lift, np.repeat(p0_coeffs, 2))
    np.testing.assert_allclose(project_p1(sol, coarse), p1_coeffs, atol=1e-12)
    np.testing.assert_allclose(project_p0(sol, coarse), p0_coeffs, atol=1e-12)


def test_indicators_vanish_on_lifted_solutions(fine_pair):
    coarse, fine = fine_pair
    c1 = np.cos(np.linspace(0, 2 * np.pi, coarse.node_count, endpoint=False))
    lift = np.empty(fine.node_count, dtype=complex)
    lift[0::2] = c1
    lift[1::2] = 0.5 * (c1 + np.roll(c1, -1))
    sol = SolutionPair(fine, lift, np.repeat(np.arange(coarse.element_count) + 0j, 2))
    ind = local_indicators(sol, coarse)
    assert ind.eta_tilde < 1e-12
    assert np.all(ind.rho1 < 1e-24)
    assert np.all(ind.rho2 < 1e-24)


def test_p0_projection_is_length_weighted_mean(fine_pair):
    coarse, fine = fine_pair
    rng = np.random.default_rng(1)
    c2 = rng.normal(size=fine.element_count) + 0j
    sol = SolutionPair(fine, np.zeros(fine.node_count, complex), c2)
    p0 = project_p0(sol, coarse)
    Lc = fine.lengths.reshape(-1, 2)
    expect = (Lc * c2.reshape(-1, 2)).sum(axis=1) / Lc.sum(axis=1)
    np.testing.assert_allclose(p0, expect, rtol=1e-13)


def test_indicator_scaling_covariance(fine_pair):
    # rho1 is a derivative seminorm (invariant under curve dilation at fixed
    # coefficients times the scale), rho2 scales with length squared
    coarse, fine = fine_pair
    rng = np.random.default_rng(2)
    c1 = rng.normal(size=fine.node_count) + 1j * rng.normal(size=fine.node_count)
    c2 = rng.normal(size=fine.element_count) + 0j
    ind = local_indicators(SolutionPair(fine, c1, c2), coarse)

    big_coarse = build_initial_mesh(Ellipse(4.0, 2.0), 16)
    big_fine = uniform_refine(big_coarse)
    ind_big = local_indicators(SolutionPair(big_fine, c1, c2), big_coarse)
    np.testing.assert_allclose(ind_big.rho1, ind.rho1, rtol=1e-6)
    np.testing.assert_allclose(ind_big.rho2, 4.0 * ind.rho2, rtol=1e-6)


def test_rejects_unrelated_fine_mesh(fine_pair):
    coarse, _ = fine_pair
    other = build_initial_mesh(Ellipse(2.0, 1.0), 24)
    sol = SolutionPair(other, np.zeros(24, complex), np.zeros(24, complex))
    with pytest.raises(ValueError):
        local_indicators(sol, coarse)


@pytest.fixture(scope="module")
def small_run():
    mesh0 = build_initial_mesh(Ellipse(2.0, 1.0), 48)
    ctx1 = KernelContext(MaterialPair(1 + 0.02j, -2 + 0.02j), 1.0)
    ctx2 = KernelContext(MaterialPair(1 + 0j, 1 + 0j), 1.0)
    src = [PointSource((0.0, 0.0), -1.0, 1)]
    budget = AdaptiveBudget(rel_tol=1e-6)
    return adaptive_solve(mesh0, ctx1, ctx2, src, levels=3, budget=budget)


def test_adaptive_run_grows_mesh_and_reduces_eta(small_run):
    ms = [r.M for r in small_run.reports]
    assert ms[0] == 48
    assert ms == sorted(ms) and ms[-1] > ms[0]
    etas = [r.eta_tilde for r in small_run.reports]
    assert all(b < a for a, b in zip(etas, etas[1:]))


def test_adaptive_run_level_bookkeeping(small_run):
    for rep, sol, coarse in zip(small_run.reports, small_run.solutions,
                                small_run.coarse_meshes):
        assert sol.mesh.element_count == 2 * coarse.element_count
        assert rep.M == coarse.node_count
        assert rep.h_max == pytest.approx(coarse.h_max)


def test_stopping_threshold_halts_after_first_level():
    mesh0 = build_initial_mesh(Ellipse(2.0, 1.0), 20)
    ctx1 = KernelContext(MaterialPair(1 + 0.02j, -2 + 0.02j), 1.0)
    ctx2 = KernelContext(MaterialPair(1 + 0j, 1 + 0j), 1.0)
    src = [PointSource((0.0, 0.0), -1.0, 1)]
    run = adaptive_solve(mesh0, ctx1, ctx2, src, levels=5, sigma=1e9,
                         budget=AdaptiveBudget(rel_tol=1e-6))
    assert len(run.reports) == 1
