"""Fine uniform-mesh reference solutions and relative trace errors.

Both solutions parametrize the same curve, so comparisons happen in
parameter space: the coarse densities are evaluated at the reference mesh's
quadrature parameters and the L2 norms use composite Gauss weights on the
reference mesh.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adapt import SolutionPair, solve_on_mesh
from .geometry import Mesh, build_initial_mesh
from .kernels import KernelContext
from .quadrature import AdaptiveBudget, gauss_rule

__all__ = [
    "ReferenceSolution",
    "reference_solve",
    "relative_errors",
    "eval_p1",
    "eval_p0",
]

_NORM_ORDER = 4


@dataclass
class ReferenceSolution:
    solution: SolutionPair
    m_ref: int
    budget: AdaptiveBudget


def _locate(mesh: Mesh, t):
    """Element index containing each parameter value (wrapped to one period)."""
    period = mesh.curve.period
    t = np.mod(np.asarray(t, dtype=float) - mesh.params[0], period) + mesh.params[0]
    idx = np.searchsorted(mesh.params, t, side="right") - 1
    return np.clip(idx, 0, mesh.element_count - 1), t


def eval_p1(mesh: Mesh, coeffs, t):
    """Evaluate a nodal (piecewise-affine in parameter) density at parameters t."""
    coeffs = np.asarray(coeffs)
    idx, t = _locate(mesh, t)
    t0 = mesh.params[idx]
    dt = mesh.params_end[idx] - t0
    s = (t - t0) / dt
    nxt = (idx + 1) % mesh.element_count
    return coeffs[idx] * (1.0 - s) + coeffs[nxt] * s


def eval_p0(mesh: Mesh, coeffs, t):
    """Evaluate an elementwise-constant density at parameters t."""
    coeffs = np.asarray(coeffs)
    idx, _ = _locate(mesh, t)
    return coeffs[idx]


def reference_solve(curve, m_ref: int, ctx1: KernelContext, ctx2: KernelContext,
                    sources, tau: float = 0.1,
                    budget: AdaptiveBudget | None = None,
                    n_threads: int | None = None) -> ReferenceSolution:
    """Single uniform-mesh solve with tightened quadrature tolerance."""
    if budget is None:
        budget = AdaptiveBudget(rel_tol=1e-10)
    mesh = build_initial_mesh(curve, m_ref)
    sol = solve_on_mesh(mesh, ctx1, ctx2, sources, tau=tau, budget=budget,
                        n_threads=n_threads)
    return ReferenceSolution(solution=sol, m_ref=m_ref, budget=budget)


def relative_errors(sol: SolutionPair, ref: ReferenceSolution):
    """Relative L2 errors of both traces against the reference solution."""
    rmesh = ref.solution.mesh
    same = rmesh.curve is sol.mesh.curve
    if not same and (type(rmesh.curve) is type(sol.mesh.curve)
                     and rmesh.curve.period == sol.mesh.curve.period):
        probe = np.linspace(0.0, rmesh.curve.period, 7, endpoint=False)
        same = np.allclose(rmesh.curve.point(probe), sol.mesh.curve.point(probe),
                           rtol=1e-12, atol=1e-12)
    if not same:
        raise ValueError("solutions parametrize different curves")
    if ref.m_ref < sol.mesh.node_count:
        raise ValueError("reference mesh is coarser than the solution mesh")
    rule = gauss_rule(_NORM_ORDER)
    t0 = rmesh.params
    dt = rmesh.params_end - t0
    t = t0[:, None] + dt[:, None] * 0.5 * (rule.nodes[None, :] + 1.0)
    w = (0.5 * rmesh.lengths)[:, None] * rule.weights[None, :]

    e_out = []
    for evaluate, csol, cref in (
        (eval_p1, sol.c1, ref.solution.c1),
        (eval_p0, sol.c2, ref.solution.c2),
    ):
        a = evaluate(sol.mesh, csol, t)
        b = evaluate(rmesh, cref, t)
        num = np.sqrt(np.sum(w * np.abs(a - b) ** 2))
        den = np.sqrt(np.sum(w * np.abs(b) ** 2))
        e_out.append(float(num / den))
    return tuple(e_out)
