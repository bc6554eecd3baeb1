"""Two-level error estimation and the adaptive refinement driver.

Each level solves on the uniform refinement of the current mesh, projects the
fine solution back onto the coarse spaces, builds elementwise indicators from
the projection defect, marks a minimal bulk set, and bisects the marked
coarse elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import build_block_system
from .geometry import Mesh, bisect_elements, uniform_refine
from .kernels import KernelContext
from .linalg import solve_system
from .quadrature import AdaptiveBudget

__all__ = [
    "SolutionPair",
    "ErrorIndicators",
    "LevelReport",
    "AdaptiveRun",
    "solve_on_mesh",
    "project_p1",
    "project_p0",
    "local_indicators",
    "dorfler_mark",
    "adaptive_solve",
]

_G2 = np.array([-1.0, 1.0]) / np.sqrt(3.0)  # 2-point Gauss, exact for cubics


@dataclass
class SolutionPair:
    """Solved boundary densities: nodal trace and elementwise conormal trace."""

    mesh: Mesh
    c1: np.ndarray
    c2: np.ndarray

    def __post_init__(self):
        if len(self.c1) != self.mesh.node_count:
            raise ValueError("c1 length must match node count")
        if len(self.c2) != self.mesh.element_count:
            raise ValueError("c2 length must match element count")


@dataclass
class ErrorIndicators:
    rho1: np.ndarray
    rho2: np.ndarray
    eta_tilde: float

    def totals(self):
        return self.rho1 + self.rho2


@dataclass
class LevelReport:
    level: int
    M: int
    h_max: float
    h_min: float
    eta_tilde: float
    marked_count: int
    e1_hat: float | None = None
    e2_hat: float | None = None


@dataclass
class AdaptiveRun:
    reports: list = field(default_factory=list)
    solutions: list = field(default_factory=list)  # fine-mesh SolutionPair per level
    coarse_meshes: list = field(default_factory=list)

    @property
    def final_solution(self) -> SolutionPair:
        return self.solutions[-1]


def solve_on_mesh(mesh: Mesh, ctx1: KernelContext, ctx2: KernelContext, sources,
                  tau: float = 0.1, budget: AdaptiveBudget = AdaptiveBudget(),
                  n_threads: int | None = None) -> SolutionPair:
    """Assemble and solve the transmission system on one mesh."""
    system = build_block_system(mesh, ctx1, ctx2, sources, tau=tau,
                                budget=budget, n_threads=n_threads)
    sol = solve_system(system.matrix, system.rhs)
    M = mesh.element_count
    return SolutionPair(mesh=mesh, c1=sol[:M], c2=sol[M:])


def _check_lineage(fine: SolutionPair, coarse_mesh: Mesh):
    if fine.mesh.parent_of is None or fine.mesh.element_count != 2 * coarse_mesh.element_count:
        raise ValueError("fine mesh is not the uniform refinement of the coarse mesh")


def project_p1(fine: SolutionPair, coarse_mesh: Mesh) -> np.ndarray:
    """L2 projection of the fine nodal trace onto the coarse hat-function space.

    Both meshes parametrize the same curve; hats are affine in the curve
    parameter per element and the arc-length weight is the chord length of
    each fine child, so all integrals are exact with 2-point Gauss.
    """
    _check_lineage(fine, coarse_mesh)
    M = coarse_mesh.element_count
    f = fine.c1
    Lc = fine.mesh.lengths.reshape(M, 2)

    xi = 0.5 * (_G2 + 1.0)  # local child coordinate at the Gauss points
    w = np.array([0.5, 0.5])
    mass = np.zeros((M, M), dtype=float)
    rhs = np.zeros(M, dtype=complex)
    idx = np.arange(M)
    for k in (0, 1):
        sigma = 0.5 * (k + xi)  # coarse-element coordinate
        hat0 = 1.0 - sigma
        hat1 = sigma
        a = 2 * idx + k
        b = (2 * idx + k + 1) % (2 * M)
        fvals = f[a][:, None] * (1.0 - xi)[None, :] + f[b][:, None] * xi[None, :]
        wk = Lc[:, k][:, None] * w[None, :]
        np.add.at(mass, (idx, idx), np.sum(wk * hat0 * hat0, axis=1))
        np.add.at(mass, (idx, (idx + 1) % M), np.sum(wk * hat0 * hat1, axis=1))
        np.add.at(mass, ((idx + 1) % M, idx), np.sum(wk * hat1 * hat0, axis=1))
        np.add.at(mass, ((idx + 1) % M, (idx + 1) % M), np.sum(wk * hat1 * hat1, axis=1))
        np.add.at(rhs, idx, np.sum(wk * fvals * hat0, axis=1))
        np.add.at(rhs, (idx + 1) % M, np.sum(wk * fvals * hat1, axis=1))
    return np.linalg.solve(mass, rhs)


def project_p0(fine: SolutionPair, coarse_mesh: Mesh) -> np.ndarray:
    """Length-weighted mean of the two child values per coarse element."""
    _check_lineage(fine, coarse_mesh)
    M = coarse_mesh.element_count
    Lc = fine.mesh.lengths.reshape(M, 2)
    vals = fine.c2.reshape(M, 2)
    return np.sum(Lc * vals, axis=1) / Lc.sum(axis=1)


def local_indicators(fine: SolutionPair, coarse_mesh: Mesh) -> ErrorIndicators:
    """Elementwise two-level indicators and the total estimator.

    rho1 = |E| * ||d/ds(defect of the nodal trace)||^2 over E, rho2 =
    |E| * ||defect of the conormal trace||^2 over E, with the defects taken
    against the coarse-space projections.
    """
    _check_lineage(fine, coarse_mesh)
    M = coarse_mesh.element_count
    p1 = project_p1(fine, coarse_mesh)
    p0 = project_p0(fine, coarse_mesh)
    Lc = fine.mesh.lengths.reshape(M, 2)
    LE = coarse_mesh.lengths

    # defect of the nodal trace at the fine nodes (lift of the projection is
    # affine in parameter, so the midpoint value is the nodal mean)
    lift = np.empty(2 * M, dtype=complex)
    lift[0::2] = p1
    lift[1::2] = 0.5 * (p1 + np.roll(p1, -1))
    e = fine.c1 - lift
    jump = np.empty((M, 2), dtype=complex)
    jump[:, 0] = e[1::2] - e[0::2]
    jump[:, 1] = np.roll(e[0::2], -1) - e[1::2]
    rho1 = LE * np.sum(np.abs(jump) ** 2 / Lc, axis=1)

    d2 = fine.c2.reshape(M, 2) - p0[:, None]
    rho2 = LE * np.sum(np.abs(d2) ** 2 * Lc, axis=1)

    eta = float(np.sqrt(np.sum(rho1 + rho2)))
    return ErrorIndicators(rho1=rho1, rho2=rho2, eta_tilde=eta)


def dorfler_mark(ind: ErrorIndicators, gamma: float) -> np.ndarray:
    """Minimal bulk set: smallest prefix of descending indicator totals whose
    sum reaches gamma * eta_tilde^2.  Ties break toward lower element ids."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    totals = ind.totals()
    total_sum = totals.sum()
    if total_sum == 0.0:
        return np.array([], dtype=int)
    order = np.lexsort((np.arange(len(totals)), -totals))
    csum = np.cumsum(totals[order])
    target = gamma * total_sum
    k = int(np.argmax(csum >= target * (1.0 - 1e-12))) + 1
    return np.sort(order[:k])


def adaptive_solve(mesh0: Mesh, ctx1: KernelContext, ctx2: KernelContext, sources,
                   gamma: float = 0.7, levels: int = 5, sigma: float | None = None,
                   tau: float = 0.1, budget: AdaptiveBudget = AdaptiveBudget(),
                   n_threads: int | None = None, on_level=None) -> AdaptiveRun:
    """Run the adaptive loop for ``levels`` levels (or until eta < sigma).

    Per level: uniformly refine the current mesh, solve on the refinement,
    build indicators on the coarse mesh, mark, and bisect the marked coarse
    elements to form the next level's mesh.  The reported solution of each
    level is the refined-mesh solve.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    run = AdaptiveRun()
    mesh = mesh0
    for level in range(levels):
        fine_mesh = uniform_refine(mesh)
        sol = solve_on_mesh(fine_mesh, ctx1, ctx2, sources, tau=tau,
                            budget=budget, n_threads=n_threads)
        ind = local_indicators(sol, mesh)
        marked = dorfler_mark(ind, gamma)
        report = LevelReport(level=level, M=mesh.node_count, h_max=mesh.h_max,
                             h_min=mesh.h_min, eta_tilde=ind.eta_tilde,
                             marked_count=len(marked))
        run.reports.append(report)
        run.solutions.append(sol)
        run.coarse_meshes.append(mesh)
        if on_level is not None:
            on_level(report, sol, ind)
        if sigma is not None and ind.eta_tilde < sigma:
            break
        if level + 1 < levels:
            mesh = bisect_elements(mesh, marked)
    return run
