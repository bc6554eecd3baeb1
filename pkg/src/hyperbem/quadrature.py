"""Fixed Gauss/Lobatto rules, adaptive Lobatto quadrature, cone-proximity
dispatch, and the analytic log-split for coincident-element integrals.

The adaptive scheme follows a quadtree on [-1,1]^2: each cell's Lobatto
estimate is compared against the sum over its four half-size children and
accepted when the difference is below tolerance.  A breadth-first batched
driver processes many independent integrals simultaneously so kernel
evaluations stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as _sp

from ._logmoments import log_weight_matrix
from .geometry import Mesh

__all__ = [
    "QuadratureRule",
    "AdaptiveBudget",
    "AdaptiveResult",
    "gauss_rule",
    "lobatto_rule",
    "adaptive_lobatto_2d",
    "adaptive_lobatto_2d_batch",
    "adaptive_lobatto_1d_batch",
    "needs_adaptive",
    "min_cone_distance",
    "singular_pair_integral",
    "same_element_log_integrals",
]

_EULER_GAMMA = 0.5772156649015328606


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class AdaptiveBudget:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    max_depth: int = 12

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


@dataclass
class AdaptiveResult:
    value: object
    converged: bool
    cells_used: int


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> QuadratureRule:
    """Gauss-Legendre rule on [-1, 1], exact up to degree 2n-1."""
    if not 1 <= n <= 32:
        raise ValueError("gauss_rule supports 1 <= n <= 32")
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(nodes=x, weights=w)


@lru_cache(maxsize=None)
def lobatto_rule(n: int) -> QuadratureRule:
    """Gauss-Lobatto rule on [-1, 1] including the endpoints, exact to degree 2n-3."""
    if not 3 <= n <= 13:
        raise ValueError("lobatto_rule supports 3 <= n <= 13")
    if n == 3:
        interior = np.array([0.0])
    else:
        interior, _ = _sp.roots_jacobi(n - 2, 1.0, 1.0)
    x = np.concatenate([[-1.0], np.sort(interior), [1.0]])
    w = 2.0 / (n * (n - 1) * _sp.eval_legendre(n - 1, x) ** 2)
    return QuadratureRule(nodes=x, weights=w)


# ---------------------------------------------------------------------------
# adaptive Lobatto quadrature (batched quadtree / binary tree drivers)
# ---------------------------------------------------------------------------

_BASE_LOBATTO_N = 7


@lru_cache(maxsize=None)
def _tensor_lobatto(n=_BASE_LOBATTO_N):
    rule = lobatto_rule(n)
    tt, ss = np.meshgrid(rule.nodes, rule.nodes, indexing="ij")
    ww = np.outer(rule.weights, rule.weights)
    return tt.ravel(), ss.ravel(), ww.ravel()


def adaptive_lobatto_2d_batch(eval_fn, n_tasks: int, budget: AdaptiveBudget, ncomp: int = 1):
    """Integrate ``n_tasks`` independent (vector-valued) integrands over [-1,1]^2.

    ``eval_fn(task_idx, t, s)`` receives flat arrays of shape (A, P) and must
    return values of shape (A, P, ncomp).  Returns (values (n_tasks, ncomp),
    converged (n_tasks,), cells_used (n_tasks,)).
    """
    tt, ss, ww = _tensor_lobatto()
    results = np.zeros((n_tasks, ncomp), dtype=complex)
    converged = np.ones(n_tasks, dtype=bool)
    cells_used = np.zeros(n_tasks, dtype=int)

    # the frontier can hold tens of thousands of cells at tight tolerances;
    # evaluating in bounded slices keeps the (cells, points, ncomp) buffer small
    slice_cells = max(64, 4_000_000 // (len(ww) * ncomp))

    def cell_estimates(task, ct, cs, hw):
        out = np.empty((len(task), ncomp), dtype=complex)
        for lo in range(0, len(task), slice_cells):
            sl = slice(lo, lo + slice_cells)
            t = ct[sl, None] + hw[sl, None] * tt[None, :]
            s = cs[sl, None] + hw[sl, None] * ss[None, :]
            vals = eval_fn(task[sl], t, s)
            out[sl] = np.einsum("apc,p->ac", vals, ww) * (hw[sl] * hw[sl])[:, None]
        return out

    task = np.arange(n_tasks)
    ct = np.zeros(n_tasks)
    cs = np.zeros(n_tasks)
    hw = np.ones(n_tasks)
    depth = np.zeros(n_tasks, dtype=int)
    parent = cell_estimates(task, ct, cs, hw)
    np.add.at(cells_used, task, 1)

    while task.size:
        half = 0.5 * hw
        # four children per active cell, flattened as (4A,)
        off_t = np.array([-1.0, -1.0, 1.0, 1.0])
        off_s = np.array([-1.0, 1.0, -1.0, 1.0])
        c_task = np.repeat(task, 4)
        c_ct = (ct[:, None] + half[:, None] * off_t[None, :]).ravel()
        c_cs = (cs[:, None] + half[:, None] * off_s[None, :]).ravel()
        c_hw = np.repeat(half, 4)
        c_est = cell_estimates(c_task, c_ct, c_cs, c_hw)
        np.add.at(cells_used, task, 4)
        child = c_est.reshape(len(task), 4, -1)
        child_sum = child.sum(axis=1)
        err = np.abs(child_sum - parent)
        floor = budget.abs_tol + 1e-14 * (np.abs(parent) + 1.0)
        ok = np.all(err <= np.maximum(budget.rel_tol * np.abs(child_sum), floor), axis=1)
        exhausted = depth + 1 >= budget.max_depth
        done = ok | exhausted
        if np.any(done):
            np.add.at(results, task[done], child_sum[done])
            converged[task[done & ~ok]] = False
        keep = ~done
        if not np.any(keep):
            break
        task = np.repeat(task[keep], 4)
        ct = c_ct.reshape(-1, 4)[keep].ravel()
        cs = c_cs.reshape(-1, 4)[keep].ravel()
        hw = c_hw.reshape(-1, 4)[keep].ravel()
        depth = np.repeat(depth[keep] + 1, 4)
        parent = child[keep].reshape(-1, child.shape[-1])
    return results, converged, cells_used


def adaptive_lobatto_2d(f, budget: AdaptiveBudget = AdaptiveBudget()) -> AdaptiveResult:
    """Adaptive Lobatto integration of ``f(t, s)`` over [-1,1]^2.

    ``f`` takes broadcastable coordinate arrays and returns either a matching
    array (scalar integrand) or one with a trailing component axis.
    """
    probe = np.asarray(f(np.zeros(1), np.zeros(1)))
    vector = probe.ndim == 2
    ncomp = probe.shape[-1] if vector else 1

    def eval_fn(task, t, s):
        vals = np.asarray(f(t, s), dtype=complex)
        return vals if vector else vals[..., None]

    values, conv, cells = adaptive_lobatto_2d_batch(eval_fn, 1, budget, ncomp=ncomp)
    value = values[0] if vector else complex(values[0, 0])
    return AdaptiveResult(value=value, converged=bool(conv[0]), cells_used=int(cells[0]))


def adaptive_lobatto_1d_batch(eval_fn, n_tasks: int, budget: AdaptiveBudget, ncomp: int = 1):
    """1D analogue of :func:`adaptive_lobatto_2d_batch` over [-1, 1]."""
    rule = lobatto_rule(_BASE_LOBATTO_N)
    tt, ww = rule.nodes, rule.weights
    results = np.zeros((n_tasks, ncomp), dtype=complex)
    converged = np.ones(n_tasks, dtype=bool)
    cells_used = np.zeros(n_tasks, dtype=int)
    slice_cells = max(64, 4_000_000 // (len(ww) * ncomp))

    def cell_estimates(task, ct, hw):
        out = np.empty((len(task), ncomp), dtype=complex)
        for lo in range(0, len(task), slice_cells):
            sl = slice(lo, lo + slice_cells)
            t = ct[sl, None] + hw[sl, None] * tt[None, :]
            out[sl] = np.einsum("apc,p->ac", eval_fn(task[sl], t), ww) * hw[sl, None]
        return out

    task = np.arange(n_tasks)
    ct = np.zeros(n_tasks)
    hw = np.ones(n_tasks)
    depth = np.zeros(n_tasks, dtype=int)
    parent = cell_estimates(task, ct, hw)
    np.add.at(cells_used, task, 1)

    while task.size:
        half = 0.5 * hw
        off = np.array([-1.0, 1.0])
        c_task = np.repeat(task, 2)
        c_ct = (ct[:, None] + half[:, None] * off[None, :]).ravel()
        c_hw = np.repeat(half, 2)
        c_est = cell_estimates(c_task, c_ct, c_hw)
        np.add.at(cells_used, task, 2)
        child = c_est.reshape(len(task), 2, -1)
        child_sum = child.sum(axis=1)
        err = np.abs(child_sum - parent)
        floor = budget.abs_tol + 1e-14 * (np.abs(parent) + 1.0)
        ok = np.all(err <= np.maximum(budget.rel_tol * np.abs(child_sum), floor), axis=1)
        exhausted = depth + 1 >= budget.max_depth
        done = ok | exhausted
        if np.any(done):
            np.add.at(results, task[done], child_sum[done])
            converged[task[done & ~ok]] = False
        keep = ~done
        if not np.any(keep):
            break
        task = np.repeat(task[keep], 2)
        ct = c_ct.reshape(-1, 2)[keep].ravel()
        hw = c_hw.reshape(-1, 2)[keep].ravel()
        depth = np.repeat(depth[keep] + 1, 2)
        parent = child[keep].reshape(-1, child.shape[-1])
    return results, converged, cells_used


# ---------------------------------------------------------------------------
# cone-proximity dispatch
# ---------------------------------------------------------------------------

def min_cone_distance(diffs, *materials):
    """Minimum distance of the difference vectors to any medium's cone boundary."""
    from .medium import cone_boundary_distance

    dmin = np.full(np.asarray(diffs).shape[:-1], np.inf)
    for mat in materials:
        dmin = np.minimum(dmin, cone_boundary_distance(diffs, mat))
    return dmin


_SAMPLE_T = np.linspace(-1.0, 1.0, 5)


def needs_adaptive(mesh: Mesh, m: int, n: int, mat1, mat2, tau: float) -> bool:
    """Whether the element pair (m, n) requires adaptive integration.

    True when the pair is coincident or adjacent, or when any sampled
    difference vector between the two elements lies within ``tau`` of a
    propagating-cone boundary of either medium.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    M = mesh.element_count
    if m == n or (m + 1) % M == n or (n + 1) % M == m:
        return True
    pm = mesh.mids[m] + 0.5 * np.outer(_SAMPLE_T, mesh.ends[m] - mesh.starts[m])
    pn = mesh.mids[n] + 0.5 * np.outer(_SAMPLE_T, mesh.ends[n] - mesh.starts[n])
    diffs = pm[:, None, :] - pn[None, :, :]
    return bool(np.min(min_cone_distance(diffs, mat1, mat2)) < tau)


# ---------------------------------------------------------------------------
# coincident-element (weakly singular) integrals
# ---------------------------------------------------------------------------

_SING_N = 10


@lru_cache(maxsize=None)
def _sing_nodes():
    rule = gauss_rule(_SING_N)
    s01 = 0.5 * (rule.nodes + 1.0)
    w01 = 0.5 * rule.weights
    lam = log_weight_matrix(s01)
    # basis values at the nodes: [const, hat at start node, hat at end node]
    basis = np.stack([np.ones_like(s01), 1.0 - s01, s01])
    dist = np.abs(s01[:, None] - s01[None, :])
    offdiag = dist > 0
    logdist = np.where(offdiag, np.log(np.where(offdiag, dist, 1.0)), 0.0)
    return s01, w01, lam, basis, dist, offdiag, logdist


def same_element_log_integrals(lengths, directions, ctx):
    """All coincident-pair Galerkin primitives of the single-layer kernel.

    For each element (chord length L, unit direction d), returns an array of
    shape (M, 3, 3) whose [m, a, b] entry is the double integral over the
    chord of Phi(x(u), y(v)) * B_a(u/L) * B_b(v/L), with B_0 = 1,
    B_1 = 1 - s, B_2 = s.  The ln|u-v| part is integrated with the exact
    log-moment weights; the analytic remainder by tensor Gauss.
    """
    s01, w01, lam, basis, dist, offdiag, logdist = _sing_nodes()
    lengths = np.asarray(lengths, dtype=float)
    directions = np.asarray(directions, dtype=float)
    wfac = _chord_branch_factor(directions, ctx.mat)
    c_log = ctx.c_log
    L = lengths[:, None, None]
    W = wfac[:, None, None]
    if ctx.k0 > 0:
        z = ctx.k0 * L * W * dist[None, :, :]
        j0 = _sp.jv(0, z)
        h0 = np.where(offdiag[None], _sp.hankel1(0, np.where(offdiag[None], z, 1.0)), 0.0)
        phi = ctx.prefactor * h0
        smooth = np.where(offdiag[None], phi - c_log * j0 * logdist[None], 0.0)
        diag_val = c_log * (np.log(0.5 * ctx.k0 * lengths * wfac) + _EULER_GAMMA) + ctx.prefactor
        qlog = c_log * j0
    else:
        smooth = np.broadcast_to((c_log * np.log(lengths * wfac))[:, None, None],
                                 (len(lengths), _SING_N, _SING_N)).copy()
        diag_val = None
        qlog = np.broadcast_to(np.asarray(c_log), (len(lengths), _SING_N, _SING_N))
    if diag_val is not None:
        idx = np.arange(_SING_N)
        smooth[:, idx, idx] = diag_val[:, None]
    core = np.einsum("i,j,mij->mij", w01, w01, smooth) + lam[None] * qlog
    out = np.einsum("ai,bj,mij->mab", basis, basis, core)
    return out * (lengths ** 2)[:, None, None]


def _chord_branch_factor(directions, mat):
    """branch_sqrt(eps1*d1^2 + eps2*d2^2) for unit chord directions d."""
    from .specfun import branch_sqrt

    rad = mat.eps1 * directions[..., 0] ** 2 + mat.eps2 * directions[..., 1] ** 2
    return np.atleast_1d(branch_sqrt(rad))


_BASIS_INDEX = {"const": 0, "lin0": 1, "lin1": 2}


def singular_pair_integral(frame, basis_m: str, basis_n: str, ctx, kind: str) -> complex:
    """Coincident-element Galerkin integral for one basis pair.

    ``kind`` is "S" (single-layer kernel: analytic log split) or "K"
    (double-layer kernel: vanishes identically on a flat element because
    (x - y) is orthogonal to the normal along the chord).
    """
    if kind == "K":
        return 0.0 + 0.0j
    if kind != "S":
        raise ValueError("kind must be 'S' or 'K'")
    a = _BASIS_INDEX[basis_m]
    b = _BASIS_INDEX[basis_n]
    direction = (frame.param_map(1.0) - frame.param_map(-1.0)) / frame.length
    vals = same_element_log_integrals(np.array([frame.length]), direction[None, :], ctx)
    return complex(vals[0, a, b])
