"""Galerkin assembly of the boundary-operator matrices and right-hand side.

Trial/test spaces: continuous piecewise-linear functions (one DOF per node)
for the Dirichlet trace and piecewise constants (one DOF per element) for the
conormal trace.  On a closed curve both have dimension M.

Element pairs are dispatched to quadrature tiers by the ratio of midpoint
distance to element size: coincident pairs use the analytic log split,
adjacent / cone-near / close pairs use adaptive Lobatto, and the remaining
pairs use fixed Gauss rules of decreasing order.  All tiers evaluate the same
vector of 26 kernel-times-basis components per point (both media at once) so
each Hankel evaluation is shared across every matrix entry that needs it.
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import Mesh
from .kernels import KernelContext, source_trace
from .medium import cone_boundary_distance, deformed_distance, deformed_normal
from .quadrature import (
    AdaptiveBudget,
    adaptive_lobatto_1d_batch,
    adaptive_lobatto_2d_batch,
    gauss_rule,
    same_element_log_integrals,
)
from .specfun import hankel1_0, hankel1_1

__all__ = [
    "AssemblyStats",
    "OperatorMatrices",
    "BlockSystem",
    "assemble_operators",
    "assemble_rhs",
    "build_block_system",
    "write_matrix",
    "read_matrix",
]

_TIER_NEAR = 4.0
_TIER_MID = 10.0
_TIER_FAR = 30.0
_ORDER_MID = 12
_ORDER_FAR = 7
_ORDER_VERY_FAR = 4
_DEFAULT_TAU = 0.1
_CHUNK_POINTS = 3_000_000  # kernel evaluations per vectorized chunk
_ADJ_EXTRA_DEPTH = 4


@dataclass
class AssemblyStats:
    """Counters describing the quadrature work of one assembly pass."""

    pairs_coincident: int = 0
    pairs_adaptive: int = 0
    pairs_gauss: dict = field(default_factory=dict)
    kernel_points: int = 0
    adaptive_cells: int = 0
    adaptive_nonconverged: int = 0

    def rows(self):
        out = [("coincident", self.pairs_coincident, 0)]
        out.append(("adaptive", self.pairs_adaptive, self.adaptive_cells))
        for order in sorted(self.pairs_gauss):
            out.append((f"gauss{order}", self.pairs_gauss[order], 0))
        out.append(("kernel_points", self.kernel_points, 0))
        return out


@dataclass
class OperatorMatrices:
    """Per-medium Galerkin matrices plus the shared mass matrix.

    ``S[j]`` is M x M (constants), ``K[j]`` is M x M (constant test, nodal
    trial), ``N[j]`` is M x M (nodal), ``mass`` is M x M with entries
    <phi_n^(1), phi_m^(2)>.
    """

    S: tuple
    K: tuple
    N: tuple
    mass: np.ndarray
    stats: AssemblyStats


@dataclass
class BlockSystem:
    """Assembled 2M x 2M transmission system and its right-hand side."""

    matrix: np.ndarray
    rhs: np.ndarray
    operators: OperatorMatrices


# ---------------------------------------------------------------------------
# pair component evaluation
# ---------------------------------------------------------------------------

def _pair_components(mesh, ctx1, ctx2, f_idx, e_idx, t, s):
    """Kernel-times-basis values for element pairs at tensor points.

    ``t`` parametrizes the test element f, ``s`` the trial element e, both on
    [-1, 1]; arrays have shape (A, P).  Returns (A, P, 26): for each medium
    j the 9 products Phi_j * B_a(t) * B_b(s) with B in {1, 1-s, s}, then the
    double-layer kernel (density on e, test on f) times {1-s, s}, then the
    same with the roles of the elements swapped, times {1-t, t}.
    """
    halfvec = 0.5 * (mesh.ends - mesh.starts)
    x = mesh.mids[f_idx][:, None, :] + t[..., None] * halfvec[f_idx][:, None, :]
    y = mesh.mids[e_idx][:, None, :] + s[..., None] * halfvec[e_idx][:, None, :]
    dx = x - y
    # adjacent elements share a node; Lobatto endpoints land on it up to
    # round-off, so evaluate the (integrable) kernel as 0 there
    tol = 1e-12 * (mesh.lengths[f_idx] + mesh.lengths[e_idx])
    hit = np.sum(dx * dx, axis=-1) < (tol**2)[:, None]
    hit_any = bool(hit.any())
    if hit_any:
        dx = np.where(hit[..., None], 1.0, dx)
    nu_e = mesh.normals[e_idx][:, None, :]
    nu_f = mesh.normals[f_idx][:, None, :]
    dot_e = np.sum(dx * nu_e, axis=-1)
    dot_f = np.sum(dx * nu_f, axis=-1)

    st = 0.5 * (t + 1.0)
    ss = 0.5 * (s + 1.0)
    bt1, bt2 = 1.0 - st, st
    bs1, bs2 = 1.0 - ss, ss

    out = np.empty(t.shape + (26,), dtype=complex)
    for jm, ctx in enumerate((ctx1, ctx2)):
        rt = deformed_distance(dx, ctx.mat)
        if ctx.k0 > 0:
            z = ctx.k0 * rt
            phi = ctx.prefactor * hankel1_0(z)
            kfac = (0.25j * ctx.k0 * ctx.sqrt_eps) * hankel1_1(z) / rt
        else:
            phi = ctx.c_log * np.log(rt)
            kfac = (ctx.sqrt_eps / (2.0 * np.pi)) / rt**2
        if hit_any:
            phi = np.where(hit, 0.0, phi)
            kfac = np.where(hit, 0.0, kfac)
        base = 13 * jm
        p1 = phi * bt1
        p2 = phi * bt2
        out[..., base + 0] = phi
        out[..., base + 1] = phi * bs1
        out[..., base + 2] = phi * bs2
        out[..., base + 3] = p1
        out[..., base + 4] = p1 * bs1
        out[..., base + 5] = p1 * bs2
        out[..., base + 6] = p2
        out[..., base + 7] = p2 * bs1
        out[..., base + 8] = p2 * bs2
        k_fe = kfac * dot_e
        k_ef = -kfac * dot_f
        out[..., base + 9] = k_fe * bs1
        out[..., base + 10] = k_fe * bs2
        out[..., base + 11] = k_ef * bt1
        out[..., base + 12] = k_ef * bt2
    return out


def _tier_masks(mesh, ctx1, ctx2, tau):
    """Classify all ordered pairs f < e into quadrature tiers.

    Returns (f_idx, e_idx, tier) with tier 0 = adaptive, 1/2/3 = Gauss of
    decreasing order.
    """
    M = mesh.element_count
    f_idx, e_idx = np.triu_indices(M, k=1)
    dist = np.linalg.norm(mesh.mids[f_idx] - mesh.mids[e_idx], axis=-1)
    scale = np.maximum(mesh.lengths[f_idx], mesh.lengths[e_idx])
    ratio = dist / scale
    adjacent = (e_idx - f_idx == 1) | ((f_idx == 0) & (e_idx == M - 1))

    tier = np.full(len(f_idx), 3, dtype=np.int8)
    tier[ratio < _TIER_FAR] = 2
    tier[ratio < _TIER_MID] = 1
    tier[(ratio < _TIER_NEAR) | adjacent] = 0

    # cone proximity: any sampled difference vector within tau of a cone edge
    hyper = [ctx.mat for ctx in (ctx1, ctx2) if ctx.mat.hyperbolic]
    if hyper:
        sample = np.linspace(-1.0, 1.0, 5)
        halfvec = 0.5 * (mesh.ends - mesh.starts)
        pts = mesh.mids[:, None, :] + sample[None, :, None] * halfvec[:, None, :]
        todo = np.nonzero(tier != 0)[0]
        chunk = max(1, _CHUNK_POINTS // 64)
        for lo in range(0, len(todo), chunk):
            sel = todo[lo:lo + chunk]
            diffs = pts[f_idx[sel]][:, :, None, :] - pts[e_idx[sel]][:, None, :, :]
            dmin = np.full(diffs.shape[:-1], np.inf)
            for mat in hyper:
                dmin = np.minimum(dmin, cone_boundary_distance(diffs, mat))
            flag = dmin.min(axis=(1, 2)) < tau
            tier[sel[flag]] = 0
    return f_idx, e_idx, adjacent, tier


def _scatter_pairs(mesh, ctx1, ctx2, f_idx, e_idx, comps, acc):
    """Accumulate integrated pair components into the operator matrices."""
    M = mesh.element_count
    jac = 0.25 * mesh.lengths[f_idx] * mesh.lengths[e_idx]
    vals = comps * jac[:, None]
    f1 = (f_idx + 1) % M
    e1 = (e_idx + 1) % M
    for jm, ctx in enumerate((ctx1, ctx2)):
        base = 13 * jm
        G, K, H = acc[jm]
        phip = vals[:, base:base + 9].reshape(-1, 3, 3)
        G[f_idx, e_idx] += phip[:, 0, 0]
        G[e_idx, f_idx] += phip[:, 0, 0]
        nt_e = deformed_normal(mesh.normals[e_idx], ctx.mat)
        nt_f = deformed_normal(mesh.normals[f_idx], ctx.mat)
        w_fe = np.sum(mesh.normals[f_idx] * nt_e, axis=-1)
        w_ef = np.sum(mesh.normals[e_idx] * nt_f, axis=-1)
        rows = (np.stack([f_idx, f1]), np.stack([e_idx, e1]))
        for a in range(2):
            for b in range(2):
                np.add.at(H, (rows[0][a], rows[1][b]), w_fe * phip[:, 1 + a, 1 + b])
                np.add.at(H, (rows[1][b], rows[0][a]), w_ef * phip[:, 1 + a, 1 + b])
        np.add.at(K, (f_idx, e_idx), vals[:, base + 9])
        np.add.at(K, (f_idx, e1), vals[:, base + 10])
        np.add.at(K, (e_idx, f_idx), vals[:, base + 11])
        np.add.at(K, (e_idx, f1), vals[:, base + 12])


def _integrate_fixed(mesh, ctx1, ctx2, f_idx, e_idx, order, acc, stats, n_threads):
    rule = gauss_rule(order)
    tt, ss = np.meshgrid(rule.nodes, rule.nodes, indexing="ij")
    ww = np.outer(rule.weights, rule.weights).ravel()
    tt, ss = tt.ravel(), ss.ravel()
    P = len(ww)
    chunk = max(1, _CHUNK_POINTS // (P * 26))

    def work(lo):
        fs = f_idx[lo:lo + chunk]
        es = e_idx[lo:lo + chunk]
        T = np.broadcast_to(tt, (len(fs), P))
        S = np.broadcast_to(ss, (len(fs), P))
        comps = _pair_components(mesh, ctx1, ctx2, fs, es, T, S)
        return lo, np.einsum("apc,p->ac", comps, ww)

    offsets = range(0, len(f_idx), chunk)
    if n_threads and n_threads > 1:
        pool = ThreadPoolExecutor(max_workers=n_threads)
        results = pool.map(work, offsets)
    else:
        pool = None
        results = map(work, offsets)
    # pool.map yields in submission order, so accumulation stays deterministic
    for lo, integ in results:
        _scatter_pairs(mesh, ctx1, ctx2, f_idx[lo:lo + chunk], e_idx[lo:lo + chunk],
                       integ, acc)
    if pool is not None:
        pool.shutdown()
    stats.pairs_gauss[order] = stats.pairs_gauss.get(order, 0) + len(f_idx)
    stats.kernel_points += len(f_idx) * P * 2


def _integrate_adaptive(mesh, ctx1, ctx2, f_idx, e_idx, budget, acc, stats, n_threads):
    chunk = max(1, _CHUNK_POINTS // (49 * 26 * 4))

    def work(lo):
        fs = f_idx[lo:lo + chunk]
        es = e_idx[lo:lo + chunk]

        def eval_fn(task, t, s):
            return _pair_components(mesh, ctx1, ctx2, fs[task], es[task], t, s)

        vals, conv, cells = adaptive_lobatto_2d_batch(eval_fn, len(fs), budget, ncomp=26)
        return lo, vals, conv, cells

    offsets = range(0, len(f_idx), chunk)
    if n_threads and n_threads > 1:
        pool = ThreadPoolExecutor(max_workers=n_threads)
        results = pool.map(work, offsets)
    else:
        pool = None
        results = map(work, offsets)
    for lo, vals, conv, cells in results:
        _scatter_pairs(mesh, ctx1, ctx2, f_idx[lo:lo + chunk], e_idx[lo:lo + chunk],
                       vals, acc)
        stats.adaptive_cells += int(cells.sum())
        stats.adaptive_nonconverged += int(np.sum(~conv))
        stats.kernel_points += int(cells.sum()) * 49 * 2
    if pool is not None:
        pool.shutdown()
    stats.pairs_adaptive += len(f_idx)


def assemble_operators(mesh: Mesh, ctx1: KernelContext, ctx2: KernelContext,
                       tau: float = _DEFAULT_TAU,
                       budget: AdaptiveBudget = AdaptiveBudget(),
                       n_threads: int | None = None) -> OperatorMatrices:
    """Assemble the per-medium Galerkin matrices S_j, K_j, N_j and the mass."""
    if n_threads is None:
        env = os.environ.get("HYPERBEM_THREADS")
        n_threads = int(env) if env else min(os.cpu_count() or 1, 8)
    M = mesh.element_count
    stats = AssemblyStats()
    acc = [(np.zeros((M, M), complex), np.zeros((M, M), complex),
            np.zeros((M, M), complex)) for _ in range(2)]

    f_idx, e_idx, adjacent, tier = _tier_masks(mesh, ctx1, ctx2, tau)
    for order, sel in ((_ORDER_MID, tier == 1), (_ORDER_FAR, tier == 2),
                       (_ORDER_VERY_FAR, tier == 3)):
        if np.any(sel):
            _integrate_fixed(mesh, ctx1, ctx2, f_idx[sel], e_idx[sel], order,
                             acc, stats, n_threads)
    adap = tier == 0
    plain = adap & ~adjacent
    if np.any(plain):
        _integrate_adaptive(mesh, ctx1, ctx2, f_idx[plain], e_idx[plain], budget,
                            acc, stats, n_threads)
    near = adap & adjacent
    if np.any(near):
        deep = AdaptiveBudget(rel_tol=budget.rel_tol, abs_tol=budget.abs_tol,
                              max_depth=budget.max_depth + _ADJ_EXTRA_DEPTH)
        _integrate_adaptive(mesh, ctx1, ctx2, f_idx[near], e_idx[near], deep,
                            acc, stats, n_threads)

    # coincident pairs: analytic log split; double-layer kernel vanishes on
    # flat elements so only the single-layer primitives contribute
    dirs = (mesh.ends - mesh.starts) / mesh.lengths[:, None]
    diag_idx = np.arange(M)
    for jm, ctx in enumerate((ctx1, ctx2)):
        G, K, H = acc[jm]
        sing = same_element_log_integrals(mesh.lengths, dirs, ctx)
        G[diag_idx, diag_idx] += sing[:, 0, 0]
        nt = deformed_normal(mesh.normals, ctx.mat)
        w_ee = np.sum(mesh.normals * nt, axis=-1)
        n0 = diag_idx
        n1 = (diag_idx + 1) % M
        rows = (n0, n1)
        for a in range(2):
            for b in range(2):
                np.add.at(H, (rows[a], rows[b]), w_ee * sing[:, 1 + a, 1 + b])
    stats.pairs_coincident = M

    mass = np.zeros((M, M), dtype=float)
    mass[diag_idx, diag_idx] = 0.5 * mesh.lengths
    mass[diag_idx, (diag_idx + 1) % M] = 0.5 * mesh.lengths

    S_out, K_out, N_out = [], [], []
    for jm, ctx in enumerate((ctx1, ctx2)):
        G, K, H = acc[jm]
        inv_len = 1.0 / mesh.lengths
        GD = np.roll(G * inv_len[None, :], 1, axis=1) - G * inv_len[None, :]
        DGD = np.roll(GD * inv_len[:, None], 1, axis=0) - GD * inv_len[:, None]
        eps_prod = ctx.mat.eps1 * ctx.mat.eps2
        N = -DGD / eps_prod + ctx.k0**2 * H
        S_out.append(G)
        K_out.append(K)
        N_out.append(N)
    return OperatorMatrices(S=tuple(S_out), K=tuple(K_out), N=tuple(N_out),
                            mass=mass, stats=stats)


def assemble_rhs(mesh: Mesh, ctx1: KernelContext, ctx2: KernelContext, sources,
                 budget: AdaptiveBudget = AdaptiveBudget()):
    """Galerkin right-hand side (g1 tested with hats, g2 with constants)."""
    M = mesh.element_count
    halfvec = 0.5 * (mesh.ends - mesh.starts)

    def eval_fn(task, t):
        x = mesh.mids[task][:, None, :] + t[..., None] * halfvec[task][:, None, :]
        nu = mesh.normals[task][:, None, :]
        g1, g2 = source_trace(ctx1, ctx2, sources, x, nu)
        s = 0.5 * (t + 1.0)
        return np.stack([g1 * (1.0 - s), g1 * s, g2], axis=-1)

    vals, conv, _ = adaptive_lobatto_1d_batch(eval_fn, M, budget, ncomp=3)
    vals *= (0.5 * mesh.lengths)[:, None]
    g1 = np.zeros(M, dtype=complex)
    np.add.at(g1, np.arange(M), vals[:, 0])
    np.add.at(g1, (np.arange(M) + 1) % M, vals[:, 1])
    return g1, vals[:, 2]


def build_block_system(mesh: Mesh, ctx1: KernelContext, ctx2: KernelContext,
                       sources, tau: float = _DEFAULT_TAU,
                       budget: AdaptiveBudget = AdaptiveBudget(),
                       n_threads: int | None = None) -> BlockSystem:
    """Assemble the full 2M x 2M transmission system [[N, I'-K'], [I+K, -S]].

    The operator blocks are differences of the two media's matrices; primed
    blocks are exact transposes.  Unknown ordering: M nodal values of the
    field trace followed by M elementwise conormal-trace values.
    """
    ops = assemble_operators(mesh, ctx1, ctx2, tau=tau, budget=budget,
                             n_threads=n_threads)
    S = ops.S[0] - ops.S[1]
    K = ops.K[0] - ops.K[1]
    N = ops.N[0] - ops.N[1]
    M = mesh.element_count
    A = np.empty((2 * M, 2 * M), dtype=complex)
    A[:M, :M] = N
    A[:M, M:] = ops.mass.T - K.T
    A[M:, :M] = ops.mass + K
    A[M:, M:] = -S
    g1, g2 = assemble_rhs(mesh, ctx1, ctx2, sources, budget=budget)
    return BlockSystem(matrix=A, rhs=np.concatenate([g1, g2]), operators=ops)


# ---------------------------------------------------------------------------
# binary matrix dump
# ---------------------------------------------------------------------------

_MAGIC = b"HBEM"


def write_matrix(path, a: np.ndarray) -> None:
    """Dump a complex matrix: magic 'HBEM', u32 rows, u32 cols, row-major
    little-endian complex doubles."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("expected a 2D matrix")
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", a.shape[0], a.shape[1]))
        f.write(a.astype("<c16").tobytes())


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ValueError("not a matrix dump (bad magic)")
        rows, cols = struct.unpack("<II", f.read(8))
        data = np.frombuffer(f.read(), dtype="<c16")
    if data.size != rows * cols:
        raise ValueError("matrix dump truncated")
    return data.reshape(rows, cols).astype(np.complex128)
