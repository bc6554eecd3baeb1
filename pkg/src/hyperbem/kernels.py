"""Fundamental solution of the anisotropic Helmholtz operator, its conormal
derivatives, point-source traces, and layer-potential field evaluation.

For a diagonal coefficient A = diag(1/eps1, 1/eps2) the fundamental solution
is Phi(x, y) = (i/4) sqrt(eps1 eps2) H0^(1)(k0 rt) with the deformed distance
rt = sqrt(eps1 (x1-y1)^2 + eps2 (x2-y2)^2) taken with the branch cut on the
negative imaginary axis.  The zero-frequency limit is
Phi0 = -(1/2 pi) sqrt(eps1 eps2) ln rt.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .medium import MaterialPair, deformed_distance
from .quadrature import (
    AdaptiveBudget,
    adaptive_lobatto_1d_batch,
    gauss_rule,
    min_cone_distance,
)
from .specfun import branch_sqrt, hankel1_0, hankel1_1

__all__ = [
    "KernelContext",
    "PointSource",
    "phi",
    "phi_static",
    "dphi_dnu_y",
    "dphi_dnu_x",
    "source_trace",
    "single_layer_potential",
    "double_layer_potential",
    "eval_field",
]


@dataclass(frozen=True)
class KernelContext:
    """A material pair together with the wavenumber, plus derived constants."""

    mat: MaterialPair
    k0: float

    def __post_init__(self):
        if not np.isfinite(self.k0) or self.k0 < 0:
            raise ValueError("k0 must be finite and nonnegative")

    @cached_property
    def sqrt_eps(self) -> complex:
        return complex(branch_sqrt(self.mat.eps1 * self.mat.eps2))

    @cached_property
    def prefactor(self) -> complex:
        return 0.25j * self.sqrt_eps

    @cached_property
    def c_log(self) -> complex:
        return -self.sqrt_eps / (2.0 * np.pi)


@dataclass(frozen=True)
class PointSource:
    """Point source amp * delta(. - location) attached to medium 1 or 2."""

    location: tuple
    amplitude: complex
    medium: int

    def __post_init__(self):
        if self.medium not in (1, 2):
            raise ValueError("medium must be 1 or 2")
        loc = np.asarray(self.location, dtype=float)
        if loc.shape != (2,) or not np.all(np.isfinite(loc)):
            raise ValueError("location must be a finite 2-vector")

    @property
    def xy(self) -> np.ndarray:
        return np.asarray(self.location, dtype=float)


def _rt(ctx, x, y):
    dx = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return dx, deformed_distance(dx, ctx.mat)


def phi_static(ctx: KernelContext, x, y):
    """Zero-frequency fundamental solution Phi0(x, y)."""
    _, rt = _rt(ctx, x, y)
    return ctx.c_log * np.log(rt)


def phi(ctx: KernelContext, x, y):
    """Fundamental solution Phi(x, y); falls back to Phi0 when k0 == 0."""
    if ctx.k0 == 0:
        return phi_static(ctx, x, y)
    _, rt = _rt(ctx, x, y)
    return ctx.prefactor * hankel1_0(ctx.k0 * rt)


def dphi_dnu_y(ctx: KernelContext, x, y, nu):
    """Conormal derivative of Phi in y: (A nu(y)) . grad_y Phi(x, y)."""
    dx, rt = _rt(ctx, x, y)
    dot = np.sum(dx * np.asarray(nu, dtype=float), axis=-1)
    if ctx.k0 == 0:
        return (ctx.sqrt_eps / (2.0 * np.pi)) * dot / rt**2
    return (0.25j * ctx.k0 * ctx.sqrt_eps) * hankel1_1(ctx.k0 * rt) * dot / rt


def dphi_dnu_x(ctx: KernelContext, x, y, nu):
    """Conormal derivative of Phi in x: (A nu(x)) . grad_x Phi(x, y)."""
    dx, rt = _rt(ctx, x, y)
    dot = np.sum(dx * np.asarray(nu, dtype=float), axis=-1)
    if ctx.k0 == 0:
        return -(ctx.sqrt_eps / (2.0 * np.pi)) * dot / rt**2
    return -(0.25j * ctx.k0 * ctx.sqrt_eps) * hankel1_1(ctx.k0 * rt) * dot / rt


def source_trace(ctx1: KernelContext, ctx2: KernelContext, sources, x, nu):
    """Boundary data (g1, g2) induced by point sources.

    g1 collects the conormal traces -amp * dPhi_j/dnu_j(x, x0) and g2 the
    Dirichlet traces -amp * Phi_j(x, x0), summed over the sources of each
    medium.
    """
    x = np.asarray(x, dtype=float)
    g1 = np.zeros(x.shape[:-1], dtype=complex)
    g2 = np.zeros(x.shape[:-1], dtype=complex)
    for src in sources:
        ctx = ctx1 if src.medium == 1 else ctx2
        g1 -= src.amplitude * dphi_dnu_x(ctx, x, src.xy, nu)
        g2 -= src.amplitude * phi(ctx, x, src.xy)
    return g1, g2


# ---------------------------------------------------------------------------
# layer potentials off the boundary
# ---------------------------------------------------------------------------

_FAR_ORDER = 6
_MID_ORDER = 12
_NEAR_RATIO = 2.0
_MID_RATIO = 6.0
_CONE_TAU = 0.1


def _layer_batch(mesh, ctx, points, density_fn, kernel_fn, budget,
                 skip_on_element=False):
    """Sum over elements of integrals kernel(x, y(t)) * density(e, t) * L/2 dt.

    Far point-element pairs use fixed Gauss rules; pairs close to the element
    or to a propagating-cone boundary are handled by adaptive Lobatto.  With
    ``skip_on_element`` a point lying on an element's chord contributes zero
    for that element; this is the principal value for the conormal kernels,
    which vanish identically on flat elements, and it allows evaluation at
    points located exactly on the boundary.
    """
    points = np.asarray(points, dtype=float)
    M = mesh.element_count
    P = len(points)
    out = np.zeros(P, dtype=complex)
    halfvec = 0.5 * (mesh.ends - mesh.starts)
    diffs = points[:, None, :] - mesh.mids[None, :, :]
    ratio = np.linalg.norm(diffs, axis=-1) / mesh.lengths[None, :]
    near = (ratio < _NEAR_RATIO) | (min_cone_distance(diffs, ctx.mat) < _CONE_TAU)
    if skip_on_element:
        t_par = (np.einsum("pmd,md->pm", diffs, halfvec)
                 / np.sum(halfvec * halfvec, axis=-1)[None, :])
        perp = diffs - t_par[..., None] * halfvec[None, :, :]
        on_elem = ((np.linalg.norm(perp, axis=-1) <= 1e-12 * mesh.lengths[None, :])
                   & (np.abs(t_par) <= 1.0 + 1e-12))
        near &= ~on_elem
    else:
        on_elem = np.zeros((P, M), dtype=bool)

    def eval_pairs(p_idx, e_idx, t):
        y = mesh.mids[e_idx][..., None, :] + t[..., None] * halfvec[e_idx][..., None, :]
        kern = kernel_fn(points[p_idx][..., None, :], y, e_idx)
        dens = density_fn(e_idx, t)
        return kern * dens * (0.5 * mesh.lengths[e_idx])[..., None]

    for order, mask in (
        (_FAR_ORDER, (ratio >= _MID_RATIO) & ~near & ~on_elem),
        (_MID_ORDER, (ratio < _MID_RATIO) & ~near & ~on_elem),
    ):
        p_idx, e_idx = np.nonzero(mask)
        if not len(p_idx):
            continue
        rule = gauss_rule(order)
        vals = eval_pairs(p_idx, e_idx, np.broadcast_to(rule.nodes, (len(p_idx), order)))
        np.add.at(out, p_idx, vals @ rule.weights)

    p_idx, e_idx = np.nonzero(near)
    if len(p_idx):
        def eval_fn(task, t):
            return eval_pairs(p_idx[task], e_idx[task], t)[..., None]

        vals, _, _ = adaptive_lobatto_1d_batch(eval_fn, len(p_idx), budget, ncomp=1)
        np.add.at(out, p_idx, vals[:, 0])
    return out


def single_layer_potential(mesh, ctx, density, points,
                           budget: AdaptiveBudget = AdaptiveBudget()):
    """S phi(x) for an elementwise-constant density (one value per element)."""
    density = np.asarray(density, dtype=complex)

    def density_fn(e_idx, t):
        return density[e_idx][..., None] * np.ones_like(t)

    def kernel_fn(x, y, e_idx):
        return phi(ctx, x, y)

    return _layer_batch(mesh, ctx, points, density_fn, kernel_fn, budget)


def double_layer_potential(mesh, ctx, node_values, points,
                           budget: AdaptiveBudget = AdaptiveBudget()):
    """W phi(x) for a continuous piecewise-linear density given by node values."""
    node_values = np.asarray(node_values, dtype=complex)
    M = mesh.element_count
    v0 = node_values
    v1 = node_values[(np.arange(M) + 1) % M]

    def density_fn(e_idx, t):
        s = 0.5 * (t + 1.0)
        return v0[e_idx][..., None] * (1.0 - s) + v1[e_idx][..., None] * s

    def kernel_fn(x, y, e_idx):
        return dphi_dnu_y(ctx, x, y, mesh.normals[e_idx][..., None, :])

    return _layer_batch(mesh, ctx, points, density_fn, kernel_fn, budget,
                        skip_on_element=True)


def eval_field(mesh, phi1, phi2, ctx1, ctx2, sources, points,
               budget: AdaptiveBudget = AdaptiveBudget()):
    """Total field at arbitrary points from the solved boundary densities.

    Inside the boundary the representation is u1 = S1 phi2 - W1 phi1 minus the
    incident fields of medium-1 sources; outside, u2 = W2 phi1 - S2 phi2 minus
    the incident fields of medium-2 sources.  Points within half an element
    length of the boundary trigger an accuracy warning.
    """
    points = np.asarray(points, dtype=float)
    inside = mesh.curve.contains(points)
    gap = np.min(
        np.linalg.norm(points[:, None, :] - mesh.mids[None, :, :], axis=-1)
        - 0.75 * mesh.lengths[None, :],
        axis=1,
    )
    if np.any(gap < 0.5 * mesh.h_min):
        warnings.warn(
            "field points within half an element length of the boundary; "
            "evaluated values there are inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )
    u = np.zeros(len(points), dtype=complex)
    if np.any(inside):
        pts = points[inside]
        val = (single_layer_potential(mesh, ctx1, phi2, pts, budget)
               - double_layer_potential(mesh, ctx1, phi1, pts, budget))
        for src in sources:
            if src.medium == 1:
                val -= src.amplitude * phi(ctx1, pts, src.xy)
        u[inside] = val
    if np.any(~inside):
        pts = points[~inside]
        val = (double_layer_potential(mesh, ctx2, phi1, pts, budget)
               - single_layer_potential(mesh, ctx2, phi2, pts, budget))
        for src in sources:
            if src.medium == 2:
                val -= src.amplitude * phi(ctx2, pts, src.xy)
        u[~inside] = val
    return u
