"""Independent numerical oracles used by the test suite.

Everything here deliberately avoids the package's own quadrature and
special-function code paths: Hankel values come from mpmath, 2D pair
integrals from a recursive Gauss scheme built on numpy's Legendre nodes,
and the log-singular same-element integrals from a 1D reduction handled
by scipy's adaptive QUADPACK integrator.
"""

from __future__ import annotations

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss

mpmath.mp.dps = 40

_G12 = leggauss(12)
_G24 = leggauss(24)
_G20 = leggauss(20)


def mp_hankel1(order: int, z: complex) -> complex:
    """Arbitrary-precision H^(1)_order(z).

    J and Y both grow like exp(Im z) while H decays, so the working
    precision scales with the digits lost to that cancellation.
    """
    zc = complex(z)
    extra = int(2.0 * abs(zc.imag) / 2.302585) + 10
    with mpmath.workdps(40 + extra):
        return complex(mpmath.hankel1(order, mpmath.mpc(zc)))


def mp_branch_sqrt(z: complex) -> complex:
    """Square root with the cut on the negative imaginary axis."""
    arg = mpmath.arg(mpmath.mpc(z))
    if arg < -mpmath.pi / 2:
        arg += 2 * mpmath.pi
    return complex(mpmath.sqrt(abs(mpmath.mpc(z))) * mpmath.exp(0.5j * arg))


def _gauss_2d(f, ax, bx, ay, by, rule):
    nodes, weights = rule
    tx = 0.5 * (ax + bx) + 0.5 * (bx - ax) * nodes
    ty = 0.5 * (ay + by) + 0.5 * (by - ay) * nodes
    gx, gy = np.meshgrid(tx, ty, indexing="ij")
    vals = f(gx.ravel(), gy.ravel())
    w2 = np.outer(weights, weights).ravel()
    jac = 0.25 * (bx - ax) * (by - ay)
    return jac * np.sum(vals * w2, axis=-1)


class EvalCounter:
    """Wraps an integrand and counts point evaluations."""

    def __init__(self, f):
        self.f = f
        self.count = 0

    def __call__(self, x, y):
        self.count += int(np.size(x))
        return self.f(x, y)


def recursive_integral_2d(f, ax=-1.0, ay=-1.0, bx=1.0, by=1.0,
                          rel_tol=1e-11, abs_floor=1e-15, _depth=0):
    """Unlimited-depth recursive 2D quadrature with a Gauss-12/24 error gauge.

    ``f`` may be vector valued (shape (ncomp, npts)); every component must
    pass the error gauge before a cell is accepted.  The absolute floor is
    per cell and does not shrink with depth: corner-singular integrands have
    cell contributions that decay geometrically toward the corner, so the
    refinement chain terminates once they drop below the floor, while the
    total floor-induced error stays of order cell_count * abs_floor.
    """
    coarse = _gauss_2d(f, ax, bx, ay, by, _G12)
    fine = _gauss_2d(f, ax, bx, ay, by, _G24)
    err = np.max(np.abs(fine - coarse))
    if err <= max(rel_tol * np.max(np.abs(fine)), abs_floor) or _depth >= 60:
        return fine
    mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
    return sum(
        recursive_integral_2d(f, a, c, b, d, rel_tol, abs_floor, _depth + 1)
        for a, c, b, d in ((ax, ay, mx, my), (mx, ay, bx, my),
                           (ax, my, mx, by), (mx, my, bx, by)))


def recursive_integral_1d(f, a, b, rel_tol=1e-11, abs_floor=1e-15, _depth=0):
    """Unlimited-depth recursive 1D quadrature, Gauss-12/24 gauge.

    ``f(x)`` may return shape (npts,) or (ncomp, npts).  The absolute floor
    is per cell and does not shrink with depth, so endpoint singularities
    terminate once their shrinking cell contributions drop below it.
    """
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    n12, w12 = _G12
    n24, w24 = _G24
    coarse = half * (f(mid + half * n12) @ w12)
    fine = half * (f(mid + half * n24) @ w24)
    err = np.max(np.abs(fine - coarse))
    if err <= max(rel_tol * np.max(np.abs(fine)), abs_floor) or _depth >= 60:
        return fine
    return (recursive_integral_1d(f, a, mid, rel_tol, abs_floor, _depth + 1)
            + recursive_integral_1d(f, mid, b, rel_tol, abs_floor, _depth + 1))
