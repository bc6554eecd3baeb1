"""Material tensors, deformed metric quantities, and propagating-cone geometry.

A medium is described by its two principal complex permittivities
(eps1, eps2).  The wave equation coefficient is A = diag(1/eps1, 1/eps2);
a medium is hyperbolic when the real parts of eps1 and eps2 have opposite
signs, in which case waves propagate only inside the cone
{x : x^T (Re A)^{-1} x > 0}.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .specfun import branch_sqrt

__all__ = [
    "MaterialPair",
    "ConeData",
    "deformed_distance",
    "deformed_normal",
    "half_cone_angle",
    "cone_boundary_distance",
]


@dataclass(frozen=True)
class ConeData:
    """Propagating-cone boundary: the pair of lines x2 = +-slope * x1."""

    slope: float
    hyperbolic: bool


@dataclass(frozen=True)
class MaterialPair:
    """Principal permittivities (eps1 perpendicular, eps2 parallel) of one medium."""

    eps1: complex
    eps2: complex

    def __post_init__(self):
        for eps in (self.eps1, self.eps2):
            e = complex(eps)
            if not (math.isfinite(e.real) and math.isfinite(e.imag)):
                raise ValueError("permittivity must be finite")
            if e == 0:
                raise ValueError("permittivity must be nonzero")
            if e.imag < 0:
                raise ValueError("medium must be lossy or lossless: Im eps >= 0")

    @property
    def hyperbolic(self) -> bool:
        return self.eps1.real * self.eps2.real < 0

    @property
    def a_diag(self):
        """Diagonal of A = diag(1/eps1, 1/eps2)."""
        return (1.0 / self.eps1, 1.0 / self.eps2)

    @property
    def a_inv_diag(self):
        """Diagonal of A^{-1} = diag(eps1, eps2)."""
        return (self.eps1, self.eps2)

    @cached_property
    def cone(self) -> ConeData:
        if not self.hyperbolic:
            return ConeData(slope=0.0, hyperbolic=False)
        a1 = 1.0 / (1.0 / self.eps1).real  # diag of (Re A)^{-1}
        a2 = 1.0 / (1.0 / self.eps2).real
        return ConeData(slope=math.sqrt(-a1 / a2), hyperbolic=True)


def deformed_distance(dx, mat: MaterialPair):
    """A-deformed distance sqrt(eps1*dx1^2 + eps2*dx2^2) of a difference vector.

    ``dx`` has shape (..., 2); the branch-cut square root keeps the result
    in the closed first quadrant for lossy media.
    """
    dx = np.asarray(dx, dtype=float)
    rad = mat.eps1 * dx[..., 0] ** 2 + mat.eps2 * dx[..., 1] ** 2
    return branch_sqrt(rad)


def deformed_normal(nu, mat: MaterialPair):
    """Deformed normal A*nu = (nu1/eps1, nu2/eps2) for unit normals nu (..., 2)."""
    nu = np.asarray(nu, dtype=float)
    out = np.empty(nu.shape, dtype=complex)
    out[..., 0] = nu[..., 0] / mat.eps1
    out[..., 1] = nu[..., 1] / mat.eps2
    return out


def half_cone_angle(mat: MaterialPair) -> float:
    """Half opening angle arctan(sqrt(-Re eps1 / Re eps2)) of the propagating cone."""
    if not mat.hyperbolic:
        raise ValueError("half cone angle is defined for hyperbolic media only")
    return math.atan(math.sqrt(-mat.eps1.real / mat.eps2.real))


def cone_boundary_distance(dx, mat: MaterialPair):
    """Euclidean distance from dx (..., 2) to the cone boundary lines.

    The boundary is the pair of lines x2 = +-slope * x1 through the origin.
    Non-hyperbolic media have no cone; returns +inf there.
    """
    dx = np.asarray(dx, dtype=float)
    if not mat.hyperbolic:
        out = np.full(dx.shape[:-1], np.inf)
        return out if out.ndim else float(out)
    s = mat.cone.slope
    scale = math.sqrt(s * s + 1.0)
    d1 = np.abs(s * dx[..., 0] - dx[..., 1])
    d2 = np.abs(s * dx[..., 0] + dx[..., 1])
    out = np.minimum(d1, d2) / scale
    return out if out.ndim else float(out)
