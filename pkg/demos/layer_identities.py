"""Classical layer-potential identities on an ellipse, anisotropic edition.

Two checks, both for the hyperbolic material eps = (1 + 0.02i, -2 + 0.02i):

* the static double layer of the constant density 1 equals -1 inside the
  curve, -1/2 on it, and 0 outside (the Gauss identity for the zero-frequency
  fundamental solution);
* the one-sided limits of the double layer at k0 = 1 approach K phi -+ 1/2 phi
  as the evaluation point slides onto the boundary along the normal.

Run: python3 demos/layer_identities.py
"""

import numpy as np

from hyperbem.assembly import assemble_operators
from hyperbem.geometry import Ellipse, build_initial_mesh
from hyperbem.kernels import KernelContext, double_layer_potential
from hyperbem.medium import MaterialPair

MAT = MaterialPair(eps1=1.0 + 0.02j, eps2=-2.0 + 0.02j)
VACUUM = MaterialPair(eps1=1.0 + 0j, eps2=1.0 + 0j)


def gauss_identity():
    ctx = KernelContext(mat=MAT, k0=0.0)
    mesh = build_initial_mesh(Ellipse(2.0, 1.0), 200)
    ones = np.ones(mesh.node_count)
    cases = [("interior", 0.6 * mesh.mids, -1.0),
             ("on-boundary midpoints", mesh.mids, -0.5),
             ("exterior", 1.7 * mesh.mids, 0.0)]
    print("static double layer of the density 1 (expected -1 / -1/2 / 0):")
    for label, pts, expect in cases:
        w0 = double_layer_potential(mesh, ctx, ones, pts[:8]).real
        print(f"  {label:24s} expect {expect:5.2f}  "
              f"max deviation {np.max(np.abs(w0 - expect)):.2e}")


def jump_relation():
    ctx = KernelContext(mat=MAT, k0=1.0)
    mesh = build_initial_mesh(Ellipse(2.0, 1.0), 200)
    ones = np.ones(mesh.node_count)
    # Galerkin K gives the principal-value operator; applied to the constant
    # density and localized at one midpoint via the mass matrix row scale.
    x = mesh.mids[37]
    nu = mesh.normals[37]
    h = mesh.lengths[37]
    ctx2 = KernelContext(mat=VACUUM, k0=1.0)
    ops = assemble_operators(mesh, ctx, ctx2, n_threads=1)
    k_phi = (ops.K[0] @ ones)  # row-integrated K against the P0 test space
    k_at_x = k_phi[37] / mesh.lengths[37]
    print("\ndouble-layer jump at one midpoint, w(x -+ h nu) -> K1 -+ 1/2:")
    for side, sign in [("interior", -1.0), ("exterior", 1.0)]:
        target = k_at_x + 0.5 * sign
        print(f"  {side} limit, target {target:+.4f}")
        for scale in (1e-1, 1e-2, 1e-3, 1e-4):
            w = double_layer_potential(mesh, ctx, ones,
                                       (x + sign * scale * h * nu)[None, :])[0]
            print(f"    h offset {scale:7.1e}  |w - target| = "
                  f"{abs(w - target):.3e}")


if __name__ == "__main__":
    gauss_identity()
    jump_relation()
