"""Small adaptive transmission solve on the ellipse, level by level.

A point source inside a hyperbolic ellipse radiates into vacuum.  The driver
prints the level table (node count, estimator, marked elements) and shows how
the Dorfler-marked refinement concentrates elements where the cone boundary
meets the interface.

Run: python3 demos/adaptive_ellipse.py            (about a minute)
"""

import numpy as np

from hyperbem.adapt import adaptive_solve
from hyperbem.geometry import Ellipse, build_initial_mesh
from hyperbem.kernels import KernelContext, PointSource
from hyperbem.medium import MaterialPair


def main():
    mat1 = MaterialPair(eps1=1.0 + 0.02j, eps2=-2.0 + 0.02j)
    mat2 = MaterialPair(eps1=1.0 + 0j, eps2=1.0 + 0j)
    ctx1 = KernelContext(mat=mat1, k0=1.0)
    ctx2 = KernelContext(mat=mat2, k0=1.0)
    sources = [PointSource(location=(0.0, 0.0), amplitude=-1.0, medium=1)]
    mesh0 = build_initial_mesh(Ellipse(2.0, 1.0), 60)

    print("level    M    h_max     h_min     eta~      marked")
    run = adaptive_solve(mesh0, ctx1, ctx2, sources, gamma=0.7, levels=4,
                         n_threads=1)
    for r in run.reports:
        print(f"{r.level:5d} {r.M:5d}  {r.h_max:8.2e}  {r.h_min:8.2e}  "
              f"{r.eta_tilde:8.4f}  {r.marked_count:5d}")

    final = run.final_solution
    lengths = final.mesh.lengths
    mids = final.mesh.mids
    # where did refinement go? bin element counts by polar angle octant
    theta = np.degrees(np.arctan2(mids[:, 1], mids[:, 0])) % 360.0
    counts, edges = np.histogram(theta, bins=8, range=(0.0, 360.0))
    print("\nelements per 45-degree sector of the ellipse:")
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        print(f"  {lo:5.0f}-{hi:3.0f} deg: {c:4d}")
    print(f"\nfinal mesh: {final.mesh.element_count} elements, "
          f"h_max/h_min = {lengths.max() / lengths.min():.1f}")


if __name__ == "__main__":
    main()
