"""Parametrized closed boundary curves, meshes, and refinement primitives.

A mesh is an ordered list of flat (chord) elements whose endpoints lie on
the exact curve.  Element m runs from node m to node m+1 (cyclically).
Refinement inserts parameter midpoints and never moves existing nodes, so
node sets are nested across levels; every polygon corner is a node at
every level.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "Curve",
    "Ellipse",
    "Polygon",
    "Mesh",
    "ElementFrame",
    "build_initial_mesh",
    "uniform_refine",
    "bisect_elements",
    "element_frame",
]


class Curve:
    """Closed, simple, positively oriented parametrized curve."""

    period: float

    def point(self, t):
        raise NotImplementedError

    def contains(self, pts):
        """True for points strictly inside the region bounded by the curve."""
        raise NotImplementedError


@dataclass(frozen=True)
class Ellipse(Curve):
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("ellipse semi-axes must be positive")

    @property
    def period(self) -> float:
        return 2.0 * math.pi

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        return (pts[..., 0] / self.a) ** 2 + (pts[..., 1] / self.b) ** 2 < 1.0


class Polygon(Curve):
    """Simple closed polygon, vertices in counterclockwise order, parametrized by arc length."""

    def __init__(self, vertices: Sequence[Sequence[float]]):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
            raise ValueError("polygon needs at least 3 vertices of dimension 2")
        edges = np.roll(verts, -1, axis=0) - verts
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if np.any(lengths == 0):
            raise ValueError("degenerate polygon edge")
        area2 = np.sum(verts[:, 0] * np.roll(verts[:, 1], -1) - np.roll(verts[:, 0], -1) * verts[:, 1])
        if area2 <= 0:
            raise ValueError("polygon must be positively (counterclockwise) oriented")
        self.vertices = verts
        self.edge_lengths = lengths
        self.corner_params = np.concatenate([[0.0], np.cumsum(lengths)])  # length n+1

    @property
    def period(self) -> float:
        return float(self.corner_params[-1])

    def point(self, t):
        t = np.mod(np.asarray(t, dtype=float), self.period)
        idx = np.clip(np.searchsorted(self.corner_params, t, side="right") - 1, 0, len(self.vertices) - 1)
        frac = (t - self.corner_params[idx]) / self.edge_lengths[idx]
        nxt = (idx + 1) % len(self.vertices)
        return self.vertices[idx] + frac[..., None] * (self.vertices[nxt] - self.vertices[idx])

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x, y = pts[..., 0], pts[..., 1]
        inside = np.zeros(x.shape, dtype=bool)
        v = self.vertices
        n = len(v)
        for i in range(n):
            x0, y0 = v[i]
            x1, y1 = v[(i + 1) % n]
            crosses = (y0 > y) != (y1 > y)
            with np.errstate(invalid="ignore", divide="ignore"):
                xint = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            inside ^= crosses & (x < np.where(crosses, xint, np.inf))
        return inside


@dataclass(frozen=True)
class ElementFrame:
    midpoint: np.ndarray          # on the exact curve at the parameter midpoint
    length: float                 # chord length
    nu: np.ndarray                # unit outward normal of the chord
    param_map: Callable           # affine [-1, 1] -> chord, endpoints on the curve


@dataclass(frozen=True)
class Mesh:
    """Immutable mesh snapshot: element m spans nodes m -> m+1 (mod M)."""

    curve: Curve
    params: np.ndarray            # node parameters, strictly increasing, span < period
    level: int = 0
    parent_of: Optional[np.ndarray] = None  # element lineage into the previous mesh

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        if params.ndim != 1 or len(params) < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if np.any(np.diff(params) <= 0) or params[-1] - params[0] >= self.curve.period:
            raise ValueError("node parameters must be strictly increasing within one period")
        object.__setattr__(self, "params", params)
        nodes = self.curve.point(params)
        nxt = np.roll(nodes, -1, axis=0)
        chords = nxt - nodes
        lengths = np.hypot(chords[:, 0], chords[:, 1])
        if np.any(lengths == 0):
            raise ValueError("zero-length element")
        tangents = chords / lengths[:, None]
        params_end = np.roll(params, -1)
        params_end[-1] += self.curve.period
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "starts", nodes)
        object.__setattr__(self, "ends", nxt)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "mids", 0.5 * (nodes + nxt))
        object.__setattr__(self, "mids_curve", self.curve.point(0.5 * (params + params_end)))
        # outward normal: tangent rotated by -pi/2 for a CCW curve
        object.__setattr__(self, "normals", np.stack([tangents[:, 1], -tangents[:, 0]], axis=-1))
        object.__setattr__(self, "params_end", params_end)

    @property
    def element_count(self) -> int:
        return len(self.params)

    @property
    def node_count(self) -> int:
        return len(self.params)

    @property
    def h_max(self) -> float:
        return float(self.lengths.max())

    @property
    def h_min(self) -> float:
        return float(self.lengths.min())

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            wr = csv.writer(f, lineterminator="\n")
            wr.writerow(["element_id", "t_start", "t_end", "x_start", "y_start",
                         "x_end", "y_end", "length", "nu_x", "nu_y", "level"])
            for m in range(self.element_count):
                wr.writerow([m, repr(float(self.params[m])),
                             repr(float(self.params_end[m])),
                             repr(float(self.starts[m, 0])), repr(float(self.starts[m, 1])),
                             repr(float(self.ends[m, 0])), repr(float(self.ends[m, 1])),
                             repr(float(self.lengths[m])),
                             repr(float(self.normals[m, 0])), repr(float(self.normals[m, 1])),
                             self.level])


def build_initial_mesh(curve: Curve, m0: int) -> Mesh:
    """Initial mesh: uniform in parameter (ellipse) or in arc length per edge (polygon)."""
    if m0 < 4:
        raise ValueError("initial mesh needs at least 4 nodes")
    if isinstance(curve, Polygon):
        n_corners = len(curve.vertices)
        if m0 < n_corners:
            raise ValueError(f"M0={m0} too small to place all {n_corners} polygon corners")
        # largest-remainder apportionment of m0 segments across edges, >= 1 each
        quota = curve.edge_lengths / curve.period * m0
        counts = np.maximum(1, np.floor(quota).astype(int))
        while counts.sum() < m0:
            counts[np.argmax(quota - counts)] += 1
        while counts.sum() > m0:
            eligible = counts > 1
            k = np.argmin(np.where(eligible, quota - counts, np.inf))
            counts[k] -= 1
        params = np.concatenate([
            curve.corner_params[i] + curve.edge_lengths[i] * np.arange(counts[i]) / counts[i]
            for i in range(n_corners)
        ])
    else:
        params = curve.period * np.arange(m0) / m0
    return Mesh(curve=curve, params=params, level=0)


def uniform_refine(mesh: Mesh) -> Mesh:
    """Split every element at its parameter midpoint; child i of element m is 2m+i."""
    mids = 0.5 * (mesh.params + mesh.params_end)
    params = np.empty(2 * mesh.element_count)
    params[0::2] = mesh.params
    params[1::2] = mids
    parent = np.repeat(np.arange(mesh.element_count), 2)
    return Mesh(curve=mesh.curve, params=params, level=mesh.level, parent_of=parent)


def bisect_elements(mesh: Mesh, marked) -> Mesh:
    """Split the marked elements at their parameter midpoints; others untouched."""
    marked = np.asarray(sorted(set(int(m) for m in marked)), dtype=int)
    if marked.size == 0:
        return mesh
    if marked.min() < 0 or marked.max() >= mesh.element_count:
        raise ValueError("marked element id out of range")
    is_marked = np.zeros(mesh.element_count, dtype=bool)
    is_marked[marked] = True
    params, parent = [], []
    for m in range(mesh.element_count):
        params.append(mesh.params[m])
        parent.append(m)
        if is_marked[m]:
            params.append(0.5 * (mesh.params[m] + mesh.params_end[m]))
            parent.append(m)
    return Mesh(curve=mesh.curve, params=np.array(params), level=mesh.level + 1,
                parent_of=np.array(parent, dtype=int))


def element_frame(mesh: Mesh, m: int) -> ElementFrame:
    """Quadrature pull-back frame of one element: affine map [-1,1] -> chord."""
    if not 0 <= m < mesh.element_count:
        raise IndexError("element id out of range")
    start, end = mesh.starts[m].copy(), mesh.ends[m].copy()

    def param_map(t):
        t = np.asarray(t, dtype=float)
        return 0.5 * (1.0 - t)[..., None] * start + 0.5 * (1.0 + t)[..., None] * end

    return ElementFrame(midpoint=mesh.mids_curve[m].copy(), length=float(mesh.lengths[m]),
                        nu=mesh.normals[m].copy(), param_map=param_map)
