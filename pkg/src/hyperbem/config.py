"""Problem configuration: flat key = value files with dotted sections.

Grammar (one statement per line):

    # comment
    section.key = value

Values are floats, integers, complex numbers written as ``a+bi`` (for
example ``-2+0.02i``), strings, or semicolon-separated coordinate pairs
for polygon vertices (``x,y; x,y; ...``).  Unknown keys are rejected so
typos fail loudly.  Keys not present in the file keep their documented
defaults and are flagged as defaulted in the run manifest.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .geometry import Curve, Ellipse, Polygon
from .kernels import KernelContext, PointSource
from .medium import MaterialPair
from .quadrature import AdaptiveBudget

__all__ = [
    "ConfigError",
    "GridSpec",
    "ProblemConfig",
    "parse_config",
    "serialize_config",
    "format_complex",
    "parse_complex",
]


class ConfigError(ValueError):
    """Malformed or physically invalid configuration."""


_COMPLEX_RE = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"(?:\s*([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i)?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi``, or ``a-bi`` into a complex number."""
    m = _COMPLEX_RE.match(text)
    if m is None:
        raise ConfigError(f"cannot parse complex literal {text!r}")
    re_part = float(m.group(1))
    im_part = 0.0
    if m.group(2) is not None:
        im_part = float(m.group(3))
        if m.group(2) == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def _fmt_float(x: float) -> str:
    return repr(float(x))


def format_complex(z: complex) -> str:
    """Inverse of parse_complex; always writes the imaginary part."""
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and math.copysign(1, z.imag) < 0) else "+"
    return f"{_fmt_float(z.real)}{sign}{_fmt_float(abs(z.imag))}i"


@dataclass(frozen=True)
class GridSpec:
    """Regular field-evaluation grid covering [xmin,xmax] x [ymin,ymax]."""

    xmin: float = -3.0
    xmax: float = 3.0
    ymin: float = -2.0
    ymax: float = 2.0
    nx: int = 96
    ny: int = 64

    def points(self) -> np.ndarray:
        xs = np.linspace(self.xmin, self.xmax, self.nx)
        ys = np.linspace(self.ymin, self.ymax, self.ny)
        gx, gy = np.meshgrid(xs, ys, indexing="xy")
        return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass(frozen=True)
class ProblemConfig:
    """Everything needed to reproduce one adaptive transmission run."""

    geometry_kind: str = "ellipse"
    ellipse_a: float = 2.0
    ellipse_b: float = 1.0
    rect_x0: float = 0.0
    rect_y0: float = 0.0
    rect_x1: float = 1.0
    rect_y1: float = 0.2
    polygon_vertices: tuple = ()

    medium1_eps1: complex = 1 + 0.02j
    medium1_eps2: complex = -2 + 0.02j
    medium2_eps1: complex = 1 + 0j
    medium2_eps2: complex = 1 + 0j
    k0: float = 1.0

    source_domain: int = 1
    source_x: float = 0.0
    source_y: float = 0.0
    source_amplitude: complex = -1 + 0j

    tau: float = 0.1
    gamma: float = 0.7
    levels: int = 5
    sigma: float = 0.0            # 0 disables the eta < sigma stopping rule
    m0: int = 100

    quad_rel_tol: float = 1e-8
    quad_abs_tol: float = 1e-14
    quad_max_depth: int = 12

    m_ref: int = 0                # 0 skips the reference solve
    grid: GridSpec = field(default_factory=GridSpec)
    output_dir: str = "out"

    # ---- derived objects -------------------------------------------------

    def curve(self) -> Curve:
        if self.geometry_kind == "ellipse":
            return Ellipse(self.ellipse_a, self.ellipse_b)
        if self.geometry_kind == "rectangle":
            x0, y0, x1, y1 = self.rect_x0, self.rect_y0, self.rect_x1, self.rect_y1
            if not (x1 > x0 and y1 > y0):
                raise ConfigError("rectangle corners must satisfy x1 > x0, y1 > y0")
            return Polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
        if self.geometry_kind == "polygon":
            return Polygon(self.polygon_vertices)
        raise ConfigError(f"unknown geometry kind {self.geometry_kind!r}")

    def materials(self) -> tuple[MaterialPair, MaterialPair]:
        return (MaterialPair(self.medium1_eps1, self.medium1_eps2),
                MaterialPair(self.medium2_eps1, self.medium2_eps2))

    def contexts(self) -> tuple[KernelContext, KernelContext]:
        m1, m2 = self.materials()
        return KernelContext(m1, self.k0), KernelContext(m2, self.k0)

    def sources(self) -> list[PointSource]:
        return [PointSource((self.source_x, self.source_y),
                            self.source_amplitude, self.source_domain)]

    def budget(self) -> AdaptiveBudget:
        return AdaptiveBudget(rel_tol=self.quad_rel_tol,
                              abs_tol=self.quad_abs_tol,
                              max_depth=self.quad_max_depth)

    def validate(self) -> None:
        if self.geometry_kind not in ("ellipse", "rectangle", "polygon"):
            raise ConfigError(f"unknown geometry kind {self.geometry_kind!r}")
        curve = self.curve()
        try:
            m1, m2 = self.materials()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for name, m in (("medium1", m1), ("medium2", m2)):
            if m.eps1.imag < 0 or m.eps2.imag < 0:
                raise ConfigError(f"{name}: permittivities need Im >= 0")
        if self.k0 <= 0:
            raise ConfigError("k0 must be positive")
        if self.source_domain not in (1, 2):
            raise ConfigError("source.domain must be 1 or 2")
        loc = np.array([self.source_x, self.source_y])
        ts = np.linspace(0.0, curve.period, 4096, endpoint=False)
        gap = float(np.min(np.hypot(*(curve.point(ts) - loc).T)))
        scale = max(np.max(np.abs(curve.point(ts))), 1.0)
        if gap <= 1e-9 * scale:
            raise ConfigError("source location lies on the interface")
        inside = bool(np.atleast_1d(curve.contains(loc[None]))[0])
        if inside != (self.source_domain == 1):
            side = "inside" if inside else "outside"
            raise ConfigError(
                f"source is {side} the interface but source.domain = {self.source_domain}")
        if self.tau <= 0:
            raise ConfigError("tau must be positive")
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")
        if self.levels < 1:
            raise ConfigError("levels must be >= 1")
        if self.sigma < 0:
            raise ConfigError("sigma must be >= 0")
        if self.m0 < 4:
            raise ConfigError("M0 must be >= 4")
        if self.quad_rel_tol <= 0 or self.quad_abs_tol <= 0:
            raise ConfigError("quadrature tolerances must be positive")
        if self.quad_max_depth < 1:
            raise ConfigError("quadrature max depth must be >= 1")
        if self.m_ref < 0:
            raise ConfigError("M_ref must be >= 0")
        if self.m_ref and self.m_ref < self.m0:
            raise ConfigError("M_ref must be at least M0")
        if self.grid.nx < 2 or self.grid.ny < 2:
            raise ConfigError("field grid needs nx, ny >= 2")
        if not (self.grid.xmax > self.grid.xmin and self.grid.ymax > self.grid.ymin):
            raise ConfigError("field grid window is empty")


# key -> (attribute, parser, formatter)
def _passthrough(x):
    return x


def _parse_vertices(text: str) -> tuple:
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        xy = chunk.split(",")
        if len(xy) != 2:
            raise ConfigError(f"bad vertex {chunk!r}, expected 'x,y'")
        pairs.append((float(xy[0]), float(xy[1])))
    return tuple(pairs)


def _fmt_vertices(verts) -> str:
    return "; ".join(f"{_fmt_float(x)},{_fmt_float(y)}" for x, y in verts)


_SCHEMA = {
    "geometry.kind": ("geometry_kind", str.strip, _passthrough),
    "geometry.a": ("ellipse_a", float, _fmt_float),
    "geometry.b": ("ellipse_b", float, _fmt_float),
    "geometry.x0": ("rect_x0", float, _fmt_float),
    "geometry.y0": ("rect_y0", float, _fmt_float),
    "geometry.x1": ("rect_x1", float, _fmt_float),
    "geometry.y1": ("rect_y1", float, _fmt_float),
    "geometry.vertices": ("polygon_vertices", _parse_vertices, _fmt_vertices),
    "medium1.eps1": ("medium1_eps1", parse_complex, format_complex),
    "medium1.eps2": ("medium1_eps2", parse_complex, format_complex),
    "medium2.eps1": ("medium2_eps1", parse_complex, format_complex),
    "medium2.eps2": ("medium2_eps2", parse_complex, format_complex),
    "problem.k0": ("k0", float, _fmt_float),
    "source.domain": ("source_domain", int, str),
    "source.x": ("source_x", float, _fmt_float),
    "source.y": ("source_y", float, _fmt_float),
    "source.amplitude": ("source_amplitude", parse_complex, format_complex),
    "adapt.tau": ("tau", float, _fmt_float),
    "adapt.gamma": ("gamma", float, _fmt_float),
    "adapt.levels": ("levels", int, str),
    "adapt.sigma": ("sigma", float, _fmt_float),
    "adapt.m0": ("m0", int, str),
    "quadrature.rel_tol": ("quad_rel_tol", float, _fmt_float),
    "quadrature.abs_tol": ("quad_abs_tol", float, _fmt_float),
    "quadrature.max_depth": ("quad_max_depth", int, str),
    "reference.m_ref": ("m_ref", int, str),
    "output.dir": ("output_dir", str.strip, _passthrough),
}

_GRID_SCHEMA = {
    "grid.xmin": ("xmin", float, _fmt_float),
    "grid.xmax": ("xmax", float, _fmt_float),
    "grid.ymin": ("ymin", float, _fmt_float),
    "grid.ymax": ("ymax", float, _fmt_float),
    "grid.nx": ("nx", int, str),
    "grid.ny": ("ny", int, str),
}


def parse_config(text: str) -> tuple[ProblemConfig, frozenset]:
    """Parse config text; returns (config, names of keys left at defaults)."""
    values = {}
    grid_values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _SCHEMA:
            attr, parse, _ = _SCHEMA[key]
            target = values
        elif key in _GRID_SCHEMA:
            attr, parse, _ = _GRID_SCHEMA[key]
            target = grid_values
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if attr in target:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            target[attr] = parse(value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    if grid_values:
        values["grid"] = replace(GridSpec(), **grid_values)
    cfg = replace(ProblemConfig(), **values)
    defaulted = {f.name for f in fields(ProblemConfig)} - set(values)
    if grid_values:
        defaulted |= {f"grid.{f.name}" for f in fields(GridSpec)
                      if f.name not in grid_values}
        defaulted.discard("grid")
    return cfg, frozenset(defaulted)


def serialize_config(cfg: ProblemConfig) -> str:
    """Write every key explicitly; parse(serialize(cfg)) reproduces cfg."""
    lines = []
    for key, (attr, _, fmt) in _SCHEMA.items():
        value = getattr(cfg, attr)
        if key == "geometry.vertices" and not value:
            continue
        lines.append(f"{key} = {fmt(value)}")
    for key, (attr, _, fmt) in _GRID_SCHEMA.items():
        lines.append(f"{key} = {fmt(getattr(cfg.grid, attr))}")
    return "\n".join(lines) + "\n"
