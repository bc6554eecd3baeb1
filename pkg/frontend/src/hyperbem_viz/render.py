"""Figure builders for the four artifact kinds.

All functions take column dicts from :func:`hyperbem_viz.io.load_csv` and
write a raster image.  Data is plotted as-is; no smoothing or resampling
beyond what the plotting backend does to draw cells.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

# Diverging map centered at zero; limits clipped to the 1st-99th percentile
# so the exponential dynamic range near the cone does not saturate the map.
_CMAP = "RdBu_r"
_CLIP = (1.0, 99.0)


def _symmetric_limits(values):
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return -1.0, 1.0
    lo, hi = np.percentile(finite, _CLIP)
    vmax = max(abs(lo), abs(hi))
    if vmax == 0.0:
        vmax = 1.0
    return -vmax, vmax


def render_trace(traces, out_path):
    """Two-panel plot of Re phi1 / Re phi2 against the boundary parameter.

    ``traces`` is a list of (label, columns) pairs; the first entry is drawn
    as a solid line, later ones (e.g. a reference trace) dashed.
    """
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    styles = ["-", "--", ":", "-."]
    for (label, cols), style in zip(traces, styles):
        order = np.argsort(cols["t"])
        t = cols["t"][order]
        axes[0].plot(t, cols["re_phi1"][order], style, label=label, lw=1.2)
        axes[1].plot(t, cols["re_phi2"][order], style, label=label, lw=1.2)
    axes[0].set_ylabel(r"Re $\varphi^{(1)}$")
    axes[1].set_ylabel(r"Re $\varphi^{(2)}$")
    for ax in axes:
        ax.set_xlabel("boundary parameter t")
        ax.grid(True, alpha=0.3)
        if len(traces) > 1:
            ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def _pivot_grid(cols):
    """Rebuild the regular grid from flat x, y, value rows."""
    xs = np.unique(cols["x"])
    ys = np.unique(cols["y"])
    grid = np.full((len(ys), len(xs)), np.nan)
    ix = np.searchsorted(xs, cols["x"])
    iy = np.searchsorted(ys, cols["y"])
    grid[iy, ix] = cols["value"]
    return xs, ys, grid


def _draw_interface(ax, mesh_cols):
    segs_x = np.column_stack([mesh_cols["x_start"], mesh_cols["x_end"]])
    segs_y = np.column_stack([mesh_cols["y_start"], mesh_cols["y_end"]])
    ax.plot(segs_x.T, segs_y.T, color="black", lw=0.8)


def render_field(fields, out_path, mesh_cols=None):
    """Masked heatmap panels, one per field CSV, interface overlaid."""
    fig, axes = plt.subplots(1, len(fields), figsize=(5.5 * len(fields), 4.5),
                             squeeze=False)
    for ax, (label, cols) in zip(axes[0], fields):
        xs, ys, grid = _pivot_grid(cols)
        vmin, vmax = _symmetric_limits(grid)
        masked = np.ma.masked_invalid(grid)
        if masked.count():
            pm = ax.pcolormesh(xs, ys, masked, cmap=_CMAP,
                               vmin=vmin, vmax=vmax, shading="nearest")
            fig.colorbar(pm, ax=ax, shrink=0.85)
        else:
            ax.set_xlim(xs.min(), xs.max())
            ax.set_ylim(ys.min(), ys.max())
        if mesh_cols is not None:
            _draw_interface(ax, mesh_cols)
        ax.set_aspect("equal")
        ax.set_title(label)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_mesh(mesh_cols, out_path):
    """Chord plot of the boundary mesh with element endpoints marked."""
    fig, ax = plt.subplots(figsize=(6, 5))
    _draw_interface(ax, mesh_cols)
    ax.plot(mesh_cols["x_start"], mesh_cols["y_start"], ".", ms=3,
            color="tab:red")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"{len(mesh_cols['element_id'])} elements")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_convergence(levels_cols, out_path):
    """Estimator and trace errors against node count on log-log axes."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    m = levels_cols["M"]
    series = [("eta_tilde", r"$\tilde\eta$", "o"),
              ("e1_hat", r"$\hat e^{(1)}$", "s"),
              ("e2_hat", r"$\hat e^{(2)}$", "^")]
    # a single level gives markers only; lines need at least two points
    style = "-" if len(m) > 1 else ""
    for key, label, marker in series:
        vals = levels_cols[key]
        keep = np.isfinite(vals) & (vals > 0)
        if keep.any():
            ax.loglog(m[keep], vals[keep], style + marker, label=label)
    ax.set_xlabel("node count M")
    ax.set_ylabel("estimator / error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
