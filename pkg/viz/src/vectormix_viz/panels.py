"""Three-column field panels and semilog decay plots."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .formats import Snapshot, read_series, read_snapshot

_PAD = 192  # rendering resolution per dimension


def _check_consistent(a: Snapshot, b: Snapshot, what: str) -> None:
    if a.n_cutoff != b.n_cutoff or abs(a.side_length - b.side_length) > 1e-12:
        raise ValueError(f"{what}: snapshots live on different grids")
    if abs(a.t - b.t) > 1e-9 * max(1.0, abs(a.t)):
        raise ValueError(f"{what}: snapshots are from different times "
                         f"({a.t:g} vs {b.t:g})")


def _field_axes(ax, snap: Snapshot, title: str):
    pad = max(_PAD, 2 * snap.n_cutoff + 2)
    s = snap.to_physical(pad)
    mag = np.sqrt(s[0] ** 2 + s[1] ** 2)
    L = snap.side_length
    xs = np.arange(pad) * L / pad
    # imshow wants [row = y]; samples are indexed [x, y]
    im = ax.imshow(mag.T, origin="lower", extent=(0, L, 0, L), cmap="viridis")
    if np.max(mag) > 0:
        ax.streamplot(xs, xs, s[0].T, s[1].T, color="w", density=1.1,
                      linewidth=0.6, arrowsize=0.8)
    ax.set_title(title)
    ax.set_xlim(0, L)
    ax.set_ylim(0, L)
    return im


def build_panel_figure(u_snapshot, U_snapshot, p_snapshot):
    """Figure with columns: stirring field, transported field, pressure.

    Returns (fig, axes); the caller owns the figure.
    """
    u = read_snapshot(u_snapshot)
    U = read_snapshot(U_snapshot)
    p = read_snapshot(p_snapshot)
    _check_consistent(u, U, "u vs U")
    _check_consistent(u, p, "u vs p")

    fig, axes = plt.subplots(1, 3, figsize=(13.5, 4.2), constrained_layout=True)
    im0 = _field_axes(axes[0], U, "stirring field |U|")
    im1 = _field_axes(axes[1], u, "transported field |u|")
    pad = max(_PAD, 2 * p.n_cutoff + 2)
    pressure = p.to_physical(pad)[0]
    L = p.side_length
    scale = np.max(np.abs(pressure))
    im2 = axes[2].imshow(
        pressure.T, origin="lower", extent=(0, L, 0, L), cmap="RdBu_r",
        vmin=-scale if scale > 0 else -1, vmax=scale if scale > 0 else 1,
    )
    axes[2].set_title("pressure p")
    for ax, im in zip(axes, (im0, im1, im2)):
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.suptitle(f"t = {u.t:.4g}")
    return fig, axes


def render_panel(u_snapshot, U_snapshot, p_snapshot, out_png) -> None:
    """Render the three-column snapshot panel to a PNG file."""
    fig, _ = build_panel_figure(u_snapshot, U_snapshot, p_snapshot)
    fig.savefig(out_png, dpi=130)
    plt.close(fig)


def build_decay_figure(csv_path):
    """Semilog mix-norm decay with the measured Groenwall envelope overlay."""
    cols = read_series(csv_path)
    t = cols["t"]
    h = cols["h_neg_alpha"]
    fig, ax = plt.subplots(figsize=(6.4, 4.4), constrained_layout=True)
    ax.semilogy(t, h, label="mix norm")
    g = cols["gradU_linf"]
    integral = np.zeros_like(t)
    if len(t) > 1:
        integral[1:] = np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))
    ax.semilogy(t, h[0] * np.exp(-integral), "--", label="decay envelope")
    ax.set_xlabel("t")
    ax.set_ylabel("negative-order mix norm")
    ax.legend()
    return fig, ax


def render_decay(csv_path, out_png) -> None:
    """Render the decay plot for a run's series CSV to a PNG file."""
    fig, _ = build_decay_figure(csv_path)
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
