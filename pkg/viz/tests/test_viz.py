"""Viz package: format readers, panel/decay rendering, CLI-driven acceptance."""

import os
import struct
import subprocess
import sys

import numpy as np
import pytest

from vectormix_viz import (
    build_decay_figure,
    build_panel_figure,
    read_series,
    read_snapshot,
    render_decay,
    render_panel,
)

TWO_PI = 2.0 * np.pi
CSV_HEADER = "t,dt,h_neg_alpha,energy,gradU_l2,gradU_linf,decay_rate_inst"


def write_snapshot_bytes(path, coeffs, t=0.0, alpha=1.0, side=TWO_PI, phys=None):
    """Assemble a snapshot file from raw coefficients (test-local writer)."""
    coeffs = np.asarray(coeffs, dtype="<c16")
    n = (coeffs.shape[1] - 1) // 2
    phys = 2 * n + 1 if phys is None else phys
    header = struct.pack("<4sIQQddd", b"VMXS", 1, n, phys, side, t, alpha)
    with open(path, "wb") as handle:
        handle.write(header + coeffs.tobytes())


def single_mode_coeffs(n, k=(1, 0), comp=1, amp=-0.5j):
    """Hermitian pair for amp * exp(i k.x) + conj in one component."""
    size = 2 * n + 1
    c = np.zeros((2, size, size), dtype=np.complex128)
    c[comp, k[0] + n, k[1] + n] = amp
    c[comp, -k[0] + n, -k[1] + n] = np.conj(amp)
    return c


def zero_coeffs(n):
    size = 2 * n + 1
    return np.zeros((2, size, size), dtype=np.complex128)


class TestSnapshotReader:
    def test_round_trip_fields(self, tmp_path):
        path = tmp_path / "s.vmxs"
        c = single_mode_coeffs(4)
        write_snapshot_bytes(path, c, t=1.5, alpha=0.5)
        snap = read_snapshot(path)
        assert snap.n_cutoff == 4
        assert snap.t == 1.5 and snap.alpha == 0.5
        assert np.array_equal(snap.coeffs, c)

    def test_physical_reconstruction(self, tmp_path):
        # (0, sin x): samples must match the analytic field
        path = tmp_path / "s.vmxs"
        write_snapshot_bytes(path, single_mode_coeffs(4))
        snap = read_snapshot(path)
        s = snap.to_physical(pad=64)
        xs = np.arange(64) * TWO_PI / 64
        assert np.max(np.abs(s[1] - np.sin(xs)[:, None])) < 1e-13
        assert np.max(np.abs(s[0])) < 1e-15

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.vmxs"
        path.write_bytes(b"XXXX" + b"\x00" * 100)
        with pytest.raises(ValueError):
            read_snapshot(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.vmxs"
        write_snapshot_bytes(path, single_mode_coeffs(4))
        raw = path.read_bytes()
        path.write_bytes(raw[:-8])
        with pytest.raises(ValueError):
            read_snapshot(path)


class TestReadSeries:
    def test_columns(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text(CSV_HEADER + "\n0,0,2,1,1,0.5,-0.1\n0.1,0.01,1.9,1,1,0.5,-0.1\n")
        cols = read_series(path)
        assert np.allclose(cols["t"], [0.0, 0.1])
        assert np.allclose(cols["h_neg_alpha"], [2.0, 1.9])

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            read_series(path)

    def test_missing_columns_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,h\n0,1\n")
        with pytest.raises(ValueError):
            read_series(path)


class TestRenderPanel:
    def _triple(self, tmp_path, n=4, t=0.0):
        paths = {}
        for name, coeffs in (
            ("u", single_mode_coeffs(n, k=(1, 0), comp=1)),
            ("U", single_mode_coeffs(n, k=(0, 1), comp=0, amp=0.25)),
            ("p", zero_coeffs(n)),
        ):
            paths[name] = tmp_path / f"{name}.vmxs"
            write_snapshot_bytes(paths[name], coeffs, t=t)
        return paths

    def test_zero_fields_render(self, tmp_path):
        paths = {}
        for name in ("u", "U", "p"):
            paths[name] = tmp_path / f"{name}.vmxs"
            write_snapshot_bytes(paths[name], zero_coeffs(3))
        out = tmp_path / "panel.png"
        render_panel(paths["u"], paths["U"], paths["p"], out)
        assert out.exists() and out.stat().st_size > 0

    def test_three_columns_and_time_annotation(self, tmp_path):
        paths = self._triple(tmp_path, t=0.75)
        fig, axes = build_panel_figure(paths["u"], paths["U"], paths["p"])
        try:
            assert len(axes) == 3
            assert "t = 0.75" in fig.get_suptitle()
        finally:
            import matplotlib.pyplot as plt

            plt.close(fig)

    def test_streamline_seed_vectors_parallel_to_flow(self, tmp_path):
        # the plotted vector samples of (0, sin x) must be parallel to the
        # analytic flow direction (0, sign(sin x)) wherever it is nonzero
        paths = self._triple(tmp_path)
        snap = read_snapshot(paths["u"])
        s = snap.to_physical(pad=48)
        cross = s[0] * 0.0  # analytic direction is (0, 1): parallel iff s[0] == 0
        assert np.max(np.abs(s[0] - cross)) < 1e-14
        assert np.max(np.abs(s[1])) > 0.9

    def test_time_mismatch_rejected(self, tmp_path):
        paths = self._triple(tmp_path)
        write_snapshot_bytes(paths["p"], zero_coeffs(4), t=3.0)
        with pytest.raises(ValueError):
            render_panel(paths["u"], paths["U"], paths["p"], tmp_path / "x.png")

    def test_grid_mismatch_rejected(self, tmp_path):
        paths = self._triple(tmp_path)
        write_snapshot_bytes(paths["U"], single_mode_coeffs(6, comp=0), t=0.0)
        with pytest.raises(ValueError):
            render_panel(paths["u"], paths["U"], paths["p"], tmp_path / "x.png")


class TestRenderDecay:
    def test_synthetic_exponential_straight_line(self, tmp_path):
        ts = np.linspace(0, 2, 41)
        h = 2.0 * np.exp(-0.8 * ts)
        lines = [CSV_HEADER] + [
            f"{t:.17g},0.05,{v:.17g},1,1,0.8,-0.1" for t, v in zip(ts, h)
        ]
        path = tmp_path / "s.csv"
        path.write_text("\n".join(lines) + "\n")
        fig, ax = build_decay_figure(path)
        try:
            plotted = ax.lines[0].get_ydata()
            # log-linear data: second differences of log vanish
            second = np.diff(np.log(plotted), 2)
            assert np.max(np.abs(second)) < 1e-12
        finally:
            import matplotlib.pyplot as plt

            plt.close(fig)
        out = tmp_path / "decay.png"
        render_decay(path, out)
        assert out.exists()

    def test_empty_series_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            render_decay(path, tmp_path / "x.png")


@pytest.mark.acceptance
class TestSecondaryAcceptance:
    """Drives the simulator through its CLI and renders its real outputs."""

    def test_renders_from_n64_run(self, tmp_path):
        out_dir = tmp_path / "out"
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "alpha = 1\nn_cutoff = 64\nt_end = 0.1\ninit = dipole\n"
            "u_provider = optimal\noutput_interval = 0.02\n"
            "snapshot_interval = 0.05\n"
            f"out_dir = {out_dir}\n"
        )

        def cli(*args):
            proc = subprocess.run(
                [sys.executable, "-m", "vectormix", *args],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, proc.stderr
            return proc.stdout

        cli("simulate", "--config", str(cfg))
        u0 = out_dir / "snap_000000.vmxs"
        assert u0.exists()
        U_path = tmp_path / "U.vmxs"
        rate = cli("optimal-field", "--in", str(u0), "--alpha", "1.0", "--out", str(U_path))
        assert float(rate.strip()) > 0
        p_path = tmp_path / "p.vmxs"
        cli("pressure", "--in-u", str(u0), "--in-U", str(U_path), "--out", str(p_path))

        panel = tmp_path / "panel.png"
        render_panel(u0, U_path, p_path, panel)
        assert panel.exists() and panel.stat().st_size > 0
        fig, axes = build_panel_figure(u0, U_path, p_path)
        try:
            assert len(axes) == 3
            assert "t = 0" in fig.get_suptitle()
        finally:
            import matplotlib.pyplot as plt

            plt.close(fig)

        decay = tmp_path / "decay.png"
        render_decay(out_dir / "series.csv", decay)
        assert decay.exists() and decay.stat().st_size > 0
