"""Initial data: dipole polynomials, stream-function fields, snapshots."""

import numpy as np
import pytest

from vectormix.errors import ParameterError
from vectormix.initial import (
    InitKind,
    InitSpec,
    build_initial,
    dipole_field,
    dipole_stream,
    stream_from_modes,
    velocity_from_stream,
)
from vectormix.snapshots import read_snapshot, write_snapshot
from vectormix.spectral import (
    GridSpec,
    ScalarField,
    divergence_residual,
    l2_norm,
    to_physical,
)

PI = np.pi


class TestDipoleStream:
    def test_p1_peak(self):
        # p1(1/2) = 256 / 16 / 16 = 1 at the midline where p2 vanishes
        assert dipole_stream(PI, PI) == pytest.approx(0.0, abs=1e-15)

    def test_p1_value(self):
        # evaluate psi at (pi, pi/2): p1(1/2) = 1, p2(1/4) = 1
        assert dipole_stream(PI, PI / 2) == pytest.approx(1.0, rel=1e-13)

    def test_p2_odd_about_midline(self):
        xs = np.linspace(0.1, 2 * PI - 0.1, 7)
        for y in (0.3, 1.1, 2.9):
            assert np.allclose(
                dipole_stream(xs, y), -dipole_stream(xs, 2 * PI - y), atol=1e-13
            )

    def test_periodic_closure(self):
        # psi and its first derivatives vanish on the seam
        assert dipole_stream(0.0, 1.0) == 0.0
        assert dipole_stream(1.0, 0.0) == 0.0
        eps = 1e-7
        assert abs(dipole_stream(eps, 1.0)) < 1e-20
        assert abs(dipole_stream(1.0, eps)) < 1e-13


class TestVelocityFromStream:
    def test_sin_product(self):
        g = GridSpec(4)
        psi = stream_from_modes(g, {(1, 1): -0.25, (1, -1): 0.25})
        u = velocity_from_stream(psi)
        m = 64
        xs = np.arange(m) * 2 * PI / m
        p = to_physical(u, pad=m)
        expect0 = -np.sin(xs)[:, None] * np.cos(xs)[None, :]
        expect1 = np.cos(xs)[:, None] * np.sin(xs)[None, :]
        assert np.max(np.abs(p.samples[0] - expect0)) < 1e-13
        assert np.max(np.abs(p.samples[1] - expect1)) < 1e-13

    def test_zero_stream(self):
        g = GridSpec(4)
        psi = ScalarField(g, np.zeros((9, 9), dtype=complex))
        assert np.max(np.abs(velocity_from_stream(psi).coeffs)) == 0.0

    def test_divergence_free_exactly(self, rng):
        g = GridSpec(16)
        k = g.n_modes
        raw = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        raw[16, 16] = 0.0
        from vectormix.spectral import hermitianize

        u = velocity_from_stream(ScalarField(g, hermitianize(raw)))
        assert divergence_residual(u) < 1e-12

    def test_nonzero_mean_rejected(self):
        g = GridSpec(4)
        c = np.zeros((9, 9), dtype=complex)
        c[4, 4] = 1.0
        with pytest.raises(ParameterError):
            velocity_from_stream(ScalarField(g, c))


class TestBuildInitial:
    def test_dipole_refinement_consistency(self):
        coarse = dipole_field(GridSpec(64))
        fine = dipole_field(GridSpec(128))
        sl = slice(128 - 64, 128 + 64 + 1)
        diff = np.max(np.abs(fine.coeffs[:, sl, sl] - coarse.coeffs))
        assert diff < 1e-10
        assert l2_norm(coarse) > 0

    def test_dipole_invariants(self):
        u = dipole_field(GridSpec(48))
        assert u.is_divergence_free and u.is_mean_zero
        assert divergence_residual(u) < 1e-12
        c = u.coeffs
        assert np.max(np.abs(c - np.conj(c[:, ::-1, ::-1]))) < 1e-15

    def test_dipole_symmetries(self):
        # psi even about x = pi, odd about y = pi: u1 even under both
        # reflections, u2 odd under both
        u = dipole_field(GridSpec(32))
        m = 128
        s = to_physical(u, pad=m).samples
        flip = lambda a, axis: np.flip(np.roll(a, -1, axis=axis), axis=axis)
        assert np.max(np.abs(s[0] - flip(s[0], 0))) < 1e-12
        assert np.max(np.abs(s[0] - flip(s[0], 1))) < 1e-12
        assert np.max(np.abs(s[1] + flip(s[1], 0))) < 1e-12
        assert np.max(np.abs(s[1] + flip(s[1], 1))) < 1e-12

    def test_dipole_requires_standard_torus(self):
        with pytest.raises(ParameterError):
            dipole_field(GridSpec(16, side_length=1.0))

    def test_stream_modes_spec(self):
        g = GridSpec(8)
        spec = InitSpec(InitKind.STREAM_MODES, g, modes={(1, 1): -0.25, (1, -1): 0.25})
        u = build_initial(spec)
        assert u.is_divergence_free and u.is_mean_zero

    def test_snapshot_round_trip(self, tmp_path):
        u = dipole_field(GridSpec(16))
        path = tmp_path / "u.vmxs"
        write_snapshot(path, u, 0.0, 1.0)
        spec = InitSpec(InitKind.SNAPSHOT, GridSpec(16), path=str(path))
        loaded = build_initial(spec)
        assert np.array_equal(loaded.coeffs, u.coeffs)


class TestSnapshotFormat:
    def test_bit_exact_round_trip(self, tmp_path, rng):
        from conftest import random_divfree_field

        u = random_divfree_field(GridSpec(6), rng)
        path = tmp_path / "f.vmxs"
        write_snapshot(path, u, 1.25, 0.75)
        loaded, t, alpha = read_snapshot(path)
        assert t == 1.25 and alpha == 0.75
        assert np.array_equal(loaded.coeffs, u.coeffs)
        assert loaded.grid == u.grid

    def test_header_check(self, tmp_path):
        path = tmp_path / "bad.vmxs"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        from vectormix.errors import SnapshotFormatError

        with pytest.raises(SnapshotFormatError):
            read_snapshot(path)

    def test_exact_byte_layout(self, tmp_path):
        # header is 4 + 4 + 8 + 8 + 8 + 8 + 8 = 48 bytes, then c16 pairs
        from vectormix.spectral import field_from_component_modes

        g = GridSpec(2)
        f = field_from_component_modes(g, {(1, 0): (0.0, -0.5j)})
        path = tmp_path / "layout.vmxs"
        write_snapshot(path, f, 0.5, 1.0)
        raw = path.read_bytes()
        assert raw[:4] == b"VMXS"
        assert len(raw) == 48 + 2 * 25 * 16
        import struct

        version, n, m, L, t, alpha = struct.unpack_from("<IQQddd", raw, 4)
        assert (version, n, m) == (1, 2, 5)
        assert (L, t, alpha) == (2 * PI, 0.5, 1.0)
        # first complex value is component 0 at k = (-2, -2)
        re, im = struct.unpack_from("<dd", raw, 48)
        assert re == f.coeffs[0, 0, 0].real and im == f.coeffs[0, 0, 0].imag
