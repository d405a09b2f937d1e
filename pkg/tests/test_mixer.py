"""Optimal stirring: drive field, normalization, degeneracy, decay identity."""

import numpy as np
import pytest

from vectormix.dynamics import SimState, StepControl, rk45_step
from vectormix.initial import dipole_field
from vectormix.mixer import (
    drive_field,
    instantaneous_decay_identity,
    optimal_velocity,
    stream_cell_extrema,
    stream_function,
)
from vectormix.spectral import (
    GridSpec,
    SpectralField,
    divergence_residual,
    field_from_component_modes,
    fractional_multiplier,
    l2_inner,
    leray_project,
    sobolev_norm,
    to_physical,
    eval_modes,
)

from conftest import random_divfree_field

PI = np.pi


def shear(grid, amp=1.0):
    f = field_from_component_modes(grid, {(1, 0): (0.0, -0.5j * amp)})
    f.is_divergence_free = True
    return f


class TestDriveField:
    def test_single_shear_mode(self):
        # u = (0, sin x): phi = u at |k| = 1, so F = (sin x cos x, 0)
        g = GridSpec(8)
        F = drive_field(shear(g), 0.8)
        expected = field_from_component_modes(g, {(2, 0): (-0.25j, 0.0)})
        assert np.max(np.abs(F.coeffs - expected.coeffs)) < 1e-15

    def test_zero_field(self):
        g = GridSpec(8)
        z = SpectralField(g, np.zeros((2, 17, 17), dtype=complex), True, True)
        assert np.max(np.abs(drive_field(z, 1.0).coeffs)) == 0.0

    def test_alpha_range_enforced(self):
        g = GridSpec(8)
        with pytest.raises(Exception):
            drive_field(shear(g), 0.3)

    def test_finite_difference_oracle(self, rng):
        # independent path: sample u and phi on a fine grid, differentiate
        # phi with 8th-order centered differences, multiply pointwise and
        # read the low modes off a plain numpy FFT
        alpha = 0.75
        n = 16
        g = GridSpec(n)
        u = random_divfree_field(g, rng)
        phi = fractional_multiplier(u, -2.0 * alpha)
        m = 2048
        u_s = to_physical(u, pad=m).samples
        phi_s = to_physical(phi, pad=m).samples
        h = g.side_length / m
        w = (4 / 5, -1 / 5, 4 / 105, -1 / 280)

        def fd(arr, axis):
            return sum(
                c * (np.roll(arr, -k, axis=axis) - np.roll(arr, k, axis=axis))
                for k, c in enumerate(w, start=1)
            ) / h

        F_fine = np.stack(
            [
                u_s[0] * fd(phi_s[0], 0) + u_s[1] * fd(phi_s[1], 0),
                u_s[0] * fd(phi_s[0], 1) + u_s[1] * fd(phi_s[1], 1),
            ]
        )
        hat = np.fft.fft2(F_fine) / m**2
        idx = np.arange(-n, n + 1) % m
        oracle = hat[:, idx[:, None], idx[None, :]]
        oracle[:, n, n] = 0.0
        F = drive_field(u, alpha)
        assert np.max(np.abs(F.coeffs - oracle)) < 1e-8

    def test_mean_zero_output(self, rng):
        g = GridSpec(12)
        F = drive_field(random_divfree_field(g, rng), 0.5)
        assert np.all(F.coeffs[:, 12, 12] == 0.0)


class TestOptimalVelocity:
    def test_single_shear_is_degenerate(self):
        # the drive of a single shear mode is a pure gradient: no stirring
        # direction can decrease the mix norm instantaneously
        g = GridSpec(8)
        res = optimal_velocity(shear(g), 1.0)
        assert res.degenerate is True
        assert res.decay_rate == 0.0
        assert np.all(res.U.coeffs == 0.0)

    def test_zero_field_degenerate(self):
        g = GridSpec(8)
        z = SpectralField(g, np.zeros((2, 17, 17), dtype=complex), True, True)
        assert optimal_velocity(z, 1.0).degenerate

    def test_budget_saturation(self, rng):
        g = GridSpec(16)
        for alpha in (0.5, 1.0):
            res = optimal_velocity(random_divfree_field(g, rng), alpha)
            assert not res.degenerate
            assert abs(sobolev_norm(res.U, 1.0) - 1.0) <= 1e-12
            assert res.w12_norm >= 1.0

    def test_pairing_identity(self, rng):
        # <U, F> = -decay_rate
        g = GridSpec(16)
        u = random_divfree_field(g, rng)
        for alpha in (0.5, 0.8, 1.0):
            res = optimal_velocity(u, alpha)
            pair = l2_inner(res.U, drive_field(u, alpha))
            assert pair == pytest.approx(-res.decay_rate, rel=1e-10)

    def test_output_invariants(self, rng):
        g = GridSpec(16)
        res = optimal_velocity(random_divfree_field(g, rng), 1.0)
        assert divergence_residual(res.U) < 1e-12
        assert np.all(res.U.mean_mode == 0.0)

    def test_scale_invariance(self, rng):
        g = GridSpec(12)
        u = random_divfree_field(g, rng)
        res1 = optimal_velocity(u, 0.5)
        scaled = SpectralField(g, 3.7 * u.coeffs, True, True)
        res2 = optimal_velocity(scaled, 0.5)
        assert np.max(np.abs(res1.U.coeffs - res2.U.coeffs)) < 1e-12
        assert res2.decay_rate == pytest.approx(3.7**2 * res1.decay_rate, rel=1e-12)

    def test_projection_consistency(self, rng):
        # <U, F> = <U, P F> for divergence-free U
        g = GridSpec(12)
        u = random_divfree_field(g, rng)
        res = optimal_velocity(u, 1.0)
        F = drive_field(u, 1.0)
        lhs = l2_inner(res.U, F)
        rhs = l2_inner(res.U, leray_project(F))
        assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)

    def test_variational_optimality(self, rng):
        # no competing unit-budget divergence-free field achieves a faster
        # instantaneous decay than the returned optimizer
        g = GridSpec(12)
        u = random_divfree_field(g, rng)
        for alpha in (0.5, 1.0):
            res = optimal_velocity(u, alpha)
            F = drive_field(u, alpha)
            best = l2_inner(res.U, F)
            assert best == pytest.approx(-res.decay_rate, rel=1e-10)
            for _ in range(25):
                V = random_divfree_field(g, rng, unit_energy=False)
                V = SpectralField(g, V.coeffs / sobolev_norm(V, 1.0), True, True)
                assert l2_inner(V, F) >= best - 1e-12 * abs(best)


class TestDecayIdentity:
    def test_degenerate_is_zero(self):
        g = GridSpec(8)
        assert instantaneous_decay_identity(shear(g), 1.0) == 0.0

    def test_quadratic_homogeneity(self, rng):
        g = GridSpec(12)
        u = random_divfree_field(g, rng)
        base = instantaneous_decay_identity(u, 1.0)
        scaled = SpectralField(g, 2.0 * u.coeffs, True, True)
        assert instantaneous_decay_identity(scaled, 1.0) == pytest.approx(
            4.0 * base, rel=1e-12
        )

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_matches_finite_difference_in_time(self, alpha):
        # freeze the optimal U, evolve +/- delta with tight tolerances and
        # difference the squared mix norm
        g = GridSpec(32)
        u = dipole_field(g)
        res = optimal_velocity(u, alpha)
        delta = 1e-5
        ctrl = StepControl(rtol=1e-12, atol=1e-14, dt_init=delta, dt_min=1e-16)

        def half_sq_norm_at(sign):
            U = res.U if sign > 0 else SpectralField(
                g, -res.U.coeffs, True, True
            )
            st = SimState(0.0, u, dt_next=delta)
            while st.t < delta - 1e-15:
                st = rk45_step(st, lambda t, w: U, ctrl, dt_cap=delta - st.t)
            return 0.5 * sobolev_norm(st.u, -alpha) ** 2

        fd = (half_sq_norm_at(+1) - half_sq_norm_at(-1)) / (2 * delta)
        ident = instantaneous_decay_identity(u, alpha)
        assert ident < 0
        assert fd == pytest.approx(ident, rel=1e-4)


class TestFourCellStructure:
    def test_dipole_stirring_has_four_alternating_cells(self):
        g = GridSpec(64)
        res = optimal_velocity(dipole_field(g), 1.0)
        extrema = stream_cell_extrema(res.U, cells=8)
        assert len(extrema) == 4
        values = [v for _, _, v in extrema]
        assert sum(1 for v in values if v > 0) == 2
        assert sum(1 for v in values if v < 0) == 2
        # order the cells around their centroid: signs must alternate
        iy = np.array([e[0] for e in extrema], dtype=float)
        jx = np.array([e[1] for e in extrema], dtype=float)
        ang = np.arctan2(iy - iy.mean(), jx - jx.mean())
        signs = np.sign([values[i] for i in np.argsort(ang)])
        assert all(signs[i] != signs[(i + 1) % 4] for i in range(4))

    def test_stream_function_inverts_perp_gradient(self, rng):
        from vectormix.initial import velocity_from_stream
        from vectormix.spectral import ScalarField, hermitianize

        g = GridSpec(10)
        k = g.n_modes
        raw = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        raw[10, 10] = 0.0
        psi = ScalarField(g, hermitianize(raw))
        back = stream_function(velocity_from_stream(psi))
        assert np.max(np.abs(back.coeffs - psi.coeffs)) < 1e-12 * np.max(
            np.abs(psi.coeffs)
        )
