import numpy as np
import pytest

from vectormix.spectral import GridSpec, ScalarField, SpectralField, hermitianize, l2_norm
from vectormix.initial import velocity_from_stream


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_hermitian_field(grid: GridSpec, rng, mean_zero=True) -> SpectralField:
    """Random Hermitian-symmetric field with an O(1) coefficient range."""
    k = grid.n_modes
    raw = rng.standard_normal((2, k, k)) + 1j * rng.standard_normal((2, k, k))
    coeffs = hermitianize(raw)
    n = grid.n_cutoff
    if mean_zero:
        coeffs[:, n, n] = 0.0
    else:
        coeffs[:, n, n] = np.real(coeffs[:, n, n])
    return SpectralField(grid, coeffs, is_mean_zero=mean_zero)


def random_divfree_field(grid: GridSpec, rng, band=None, unit_energy=True) -> SpectralField:
    """Random divergence-free mean-zero field built from a stream function."""
    k = grid.n_modes
    n = grid.n_cutoff
    raw = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    if band is not None:
        keep = np.zeros((k, k), dtype=bool)
        keep[n - band : n + band + 1, n - band : n + band + 1] = True
        raw[~keep] = 0.0
    raw[n, n] = 0.0
    psi = ScalarField(grid, hermitianize(raw))
    u = velocity_from_stream(psi)
    if unit_energy:
        u = SpectralField(
            grid, u.coeffs / l2_norm(u), is_divergence_free=True, is_mean_zero=True
        )
    return u
