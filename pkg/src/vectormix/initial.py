"""Initial data: the dipole stream function and general stream-mode fields."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import GridError, ParameterError
from .spectral import (
    GridSpec,
    ScalarField,
    SpectralField,
    TWO_PI,
    _lattice,
    collect_modes,
    project_divfree_truncate,
)


class InitKind(str, Enum):
    DIPOLE = "dipole"
    STREAM_MODES = "stream_modes"
    SNAPSHOT = "snapshot"


@dataclass
class InitSpec:
    """Description of the initial velocity field.

    ``modes`` holds (k, amplitude) pairs for the stream function when
    kind = STREAM_MODES; ``path`` points at a snapshot file when
    kind = SNAPSHOT.
    """

    kind: InitKind
    grid: GridSpec
    modes: dict = field(default_factory=dict)
    path: str | None = None


def dipole_stream(x, y):
    """Dipole stream function on [0, 2 pi)^2.

    psi(x, y) = p1(x / 2 pi) * p2(y / 2 pi) with
    p1(z) = 256 z^4 (1 - z)^4 and p2(z) = (8192/27) z^3 (1 - z)^3 (1 - 2 z);
    both polynomials and their first derivatives vanish at 0 and 1, so the
    periodic extension is smooth enough to differentiate.
    """
    zx = np.asarray(x, dtype=np.float64) / TWO_PI
    zy = np.asarray(y, dtype=np.float64) / TWO_PI
    p1 = 256.0 * zx**4 * (1.0 - zx) ** 4
    p2 = (8192.0 / 27.0) * zy**3 * (1.0 - zy) ** 3 * (1.0 - 2.0 * zy)
    return p1 * p2


def velocity_from_stream(psi: ScalarField) -> SpectralField:
    """Perpendicular gradient u = (-d_y psi, d_x psi); exactly divergence-free."""
    grid = psi.grid
    n = grid.n_cutoff
    if np.abs(psi.coeffs[n, n]) > 1e-13 * max(float(np.max(np.abs(psi.coeffs))), 1.0):
        raise ParameterError("stream function must be mean-zero")
    k1, k2, _, _ = _lattice(n)
    scale = 1j * TWO_PI / grid.side_length
    coeffs = np.stack([-scale * k2 * psi.coeffs, scale * k1 * psi.coeffs])
    coeffs[:, n, n] = 0.0
    return SpectralField(grid, coeffs, is_divergence_free=True, is_mean_zero=True)


def stream_from_modes(grid: GridSpec, modes) -> ScalarField:
    """Stream function from (k, amplitude) entries, Hermitian-completed.

    ``modes`` maps integer tuples (k1, k2) to complex amplitudes of
    exp(i 2 pi k.x / L).  If only one of a (k, -k) pair is supplied, the
    conjugate partner is filled in; if both are supplied they must agree.
    """
    n = grid.n_cutoff
    coeffs = np.zeros((grid.n_modes, grid.n_modes), dtype=np.complex128)
    entries = {(int(ka), int(kb)): complex(a) for (ka, kb), a in dict(modes).items()}
    for (ka, kb), amp in entries.items():
        if max(abs(ka), abs(kb)) > n:
            raise GridError(f"stream mode {(ka, kb)} outside cutoff {n}")
        if (ka, kb) == (0, 0):
            raise ParameterError("stream function mean mode must be omitted")
        neg = (-ka, -kb)
        if neg in entries and abs(np.conj(amp) - entries[neg]) > 1e-14 * max(abs(amp), 1.0):
            raise ParameterError(f"modes {(ka, kb)} and {neg} are not conjugate partners")
        coeffs[ka + n, kb + n] = amp
        if neg not in entries:
            coeffs[-ka + n, -kb + n] = np.conjugate(amp)
    return ScalarField(grid, coeffs)


def dipole_field(grid: GridSpec) -> SpectralField:
    """Galerkin projection of the dipole onto the grid's mode lattice.

    The stream function is sampled at max(4N, 512) points per dimension
    before the transform so that mode truncation, not sampling aliasing,
    dominates the construction error.
    """
    if abs(grid.side_length - TWO_PI) > 1e-12:
        raise ParameterError("the dipole initial datum is defined on side length 2*pi")
    m = max(4 * grid.n_cutoff, 512)
    xs = np.arange(m) * (TWO_PI / m)
    samples = dipole_stream(xs[:, None], xs[None, :])
    psi_coeffs = collect_modes(samples, grid.n_cutoff)
    n = grid.n_cutoff
    psi_coeffs[n, n] = 0.0
    u = velocity_from_stream(ScalarField(grid, psi_coeffs))
    return project_divfree_truncate(u, grid.n_cutoff)


def build_initial(spec: InitSpec) -> SpectralField:
    """Construct, transform and project the configured initial datum."""
    if spec.kind is InitKind.DIPOLE:
        return dipole_field(spec.grid)
    if spec.kind is InitKind.STREAM_MODES:
        psi = stream_from_modes(spec.grid, spec.modes)
        return project_divfree_truncate(velocity_from_stream(psi), spec.grid.n_cutoff)
    if spec.kind is InitKind.SNAPSHOT:
        from .snapshots import read_snapshot

        if spec.path is None:
            raise ParameterError("snapshot initial data needs a path")
        loaded, _, _ = read_snapshot(spec.path)
        if loaded.grid.n_cutoff != spec.grid.n_cutoff or not np.isclose(
            loaded.grid.side_length, spec.grid.side_length
        ):
            raise GridError(
                f"snapshot grid (N={loaded.grid.n_cutoff}, L={loaded.grid.side_length:g}) "
                f"does not match the configured grid (N={spec.grid.n_cutoff}, "
                f"L={spec.grid.side_length:g})"
            )
        if loaded.is_divergence_free and loaded.is_mean_zero:
            # the projection is the identity here; skipping keeps the
            # round trip bit-exact
            return loaded
        return project_divfree_truncate(loaded, spec.grid.n_cutoff)
    raise ParameterError(f"unknown initial-data kind {spec.kind!r}")
