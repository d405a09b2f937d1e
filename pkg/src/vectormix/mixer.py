"""Instantaneous-optimal stirring field for mix-norm decay.

Given the transported field u and a mix-norm order alpha, the stirring
field that maximizes the instantaneous decay of ||u||_{H^-alpha} under a
unit homogeneous-H^1 budget is

    U = -W / ||grad W||_{L^2},   W = (-Lap)^{-1} P F,
    F_j = sum_i u_i d_j phi_i,   phi = |grad|^{-2 alpha} u,

with P the divergence-free projection.  The realized decay satisfies

    d/dt (1/2) ||u||_{H^-alpha}^2 = <U, F> = -||grad W||_{L^2}.

When P F vanishes (u admits no instantaneous mixing direction) the result
is flagged degenerate with U = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectral import (
    ScalarField,
    SpectralField,
    TWO_PI,
    _lattice,
    collect_modes,
    eval_modes,
    fractional_multiplier,
    l2_norm,
    leray_project,
    sobolev_norm,
)

#: P F is treated as zero below this fraction of ||u||_{L^2}^2.
DEGENERACY_EPS = 1e-13


def _check_alpha(alpha: float) -> None:
    if not 0.5 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [1/2, 1], got {alpha}")


@dataclass
class OptimalUResult:
    """Optimal stirring field with its decay rate and budget diagnostics.

    ``decay_rate`` equals ||grad W||_{L^2} >= 0; ``w12_norm`` reports the
    full (inhomogeneous) W^{1,2} norm of U, which exceeds 1 because only
    the gradient part is normalized.
    """

    U: SpectralField
    decay_rate: float
    degenerate: bool
    w12_norm: float


def drive_field(u: SpectralField, alpha: float) -> SpectralField:
    """Quadratic drive F_j = sum_i u_i d_j phi_i with phi = |grad|^{-2 alpha} u.

    The product is evaluated alias-free on the 3/2-rule grid and truncated
    back to the lattice.  F is mean-zero but generally not divergence-free.
    """
    _check_alpha(alpha)
    grid = u.grid
    n = grid.n_cutoff
    k1, k2, _, _ = _lattice(n)
    phi = fractional_multiplier(u, -2.0 * alpha)  # validates the mean mode
    scale = 1j * TWO_PI / grid.side_length
    stack = np.empty((6,) + u.coeffs.shape[1:], dtype=np.complex128)
    stack[0] = u.coeffs[0]
    stack[1] = u.coeffs[1]
    stack[2] = scale * k1 * phi.coeffs[0]
    stack[3] = scale * k2 * phi.coeffs[0]
    stack[4] = scale * k1 * phi.coeffs[1]
    stack[5] = scale * k2 * phi.coeffs[1]
    pad = grid.dealias_size
    phys = eval_modes(stack, n, pad)
    u_phys, gphi = phys[:2], phys[2:].reshape(2, 2, pad, pad)
    prod = np.empty((2, pad, pad))
    prod[0] = u_phys[0] * gphi[0, 0] + u_phys[1] * gphi[1, 0]
    prod[1] = u_phys[0] * gphi[0, 1] + u_phys[1] * gphi[1, 1]
    coeffs = collect_modes(prod, n)
    coeffs[:, n, n] = 0.0  # the exact integral of F vanishes
    return SpectralField(grid, coeffs, is_mean_zero=True)


def optimal_velocity(u: SpectralField, alpha: float) -> OptimalUResult:
    """Budget-normalized optimal stirring field for the current state."""
    F = drive_field(u, alpha)
    PF = leray_project(F)
    W = fractional_multiplier(PF, -2.0)
    rate = sobolev_norm(W, 1.0)
    u_sq = l2_norm(u) ** 2
    if rate <= DEGENERACY_EPS * u_sq:
        zero = SpectralField(
            u.grid,
            np.zeros_like(u.coeffs),
            is_divergence_free=True,
            is_mean_zero=True,
        )
        return OptimalUResult(U=zero, decay_rate=0.0, degenerate=True, w12_norm=0.0)
    U = SpectralField(
        u.grid, -W.coeffs / rate, is_divergence_free=True, is_mean_zero=True
    )
    w12 = float(np.hypot(l2_norm(U), sobolev_norm(U, 1.0)))
    return OptimalUResult(U=U, decay_rate=float(rate), degenerate=False, w12_norm=w12)


def instantaneous_decay_identity(u: SpectralField, alpha: float) -> float:
    """Closed-form d/dt (1/2)||u||_{H^-alpha}^2 under the optimal stirring."""
    return -optimal_velocity(u, alpha).decay_rate


def optimal_provider(alpha: float):
    """Stirring provider (t, u) -> U for the evolution loop."""
    _check_alpha(alpha)

    def provider(t: float, u: SpectralField) -> SpectralField:
        return optimal_velocity(u, alpha).U

    return provider


def stream_function(U: SpectralField) -> ScalarField:
    """Mean-zero stream function psi with U = (-d_y psi, d_x psi).

    Requires U divergence-free; recovered through the vorticity,
    psi = Lap^{-1} (d_x U_2 - d_y U_1).
    """
    grid = U.grid
    n = grid.n_cutoff
    k1, k2, ksq, _ = _lattice(n)
    safe = ksq.copy()
    safe[n, n] = 1.0
    vort = 1j * (k1 * U.coeffs[1] - k2 * U.coeffs[0])  # times (2 pi / L)
    psi = -vort / ((TWO_PI / grid.side_length) * safe)
    psi[n, n] = 0.0
    return ScalarField(grid, psi)


def stream_cell_extrema(U: SpectralField, cells: int = 8):
    """Local extrema of the stream function on a cells x cells center scan.

    The stream function is evaluated at the cell centers; a cell counts as
    an extremum when its value is strictly larger or strictly smaller than
    all eight periodic neighbors.  Returns a list of (i, j, value).
    """
    psi = stream_function(U)
    xs = (np.arange(cells) + 0.5) * (U.grid.side_length / cells)
    centers = _eval_scalar_at(psi, xs, xs)
    is_max = np.ones((cells, cells), dtype=bool)
    is_min = np.ones((cells, cells), dtype=bool)
    for di, dj in [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]:
        shifted = np.roll(np.roll(centers, di, axis=0), dj, axis=1)
        is_max &= centers > shifted
        is_min &= centers < shifted
    found = []
    for i, j in zip(*np.nonzero(is_max | is_min)):
        found.append((int(i), int(j), float(centers[i, j])))
    return found


def _eval_scalar_at(psi: ScalarField, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    n = psi.grid.n_cutoff
    k = np.arange(-n, n + 1)
    scale = TWO_PI / psi.grid.side_length
    ex = np.exp(1j * scale * np.outer(xs, k))  # (len(xs), K)
    ey = np.exp(1j * scale * np.outer(ys, k))
    return np.real(ex @ psi.coeffs @ ey.T)
