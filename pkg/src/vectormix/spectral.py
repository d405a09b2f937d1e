"""Fourier representation of periodic fields on the 2-D torus.

Conventions
-----------
A real field f on the torus [0, L)^2 is written as

    f(x) = sum_k  fhat_k exp(i 2 pi k.x / L),     k in Z^2,

so ``fhat_0`` is the mean and Parseval reads

    int |f|^2 dx = L^2 * sum_k |fhat_k|^2.

Coefficients are stored on the full symmetric lattice k in {-N..N}^2 as
complex arrays of shape (..., 2N+1, 2N+1); index ``[a, b]`` holds the mode
k = (a - N, b - N), row-major from (-N, -N) to (N, N).  Real-valued fields
satisfy the Hermitian symmetry fhat_{-k} = conj(fhat_k); all constructors in
this module produce exactly Hermitian coefficient sets.

The homogeneous Sobolev norm of order s uses the physical wavenumber
(2 pi / L) |k|:

    ||f||_{H^s}^2 = L^2 * sum_{k != 0} ((2 pi / L) |k|)^{2s} |fhat_k|^2,

which for s = 0 (with the k = 0 term included) is the L^2 norm, so spectral
norms agree with physical-space integrals for every L.

Transforms go through real-to-complex FFTs (scipy.fft) with the half
spectrum k2 >= 0; the environment variable ``VECTORMIX_THREADS`` caps the
FFT worker count (unset or 0 means automatic).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import (
    GridError,
    NonIntegrableModeError,
    ParameterError,
    RepresentabilityError,
)

TWO_PI = 2.0 * np.pi

#: Relative tolerance of the stored divergence-free invariant.
DIV_TOL = 1e-12


def fft_workers() -> int:
    """FFT worker count from VECTORMIX_THREADS (0 or unset = all cores)."""
    raw = os.environ.get("VECTORMIX_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError as exc:
        raise ParameterError(f"VECTORMIX_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ParameterError("VECTORMIX_THREADS must be >= 0")
    return -1 if n == 0 else n


@dataclass(frozen=True)
class GridSpec:
    """Mode cutoff and physical sampling of the 2-D torus.

    Parameters
    ----------
    n_cutoff : int
        Retained modes satisfy |k|_inf <= n_cutoff.
    phys_size : int, optional
        Sampling points per dimension for physical-space work; must be at
        least 2*n_cutoff + 1 (defaults to exactly that).
    side_length : float
        Torus side L > 0; defaults to 2*pi.
    """

    n_cutoff: int
    phys_size: int | None = None
    side_length: float = TWO_PI

    def __post_init__(self):
        if self.n_cutoff < 1:
            raise GridError(f"n_cutoff must be >= 1, got {self.n_cutoff}")
        if self.phys_size is None:
            object.__setattr__(self, "phys_size", 2 * self.n_cutoff + 1)
        if self.phys_size < 2 * self.n_cutoff + 1:
            raise RepresentabilityError(
                f"phys_size {self.phys_size} < 2*n_cutoff+1 = {2 * self.n_cutoff + 1}"
            )
        if not self.side_length > 0:
            raise GridError("side_length must be positive")

    @property
    def n_modes(self) -> int:
        """Lattice points per dimension, 2N+1."""
        return 2 * self.n_cutoff + 1

    @property
    def dealias_size(self) -> int:
        """Transform size for alias-free quadratic products (>= 3N+1)."""
        return sfft.next_fast_len(3 * self.n_cutoff + 1, real=True)

    @property
    def diag_size(self) -> int:
        """Sampling size used for L^p diagnostics with p != 2."""
        return max(self.phys_size, 2 * math.ceil(1.5 * self.n_cutoff))


@lru_cache(maxsize=32)
def _lattice(n: int):
    """Integer wavenumber lattices for cutoff n: (k1, k2, |k|^2, |k|)."""
    m = np.arange(-n, n + 1)
    k1 = m[:, None].astype(np.float64) * np.ones((1, 2 * n + 1))
    k2 = m[None, :].astype(np.float64) * np.ones((2 * n + 1, 1))
    ksq = k1 * k1 + k2 * k2
    kabs = np.sqrt(ksq)
    for a in (k1, k2, ksq, kabs):
        a.flags.writeable = False
    return k1, k2, ksq, kabs


@lru_cache(maxsize=128)
def _radial_multiplier(n: int, side_length: float, s: float):
    """((2 pi / L) |k|)^s on the lattice, with the k = 0 entry set to zero."""
    _, _, _, kabs = _lattice(n)
    safe = kabs.copy()
    safe[n, n] = 1.0
    mult = (TWO_PI / side_length * safe) ** s
    mult[n, n] = 0.0
    mult.flags.writeable = False
    return mult


@dataclass
class SpectralField:
    """Two-component real vector field stored as Fourier coefficients.

    ``coeffs`` has shape (2, 2N+1, 2N+1) and is treated as immutable; all
    operations return fresh fields.  The flags record invariants the field
    is known to satisfy (they are set by the operations that establish them).
    """

    grid: GridSpec
    coeffs: np.ndarray
    is_divergence_free: bool = False
    is_mean_zero: bool = False

    def __post_init__(self):
        k = self.grid.n_modes
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != (2, k, k):
            raise GridError(
                f"coefficient array shape {self.coeffs.shape} != (2, {k}, {k})"
            )

    @property
    def mean_mode(self) -> np.ndarray:
        n = self.grid.n_cutoff
        return self.coeffs[:, n, n]

    def validate(self, tol: float = 1e-10) -> None:
        """Check the stored invariants; raise GridError on violation."""
        c = self.coeffs
        herm = np.max(np.abs(c - np.conj(c[:, ::-1, ::-1])))
        scale = max(np.max(np.abs(c)), 1e-300)
        if herm > tol * scale:
            raise GridError(f"Hermitian symmetry violated: residual {herm:.3e}")
        if self.is_mean_zero and np.any(self.mean_mode != 0):
            raise GridError("is_mean_zero set but the k=0 mode is nonzero")
        if self.is_divergence_free and divergence_residual(self) > DIV_TOL:
            raise GridError("is_divergence_free set but k.uhat_k residual too large")


@dataclass
class ScalarField:
    """Scalar companion of SpectralField (stream functions, pressure)."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        k = self.grid.n_modes
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != (k, k):
            raise GridError(f"scalar coefficient shape {self.coeffs.shape} != ({k}, {k})")


@dataclass
class PhysicalField:
    """Collocation samples of a two-component field on a uniform grid.

    ``samples`` has shape (2, M, M) with point (i, j) at x = i L / M,
    y = j L / M; M may exceed ``grid.phys_size`` when produced with padding.
    """

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 3 or self.samples.shape[0] != 2:
            raise GridError(f"sample array shape {self.samples.shape} != (2, M, M)")
        m = self.samples.shape[1]
        if self.samples.shape != (2, m, m):
            raise GridError("sample grid must be square")
        if m < self.grid.n_modes:
            raise RepresentabilityError(
                f"sampling size {m} < 2*n_cutoff+1 = {self.grid.n_modes}"
            )

    @property
    def size(self) -> int:
        return self.samples.shape[1]


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def eval_modes(coeffs: np.ndarray, n_cutoff: int, pad: int) -> np.ndarray:
    """Evaluate Hermitian lattice coefficients on a pad x pad uniform grid.

    Accepts any stack shaped (..., 2N+1, 2N+1) and returns real samples
    (..., pad, pad).  Requires pad >= 2N+1 so every retained mode has its
    own transform bin.
    """
    n = n_cutoff
    if pad < 2 * n + 1:
        raise RepresentabilityError(f"pad {pad} < 2*n_cutoff+1 = {2 * n + 1}")
    lead = coeffs.shape[:-2]
    rows = np.arange(-n, n + 1) % pad
    half = np.zeros(lead + (pad, pad // 2 + 1), dtype=np.complex128)
    # columns 0..n of the rfft layout are the k2 >= 0 half of the lattice
    half[..., rows[:, None], np.arange(n + 1)[None, :]] = coeffs[..., :, n:]
    out = sfft.irfft2(half, s=(pad, pad), workers=fft_workers())
    out *= pad * pad
    return out


def collect_modes(samples: np.ndarray, n_cutoff: int) -> np.ndarray:
    """Project uniform-grid samples onto the lattice (inverse of eval_modes).

    Exact for trigonometric polynomials with |k|_inf <= (M-1)/2; the result
    is Hermitian by construction.
    """
    n = n_cutoff
    m = samples.shape[-1]
    if m < 2 * n + 1:
        raise RepresentabilityError(f"sampling size {m} < 2*n_cutoff+1 = {2 * n + 1}")
    half_full = sfft.rfft2(samples, workers=fft_workers())
    half_full /= m * m
    rows = np.arange(-n, n + 1) % m
    half = half_full[..., rows[:, None], np.arange(n + 1)[None, :]]
    k = 2 * n + 1
    out = np.empty(samples.shape[:-2] + (k, k), dtype=np.complex128)
    out[..., :, n:] = half
    out[..., :, :n] = np.conj(half[..., ::-1, 1:])[..., :, ::-1]
    # the k2 = 0 column comes from a complex FFT of real data; make its
    # Hermitian symmetry exact rather than exact-to-rounding
    col = out[..., :, n]
    out[..., :, n] = 0.5 * (col + np.conj(col[..., ::-1]))
    return out


def to_physical(f: SpectralField, pad: int | None = None) -> PhysicalField:
    """Inverse transform onto a pad x pad grid (default: the grid's phys_size)."""
    pad = f.grid.phys_size if pad is None else pad
    return PhysicalField(f.grid, eval_modes(f.coeffs, f.grid.n_cutoff, pad))


def to_spectral(p: PhysicalField, n_cutoff: int | None = None) -> SpectralField:
    """Forward transform of collocation samples onto the coefficient lattice."""
    n = p.grid.n_cutoff if n_cutoff is None else n_cutoff
    coeffs = collect_modes(p.samples, n)
    grid = p.grid if n == p.grid.n_cutoff else GridSpec(n, side_length=p.grid.side_length)
    return SpectralField(grid, coeffs)


def scalar_to_physical(f: ScalarField, pad: int | None = None) -> np.ndarray:
    """Real samples of a scalar spectral field on a pad x pad grid."""
    pad = f.grid.phys_size if pad is None else pad
    return eval_modes(f.coeffs, f.grid.n_cutoff, pad)


# ---------------------------------------------------------------------------
# linear spectral operators
# ---------------------------------------------------------------------------

def hermitianize(coeffs: np.ndarray) -> np.ndarray:
    """Symmetrize a coefficient stack so the represented field is real."""
    return 0.5 * (coeffs + np.conj(coeffs[..., ::-1, ::-1]))


def divergence_residual(f: SpectralField) -> float:
    """max_k |k . uhat_k| / max_k |uhat_k| (zero for the zero field)."""
    n = f.grid.n_cutoff
    k1, k2, _, _ = _lattice(n)
    dot = np.abs(k1 * f.coeffs[0] + k2 * f.coeffs[1])
    scale = np.max(np.sqrt(np.abs(f.coeffs[0]) ** 2 + np.abs(f.coeffs[1]) ** 2))
    if scale == 0.0:
        return 0.0
    return float(np.max(dot) / scale)


def project_divfree_truncate(f: SpectralField, n_cutoff: int) -> SpectralField:
    """Zero modes with |k|_inf > n_cutoff and remove each mode's k-parallel part.

    For k != 0 the output is uhat_k - (uhat_k . k) k / |k|^2; the k = 0 mode
    passes through unchanged.  Idempotent and self-adjoint for the L^2
    pairing.
    """
    n = f.grid.n_cutoff
    if n_cutoff > n:
        raise GridError(f"truncation cutoff {n_cutoff} exceeds grid cutoff {n}")
    k1, k2, ksq, _ = _lattice(n)
    safe = ksq.copy()
    safe[n, n] = 1.0
    u0, u1 = f.coeffs[0], f.coeffs[1]
    dot = (k1 * u0 + k2 * u1) / safe
    out = np.empty_like(f.coeffs)
    out[0] = u0 - dot * k1
    out[1] = u1 - dot * k2
    out[:, n, n] = f.coeffs[:, n, n]
    if n_cutoff < n:
        keep = np.zeros((f.grid.n_modes,), dtype=bool)
        keep[n - n_cutoff : n + n_cutoff + 1] = True
        out[:, ~keep, :] = 0.0
        out[:, :, ~keep] = 0.0
    return SpectralField(
        f.grid,
        out,
        is_divergence_free=True,
        is_mean_zero=bool(np.all(out[:, n, n] == 0)),
    )


def leray_project(f: SpectralField) -> SpectralField:
    """Divergence-free projection at the grid's own cutoff."""
    return project_divfree_truncate(f, f.grid.n_cutoff)


def _require_mean_zero(f: SpectralField, what: str) -> None:
    mean = np.max(np.abs(f.mean_mode))
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    if mean > 1e-14 * scale:
        raise NonIntegrableModeError(
            f"{what} requires a mean-zero field; |uhat_0| = {mean:.3e}"
        )


def fractional_multiplier(f: SpectralField, s: float) -> SpectralField:
    """Apply the radial multiplier ((2 pi / L) |k|)^s mode by mode.

    s = 0 is the identity.  For s != 0 the k = 0 mode maps to zero, and
    s < 0 requires a mean-zero input.
    """
    if s == 0:
        return f
    if s < 0:
        _require_mean_zero(f, f"fractional multiplier of order {s}")
    mult = _radial_multiplier(f.grid.n_cutoff, f.grid.side_length, s)
    out = f.coeffs * mult
    n = f.grid.n_cutoff
    out[:, n, n] = 0.0
    return SpectralField(
        f.grid, out, is_divergence_free=f.is_divergence_free, is_mean_zero=True
    )


def sobolev_norm(f: SpectralField, s: float) -> float:
    """Homogeneous Sobolev norm of order s (s = 0 gives the full L^2 norm)."""
    if s < 0:
        _require_mean_zero(f, f"Sobolev norm of order {s}")
    power = np.abs(f.coeffs[0]) ** 2 + np.abs(f.coeffs[1]) ** 2
    if s == 0:
        total = float(np.sum(power))
    else:
        w = _radial_multiplier(f.grid.n_cutoff, f.grid.side_length, 2 * s)
        total = float(np.sum(power * w))
    return math.sqrt(total * f.grid.side_length**2)


def l2_norm(f: SpectralField) -> float:
    return sobolev_norm(f, 0.0)


def l2_inner(f: SpectralField, g: SpectralField) -> float:
    """L^2 pairing int f.g dx of two real fields on the same grid."""
    if f.grid != g.grid:
        raise GridError("inner product requires matching grids")
    return float(np.real(np.sum(np.conj(f.coeffs) * g.coeffs)) * f.grid.side_length**2)


def gradient(f: SpectralField) -> np.ndarray:
    """Spectral gradient as a (2, 2, K, K) stack: [i, j] holds d_j f_i."""
    n = f.grid.n_cutoff
    k1, k2, _, _ = _lattice(n)
    scale = 1j * TWO_PI / f.grid.side_length
    out = np.empty((2, 2) + f.coeffs.shape[1:], dtype=np.complex128)
    out[0, 0] = scale * k1 * f.coeffs[0]
    out[0, 1] = scale * k2 * f.coeffs[0]
    out[1, 0] = scale * k1 * f.coeffs[1]
    out[1, 1] = scale * k2 * f.coeffs[1]
    return out


def scalar_gradient(f: ScalarField) -> np.ndarray:
    """Spectral gradient of a scalar field as a (2, K, K) stack."""
    n = f.grid.n_cutoff
    k1, k2, _, _ = _lattice(n)
    scale = 1j * TWO_PI / f.grid.side_length
    return np.stack([scale * k1 * f.coeffs, scale * k2 * f.coeffs])


def samples_lp_norm(samples: np.ndarray, side_length: float, p) -> float:
    """Rectangle-rule L^p norm of stacked samples (..., M, M).

    The pointwise magnitude is the Euclidean norm over all leading axes,
    so vector fields and gradient tensors are handled alike.  p = inf
    returns the grid maximum of that magnitude.
    """
    if not (p == np.inf or p >= 1):
        raise ParameterError(f"Lebesgue exponent must be in [1, inf], got {p}")
    flat = samples.reshape((-1,) + samples.shape[-2:])
    mag = np.sqrt(np.sum(flat * flat, axis=0))
    if p == np.inf:
        return float(np.max(mag))
    m = samples.shape[-1]
    cell = (side_length / m) ** 2
    return float((np.sum(mag**p) * cell) ** (1.0 / p))


def lebesgue_norm(f: PhysicalField, p) -> float:
    """L^p norm of a sampled vector field by uniform-grid quadrature.

    Exact for p = 2 on band-limited fields; p = inf is the grid maximum of
    the pointwise Euclidean norm.
    """
    return samples_lp_norm(f.samples, f.grid.side_length, p)


def field_from_component_modes(
    grid: GridSpec, modes: dict[tuple[int, int], tuple[complex, complex]]
) -> SpectralField:
    """Build a field from explicit (k, (uhat_1, uhat_2)) entries.

    The Hermitian partner of each entry is filled in automatically unless
    given explicitly, in which case it must be consistent.
    """
    n = grid.n_cutoff
    coeffs = np.zeros((2, grid.n_modes, grid.n_modes), dtype=np.complex128)
    seen: dict[tuple[int, int], tuple[complex, complex]] = {}
    for (ka, kb), amp in modes.items():
        if max(abs(ka), abs(kb)) > n:
            raise GridError(f"mode {(ka, kb)} outside cutoff {n}")
        seen[(ka, kb)] = (complex(amp[0]), complex(amp[1]))
    for (ka, kb), (a0, a1) in seen.items():
        neg = (-ka, -kb)
        if neg in seen:
            c0, c1 = seen[neg]
            if abs(np.conj(a0) - c0) > 1e-14 or abs(np.conj(a1) - c1) > 1e-14:
                raise GridError(f"modes {(ka, kb)} and {neg} are not Hermitian partners")
        coeffs[:, ka + n, kb + n] = (a0, a1)
        if neg not in seen:
            coeffs[:, -ka + n, -kb + n] = (np.conjugate(a0), np.conjugate(a1))
    return SpectralField(grid, coeffs, is_mean_zero=bool(np.all(coeffs[:, n, n] == 0)))
