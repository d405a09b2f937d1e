"""Binary snapshot files for spectral fields.

Layout (all little-endian):

    magic   4 bytes  b"VMXS"
    version u32      1
    N       u64      mode cutoff
    M       u64      physical sampling size of the grid
    L       f64      torus side length
    t       f64      simulation time of the snapshot
    alpha   f64      mix-norm order attached to the run
    data    2*(2N+1)^2 complex values as (re, im) f64 pairs,
            component-major, k-lattice row-major from (-N,-N) to (N,N)

Scalar fields (pressure) reuse the same container with the second
component identically zero.  All writes go through a temporary file and an
atomic rename.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .errors import SnapshotFormatError
from .spectral import DIV_TOL, GridSpec, ScalarField, SpectralField, divergence_residual

MAGIC = b"VMXS"
VERSION = 1
_HEADER = struct.Struct("<4sIQQddd")


def atomic_write_bytes(path, payload: bytes) -> None:
    """Write payload to path via a temp file and rename (atomic on POSIX)."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".vmx-tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def snapshot_bytes(field: SpectralField, t: float, alpha: float) -> bytes:
    grid = field.grid
    header = _HEADER.pack(
        MAGIC, VERSION, grid.n_cutoff, grid.phys_size, grid.side_length, t, alpha
    )
    data = np.ascontiguousarray(field.coeffs, dtype="<c16").tobytes()
    return header + data


def write_snapshot(path, field: SpectralField, t: float, alpha: float) -> None:
    atomic_write_bytes(path, snapshot_bytes(field, t, alpha))


def write_scalar_snapshot(path, field: ScalarField, t: float, alpha: float) -> None:
    """Store a scalar field in the vector container (second component zero)."""
    k = field.grid.n_modes
    coeffs = np.zeros((2, k, k), dtype=np.complex128)
    coeffs[0] = field.coeffs
    write_snapshot(path, SpectralField(field.grid, coeffs), t, alpha)


def read_snapshot(path) -> tuple[SpectralField, float, float]:
    """Load a snapshot; returns (field, t, alpha).

    Flags on the returned field are measured, not trusted: the divergence
    flag is set only if the stored coefficients actually satisfy it.
    """
    with open(path, "rb") as handle:
        raw = handle.read()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header")
    magic, version, n, m, length, t, alpha = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    k = 2 * n + 1
    expected = _HEADER.size + 2 * k * k * 16
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(raw)} bytes, expected {expected}"
        )
    coeffs = (
        np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
        .reshape(2, k, k)
        .astype(np.complex128)
    )
    grid = GridSpec(n_cutoff=n, phys_size=m, side_length=length)
    field = SpectralField(grid, coeffs)
    field.is_mean_zero = bool(np.all(field.mean_mode == 0))
    field.is_divergence_free = divergence_residual(field) <= DIV_TOL
    return field, float(t), float(alpha)
