"""Readers for the simulator's on-disk formats.

This package deliberately has no dependency on the simulator; it parses the
documented byte layout and CSV schema directly.

Snapshot layout (little-endian): magic b"VMXS", u32 version = 1, u64 N,
u64 M, f64 L, f64 t, f64 alpha, then 2*(2N+1)^2 complex128 values,
component-major, k row-major from (-N,-N) to (N,N).  Scalar fields ride in
the same container with the second component zero.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"VMXS"
_HEADER = struct.Struct("<4sIQQddd")

CSV_COLUMNS = ("t", "dt", "h_neg_alpha", "energy", "gradU_l2", "gradU_linf", "decay_rate_inst")


@dataclass
class Snapshot:
    n_cutoff: int
    phys_size: int
    side_length: float
    t: float
    alpha: float
    coeffs: np.ndarray  # (2, 2N+1, 2N+1) complex

    def to_physical(self, pad: int | None = None) -> np.ndarray:
        """Real samples (2, pad, pad) of the stored trigonometric polynomial."""
        n = self.n_cutoff
        pad = max(self.phys_size, 2 * n + 2) if pad is None else pad
        if pad < 2 * n + 1:
            raise ValueError(f"pad {pad} cannot represent modes up to {n}")
        grid = np.zeros((2, pad, pad), dtype=np.complex128)
        idx = np.arange(-n, n + 1) % pad
        grid[:, idx[:, None], idx[None, :]] = self.coeffs
        return np.real(np.fft.ifft2(grid) * pad * pad)

    def magnitude(self, pad: int | None = None) -> np.ndarray:
        s = self.to_physical(pad)
        return np.sqrt(s[0] ** 2 + s[1] ** 2)


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as handle:
        raw = handle.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, version, n, m, side, t, alpha = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != 1:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    k = 2 * n + 1
    expected = _HEADER.size + 2 * k * k * 16
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    coeffs = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(2, k, k)
    return Snapshot(int(n), int(m), float(side), float(t), float(alpha), coeffs.copy())


def read_series(path) -> dict[str, np.ndarray]:
    """Load the run CSV into column arrays keyed by the schema names."""
    with open(path, "r", encoding="ascii") as handle:
        lines = [ln.strip() for ln in handle if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty series file")
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header {header}")
    rows = [tuple(float(x) for x in ln.split(",")) for ln in lines[1:]]
    if not rows:
        raise ValueError(f"{path}: series has a header but no rows")
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(CSV_COLUMNS)}
