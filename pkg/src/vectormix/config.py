"""Run configuration: flat key=value parsing, providers, checkpoints.

Config files hold one ``key = value`` assignment per line; ``#`` starts a
comment and blank lines are ignored.  Keys are exactly the SimConfig field
names.  Structured values use small colon grammars:

    init = dipole
    init = snapshot:PATH
    init = stream:K1,K2,RE,IM[;K1,K2,RE,IM...]
    u_provider = optimal | optimal_frozen_step
    u_provider = fixed_stream:K1,K2,RE,IM[;...]
    u_provider = file_sequence:PATTERN@T0,T1,...

Stream entries give the complex amplitude RE+IM*i of exp(i 2 pi k.x / L)
in the stream function; Hermitian partners are completed automatically.
A file-sequence pattern contains ``{i}``, replaced by the 0-based index of
the snapshot active at each time (piecewise constant from T_j onward).
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GridError, ParameterError
from .initial import InitKind, InitSpec, stream_from_modes, velocity_from_stream
from .mixer import optimal_provider
from .series import CSV_HEADER
from .snapshots import atomic_write_bytes, read_snapshot, write_snapshot
from .spectral import GridSpec, SpectralField, TWO_PI, project_divfree_truncate

PROVIDER_KINDS = ("optimal", "optimal_frozen_step", "fixed_stream", "file_sequence")


@dataclass
class SimConfig:
    """Full description of one simulation run."""

    alpha: float
    n_cutoff: int
    t_end: float
    init: str
    side_length: float = TWO_PI
    rtol: float = 1e-8
    atol: float = 1e-10
    output_interval: float = 0.01
    snapshot_interval: float = 0.0
    u_provider: str = "optimal"
    out_dir: str = "out"
    seed: int = 0  # reserved, unused

    def __post_init__(self):
        if not 0.5 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [1/2, 1], got {self.alpha}")
        if self.n_cutoff < 1:
            raise ParameterError("n_cutoff must be >= 1")
        if self.t_end < 0:
            raise ParameterError("t_end must be >= 0")
        for name in ("output_interval", "snapshot_interval"):
            v = getattr(self, name)
            if v < 0:
                raise ParameterError(f"{name} must be >= 0")
            if v > 0 and v > self.t_end:
                raise ParameterError(f"{name} = {v} exceeds t_end = {self.t_end}")
        if not (self.rtol > 0 and self.atol > 0):
            raise ParameterError("rtol and atol must be positive")
        _parse_init_value(self.init)  # validates the grammar early
        _parse_provider_value(self.u_provider)

    def grid(self) -> GridSpec:
        return GridSpec(n_cutoff=self.n_cutoff, side_length=self.side_length)

    def init_spec(self) -> InitSpec:
        kind, payload = _parse_init_value(self.init)
        if kind is InitKind.DIPOLE:
            return InitSpec(kind, self.grid())
        if kind is InitKind.SNAPSHOT:
            return InitSpec(kind, self.grid(), path=payload)
        return InitSpec(kind, self.grid(), modes=payload)

    def provider_kind(self) -> str:
        return _parse_provider_value(self.u_provider)[0]

    def freeze_per_step(self) -> bool:
        return self.provider_kind() == "optimal_frozen_step"

    def build_provider(self):
        """Stirring provider (t, u) -> U for this configuration."""
        kind, payload = _parse_provider_value(self.u_provider)
        if kind in ("optimal", "optimal_frozen_step"):
            return optimal_provider(self.alpha)
        if kind == "fixed_stream":
            cache: dict[int, SpectralField] = {}

            def fixed(t, u):
                key = u.grid.n_cutoff
                if key not in cache:
                    psi = stream_from_modes(u.grid, payload)
                    cache[key] = velocity_from_stream(psi)
                return cache[key]

            return fixed
        pattern, times = payload
        return _FileSequenceProvider(pattern, times)


class _FileSequenceProvider:
    """Piecewise-constant stirring read from snapshot files."""

    def __init__(self, pattern: str, times):
        self.pattern = pattern
        self.times = list(times)
        self._cache: dict[int, SpectralField] = {}

    def __call__(self, t: float, u: SpectralField) -> SpectralField:
        idx = int(np.searchsorted(self.times, t + 1e-12, side="right") - 1)
        idx = max(idx, 0)
        if idx not in self._cache:
            path = self.pattern.replace("{i}", str(idx))
            loaded, _, _ = read_snapshot(path)
            if loaded.grid.n_cutoff != u.grid.n_cutoff:
                raise GridError(
                    f"stirring snapshot {path} has cutoff {loaded.grid.n_cutoff}, "
                    f"expected {u.grid.n_cutoff}"
                )
            if not loaded.is_divergence_free:
                loaded = project_divfree_truncate(loaded, u.grid.n_cutoff)
            self._cache[idx] = loaded
        return self._cache[idx]


# ---------------------------------------------------------------------------
# value grammars
# ---------------------------------------------------------------------------

def _parse_stream_entries(text: str):
    modes = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split(",")
        if len(bits) != 4:
            raise ParameterError(
                f"stream entry {part!r} must be K1,K2,RE,IM"
            )
        k = (int(bits[0]), int(bits[1]))
        amp = complex(float(bits[2]), float(bits[3]))
        if k in modes:
            raise ParameterError(f"stream mode {k} given twice")
        modes[k] = amp
    if not modes:
        raise ParameterError("stream mode list is empty")
    return modes


def _parse_init_value(value: str):
    value = value.strip()
    if value == "dipole":
        return InitKind.DIPOLE, None
    if value.startswith("snapshot:"):
        path = value[len("snapshot:"):].strip()
        if not path:
            raise ParameterError("snapshot init needs a path")
        return InitKind.SNAPSHOT, path
    if value.startswith("stream:"):
        return InitKind.STREAM_MODES, _parse_stream_entries(value[len("stream:"):])
    raise ParameterError(f"unknown init value {value!r}")


def _parse_provider_value(value: str):
    value = value.strip()
    if value in ("optimal", "optimal_frozen_step"):
        return value, None
    if value.startswith("fixed_stream:"):
        return "fixed_stream", _parse_stream_entries(value[len("fixed_stream:"):])
    if value.startswith("file_sequence:"):
        body = value[len("file_sequence:"):]
        if "@" not in body:
            raise ParameterError("file_sequence needs PATTERN@T0,T1,...")
        pattern, _, times_text = body.rpartition("@")
        if "{i}" not in pattern:
            raise ParameterError("file_sequence pattern must contain {i}")
        times = [float(x) for x in times_text.split(",") if x.strip()]
        if not times or any(b <= a for a, b in zip(times, times[1:])):
            raise ParameterError("file_sequence times must be strictly increasing")
        if times[0] > 0:
            raise ParameterError("file_sequence times must start at or before 0")
        return "file_sequence", (pattern, times)
    raise ParameterError(f"unknown u_provider value {value!r}")


# ---------------------------------------------------------------------------
# config text
# ---------------------------------------------------------------------------

_FLOAT_KEYS = {
    "alpha", "side_length", "t_end", "rtol", "atol",
    "output_interval", "snapshot_interval",
}
_INT_KEYS = {"n_cutoff", "seed"}
_STR_KEYS = {"init", "u_provider", "out_dir"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def parse_config(text: str) -> SimConfig:
    """Parse and validate flat key = value configuration text."""
    values: dict[str, object] = {}
    first_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw!r}", line=lineno)
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key in values:
            raise ConfigError(
                f"duplicate key {key!r} (first set on line {first_line[key]})",
                line=lineno,
            )
        first_line[key] = lineno
        try:
            if key in _FLOAT_KEYS:
                values[key] = _parse_float(val)
            elif key in _INT_KEYS:
                values[key] = int(val)
            else:
                values[key] = val
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", line=lineno) from exc
    for required in ("alpha", "n_cutoff", "t_end", "init"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    try:
        return SimConfig(**values)  # type: ignore[arg-type]
    except ParameterError as exc:
        offending = next((k for k in values if k in str(exc)), None)
        raise ConfigError(str(exc), line=first_line.get(offending)) from exc


def _parse_float(val: str) -> float:
    lowered = val.lower()
    if lowered in ("pi", "2pi", "2*pi"):
        return math.pi if lowered == "pi" else TWO_PI
    return float(val)


def config_text_of(config: SimConfig) -> str:
    """Canonical config text (used for checkpoint hashing)."""
    lines = []
    for key in sorted(_ALL_KEYS):
        v = getattr(config, key)
        if isinstance(v, float):
            lines.append(f"{key} = {v:.17g}")
        else:
            lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# sinks and checkpoints
# ---------------------------------------------------------------------------

class CsvSink:
    """Accumulates series rows; writes the CSV atomically on close."""

    def __init__(self, path, existing_rows=()):
        self.path = path
        self.rows = list(existing_rows)

    def on_row(self, row, state, U):
        self.rows.append(row)

    def close(self):
        body = CSV_HEADER + "\n" + "".join(
            ",".join(f"{v:.17g}" for v in row) + "\n" for row in self.rows
        )
        atomic_write_bytes(self.path, body.encode("ascii"))


class SnapshotSink:
    """Writes numbered snapshots plus a resume checkpoint sidecar."""

    def __init__(self, out_dir, alpha, config_text, config_path, start_index=0):
        self.out_dir = out_dir
        self.alpha = alpha
        self.config_text = config_text
        self.config_path = config_path
        self.index_offset = start_index

    def on_snapshot(self, state, index):
        idx = index + self.index_offset
        path = os.path.join(self.out_dir, f"snap_{idx:06d}.vmxs")
        write_snapshot(path, state.u, state.t, self.alpha)
        sidecar = (
            f"snapshot = {os.path.abspath(path)}\n"
            f"t = {state.t:.17g}\n"
            f"dt_last = {state.dt_last:.17g}\n"
            f"snap_index = {idx}\n"
            f"config_path = {os.path.abspath(self.config_path)}\n"
            f"config_sha256 = {config_hash(self.config_text)}\n"
        )
        atomic_write_bytes(os.path.join(self.out_dir, "checkpoint.txt"), sidecar.encode("ascii"))


def read_checkpoint(path) -> dict:
    """Parse a checkpoint sidecar into a dict of its fields."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    for needed in ("snapshot", "t", "dt_last", "config_path", "config_sha256"):
        if needed not in out:
            raise ConfigError(f"checkpoint {path} is missing field {needed!r}")
    return out
