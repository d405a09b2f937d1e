"""Time series of mixing diagnostics and its CSV form."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

#: Exact CSV column order.
COLUMNS = ("t", "dt", "h_neg_alpha", "energy", "gradU_l2", "gradU_linf", "decay_rate_inst")
CSV_HEADER = ",".join(COLUMNS)


@dataclass
class NormSeries:
    """Rows of (t, dt, mix norm, energy, stirring-gradient norms, decay rate).

    ``energy`` is the squared L^2 norm.  Rows must be appended in strictly
    increasing time order.
    """

    rows: list[tuple[float, ...]] = field(default_factory=list)

    def append(self, t, dt, h_neg_alpha, energy, gradU_l2, gradU_linf, decay_rate_inst):
        if self.rows and not t > self.rows[-1][0]:
            raise ParameterError(
                f"series times must increase: {t} after {self.rows[-1][0]}"
            )
        self.rows.append(
            tuple(
                float(v)
                for v in (t, dt, h_neg_alpha, energy, gradU_l2, gradU_linf, decay_rate_inst)
            )
        )

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        idx = COLUMNS.index(name)
        return np.array([row[idx] for row in self.rows], dtype=np.float64)

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def gradU_linf_integral(self) -> np.ndarray:
        """Running trapezoid quadrature of the stirring-gradient sup norm."""
        t = self.t
        g = self.column("gradU_linf")
        out = np.zeros_like(t)
        if len(t) > 1:
            out[1:] = np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))
        return out

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for row in self.rows:
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv_text(cls, text: str) -> "NormSeries":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParameterError("empty CSV series")
        if lines[0].strip() != CSV_HEADER:
            raise ParameterError(f"unexpected CSV header: {lines[0]!r}")
        series = cls()
        for ln in lines[1:]:
            parts = ln.split(",")
            if len(parts) != len(COLUMNS):
                raise ParameterError(f"malformed CSV row: {ln!r}")
            series.append(*(float(p) for p in parts))
        return series

    @classmethod
    def from_csv(cls, path) -> "NormSeries":
        with open(path, "r", encoding="ascii") as handle:
            return cls.from_csv_text(handle.read())
