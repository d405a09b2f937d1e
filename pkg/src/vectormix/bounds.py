"""Mixing lower bounds, pressure recovery and decay-rate fitting.

The lower-bound calculators evaluate minimal mixing times and decay
envelopes for ||u(t)||_{H^-alpha} under a W^{1,q} stirring budget.  Four
regimes are distinguished by the sign of q(1-alpha) - d:

    SUBCRITICAL   q(1-alpha) < d  (also alpha = 1 with finite q):
        envelope(t) = [h^e - t (C/alpha) B l^e]_+^(1/e),  e = d/(alpha q)
    SUPERCRITICAL q(1-alpha) > d  (also q = inf with alpha < 1):
        e = (1-alpha)/alpha, bracket h^e - t e C B l^e
    CRITICAL      q(1-alpha) = d:
        e = (1-alpha)/alpha + d/(alpha r) for a free parameter
        r > max(2, d/alpha), bracket h^e - t e C_r B l^e
    EXP           q = inf and alpha = 1:
        envelope(t) = h exp(-int_0^t ||grad U||_inf ds),  t_min = inf

with h, l the initial mix and L^2 norms, B the stirring budget for the
regime (||grad U||_{L^inf_t L^q_x} in SUBCRITICAL/CRITICAL,
||U||_{L^inf_t W^{1,q}_x} in SUPERCRITICAL, ||grad U||_{L^inf_{t,x}} in
EXP) and C a user-supplied stand-in for the embedding constants, which are
not computed here.  In the algebraic regimes t_min = h^e / (e' C B l^e)
with e' the bracket prefactor, and the envelope clamps at zero once the
bracket turns negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .dynamics import advect_product
from .errors import ParameterError
from .series import NormSeries
from .spectral import ScalarField, SpectralField, TWO_PI, _lattice


class Regime(str, Enum):
    SUBCRITICAL = "SUBCRITICAL"
    SUPERCRITICAL = "SUPERCRITICAL"
    CRITICAL = "CRITICAL"
    EXP = "EXP"


def regime_select(q: float, alpha: float, d: int) -> Regime:
    """Classify (q, alpha, d) into the lower-bound regime."""
    if not (q > 1):
        raise ParameterError(f"q must lie in (1, inf], got {q}")
    if not 0.5 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [1/2, 1], got {alpha}")
    if d < 1:
        raise ParameterError(f"dimension must be >= 1, got {d}")
    if q == math.inf:
        return Regime.EXP if alpha == 1.0 else Regime.SUPERCRITICAL
    if alpha == 1.0:
        return Regime.SUBCRITICAL
    gap = q * (1.0 - alpha) - d
    if gap < 0:
        return Regime.SUBCRITICAL
    if gap > 0:
        return Regime.SUPERCRITICAL
    return Regime.CRITICAL


@dataclass
class BoundInput:
    """Quantities entering the minimal-mixing-time formulas."""

    q: float
    alpha: float
    d: int
    h_norm0: float
    l2_norm0: float
    budget: float
    C: float = 1.0
    r: float | None = None

    def __post_init__(self):
        regime_select(self.q, self.alpha, self.d)  # validates q, alpha, d
        for name in ("h_norm0", "l2_norm0", "budget"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if not self.C > 0:
            raise ParameterError("C must be positive")


@dataclass
class BoundResult:
    """Evaluated lower bound: regime, minimal mixing time and envelope."""

    regime: Regime
    t_min: float
    envelope: Callable[[np.ndarray], np.ndarray]


def _algebraic_envelope(h: float, exponent: float, slope: float):
    def envelope(t):
        bracket = np.maximum(h**exponent - slope * np.asarray(t, dtype=float), 0.0)
        return bracket ** (1.0 / exponent)

    return envelope


def tmin(inp: BoundInput, gradU_series: NormSeries | None = None) -> BoundResult:
    """Minimal mixing time and envelope for the given regime inputs.

    In the EXP regime the envelope integrates ``budget`` as a constant
    sup-norm bound unless a measured series is supplied, in which case the
    trapezoid quadrature of its gradU_linf column is used.
    """
    regime = regime_select(inp.q, inp.alpha, inp.d)
    h, l, B, C = inp.h_norm0, inp.l2_norm0, inp.budget, inp.C
    a = inp.alpha
    if regime is Regime.EXP:
        if gradU_series is None:
            envelope = lambda t: h * np.exp(-B * np.asarray(t, dtype=float))
        else:
            envelope = exp_envelope_from_series(gradU_series, h)
        return BoundResult(regime, math.inf, envelope)
    if regime is Regime.SUBCRITICAL:
        e = inp.d / (a * inp.q)
        slope = (C / a) * B * l**e
    elif regime is Regime.SUPERCRITICAL:
        if a == 1.0:
            raise ParameterError("supercritical formula requires alpha < 1")
        e = (1.0 - a) / a
        slope = e * C * B * l**e
    else:  # CRITICAL
        if a == 1.0:
            raise ParameterError("critical formula requires alpha < 1")
        if inp.r is None or not inp.r > max(2.0, inp.d / a):
            raise ParameterError(
                f"critical regime needs the free parameter r > max(2, d/alpha) "
                f"= {max(2.0, inp.d / a):g}"
            )
        e = (1.0 - a) / a + inp.d / (a * inp.r)
        slope = e * C * B * l**e
    t_min = h**e / slope
    return BoundResult(regime, float(t_min), _algebraic_envelope(h, e, slope))


def unit_constant_slope(inp: BoundInput) -> float:
    """Bracket slope of the algebraic envelope with the constant set to one.

    The envelope reads [h0^e - t * C * s1]_+^(1/e); this returns s1, so the
    bound with constant C holds at time t iff C * s1 * t >= h0^e - h(t)^e.
    """
    regime = regime_select(inp.q, inp.alpha, inp.d)
    if regime is Regime.EXP:
        raise ParameterError("the exponential regime has no embedding constant")
    scaled = BoundInput(
        q=inp.q, alpha=inp.alpha, d=inp.d, h_norm0=inp.h_norm0,
        l2_norm0=inp.l2_norm0, budget=inp.budget, C=1.0, r=inp.r,
    )
    res = tmin(scaled)
    e = _bracket_exponent(scaled)
    return inp.h_norm0**e / res.t_min


def _bracket_exponent(inp: BoundInput) -> float:
    regime = regime_select(inp.q, inp.alpha, inp.d)
    if regime is Regime.SUBCRITICAL:
        return inp.d / (inp.alpha * inp.q)
    if regime is Regime.SUPERCRITICAL:
        return (1.0 - inp.alpha) / inp.alpha
    if regime is Regime.CRITICAL:
        return (1.0 - inp.alpha) / inp.alpha + inp.d / (inp.alpha * inp.r)
    raise ParameterError("the exponential regime has no bracket exponent")


def minimal_bound_constant(series: NormSeries, inp: BoundInput) -> float:
    """Smallest constant for which the algebraic envelope holds pathwise.

    The embedding constants behind the algebraic bounds are never computed;
    a violation under a user-supplied constant is a measurement of how
    small it was, not a scheme failure.  Returns
    max_t (h0^e - h(t)^e) / (t * s1) over the recorded rows (zero when the
    mix norm never dips below its start).
    """
    e = _bracket_exponent(inp)
    s1 = unit_constant_slope(inp)
    t = series.t
    h = series.column("h_neg_alpha")
    h0 = inp.h_norm0
    mask = t > 0
    if not np.any(mask):
        return 0.0
    demand = (h0**e - h[mask] ** e) / (t[mask] * s1)
    return float(max(0.0, np.max(demand)))


def exp_envelope_from_series(series: NormSeries, h0: float | None = None):
    """Pathwise Groenwall envelope h0 * exp(-int ||grad U||_inf) from a run.

    Uses the trapezoid quadrature of the recorded gradU_linf column; between
    records the integral is interpolated linearly.  ``h0`` defaults to the
    first recorded mix norm.
    """
    if len(series) == 0:
        raise ParameterError("empty series")
    t = series.t
    integral = series.gradU_linf_integral()
    start = series.column("h_neg_alpha")[0] if h0 is None else h0

    def envelope(times):
        arr = np.asarray(times, dtype=float)
        return start * np.exp(-np.interp(arr, t, integral))

    return envelope


# ---------------------------------------------------------------------------
# pressure recovery
# ---------------------------------------------------------------------------

def recover_pressure(u: SpectralField, U: SpectralField) -> ScalarField:
    """Pressure eliminated by the projection, recovered as a diagnostic.

    Taking the divergence of the momentum balance gives
    (-Lap) p = div((U . grad) u); the mean-zero solution satisfies the
    spectral identity grad p + (I - P)((U . grad) u) = 0.
    """
    w = advect_product(u, U)
    grid = u.grid
    n = grid.n_cutoff
    k1, k2, ksq, _ = _lattice(n)
    safe = ksq.copy()
    safe[n, n] = 1.0
    scale = TWO_PI / grid.side_length
    div_w = 1j * scale * (k1 * w[0] + k2 * w[1])
    p = div_w / (scale**2 * safe)
    p[n, n] = 0.0
    return ScalarField(grid, p)


# ---------------------------------------------------------------------------
# decay-rate fitting
# ---------------------------------------------------------------------------

def fit_exponential(series: NormSeries, t_lo: float, t_hi: float):
    """Least-squares slope of log mix norm over a time window.

    Returns (rate, r_squared).  The rate is the fitted d/dt log||u||, so
    exponential decay gives a negative value.  A zero-variance response
    (constant norm) is reported with r_squared = 1 by convention.
    """
    t = series.t
    h = series.column("h_neg_alpha")
    mask = (t >= t_lo) & (t <= t_hi)
    if int(np.sum(mask)) < 10:
        raise ParameterError(
            f"need at least 10 samples in [{t_lo}, {t_hi}], found {int(np.sum(mask))}"
        )
    tw, hw = t[mask], h[mask]
    if np.any(hw <= 0):
        raise ParameterError("mix norm must stay positive inside the fit window")
    y = np.log(hw)
    slope, intercept = np.polyfit(tw, y, 1)
    resid = y - (slope * tw + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    # a zero-variance response counts as a perfect fit; the threshold is
    # rounding-level relative to the data scale
    floor = (1e-14 * max(1.0, float(np.max(np.abs(y))))) ** 2 * len(y)
    r2 = 1.0 if ss_tot <= floor else 1.0 - ss_res / ss_tot
    return float(slope), float(r2)
