"""Truncated Galerkin advection dynamics with adaptive embedded RK stepping.

The evolution is

    d/dt u = -P_N ((U . grad) u)

where P_N combines Fourier truncation with the divergence-free projection.
Quadratic products are formed on a padded collocation grid (3/2-rule) so the
discrete right-hand side is exactly the Galerkin operator; in particular
<rhs(u, U), u> = 0 and the L^2 energy is conserved up to integrator error.

Time stepping uses the Dormand-Prince 5(4) pair with the standard
elementary controller dt <- dt * clamp(safety * err^(-1/5), 0.2, 5.0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .errors import ParameterError, StiffnessError
from .initial import build_initial
from .mixer import drive_field
from .series import NormSeries
from .spectral import (
    SpectralField,
    divergence_residual,
    eval_modes,
    collect_modes,
    gradient,
    l2_inner,
    l2_norm,
    leray_project,
    project_divfree_truncate,
    samples_lp_norm,
    sobolev_norm,
)

if TYPE_CHECKING:  # pragma: no cover
    from .config import SimConfig

# Dormand-Prince 5(4): stage nodes, stage weights, 5th-order weights and the
# difference between the 5th- and embedded 4th-order weights.
DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
DP_ERR = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

#: Divergence residual allowed on the stirring field fed to the advection term.
_U_DIV_TOL = 1e-10


@dataclass
class StepControl:
    """Tolerances and step bounds for the adaptive integrator."""

    rtol: float = 1e-8
    atol: float = 1e-10
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float = math.inf
    safety: float = 0.9

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ParameterError("rtol and atol must be positive")
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ParameterError("need 0 < dt_min <= dt_init <= dt_max")
        if not (0 < self.safety < 1):
            raise ParameterError("safety factor must lie in (0, 1)")


@dataclass
class SimState:
    """Integrator state: time, transported field, last accepted step.

    ``dt_next`` is the controller's proposal for the next attempt; it can
    differ from ``dt_last`` when a step was shortened to land on an output
    time.
    """

    t: float
    u: SpectralField
    dt_last: float = 0.0
    dt_next: float | None = None


UProvider = Callable[[float, SpectralField], SpectralField]


def _compatible(a: SpectralField, b: SpectralField) -> bool:
    return (
        a.grid.n_cutoff == b.grid.n_cutoff
        and a.grid.side_length == b.grid.side_length
    )


def advect_product(u: SpectralField, U: SpectralField) -> np.ndarray:
    """Truncated alias-free coefficients of (U . grad) u (no projection)."""
    if not _compatible(u, U):
        raise ParameterError("u and U must share cutoff and side length")
    grid = u.grid
    n = grid.n_cutoff
    stack = np.concatenate([U.coeffs, gradient(u).reshape(4, *u.coeffs.shape[1:])])
    pad = grid.dealias_size
    phys = eval_modes(stack, n, pad)
    U_phys, gu = phys[:2], phys[2:].reshape(2, 2, pad, pad)
    w = np.empty((2, pad, pad))
    w[0] = U_phys[0] * gu[0, 0] + U_phys[1] * gu[0, 1]
    w[1] = U_phys[0] * gu[1, 0] + U_phys[1] * gu[1, 1]
    return collect_modes(w, n)


def advection_rhs(u: SpectralField, U: SpectralField) -> SpectralField:
    """Galerkin advection term -P_N((U . grad) u), alias-free.

    The gradient of u and the stirring field are evaluated on the padded
    grid, contracted pointwise, transformed back and projected.  The result
    is mean-zero and divergence-free.
    """
    if not U.is_divergence_free and divergence_residual(U) > _U_DIV_TOL:
        raise ParameterError("stirring field is not divergence-free")
    grid = u.grid
    n = grid.n_cutoff
    coeffs = advect_product(u, U)
    coeffs[:, n, n] = 0.0  # exact for divergence-free U
    projected = project_divfree_truncate(SpectralField(grid, coeffs), n)
    return SpectralField(
        grid, -projected.coeffs, is_divergence_free=True, is_mean_zero=True
    )


def _l2_of_coeffs(coeffs: np.ndarray, side_length: float) -> float:
    return math.sqrt(float(np.sum(np.abs(coeffs) ** 2)) * side_length**2)


def rk45_step(
    state: SimState,
    u_provider: UProvider,
    ctrl: StepControl,
    *,
    freeze_per_step: bool = False,
    dt_cap: float = math.inf,
) -> SimState:
    """Advance one accepted Dormand-Prince step.

    The stirring field is requested from ``u_provider`` at every stage value
    unless ``freeze_per_step`` is set, in which case it is evaluated once at
    the step's start.  ``dt_cap`` shortens the attempt (used to land on
    output times) without polluting the controller's proposal.  Raises
    StiffnessError when the error cannot be brought under tolerance above
    ``ctrl.dt_min``.
    """
    grid = state.u.grid
    side = grid.side_length
    organic = ctrl.dt_init if state.dt_next is None else state.dt_next
    organic = min(max(organic, ctrl.dt_min), ctrl.dt_max)
    dt = min(organic, dt_cap)
    capped = dt < organic

    if freeze_per_step:
        frozen = u_provider(state.t, state.u)

        def provider(ts: float, us: SpectralField) -> SpectralField:
            return frozen

    else:
        provider = u_provider

    def rhs(ts: float, coeffs: np.ndarray) -> np.ndarray:
        us = SpectralField(grid, coeffs, is_divergence_free=True, is_mean_zero=True)
        return advection_rhs(us, provider(ts, us)).coeffs

    u0 = state.u.coeffs
    scale = ctrl.atol + ctrl.rtol * _l2_of_coeffs(u0, side)
    while True:
        k = [rhs(state.t, u0)]
        for s in range(1, 7):
            incr = sum(a * ki for a, ki in zip(DP_A[s], k) if a != 0.0)
            k.append(rhs(state.t + DP_C[s] * dt, u0 + dt * incr))
        u5 = u0 + dt * sum(b * ki for b, ki in zip(DP_B5, k) if b != 0.0)
        err_vec = dt * sum(e * ki for e, ki in zip(DP_ERR, k) if e != 0.0)
        err = _l2_of_coeffs(err_vec, side) / scale
        if err <= 1.0:
            break
        dt_new = dt * min(max(ctrl.safety * err**-0.2, 0.2), 5.0)
        if dt_new < ctrl.dt_min:
            raise StiffnessError(
                "adaptive step fell below dt_min with error above tolerance",
                t=state.t,
                dt=dt_new,
                err=err,
            )
        dt = dt_new
        capped = False

    factor = 5.0 if err == 0.0 else min(max(ctrl.safety * err**-0.2, 0.2), 5.0)
    proposal = min(max(dt * factor, ctrl.dt_min), ctrl.dt_max)
    dt_next = max(organic, proposal) if capped else proposal
    u_new = leray_project(
        SpectralField(grid, u5, is_divergence_free=True, is_mean_zero=True)
    )
    return SimState(t=state.t + dt, u=u_new, dt_last=dt, dt_next=dt_next)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def series_row(
    t: float, dt: float, u: SpectralField, U: SpectralField, alpha: float
) -> tuple[float, ...]:
    """One diagnostics row: mix norm, energy, stirring norms, decay rate."""
    h = sobolev_norm(u, -alpha)
    energy = l2_norm(u) ** 2
    grad_l2 = sobolev_norm(U, 1.0)
    gU = eval_modes(
        gradient(U).reshape(4, *U.coeffs.shape[1:]), U.grid.n_cutoff, U.grid.diag_size
    )
    grad_linf = samples_lp_norm(gU, U.grid.side_length, np.inf)
    decay = l2_inner(U, drive_field(u, alpha))
    return (t, dt, h, energy, grad_l2, grad_linf, decay)


def _event_times(t0: float, t_end: float, interval: float, include_start: bool):
    if interval <= 0:
        return []
    eps = 1e-9 * max(1.0, abs(t_end))
    out = []
    j = 0 if include_start else int(math.floor(t0 / interval + 1e-9)) + 1
    while True:
        tj = j * interval
        if tj > t_end + eps:
            break
        if tj >= t0 - eps and (include_start or tj > t0 + eps):
            out.append(min(tj, t_end))
        j += 1
    return out


def evolve(
    config: "SimConfig",
    u_provider: UProvider,
    sinks: Sequence = (),
    *,
    t0: float = 0.0,
    u0: SpectralField | None = None,
    dt0: float | None = None,
    freeze_per_step: bool = False,
) -> NormSeries:
    """Advance from t0 to the configured horizon, emitting diagnostics.

    Sinks are objects with optional methods ``on_row(row, state, U)`` and
    ``on_snapshot(state, index)``, invoked synchronously at the configured
    cadences.  With ``output_interval == 0`` a row is emitted after every
    accepted step.  The assembled NormSeries is returned; on integration
    failure the partial series is attached to the raised exception as
    ``exc.series``.
    """
    grid = config.grid()
    alpha = config.alpha
    u = build_initial(config.init_spec()) if u0 is None else u0
    if u.grid.n_cutoff != grid.n_cutoff:
        raise ParameterError("initial data cutoff does not match the configured grid")
    ctrl = StepControl(rtol=config.rtol, atol=config.atol)
    state = SimState(t=t0, u=u, dt_last=0.0 if dt0 is None else dt0, dt_next=dt0)

    series = NormSeries()
    every_step = config.output_interval == 0
    t_end = config.t_end
    eps = 1e-9 * max(1.0, abs(t_end))

    snap_times = _event_times(t0, t_end, config.snapshot_interval, include_start=False)
    if config.snapshot_interval > 0 and t0 == 0.0:
        snap_times = [0.0] + snap_times
    row_times = (
        [] if every_step else _event_times(t0, t_end, config.output_interval, False)
    )
    if not every_step and (not row_times or row_times[-1] < t_end - eps):
        row_times.append(t_end)

    snap_index = 0

    def emit_row(st: SimState) -> None:
        U = u_provider(st.t, st.u)
        row = series_row(st.t, st.dt_last, st.u, U, alpha)
        series.append(*row)
        for sink in sinks:
            hook = getattr(sink, "on_row", None)
            if hook is not None:
                hook(row, st, U)

    def emit_snapshot(st: SimState) -> None:
        nonlocal snap_index
        for sink in sinks:
            hook = getattr(sink, "on_snapshot", None)
            if hook is not None:
                hook(st, snap_index)
        snap_index += 1

    try:
        emit_row(state)
        if snap_times and abs(snap_times[0] - t0) <= eps:
            emit_snapshot(state)
            snap_times = snap_times[1:]

        events = sorted(set(round(t, 15) for t in row_times + snap_times + [t_end]))
        events = [te for te in events if te > t0 + eps]
        for te in events:
            while state.t < te - eps:
                state = rk45_step(
                    state,
                    u_provider,
                    ctrl,
                    freeze_per_step=freeze_per_step,
                    dt_cap=te - state.t,
                )
                if every_step and state.t < te - eps:
                    emit_row(state)
            state = SimState(t=te, u=state.u, dt_last=state.dt_last, dt_next=state.dt_next)
            is_row = every_step or any(abs(te - tr) <= eps for tr in row_times)
            if is_row:
                emit_row(state)
            if any(abs(te - ts) <= eps for ts in snap_times):
                emit_snapshot(state)
    except StiffnessError as exc:
        exc.series = series
        raise
    return series
