"""
Integrating-factor RK4 in the interaction picture.

With w(t, n) = exp(-i t p(n)) u(t, n) the stiff linear phase drops out,

    d/dt w = exp(-i t p(n)) N(u),

and classical RK4 is applied to w.  Written back in u this is the familiar
IF-RK4 update with the propagators exp(i h p / 2) and exp(i h p).  The
stepper also returns the increment in the interaction frame, so finite
differences of w never subtract two large rotated numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import (
    EvolutionForm,
    FormKernel,
    State,
    conserved_E,
    conserved_H,
    conserved_M,
    full_from_half,
    half,
    smoothing_value,
)
from .spectral import SpectralField, TorusGrid

BLOWUP_THRESHOLD = 1e12


class BlowUpError(RuntimeError):
    """Raised when the state stops being finite or exceeds the coefficient threshold."""

    def __init__(self, message: str, t_last_finite: float, max_abs: float):
        super().__init__(message)
        self.t_last_finite = t_last_finite
        self.max_abs = max_abs


def default_dt(grid: TorusGrid) -> float:
    """1e-3 * min(1, lambda^5 / M^4)."""
    return 1e-3 * min(1.0, grid.lam**5 / grid.M**4)


class _Stepper:
    """Precomputed propagators for one (grid, form, h)."""

    def __init__(self, kernel: FormKernel, h: float):
        self.kernel = kernel
        self.h = h
        p = kernel.phase
        self.E = np.exp(1j * h * p)
        self.E2 = np.exp(0.5j * h * p)

    def increment(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One step; returns (u_new, delta) with delta = exp(-i h p) u_new - u."""
        N = self.kernel.nonlinear
        h, E, E2 = self.h, self.E, self.E2
        k1 = N(u)
        k2 = N(E2 * (u + 0.5 * h * k1))
        k3 = N(E2 * u + 0.5 * h * k2)
        k4 = N(E * u + h * E2 * k3)
        delta = (h / 6.0) * (k1 + 2.0 * np.conj(E2) * (k2 + k3) + np.conj(E) * k4)
        return E * (u + delta), delta


def _guard(u: np.ndarray, t_prev: float) -> None:
    if not np.all(np.isfinite(u)):
        raise BlowUpError("non-finite coefficient", t_prev, float("nan"))
    amax = float(np.max(np.abs(u)))
    if amax > BLOWUP_THRESHOLD:
        raise BlowUpError(f"coefficient magnitude {amax:.3e} above threshold", t_prev, amax)


def step(s: State, dt: float, form: EvolutionForm) -> State:
    """One IF-RK4 step of size dt (negative dt steps backward in time)."""
    if dt == 0 or not math.isfinite(dt):
        raise ValueError(f"dt must be finite and non-zero, got {dt}")
    grid = s.field.grid
    st = _Stepper(FormKernel(grid, form), dt)
    u, _ = st.increment(half(s.field.coeffs, grid.M))
    _guard(u, s.t)
    return State(SpectralField(grid, full_from_half(u), True), s.t + dt)


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-stepping controls.

    Attributes:
        t_end: final time; may be below the start time for backward runs.
        form: evolution form to integrate.
        dt: step magnitude; None picks `default_dt`.  The step is shrunk
            slightly if needed so an integer number of steps reaches t_end.
        snapshot_stride: steps between recorded snapshots.
        conservation_check_stride: steps between mass-drift checks.
    """

    t_end: float
    form: EvolutionForm
    dt: Optional[float] = None
    snapshot_stride: int = 1
    conservation_check_stride: int = 1
    diagnostics: bool = True

    def __post_init__(self) -> None:
        if self.dt is not None and not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.snapshot_stride < 1 or self.conservation_check_stride < 1:
            raise ValueError("strides must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Snapshots at uniform spacing plus per-snapshot diagnostics.

    `coeffs` has shape (n_snapshots, 2M + 1) in natural index order.
    """

    grid: TorusGrid
    times: np.ndarray
    coeffs: np.ndarray
    dt: float
    form: EvolutionForm
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)
    max_mass_drift: float = 0.0
    final: Optional[State] = None

    def __len__(self) -> int:
        return self.times.size

    def field_at(self, j: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[j], True)

    def state_at(self, j: int) -> State:
        return State(self.field_at(j), float(self.times[j]))

    @property
    def spacing(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self) > 1 else 0.0


def _plan(t0: float, t_end: float, dt: float) -> tuple[int, float]:
    span = t_end - t0
    if span == 0:
        return 0, dt
    n = max(1, math.ceil(abs(span) / dt - 1e-9))
    return n, span / n


def evolve(s0: State, cfg: IntegratorConfig) -> Trajectory:
    """Integrate from s0 to cfg.t_end, recording every `snapshot_stride` steps."""
    grid = s0.field.grid
    dt = cfg.dt if cfg.dt is not None else default_dt(grid)
    if abs(cfg.t_end - s0.t) < dt * (1 - 1e-12) and cfg.t_end != s0.t:
        raise ValueError("dt exceeds the integration span")
    nsteps, h = _plan(s0.t, cfg.t_end, dt)
    kernel = FormKernel(grid, cfg.form)
    st = _Stepper(kernel, h)

    u = half(s0.field.coeffs, grid.M)
    u0 = u.copy()
    mass0 = kernel.cubic.mass(u)
    max_drift = 0.0
    times, snaps = [s0.t], [u.copy()]
    t = s0.t
    for k in range(1, nsteps + 1):
        u, _ = st.increment(u)
        _guard(u, t)
        t = s0.t + k * h
        if k % cfg.conservation_check_stride == 0 and mass0 > 0:
            max_drift = max(max_drift, abs(kernel.cubic.mass(u) - mass0) / mass0)
        if k % cfg.snapshot_stride == 0:
            times.append(t)
            snaps.append(u.copy())

    coeffs = np.array([full_from_half(x) for x in snaps])
    diag: dict[str, np.ndarray] = {}
    if cfg.diagnostics:
        params = cfg.form.params
        fields = [SpectralField(grid, c, True) for c in coeffs]
        diag = {
            "E": np.array([conserved_E(f) for f in fields]),
            "M": np.array([conserved_M(f) for f in fields]),
            "H": np.array([conserved_H(f, params) for f in fields]),
            "smoothing": np.array([smoothing_value(x, u0, grid.lam) for x in snaps]),
        }
    final = State(SpectralField(grid, full_from_half(u), True), t)
    return Trajectory(
        grid=grid,
        times=np.array(times),
        coeffs=coeffs,
        dt=h,
        form=cfg.form,
        diagnostics=diag,
        max_mass_drift=max_drift,
        final=final,
    )


def _interaction_displacement(kernel: FormKernel, u: np.ndarray, span: float, substeps: int) -> np.ndarray:
    """exp(-i span p) u(t + span) - u(t), accumulated in the interaction frame."""
    st = _Stepper(kernel, span / substeps)
    D = np.zeros_like(u)
    rot = np.ones_like(u)
    for _ in range(substeps):
        u, delta = st.increment(u)
        D += rot * delta
        rot = rot * np.conj(st.E)
    return D


def interaction_derivative_check(s: State, form: EvolutionForm, dt_probe: float, substeps: int = 8) -> float:
    """Max-mode gap between a centered difference of w and exp(-i t p) N(u).

    The common factor exp(-i t p) is unimodular and left out of both sides.
    """
    grid = s.field.grid
    kernel = FormKernel(grid, form)
    u = half(s.field.coeffs, grid.M)
    plus = _interaction_displacement(kernel, u, dt_probe, substeps)
    minus = _interaction_displacement(kernel, u, -dt_probe, substeps)
    fd = (plus - minus) / (2.0 * dt_probe)
    return float(np.max(np.abs(fd - kernel.nonlinear(u)), initial=0.0))
