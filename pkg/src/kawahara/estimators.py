"""
Discrete estimators for the space-time functionals used in the analysis.

Normalizations follow the spatial conventions of `spectral` and a unitary
temporal transform, so that for b = 0

    ||u||_{X^{s,0}} = ||psi u||_{L^2_t H^s_lambda}

holds exactly at the discrete level (Parseval for the zero-padded DFT).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sp_fft
from scipy import optimize

from .dynamics import full_from_half
from .integrator import Trajectory
from .rng import counter_rng
from .spectral import SpectralField, TorusGrid, TWO_PI, coeffs_to_samples, japanese
from .symbols import DispersionParams, PhaseKind, PhaseSymbol


class ResolutionWarning(UserWarning):
    """The temporal grid does not resolve the fastest linear phase."""


@dataclass(frozen=True)
class CutoffProfile:
    """Time cutoff: 1 on |t - center| <= inner, 0 beyond outer, cosine taper between.

    The taper 0.5 (1 + cos(pi (|t| - inner) / (outer - inner))) is C^1.
    """

    inner: float = 1.0
    outer: float = 2.0
    center: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.inner < self.outer:
            raise ValueError("need 0 < inner < outer")

    @classmethod
    def for_time(cls, T: float, center: float = 0.0) -> "CutoffProfile":
        """psi_T(t) = psi(t / T): inner radius T, outer radius 2T."""
        return cls(T, 2.0 * T, center)

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        r = np.abs(np.asarray(t, dtype=float) - self.center)
        x = np.clip((r - self.inner) / (self.outer - self.inner), 0.0, 1.0)
        return 0.5 * (1.0 + np.cos(np.pi * x))

    @property
    def window(self) -> tuple[float, float]:
        return (self.center - self.outer, self.center + self.outer)


@dataclass(frozen=True)
class SpaceTimeSample:
    """Coefficients u(t_j, m) on uniformly spaced times (shape (nt, 2M + 1))."""

    grid: TorusGrid
    times: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("need at least two sample times")
        d = np.diff(t)
        if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-9 * max(1.0, abs(d[0])):
            raise ValueError("sample times must be uniform and increasing")
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (t.size, self.grid.size):
            raise ValueError(f"coefficients shape {c.shape} does not match ({t.size}, {self.grid.size})")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_trajectory(cls, traj: Trajectory) -> "SpaceTimeSample":
        return cls(traj.grid, traj.times, traj.coeffs)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def _as_sample(x: Trajectory | SpaceTimeSample) -> SpaceTimeSample:
    return x if isinstance(x, SpaceTimeSample) else SpaceTimeSample.from_trajectory(x)


def _check_window(sample: SpaceTimeSample, cutoff: CutoffProfile) -> None:
    lo, hi = cutoff.window
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    if sample.times[0] > lo + tol or sample.times[-1] < hi - tol:
        raise ValueError(
            f"samples cover [{sample.times[0]}, {sample.times[-1]}], cutoff needs [{lo}, {hi}]"
        )


def xsb_norm(
    traj: Trajectory | SpaceTimeSample,
    s: float,
    b: float,
    sym: PhaseSymbol,
    cutoff: CutoffProfile,
    pad_factor: int = 4,
) -> float:
    """||psi S(-t) u||_{H^b_t H^s_lambda} from sampled coefficients.

    Each mode is conjugated by the linear flow, multiplied by psi, transformed
    in time over a zero-padded window and weighted by <tau>^b <n>^s.
    """
    sample = _as_sample(traj)
    _check_window(sample, cutoff)
    grid = sample.grid
    t = sample.times
    dt = sample.dt
    p = np.asarray(sym(grid.indices), dtype=float)
    if np.pi / dt < 2.0 * np.max(np.abs(p)):
        warnings.warn(
            f"temporal Nyquist {np.pi / dt:.3g} below twice the largest phase {np.max(np.abs(p)):.3g}",
            ResolutionWarning,
            stacklevel=2,
        )
    g = cutoff(t)[:, None] * np.exp(-1j * np.outer(t, p)) * sample.coeffs
    L = sp_fft.next_fast_len(max(pad_factor, 1) * t.size)
    G = dt * sp_fft.fft(g, n=L, axis=0)
    tau = TWO_PI * sp_fft.fftfreq(L, d=dt)
    dtau = TWO_PI / (L * dt)
    wt = japanese(tau) ** (2.0 * b)
    ws = japanese(grid.wavenumbers) ** (2.0 * s)
    total = np.sum(wt[:, None] * ws[None, :] * np.abs(G) ** 2) * dtau / TWO_PI
    return float(np.sqrt(total / grid.period))


def l4_spacetime_norm(traj: Trajectory | SpaceTimeSample, cutoff: Optional[CutoffProfile] = None) -> float:
    """(integral of |psi u|^4 dx dt)^(1/4), trapezoid in t and on the collocation grid in x.

    Without a cutoff psi is taken to be 1 on the sampled interval.
    """
    sample = _as_sample(traj)
    grid = sample.grid
    t = sample.times
    if cutoff is None:
        w = np.full(t.size, sample.dt)
        w[0] = w[-1] = 0.5 * sample.dt
        psi = np.ones(t.size)
    else:
        _check_window(sample, cutoff)
        w = np.full(t.size, sample.dt)
        psi = cutoff(t)
    v = coeffs_to_samples(sample.coeffs, grid)
    per_time = np.sum(np.abs(v) ** 4, axis=1) * grid.period / grid.G
    return float(np.sum(w * psi**4 * per_time) ** 0.25)


# ---------------------------------------------------------------------------
# L^4 Strichartz ratio over an ensemble


RHO_MAX = 0.05


@dataclass(frozen=True)
class StrichartzEnsemble:
    """Random band-limited space-time fields near the dispersion surface.

    Each member is u(t, m) = exp(i t p(m)) a_m(t), where a_m is a sum of
    `n_modulations` random exponentials with frequencies in [-modulation,
    modulation], on physical wavenumbers 0 < |n| <= n_max.  The data u(0) is
    normalized to ||u(0)||_{L^2} = rho and p is the DataCorrected symbol of u(0).
    """

    members: int = 100
    n_max: float = 2.0
    rho: float = 0.05
    T: float = 1.0
    modulation: float = 4.0
    n_modulations: int = 3
    params: DispersionParams = field(default_factory=DispersionParams)
    samples_per_period: int = 16

    def __post_init__(self) -> None:
        if not 0.0 < self.rho <= RHO_MAX:
            raise ValueError(f"rho must lie in (0, {RHO_MAX}], got {self.rho}")
        if self.members < 1:
            raise ValueError("need at least one ensemble member")


def _member_field(ens: StrichartzEnsemble, lam: float, rng: np.random.Generator):
    M = int(np.floor(ens.n_max * lam + 1e-9))
    grid = TorusGrid(lam, M)
    m_pos = np.arange(1, M + 1)
    amp = rng.standard_normal((M, ens.n_modulations)) + 1j * rng.standard_normal((M, ens.n_modulations))
    omega = rng.uniform(-ens.modulation, ens.modulation, size=(M, ens.n_modulations))
    a0 = amp.sum(axis=1)
    scale = ens.rho / np.sqrt(2.0 * np.sum(np.abs(a0) ** 2) / grid.period)
    amp = amp * scale
    u0 = SpectralField(grid, full_from_half(np.concatenate([[0.0], amp.sum(axis=1)])), True)
    return grid, m_pos, amp, omega, u0


def strichartz_member(
    ens: StrichartzEnsemble, lam: float, rng: np.random.Generator
) -> tuple[SpaceTimeSample, PhaseSymbol, CutoffProfile]:
    """Draw one ensemble member; returns its sample, symbol and cutoff."""
    grid, m_pos, amp, omega, u0 = _member_field(ens, lam, rng)
    sym = PhaseSymbol.from_data(PhaseKind.DATA_CORRECTED, ens.params, u0)
    cutoff = CutoffProfile.for_time(ens.T)
    pmax = float(np.max(np.abs(sym(m_pos))))
    fmax = pmax + ens.modulation
    dt = TWO_PI / (ens.samples_per_period * 4.0 * fmax)
    lo, hi = cutoff.window
    nt = int(np.ceil((hi - lo) / dt)) + 1
    t = np.linspace(lo, hi, nt)
    a = np.einsum("mk,tmk->tm", amp, np.exp(1j * t[:, None, None] * omega[None, :, :]))
    pos = np.exp(1j * np.outer(t, sym(m_pos))) * a
    M = grid.M
    coeffs = np.zeros((nt, grid.size), dtype=complex)
    coeffs[:, M + 1 :] = pos
    coeffs[:, :M] = np.conj(pos[:, ::-1])
    return SpaceTimeSample(grid, t, coeffs), sym, cutoff


def strichartz_ratio(sample: SpaceTimeSample, sym: PhaseSymbol, cutoff: CutoffProfile, b: float) -> float:
    if b <= 0.3:
        raise ValueError(f"b must exceed 3/10, got {b}")
    den = xsb_norm(sample, 0.0, b, sym, cutoff)
    if den == 0.0:
        raise ValueError("zero field: the ratio is undefined")
    return l4_spacetime_norm(sample, cutoff) / den


@dataclass(frozen=True)
class StrichartzReport:
    b: float
    lambdas: list[float]
    ratios: dict[float, np.ndarray]
    max_ratio: dict[float, float]
    slope: float
    slope_ci: tuple[float, float]
    confidence: float

    @property
    def passed(self) -> bool:
        return self.slope_ci[0] <= 0.0

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "lambdas": self.lambdas,
            "max_ratio": {str(k): v for k, v in self.max_ratio.items()},
            "mean_ratio": {str(k): float(np.mean(v)) for k, v in self.ratios.items()},
            "slope_log_lambda": self.slope,
            "slope_ci": list(self.slope_ci),
            "confidence": self.confidence,
            "passed": self.passed,
        }


def _slope(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(x, y, 1)[0])


def strichartz_ratio_study(
    ens: StrichartzEnsemble,
    b: float,
    lambdas: Sequence[float],
    seed: int = 0,
    n_boot: int = 2000,
    confidence: float = 0.95,
) -> StrichartzReport:
    """Per-lambda ratios l4 / X^{0,b}, the slope of the max ratio in log lambda and a bootstrap band.

    The band resamples ensemble members with replacement at each lambda.
    """
    if b <= 0.3:
        raise ValueError(f"b must exceed 3/10, got {b}")
    ratios: dict[float, np.ndarray] = {}
    for i, lam in enumerate(lambdas):
        rng = counter_rng(seed, i)
        vals = []
        for _ in range(ens.members):
            sample, sym, cutoff = strichartz_member(ens, lam, rng)
            vals.append(strichartz_ratio(sample, sym, cutoff, b))
        ratios[float(lam)] = np.array(vals)
    x = np.log(np.asarray(lambdas, dtype=float))
    maxes = np.array([ratios[float(l)].max() for l in lambdas])
    slope = _slope(x, maxes)
    boot_rng = counter_rng(seed, 10_000)
    boots = np.empty(n_boot)
    for k in range(n_boot):
        y = [boot_rng.choice(ratios[float(l)], size=ens.members, replace=True).max() for l in lambdas]
        boots[k] = _slope(x, np.array(y))
    alpha = 0.5 * (1.0 - confidence)
    ci = (float(np.quantile(boots, alpha)), float(np.quantile(boots, 1.0 - alpha)))
    return StrichartzReport(
        b=b,
        lambdas=[float(l) for l in lambdas],
        ratios=ratios,
        max_ratio={float(l): float(m) for l, m in zip(lambdas, maxes)},
        slope=slope,
        slope_ci=ci,
        confidence=confidence,
    )


# ---------------------------------------------------------------------------
# counting quantity


def _counting_range(m: int, lam: float) -> np.ndarray:
    """Indices m1 with n1 > 1 and n - n1 > 1."""
    lo = int(np.floor(lam)) + 1
    hi = m - lo
    return np.arange(lo, hi + 1)


def counting_M(tau: float, m: int, b: float, sym: PhaseSymbol) -> float:
    """(1/(2 pi lambda)) sum over m1 of <tau - p(m1) - p(m - m1)>^(1 - 4b)."""
    lam = sym.lam
    if m / lam <= 1.0:
        raise ValueError(f"need n = m / lambda > 1, got {m / lam}")
    m1 = _counting_range(m, lam)
    if m1.size == 0:
        return 0.0
    a = sym(m1) + sym(m - m1)
    return float(np.sum(japanese(tau - a) ** (1.0 - 4.0 * b)) / (TWO_PI * lam))


@dataclass(frozen=True)
class CountingScanReport:
    b: float
    lam: float
    m_max: int
    sup: float
    argmax: tuple[float, int]
    grid: dict

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "lambda": self.lam,
            "m_max": self.m_max,
            "sup": self.sup,
            "argmax_tau": self.argmax[0],
            "argmax_m": self.argmax[1],
            "grid": self.grid,
        }


OFF_SURFACE_SHIFTS = (1.0, 10.0, 100.0)


def counting_M_scan(b: float, sym: PhaseSymbol, m_max: int, refine: bool = True) -> CountingScanReport:
    """Sup of `counting_M` over m in (2 lambda + 1, m_max] and a tau grid per m.

    The tau grid holds every phase sum p(m1) + p(m - m1) (on the surface), the
    midpoints between consecutive sums, and the sums shifted by +-1, +-10,
    +-100 (off the surface).  The best point is then refined by a bounded
    scalar search between its neighbours.
    """
    lam = sym.lam
    expo = 1.0 - 4.0 * b
    best = (-np.inf, 0.0, 0)
    m_lo = int(np.floor(lam)) * 2 + 2
    for m in range(m_lo, m_max + 1):
        m1 = _counting_range(m, lam)
        if m1.size == 0:
            continue
        a = np.sort(sym(m1) + sym(m - m1))
        cands = [a, 0.5 * (a[1:] + a[:-1])]
        cands += [a + d for d in OFF_SURFACE_SHIFTS] + [a - d for d in OFF_SURFACE_SHIFTS]
        tau = np.concatenate(cands)
        vals = np.sum(japanese(tau[:, None] - a[None, :]) ** expo, axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best[0]:
            best = (float(vals[j]), float(tau[j]), m)
    val, tau0, m_best = best
    if refine and np.isfinite(val):
        m1 = _counting_range(m_best, lam)
        a = np.sort(sym(m1) + sym(m_best - m1))
        f = lambda t: -np.sum(japanese(t - a) ** expo)
        res = optimize.minimize_scalar(f, bounds=(tau0 - 1.0, tau0 + 1.0), method="bounded")
        if -res.fun > val:
            val, tau0 = float(-res.fun), float(res.x)
    grid = {
        "m_range": [m_lo, m_max],
        "tau": "phase sums, midpoints, shifts +-" + ",".join(str(d) for d in OFF_SURFACE_SHIFTS),
        "refine": "bounded scalar search within +-1 of the best grid point" if refine else "none",
    }
    return CountingScanReport(b, lam, m_max, val / (TWO_PI * lam), (tau0, m_best), grid)


# ---------------------------------------------------------------------------
# smoothing functional


def dyadic_blocks(n_max: float) -> list[int]:
    blocks, N = [1], 2
    while N / 2 <= n_max:
        blocks.append(N)
        N *= 2
    return blocks


def block_mask(n: np.ndarray, N: int) -> np.ndarray:
    """I_1 = {|n| <= 1}; I_N = {N/2 <= |n| <= 2N} for N >= 2."""
    a = np.abs(n)
    if N == 1:
        return a <= 1
    return (a >= N / 2) & (a <= 2 * N)


@dataclass(frozen=True)
class SmoothingSeries:
    times: np.ndarray
    values: np.ndarray
    blocks: dict[int, np.ndarray]


def smoothing_functional(traj: Trajectory) -> SmoothingSeries:
    """F(t) = lambda^-2 sup_m |n| ||u(t,m)|^2 - |u(0,m)|^2| and its dyadic block sums."""
    grid = traj.grid
    lam = grid.lam
    n = grid.wavenumbers
    diff = np.abs(np.abs(traj.coeffs) ** 2 - np.abs(traj.coeffs[0]) ** 2)
    weighted = np.abs(n)[None, :] * diff / lam**2
    values = weighted.max(axis=1)
    blocks = {N: weighted[:, block_mask(n, N)].sum(axis=1) for N in dyadic_blocks(float(np.max(np.abs(n))))}
    return SmoothingSeries(traj.times.copy(), values, blocks)


def linear_bound_fit(times: np.ndarray, values: np.ndarray, t_max: float = 0.01) -> dict:
    """Least-squares slope C through the origin on (0, t_max] and the worst ratio F / (C t)."""
    sel = (times > 0) & (times <= t_max + 1e-12)
    t, F = times[sel], values[sel]
    if t.size == 0:
        raise ValueError("no samples in (0, t_max]")
    C = float(np.sum(t * F) / np.sum(t * t))
    worst = float(np.max(F / (C * t))) if C > 0 else (0.0 if np.all(F == 0) else np.inf)
    return {"C": C, "worst_ratio": worst, "samples": int(t.size), "t_max": t_max}
