"""
Right-hand sides, resonant splitting, gauge map and conserved quantities.

The cubic term in Fourier variables is

    N(n) = (mu i / (3 (2 pi lambda)^2)) n sum_{n1+n2+n3=n} u(n1) u(n2) u(n3),

which is (mu/3) d_x(v^3) in physical space.  Its resonant part splits as
R1 + R2 with

    R1(n) = -(mu i / (2 pi lambda)^2) n |u(n)|^2 u(n)
    R2(n) = +(mu i / (2 pi lambda)) n ||u||_{L^2}^2 u(n)

and the rest, NR, only sees triples with (n1+n2)(n2+n3)(n3+n1) != 0.
R2 is a rotation at a rate proportional to the conserved mass; moving it into
the linear symbol gives p_0 = p_* + mu ||v_0||^2 n / (2 pi lambda).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from .spectral import SpectralField, TorusGrid, TWO_PI, min_fft_size
from .symbols import DispersionParams, PhaseKind, PhaseSymbol


class FormKind(Enum):
    FULL = "full"
    WICK_ORDERED = "wick_ordered"
    DATA_RENORMALIZED = "data_renormalized"
    GAUGED = "gauged"


_SYMBOL_KIND = {
    FormKind.FULL: PhaseKind.BARE,
    FormKind.GAUGED: PhaseKind.BARE,
    FormKind.WICK_ORDERED: PhaseKind.MASS_CORRECTED,
    FormKind.DATA_RENORMALIZED: PhaseKind.DATA_CORRECTED,
}


@dataclass(frozen=True)
class EvolutionForm:
    """An equation formulation together with the linear symbol it propagates.

    FULL evolves the original equation (linear symbol p_*).  WICK_ORDERED moves
    the mass rotation into p_0; DATA_RENORMALIZED additionally moves the
    initial-data part of R1 into p_lambda.  GAUGED is the translated variable
    obtained from FULL by `gauge_transform` (linear symbol p_*, nonlinearity
    R1 + NR).  The three corrected forms evolve the same variable as FULL.
    """

    kind: FormKind
    params: DispersionParams
    symbol: PhaseSymbol

    @classmethod
    def build(cls, kind: FormKind | str, params: DispersionParams, u0: SpectralField) -> "EvolutionForm":
        kind = FormKind(kind)
        return cls(kind, params, PhaseSymbol.from_data(_SYMBOL_KIND[kind], params, u0))

    @classmethod
    def full(cls, params: DispersionParams, lam: float = 1.0) -> "EvolutionForm":
        return cls(FormKind.FULL, params, PhaseSymbol.bare(params, lam))

    @property
    def lam(self) -> float:
        return self.symbol.lam


@dataclass(frozen=True)
class State:
    field: SpectralField
    t: float = 0.0

    def __post_init__(self) -> None:
        if not self.field.realness:
            raise ValueError("evolution states must be real fields")


# ---------------------------------------------------------------------------
# half-spectrum kernels: real fields are carried as c(m), m = 0..M


def half(coeffs: np.ndarray, M: int) -> np.ndarray:
    return np.array(coeffs[M:], dtype=complex)


def full_from_half(h: np.ndarray) -> np.ndarray:
    return np.concatenate([np.conj(h[:0:-1]), h])


class CubicKernel:
    """Dealiased evaluation of the cubic term on half spectra of real fields."""

    def __init__(self, grid: TorusGrid, params: DispersionParams):
        self.grid = grid
        self.M = grid.M
        self.G = grid.G
        self.period = grid.period
        self.n = np.arange(self.M + 1) / grid.lam
        self.mu = params.mu_eff
        self._to_x = self.G / self.period
        self._to_k = self.period / self.G

    def samples(self, h: np.ndarray) -> np.ndarray:
        buf = np.zeros(self.G // 2 + 1, dtype=complex)
        buf[: self.M + 1] = h
        return sp_fft.irfft(buf, n=self.G) * self._to_x

    def cube_coeffs(self, h: np.ndarray) -> np.ndarray:
        """Fourier coefficients of v^3 for m = 0..M."""
        v = self.samples(h)
        return sp_fft.rfft(v * v * v)[: self.M + 1] * self._to_k

    def full(self, h: np.ndarray) -> np.ndarray:
        if self.mu == 0.0:
            return np.zeros_like(h)
        return (1j * self.mu / 3.0) * self.n * self.cube_coeffs(h)

    def mass(self, h: np.ndarray) -> float:
        """||u||^2 in L^2(T_lambda) from the half spectrum."""
        a = np.abs(h) ** 2
        return float((a[0] + 2.0 * np.sum(a[1:])) / self.period)

    def r1(self, h: np.ndarray) -> np.ndarray:
        return -(1j * self.mu / self.period**2) * self.n * np.abs(h) ** 2 * h

    def r2(self, h: np.ndarray) -> np.ndarray:
        return (1j * self.mu / self.period) * self.n * self.mass(h) * h

    def nonresonant(self, h: np.ndarray) -> np.ndarray:
        return self.full(h) - self.r1(h) - self.r2(h)


class FormKernel:
    """Nonlinear part N(u) = rhs(u) - i p(n) u of an evolution form, on half spectra."""

    def __init__(self, grid: TorusGrid, form: EvolutionForm):
        if form.lam != grid.lam:
            raise ValueError(f"form built for lambda={form.lam} used on grid lambda={grid.lam}")
        self.grid = grid
        self.form = form
        self.cubic = CubicKernel(grid, form.params)
        self.phase = np.asarray(form.symbol(np.arange(grid.M + 1)), dtype=float)
        if form.kind is FormKind.DATA_RENORMALIZED:
            self.d0 = np.asarray(form.symbol.modulus(np.arange(grid.M + 1)), dtype=float)

    def nonlinear(self, h: np.ndarray) -> np.ndarray:
        c = self.cubic
        kind = self.form.kind
        if c.mu == 0.0:
            return np.zeros_like(h)
        if kind is FormKind.FULL:
            return c.full(h)
        if kind in (FormKind.WICK_ORDERED, FormKind.GAUGED):
            return c.full(h) - c.r2(h)
        # DATA_RENORMALIZED: reduced resonant term plus NR
        red = -(1j * c.mu / c.period**2) * c.n * (np.abs(h) ** 2 - self.d0) * h
        return red + c.full(h) - c.r1(h) - c.r2(h)

    def rhs(self, h: np.ndarray) -> np.ndarray:
        return 1j * self.phase * h + self.nonlinear(h)


# ---------------------------------------------------------------------------
# public operations on SpectralField


def _require_real(u: SpectralField) -> None:
    if not u.realness:
        raise ValueError("operation requires a real field")


def _wrap(u: SpectralField, h: np.ndarray) -> SpectralField:
    return SpectralField(u.grid, full_from_half(h), True)


def nonlinearity_full(u: SpectralField, params: DispersionParams) -> SpectralField:
    """(mu i / (3 (2 pi lambda)^2)) n sum u u u over retained modes, dealiased."""
    _require_real(u)
    k = CubicKernel(u.grid, params)
    return _wrap(u, k.full(half(u.coeffs, u.grid.M)))


def split_resonant(
    u: SpectralField, params: DispersionParams
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """(R1, R2, NR) with R1 + R2 + NR equal to the full cubic term."""
    _require_real(u)
    k = CubicKernel(u.grid, params)
    h = half(u.coeffs, u.grid.M)
    r1, r2 = k.r1(h), k.r2(h)
    nr = k.full(h) - r1 - r2
    return _wrap(u, r1), _wrap(u, r2), _wrap(u, nr)


def rhs(state: State, form: EvolutionForm) -> SpectralField:
    """Time derivative of the Fourier coefficients under `form`."""
    u = state.field
    kern = FormKernel(u.grid, form)
    return _wrap(u, kern.rhs(half(u.coeffs, u.grid.M)))


def gauge_transform(
    v: State, v0_mass: float, direction: str = "forward", params: Optional[DispersionParams] = None
) -> State:
    """Translate away the mass rotation: u(m) -> exp(-/+ i mu t n v0_mass) u(m).

    `v0_mass` is the mean of |v_0|^2 over the torus, i.e. ||v_0||_{L^2}^2 / (2 pi lambda).
    The forward map sends a FULL solution to the GAUGED variable; `inverse`
    undoes it.
    """
    params = params or DispersionParams()
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be 'forward' or 'inverse'")
    sign = -1.0 if direction == "forward" else 1.0
    u = v.field
    h = half(u.coeffs, u.grid.M)
    n = np.arange(u.grid.M + 1) / u.grid.lam
    rot = np.exp(sign * 1j * params.mu_eff * v.t * v0_mass * n)
    return State(_wrap(u, rot * h), v.t)


def mass_mean(u: SpectralField) -> float:
    """Mean of |u|^2 over the torus."""
    return float(np.sum(np.abs(u.coeffs) ** 2) / u.grid.period**2)


def conserved_E(u: SpectralField) -> float:
    """Integral of v, i.e. the zero mode."""
    _require_real(u)
    return float(u.coefficient(0).real)


def conserved_M(u: SpectralField) -> float:
    """(1/2) integral of v^2."""
    _require_real(u)
    return 0.5 * float(np.sum(np.abs(u.coeffs) ** 2) / u.grid.period)


def _quartic_integral(u: SpectralField) -> float:
    G = min_fft_size(u.grid.M, degree=4)
    buf = np.zeros(G // 2 + 1, dtype=complex)
    buf[: u.grid.M + 1] = u.coeffs[u.grid.M :]
    v = sp_fft.irfft(buf, n=G) * (G / u.grid.period)
    return float(np.sum(v**4) * u.grid.period / G)


def conserved_H(u: SpectralField, params: DispersionParams) -> float:
    """(1/2)|v_xx|^2 + (beta/2)|v_x|^2 - (gamma/2)|v|^2 + (mu/12) integral v^4.

    beta and gamma carry the lambda^-2 and lambda^-4 of the rescaled equation.
    """
    _require_real(u)
    lam = u.grid.lam
    n = u.grid.wavenumbers
    a = np.abs(u.coeffs) ** 2 / u.grid.period
    quad = 0.5 * np.sum(n**4 * a) + 0.5 * (params.beta / lam**2) * np.sum(n**2 * a)
    quad -= 0.5 * (params.gamma / lam**4) * np.sum(a)
    return float(quad + params.mu_eff / 12.0 * _quartic_integral(u))


def hamiltonian_gradient(u: SpectralField, params: DispersionParams) -> SpectralField:
    """L^2 gradient d_x^4 v - beta d_x^2 v - gamma v + (mu/3) v^3, in Fourier form."""
    _require_real(u)
    lam = u.grid.lam
    n = np.arange(u.grid.M + 1) / lam
    k = CubicKernel(u.grid, params)
    h = half(u.coeffs, u.grid.M)
    lin = (n**4 + (params.beta / lam**2) * n**2 - params.gamma / lam**4) * h
    return _wrap(u, lin + (params.mu_eff / 3.0) * k.cube_coeffs(h))


def symplectic_form(v: SpectralField, w: SpectralField) -> float:
    """omega(v, w) = integral of v times the mean-zero antiderivative of w."""
    _require_real(v)
    _require_real(w)
    for f in (v, w):
        if abs(f.coefficient(0)) > 1e-12 * (1.0 + np.max(np.abs(f.coeffs))):
            raise ValueError("symplectic form needs mean-zero fields")
    n = v.grid.wavenumbers
    keep = n != 0
    anti = np.zeros_like(w.coeffs)
    anti[keep] = w.coeffs[keep] / (1j * n[keep])
    return float(np.real(np.sum(v.coeffs * np.conj(anti))) / v.grid.period)


def smoothing_value(h: np.ndarray, h0: np.ndarray, lam: float) -> float:
    """(1/lambda^2) max_m |m/lambda| * ||u(m)|^2 - |u_0(m)|^2| on half spectra."""
    n = np.arange(h.size) / lam
    return float(np.max(n * np.abs(np.abs(h) ** 2 - np.abs(h0) ** 2)) / lam**2)
