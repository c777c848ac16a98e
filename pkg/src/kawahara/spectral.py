"""
Fourier representation of fields on the rescaled torus T_lambda = R / (2 pi lambda Z).

Conventions (kept verbatim so every constant in the equation carries over):

- forward transform:  c(m) = integral over T_lambda of exp(-i n x) f(x) dx,  n = m / lambda
- inverse transform:  f(x) = (1 / (2 pi lambda)) * sum_m exp(i n x) c(m)
- Sobolev norm:       ||f||_{H^s} = ((1 / (2 pi lambda)) * sum_m <n>^{2s} |c(m)|^2)^{1/2}

Wavenumbers are carried as integer indices m with |m| <= M; the physical
wavenumber n = m / lambda is formed on demand.  Coefficient arrays are stored
in natural order m = -M, ..., M.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

TWO_PI = 2.0 * np.pi


def japanese(x: np.ndarray | float) -> np.ndarray | float:
    """Japanese bracket <x> = (1 + x^2)^{1/2}."""
    return np.sqrt(1.0 + np.square(x))


def min_fft_size(M: int, degree: int = 3) -> int:
    """Smallest FFT length that multiplies `degree` fields of band M without aliasing.

    A product of `degree` fields reaches wavenumber degree*M; its aliased images
    land at degree*M - G and stay outside |m| <= M as long as G >= (degree+1)*M + 1.
    """
    return sp_fft.next_fast_len((degree + 1) * M + 1)


@dataclass(frozen=True)
class TorusGrid:
    """Discretization of T_lambda with retained indices |m| <= M and FFT size G.

    Attributes:
        lam: Period parameter lambda >= 1; the torus has length 2 pi lambda.
        M: Largest retained integer index.
        G: Number of collocation points; must satisfy G >= 4M + 1 so cubic
            products are computed without aliasing. Defaults to a fast length.
    """

    lam: float
    M: int
    G: Optional[int] = None

    def __post_init__(self) -> None:
        if not np.isfinite(self.lam) or self.lam < 1.0:
            raise ValueError(f"lambda must be >= 1, got {self.lam}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "lam", float(self.lam))
        if self.G is None:
            object.__setattr__(self, "G", min_fft_size(self.M))
        if self.G < 4 * self.M + 1:
            raise ValueError(f"G={self.G} too small for dealiased cubic products (need >= {4 * self.M + 1})")

    @property
    def period(self) -> float:
        return TWO_PI * self.lam

    @property
    def size(self) -> int:
        """Number of retained coefficients, 2M + 1."""
        return 2 * self.M + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Physical wavenumbers n = m / lambda, in natural order."""
        return self.indices / self.lam

    @property
    def x(self) -> np.ndarray:
        """Collocation points x_j = 2 pi lambda j / G."""
        return self.period * np.arange(self.G) / self.G

    def index_position(self, m: int) -> int:
        """Position of index m inside a natural-order coefficient array."""
        if abs(m) > self.M:
            raise IndexError(f"index {m} outside retained range |m| <= {self.M}")
        return m + self.M

    def with_fft_size(self, G: int) -> "TorusGrid":
        return TorusGrid(self.lam, self.M, G)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def hermitian_part(coeffs: np.ndarray) -> np.ndarray:
    """Project natural-order coefficients onto the Hermitian (real-field) subspace."""
    c = np.asarray(coeffs, dtype=complex)
    return 0.5 * (c + np.conj(c[::-1]))


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients c(m), |m| <= M, of a field on T_lambda.

    When `realness` is set the coefficients are Hermitian, c(-m) = conj(c(m)),
    and the constructor symmetrizes away round-off so the symmetry is exact.
    """

    grid: TorusGrid
    coeffs: np.ndarray
    realness: bool = True

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("spectral coefficients must be finite")
        if self.realness:
            c = hermitian_part(c)
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.size, dtype=complex), True)

    @classmethod
    def from_modes(cls, grid: TorusGrid, modes: dict[int, complex], realness: bool = True) -> "SpectralField":
        """Build a field from {m: c(m)}; for real fields the conjugate partners are filled in."""
        c = np.zeros(grid.size, dtype=complex)
        for m, val in modes.items():
            c[grid.index_position(m)] = val
            if realness and m != 0:
                c[grid.index_position(-m)] = np.conj(val)
        return cls(grid, c, realness)

    def coefficient(self, m: int) -> complex:
        return complex(self.coeffs[self.grid.index_position(m)])

    def with_coeffs(self, coeffs: np.ndarray, realness: Optional[bool] = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs, self.realness if realness is None else realness)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, self.realness and other.realness)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, self.realness and other.realness)

    def scale(self, c: float) -> "SpectralField":
        return SpectralField(self.grid, c * self.coeffs, self.realness)


@dataclass(frozen=True)
class PhysicalField:
    """Samples f(x_j) on the collocation points of a grid."""

    grid: TorusGrid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        s = np.asarray(self.samples)
        if s.shape != (self.grid.G,):
            raise ValueError(f"sample count {s.shape} does not match grid size G={self.grid.G}")
        object.__setattr__(self, "samples", _frozen(s))

    @classmethod
    def from_function(cls, grid: TorusGrid, f) -> "PhysicalField":
        return cls(grid, f(grid.x))


def _check_same_grid(a: SpectralField, b: SpectralField) -> None:
    if a.grid.lam != b.grid.lam or a.grid.M != b.grid.M:
        raise ValueError("fields live on different grids")


def to_fft_order(coeffs: np.ndarray, M: int, G: int) -> np.ndarray:
    """Scatter natural-order coefficients (m = -M..M) into a length-G FFT buffer."""
    out = np.zeros(coeffs.shape[:-1] + (G,), dtype=complex)
    out[..., : M + 1] = coeffs[..., M:]
    out[..., G - M :] = coeffs[..., :M]
    return out


def from_fft_order(buf: np.ndarray, M: int) -> np.ndarray:
    """Gather indices |m| <= M from a length-G FFT buffer into natural order."""
    return np.concatenate([buf[..., buf.shape[-1] - M :], buf[..., : M + 1]], axis=-1)


def coeffs_to_samples(coeffs: np.ndarray, grid: TorusGrid, G: Optional[int] = None) -> np.ndarray:
    """Evaluate (1/(2 pi lambda)) sum_m exp(i n x_j) c(m) on G points (batched over leading axes)."""
    G = grid.G if G is None else G
    buf = to_fft_order(coeffs, grid.M, G)
    return sp_fft.ifft(buf, axis=-1) * (G / grid.period)


def samples_to_coeffs(samples: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Trapezoid rule for c(m) = integral exp(-i n x) f dx, retaining |m| <= M."""
    G = samples.shape[-1]
    buf = sp_fft.fft(samples, axis=-1) * (grid.period / G)
    return from_fft_order(buf, grid.M)


def forward_transform(f: PhysicalField) -> SpectralField:
    """Fourier coefficients of a band-limited physical field."""
    samples = np.asarray(f.samples)
    if samples.shape != (f.grid.G,):
        raise ValueError("sample count does not match grid")
    real = not np.iscomplexobj(samples)
    return SpectralField(f.grid, samples_to_coeffs(samples, f.grid), realness=real)


def inverse_transform(u: SpectralField) -> PhysicalField:
    """Physical samples of a spectral field; real-valued when the field is real."""
    samples = coeffs_to_samples(u.coeffs, u.grid)
    if u.realness:
        samples = samples.real
    return PhysicalField(u.grid, samples)


def sobolev_norm(u: SpectralField, s: float) -> float:
    """Inhomogeneous H^s_lambda norm with the (2 pi lambda)^{-1} weighted sum."""
    w = japanese(u.grid.wavenumbers) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(u.coeffs) ** 2) / u.grid.period))


def dot_sobolev_norm(u: SpectralField, s: float) -> float:
    """Homogeneous H^s_lambda norm; the m = 0 mode is skipped."""
    n = u.grid.wavenumbers
    keep = n != 0
    w = np.abs(n[keep]) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(u.coeffs[keep]) ** 2) / u.grid.period))


def l2_inner(u: SpectralField, v: SpectralField) -> complex:
    """(1/(2 pi lambda)) sum_m u(m) conj(v(m)), equal to the integral of u conj(v) by Parseval."""
    _check_same_grid(u, v)
    return complex(np.sum(u.coeffs * np.conj(v.coeffs)) / u.grid.period)


def rescale(u: SpectralField, lam: float) -> SpectralField:
    """Map a field on T_1 to T_lambda by v_lambda(x) = lambda^{-2} v(x / lambda).

    The physical wavenumber m on T_1 becomes m / lambda on T_lambda, which is
    still index m, and the coefficient picks up lambda^{-1}.
    """
    if lam < 1.0:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    if u.grid.lam != 1.0:
        raise ValueError("rescale expects a field on the lambda = 1 torus")
    grid = TorusGrid(lam, u.grid.M, u.grid.G)
    return SpectralField(grid, u.coeffs / lam, u.realness)


def unscale(u: SpectralField) -> SpectralField:
    """Inverse of `rescale`: bring a field on T_lambda back to T_1."""
    lam = u.grid.lam
    grid = TorusGrid(1.0, u.grid.M, u.grid.G)
    return SpectralField(grid, u.coeffs * lam, u.realness)


def random_real_field(
    grid: TorusGrid,
    rng: np.random.Generator,
    *,
    decay: float = 0.0,
    n_max: Optional[float] = None,
    zero_mean: bool = False,
) -> SpectralField:
    """Random real field with |c(m)| ~ <n>^{-decay} times a complex Gaussian.

    Modes with |n| > n_max are left empty, so `n_max` fixes a physical band
    independent of lambda.
    """
    n = grid.wavenumbers
    amp = japanese(n) ** (-decay)
    z = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    c = amp * z
    if n_max is not None:
        c[np.abs(n) > n_max] = 0.0
    if zero_mean:
        c[grid.M] = 0.0
    return SpectralField(grid, c, True)
