"""
Dispersion phases, resonance functions and the trilinear multiplier.

Every symbol lives on T_lambda with the coefficients of the rescaled equation,

    p_*(n) = n^5 + beta lambda^-2 n^3 - gamma lambda^-4 n,      n = m / lambda,

so that lambda^5 p_*(m / lambda) = m^5 + beta m^3 - gamma m is an integer
polynomial in the index.  Resonance identities are checked on these cleared
quantities with `fractions.Fraction`, floating-point paths use `math.fsum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional

import numpy as np

from .spectral import SpectralField, TWO_PI, japanese


@dataclass(frozen=True)
class DispersionParams:
    """Coefficients of the equation on the unit torus.

    Attributes:
        beta: third-order dispersion coefficient, >= 0.
        gamma: first-order coefficient.
        mu: sign of the cubic term, +1 (focusing) or -1 (defocusing).
        eps: nonlinearity scale; 1 in production, 0 switches the cubic term off.
    """

    beta: float = 0.0
    gamma: float = 0.0
    mu: int = 1
    eps: float = 1.0

    def __post_init__(self) -> None:
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.mu not in (1, -1):
            raise ValueError(f"mu must be +1 or -1, got {self.mu}")
        if not (math.isfinite(self.gamma) and math.isfinite(self.eps)):
            raise ValueError("gamma and eps must be finite")

    @property
    def mu_eff(self) -> float:
        """Coefficient actually multiplying the cubic term."""
        return self.mu * self.eps


class PhaseKind(Enum):
    BARE = "bare"
    MASS_CORRECTED = "mass_corrected"
    DATA_CORRECTED = "data_corrected"


@dataclass(frozen=True)
class PhaseSymbol:
    """One of p_*, p_0 or p_lambda on a given torus.

    `mass` is ||v_0||^2 in L^2(T_lambda); `moduli` holds |v_0(m)|^2 for
    |m| <= moduli_M in natural order (DataCorrected only).
    """

    kind: PhaseKind
    params: DispersionParams
    lam: float = 1.0
    mass: float = 0.0
    moduli: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.mass < 0 or not math.isfinite(self.mass):
            raise ValueError("mass must be a finite non-negative number")
        if (self.moduli is not None) != (self.kind is PhaseKind.DATA_CORRECTED):
            raise ValueError("data moduli are present exactly for the DataCorrected kind")
        if self.moduli is not None:
            d = np.asarray(self.moduli, dtype=float)
            if d.ndim != 1 or d.size % 2 != 1 or np.any(d < 0):
                raise ValueError("moduli must be a non-negative array of odd length")
            d = 0.5 * (d + d[::-1])
            d.setflags(write=False)
            object.__setattr__(self, "moduli", d)

    # constructors -----------------------------------------------------------
    @classmethod
    def bare(cls, params: DispersionParams, lam: float = 1.0) -> "PhaseSymbol":
        return cls(PhaseKind.BARE, params, lam)

    @classmethod
    def mass_corrected(cls, params: DispersionParams, lam: float, mass: float) -> "PhaseSymbol":
        return cls(PhaseKind.MASS_CORRECTED, params, lam, mass)

    @classmethod
    def data_corrected(
        cls, params: DispersionParams, lam: float, mass: float, data_moduli: Mapping[int, float]
    ) -> "PhaseSymbol":
        K = max((abs(int(m)) for m in data_moduli), default=0)
        d = np.zeros(2 * K + 1)
        for m, val in data_moduli.items():
            d[int(m) + K] = val
        return cls(PhaseKind.DATA_CORRECTED, params, lam, mass, d)

    @classmethod
    def from_data(cls, kind: PhaseKind, params: DispersionParams, u0: SpectralField) -> "PhaseSymbol":
        """Symbol of the requested kind built from the initial datum u0."""
        lam = u0.grid.lam
        if kind is PhaseKind.BARE:
            return cls.bare(params, lam)
        mass = float(np.sum(np.abs(u0.coeffs) ** 2) / u0.grid.period)
        if kind is PhaseKind.MASS_CORRECTED:
            return cls.mass_corrected(params, lam, mass)
        return cls(kind, params, lam, mass, np.abs(u0.coeffs) ** 2)

    @property
    def data_moduli(self) -> dict[int, float]:
        if self.moduli is None:
            return {}
        K = self.moduli.size // 2
        return {m - K: float(v) for m, v in enumerate(self.moduli) if v != 0.0}

    # evaluation -------------------------------------------------------------
    def bare_phase(self, m: np.ndarray | int) -> np.ndarray | float:
        lam = self.lam
        n = np.asarray(m, dtype=float) / lam
        p = self.params
        return n**5 + (p.beta / lam**2) * n**3 - (p.gamma / lam**4) * n

    def correction(self, m: np.ndarray | int) -> np.ndarray | float:
        """phase(m) - bare_phase(m): first-order terms coming from the data."""
        m_arr = np.asarray(m)
        n = m_arr.astype(float) / self.lam
        if self.kind is PhaseKind.BARE:
            return np.zeros_like(n)
        period = TWO_PI * self.lam
        corr = self.params.mu_eff * self.mass * n / period
        if self.kind is PhaseKind.DATA_CORRECTED:
            corr = corr - self.params.mu_eff * n * self.modulus(m_arr) / period**2
        return corr

    def modulus(self, m: np.ndarray | int) -> np.ndarray | float:
        """|v_0(m)|^2, reading indices outside the stored range as zero."""
        m_arr = np.asarray(m, dtype=int)
        if self.moduli is None:
            return np.zeros(m_arr.shape)
        K = self.moduli.size // 2
        inside = np.abs(m_arr) <= K
        out = np.zeros(m_arr.shape)
        out[inside] = self.moduli[m_arr[inside] + K]
        return out if out.ndim else float(out)

    def __call__(self, m: np.ndarray | int) -> np.ndarray | float:
        return self.bare_phase(m) + self.correction(m)


def phase(sym: PhaseSymbol, m: int) -> float:
    """Dispersion phase of `sym` at index m (physical wavenumber m / lambda)."""
    return float(sym(m))


def phase_difference(a: PhaseSymbol, b: PhaseSymbol, m: np.ndarray | int) -> np.ndarray | float:
    """a(m) - b(m), computed from the corrections when the bare parts coincide.

    The bare quintic dominates both phases, so subtracting full phases would
    throw away most of the digits of a small correction difference.
    """
    if a.params.beta == b.params.beta and a.params.gamma == b.params.gamma and a.lam == b.lam:
        return a.correction(m) - b.correction(m)
    return a(m) - b(m)


@dataclass(frozen=True)
class FrequencyTriple:
    """Interacting indices (m1, m2, m3) producing m = m1 + m2 + m3."""

    m1: int
    m2: int
    m3: int
    lam: float = 1.0

    @property
    def m(self) -> int:
        return self.m1 + self.m2 + self.m3

    @property
    def indices(self) -> tuple[int, int, int]:
        return (self.m1, self.m2, self.m3)

    @property
    def physical(self) -> tuple[float, float, float, float]:
        lam = self.lam
        return (self.m1 / lam, self.m2 / lam, self.m3 / lam, self.m / lam)

    @property
    def pair_product(self) -> int:
        """(m1+m2)(m2+m3)(m3+m1); zero exactly on the resonant set."""
        return (self.m1 + self.m2) * (self.m2 + self.m3) * (self.m3 + self.m1)

    def is_resonant(self) -> bool:
        return self.pair_product == 0


def _exact(x: float | Fraction) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def scaled_resonance_direct(
    m1: int, m2: int, m3: int, beta: float | Fraction = 0, gamma: float | Fraction = 0, lam: float | Fraction = 1
) -> Fraction:
    """lambda^5 H_* by direct difference of the symbols, in exact rational arithmetic."""
    L = _exact(lam)
    b, g = _exact(beta), _exact(gamma)

    def p(m: int) -> Fraction:
        n = Fraction(m) / L
        return n**5 + b / L**2 * n**3 - g / L**4 * n

    m = m1 + m2 + m3
    return L**5 * (p(m) - p(m1) - p(m2) - p(m3))


def scaled_resonance_factored(
    m1: int, m2: int, m3: int, beta: float | Fraction = 0, lam: float | Fraction = 1
) -> Fraction:
    """lambda^5 times (5/2)(n1+n2)(n2+n3)(n3+n1)(n1^2+n2^2+n3^2+n^2 + (6/5) beta lambda^-2)."""
    L = _exact(lam)
    b = _exact(beta)
    m = m1 + m2 + m3
    pairs = Fraction((m1 + m2) * (m2 + m3) * (m3 + m1)) / L**3
    squares = Fraction(m1 * m1 + m2 * m2 + m3 * m3 + m * m) / L**2
    return L**5 * Fraction(5, 2) * pairs * (squares + Fraction(6, 5) * b / L**2)


def factorization_audit(box: int, beta: int, gamma: int) -> int:
    """Count violations of 2 lambda^5 H = prod(pair sums) (5 sum m^2 + 6 beta) over |mj| <= box.

    Integer-coefficient version of the identity for whole-array checking: with
    integer beta and gamma both sides are int64 integers (lambda cancels from
    the cleared form), so the comparison is exact.
    """
    r = np.arange(-box, box + 1, dtype=np.int64)
    m1, m2, m3 = np.meshgrid(r, r, r, indexing="ij")
    m = m1 + m2 + m3

    def p(x):
        return x**5 + beta * x**3 - gamma * x

    direct = 2 * (p(m) - p(m1) - p(m2) - p(m3))
    factored = (m1 + m2) * (m2 + m3) * (m3 + m1) * (5 * (m1**2 + m2**2 + m3**2 + m**2) + 6 * beta)
    return int(np.count_nonzero(direct != factored))


def resonance_H(t: FrequencyTriple, sym: PhaseSymbol) -> float:
    """phase(m) - phase(m1) - phase(m2) - phase(m3).

    For Bare and MassCorrected symbols the first-order terms cancel, so the
    value is computed exactly from the cleared integers and checked against
    the factored form before being returned as a float.
    """
    if sym.kind is PhaseKind.DATA_CORRECTED:
        terms = [phase(sym, t.m)] + [-phase(sym, mj) for mj in t.indices]
        return math.fsum(terms)
    p = sym.params
    direct = scaled_resonance_direct(t.m1, t.m2, t.m3, p.beta, p.gamma, sym.lam)
    factored = scaled_resonance_factored(t.m1, t.m2, t.m3, p.beta, sym.lam)
    if direct != factored:
        raise ArithmeticError(f"factorization identity failed at {t.indices}")
    return float(direct / _exact(sym.lam) ** 5)


def resonance_H_factored(t: FrequencyTriple, beta: float, lam: float = 1.0) -> float:
    """Factored form (5/2)(n1+n2)(n2+n3)(n3+n1)(n1^2+n2^2+n3^2+n^2 + (6/5) beta lambda^-2)."""
    n1, n2, n3, n = t.physical
    return 2.5 * (n1 + n2) * (n2 + n3) * (n3 + n1) * (n1**2 + n2**2 + n3**2 + n**2 + 1.2 * beta / lam**2)


def quintic_resonance(
    t_outer: tuple[int, int, int], t_inner: tuple[int, int, int], sym: PhaseSymbol
) -> float:
    """Quintic phase mismatch after substituting the cubic interaction inside m1.

    With m1 = m - m2 - m3 split as m11 + m12 + m13, returns
    phase(m) - phase(m2) - phase(m3) - phase(m11) - phase(m12) - phase(m13).
    """
    m2, m3, m = t_outer
    m1 = m - m2 - m3
    if sum(t_inner) != m1:
        raise ValueError(f"inner triple {t_inner} does not sum to m1 = {m1}")
    terms = [phase(sym, m), -phase(sym, m2), -phase(sym, m3)]
    terms += [-phase(sym, mj) for mj in t_inner]
    return math.fsum(terms)


def sextic_family(N: int, a: int, b: int) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """Degenerate quintic configuration: returns ((m2, m3, m), (m11, m12, m13))."""
    m2, m3 = -N - a - b, N + b
    inner = (N + a + b, -N - b, N)
    m = (N + a) + m2 + m3
    return (m2, m3, m), inner


def multiplier_M(t: FrequencyTriple, s: float, b: float, delta: float) -> float:
    """Trilinear multiplier |n|<n>^s prod <n_j>^-s / (|pair sums| n_*^2)^(1-b-2 delta)."""
    if t.is_resonant():
        raise ValueError(f"multiplier undefined on the resonant triple {t.indices}")
    n1, n2, n3, n = t.physical
    return float(_multiplier(np.array([n1]), np.array([n2]), np.array([n3]), s, b, delta)[0])


def _multiplier(n1, n2, n3, s, b, delta):
    n = n1 + n2 + n3
    nstar = np.maximum(np.maximum(np.abs(n1), np.abs(n2)), np.maximum(np.abs(n3), np.abs(n)))
    num = np.abs(n) * japanese(n) ** s * (japanese(n1) * japanese(n2) * japanese(n3)) ** (-s)
    den = np.abs(n1 + n2) * np.abs(n2 + n3) * np.abs(n3 + n1) * nstar**2
    return num / den ** (1.0 - b - 2.0 * delta)


def enumerate_nonresonant(m: int, M_max: int, lam: float = 1.0) -> list[FrequencyTriple]:
    """All (m1, m2, m3) in the box |mj| <= M_max with sum m and no cancelling pair."""
    if M_max < 1:
        raise ValueError("M_max must be >= 1")
    m1, m2, m3 = nonresonant_arrays(m, M_max)
    return [FrequencyTriple(int(a), int(b), int(c), lam) for a, b, c in zip(m1, m2, m3)]


def nonresonant_arrays(m: int, M_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized `enumerate_nonresonant`: index arrays in lexicographic order."""
    r = np.arange(-M_max, M_max + 1)
    m1, m2 = np.meshgrid(r, r, indexing="ij")
    m1, m2 = m1.ravel(), m2.ravel()
    m3 = m - m1 - m2
    keep = (np.abs(m3) <= M_max) & ((m1 + m2) != 0) & ((m2 + m3) != 0) & ((m3 + m1) != 0)
    return m1[keep], m2[keep], m3[keep]


# ---------------------------------------------------------------------------
# case bounds for the non-resonant multiplier


class Region(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"


@dataclass(frozen=True)
class AdmissibleWindow:
    """delta_max(s) and the half-open b window [1/2, b_max(s, delta)) of one region."""

    s_min: float
    delta_slope: float
    b_top: float
    b_slope: float

    def delta_max(self, s: float) -> float:
        return min((self.delta_slope * s + 1.0) / 20.0, 1.0 / 20.0)

    def b_max(self, s: float, delta: float) -> float:
        return self.b_top - 2.0 * delta + min(self.b_slope * s, 0.0)

    def check(self, s: float, b: float, delta: float) -> None:
        if s <= self.s_min:
            raise ValueError(f"s={s} below the admissible threshold {self.s_min}")
        if not 0.0 < delta <= self.delta_max(s) + 1e-15:
            raise ValueError(f"delta={delta} outside (0, {self.delta_max(s)}]")
        if not 0.5 <= b < self.b_max(s, delta):
            raise ValueError(f"b={b} outside [1/2, {self.b_max(s, delta)})")


WINDOWS: dict[Region, AdmissibleWindow] = {
    Region.I: AdmissibleWindow(-0.25, 4.0, 5.0 / 8.0, 0.5),
    Region.II: AdmissibleWindow(-0.5, 2.0, 0.7, 0.4),
    Region.III: AdmissibleWindow(-1.0 / 3.0, 3.0, 0.7, 0.6),
    Region.IV: AdmissibleWindow(-0.5, 2.0, 0.7, 0.4),
    Region.V: AdmissibleWindow(-1.0 / 3.0, 3.0, 0.7, 0.6),
}


@dataclass(frozen=True)
class CaseBoundReport:
    region: str
    s: float
    b: float
    delta: float
    lam: float
    M_max: int
    max_ratio: Optional[float]
    argmax_triple: Optional[tuple[int, int, int]]
    count: int
    varsigma: float

    @property
    def empty(self) -> bool:
        return self.count == 0

    @property
    def passed(self) -> bool:
        return self.max_ratio is not None and self.max_ratio <= 1.0 + 1e-9

    def to_json(self) -> dict:
        return {
            "region": self.region,
            "s": self.s,
            "b": self.b,
            "delta": self.delta,
            "lambda": self.lam,
            "M_max": self.M_max,
            "max_ratio": self.max_ratio,
            "argmax_triple": list(self.argmax_triple) if self.argmax_triple else None,
            "count": self.count,
            "varsigma": self.varsigma,
        }


def classify_regions(n1: np.ndarray, n2: np.ndarray, n3: np.ndarray):
    """Region labels and the pair sum entering each region's bound.

    A frequency is high when |n_j| >= n_*/2 and low otherwise, which splits the
    configurations with n_* > 1 into the five patterns (plus two patterns the
    case analysis never meets, labelled None).  Returns (labels, q) where
    labels is an object array of Region or None.
    """
    n = n1 + n2 + n3
    a = np.abs(np.stack([n1, n2, n3]))
    nstar = np.maximum(a.max(axis=0), np.abs(n))
    hi = a >= nstar / 2.0
    n_hi = np.abs(n) >= nstar / 2.0
    k = hi.sum(axis=0)
    pairs = np.abs(np.stack([n1 + n2, n2 + n3, n3 + n1]))  # pair (0,1), (1,2), (2,0)
    min_pair = pairs.min(axis=0)

    # pair sums containing index j: j=0 -> pairs 0, 2; j=1 -> 0, 1; j=2 -> 1, 2
    with_j = np.array([[0, 2], [0, 1], [1, 2]])
    # the pair made of the two indices other than j
    without_j = np.array([1, 2, 0])
    cols = np.arange(n.size)

    labels = np.full(n.size, None, dtype=object)
    q = np.full(n.size, np.nan)

    m = (k == 3) & n_hi
    labels[m], q[m] = Region.I, min_pair[m]
    m = (k == 3) & ~n_hi
    labels[m], q[m] = Region.III, min_pair[m]

    lo_idx = np.argmin(hi, axis=0)  # first low index (meaningful when k == 2)
    m = (k == 2) & n_hi
    pj = with_j[lo_idx]
    q_ii = np.minimum(pairs[pj[:, 0], cols], pairs[pj[:, 1], cols])
    labels[m], q[m] = Region.II, q_ii[m]
    m = (k == 2) & ~n_hi
    q_v = pairs[without_j[lo_idx], cols]
    labels[m], q[m] = Region.V, q_v[m]

    hi_idx = np.argmax(hi, axis=0)  # the single high index when k == 1
    m = (k == 1) & n_hi
    q_iv = pairs[without_j[hi_idx], cols]
    labels[m], q[m] = Region.IV, q_iv[m]

    labels[nstar <= 1.0] = None
    return labels, q, nstar


def region_bound(region: Region, q, nstar, s: float, b: float, delta: float, lam: float):
    """Right-hand side of the region's multiplier bound."""
    e = 1.0 - b - 2.0 * delta
    if region is Region.I:
        return lam**e / q ** (3.0 - 4.0 * b - 8.0 * delta + 2.0 * s)
    if region is Region.II:
        return 1.0 / q ** (5.0 * e - 1.0 + (s if s >= 0 else 2.0 * s))
    if region is Region.III:
        return 1.0 / q ** (5.0 * e - 1.0 + (2.0 * s if s >= 0 else 3.0 * s))
    if region is Region.IV:
        return 1.0 / (q**e * nstar ** (4.0 * e - 1.0 + (0.0 if s >= 0 else 2.0 * s)))
    return 1.0 / (q**e * nstar ** (4.0 * e - 1.0 + (s if s >= 0 else 3.0 * s)))


def case_bound_scan(
    regions: Iterable[Region], s: float, b: float, delta: float, lam: float, M_max: int
) -> dict[Region, CaseBoundReport]:
    """Exhaustive ratio multiplier / bound over the box |m1|,|m2|,|m3|,|m| <= M_max."""
    regions = [Region(r) for r in regions]
    for r in regions:
        WINDOWS[r].check(s, b, delta)
    best = {r: (-np.inf, None) for r in regions}
    count = {r: 0 for r in regions}
    rng = np.arange(-M_max, M_max + 1)
    m2g, m3g = np.meshgrid(rng, rng, indexing="ij")
    m2g, m3g = m2g.ravel(), m3g.ravel()
    for m1v in rng:
        m1g = np.full_like(m2g, m1v)
        msum = m1g + m2g + m3g
        keep = (np.abs(msum) <= M_max) & ((m1g + m2g) != 0) & ((m2g + m3g) != 0) & ((m3g + m1g) != 0)
        a1, a2, a3 = m1g[keep], m2g[keep], m3g[keep]
        n1, n2, n3 = a1 / lam, a2 / lam, a3 / lam
        labels, q, nstar = classify_regions(n1, n2, n3)
        mult = _multiplier(n1, n2, n3, s, b, delta)
        for r in regions:
            sel = labels == r
            c = int(sel.sum())
            if c == 0:
                continue
            count[r] += c
            ratio = mult[sel] / region_bound(r, q[sel], nstar[sel], s, b, delta, lam)
            j = int(np.argmax(ratio))
            if ratio[j] > best[r][0]:
                idx = np.flatnonzero(sel)[j]
                best[r] = (float(ratio[j]), (int(a1[idx]), int(a2[idx]), int(a3[idx])))
    varsigma = 3.0 - 5.0 * b - 10.0 * delta + 2.0 * s
    out = {}
    for r in regions:
        ratio, arg = best[r]
        out[r] = CaseBoundReport(
            region=r.value,
            s=s,
            b=b,
            delta=delta,
            lam=lam,
            M_max=M_max,
            max_ratio=None if count[r] == 0 else ratio,
            argmax_triple=arg,
            count=count[r],
            varsigma=varsigma,
        )
    return out


def case_bound_check(region: Region | str, s: float, b: float, delta: float, lam: float, M_max: int) -> CaseBoundReport:
    """Max of multiplier / region bound over the region's non-resonant triples.

    An empty region is reported with count 0 and max_ratio None rather than raised.
    """
    region = Region(region)
    return case_bound_scan([region], s, b, delta, lam, M_max)[region]
