import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from conftest import real_field, seeds
from kawahara.dynamics import EvolutionForm, FormKind, State
from kawahara.estimators import (
    CutoffProfile,
    ResolutionWarning,
    SpaceTimeSample,
    StrichartzEnsemble,
    block_mask,
    counting_M,
    counting_M_scan,
    dyadic_blocks,
    l4_spacetime_norm,
    linear_bound_fit,
    smoothing_functional,
    strichartz_ratio,
    strichartz_ratio_study,
    xsb_norm,
)
from kawahara.integrator import IntegratorConfig, evolve
from kawahara.spectral import SpectralField, TorusGrid, sobolev_norm
from kawahara.symbols import DispersionParams, PhaseKind, PhaseSymbol
from oracles import cosine_taper, weighted_psi_norm

BARE = PhaseSymbol.bare(DispersionParams())


def free_sample(u0: SpectralField, sym: PhaseSymbol, T: float = 1.0, nt: int = 4001) -> SpaceTimeSample:
    t = np.linspace(-2 * T, 2 * T, nt)
    c = np.exp(1j * np.outer(t, sym(u0.grid.indices))) * u0.coeffs
    return SpaceTimeSample(u0.grid, t, c)


class TestCutoff:
    def test_plateau_and_support(self):
        psi = CutoffProfile.for_time(0.5)
        assert psi(0.0) == 1.0 and psi(0.5) == 1.0 and psi(-0.5) == 1.0
        assert psi(1.0) == 0.0 and psi(-3.0) == 0.0

    @given(t=st.floats(-10, 10))
    def test_bounds(self, t):
        assert 0.0 <= CutoffProfile()(t) <= 1.0

    def test_c1_at_joins(self):
        psi = CutoffProfile()
        h = 1e-6
        for x in (1.0, 2.0):
            left = (psi(x) - psi(x - h)) / h
            right = (psi(x + h) - psi(x)) / h
            assert abs(left - right) < 1e-4

    def test_invalid_radii(self):
        with pytest.raises(ValueError):
            CutoffProfile(2.0, 1.0)

    def test_matches_oracle_profile(self):
        psi = CutoffProfile(1.0, 2.0)
        for t in np.linspace(-3, 3, 61):
            assert psi(t) == pytest.approx(cosine_taper(t, 1.0, 2.0), abs=1e-15)


class TestSpaceTimeSample:
    def test_nonuniform_rejected(self):
        g = TorusGrid(1.0, 1)
        with pytest.raises(ValueError):
            SpaceTimeSample(g, np.array([0.0, 1.0, 3.0]), np.zeros((3, 3)))

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            SpaceTimeSample(TorusGrid(1.0, 1), np.array([0.0, 1.0]), np.zeros((2, 5)))


class TestXsb:
    @given(seed=seeds, s=st.sampled_from([0.0, 0.5, 1.0]))
    @settings(max_examples=10)
    def test_b_zero_is_weighted_l2(self, seed, s):
        u0 = real_field(seed, 3)
        rng = np.random.default_rng(seed)
        t = np.linspace(-2, 2, 801)
        c = u0.coeffs[None, :] * (1 + 0.3 * rng.standard_normal((t.size, 1)))
        sample = SpaceTimeSample(u0.grid, t, c)
        psi = CutoffProfile()
        direct = math.sqrt(
            sum(
                (t[1] - t[0]) * psi(tj) ** 2 * sobolev_norm(SpectralField(u0.grid, cj, True), s) ** 2
                for tj, cj in zip(t, c)
            )
        )
        assert xsb_norm(sample, s, 0.0, BARE, psi) == pytest.approx(direct, rel=1e-10)

    @pytest.mark.parametrize("b", [0.25, 0.5])
    def test_free_evolution_matches_quadrature(self, b):
        u0 = SpectralField.from_modes(TorusGrid(1.0, 3), {1: 1.0, 2: 0.5j, 3: 0.25})
        got = xsb_norm(free_sample(u0, BARE), 1.0, b, BARE, CutoffProfile())
        assert got == pytest.approx(sobolev_norm(u0, 1.0) * weighted_psi_norm(b, 1.0, 2.0), rel=1e-7)

    def test_zero(self):
        u0 = SpectralField.zeros(TorusGrid(1.0, 2))
        assert xsb_norm(free_sample(u0, BARE, nt=101), 0.0, 0.5, BARE, CutoffProfile()) == 0.0

    def test_monotone_in_b(self):
        u0 = real_field(3, 3)
        sym = PhaseSymbol.bare(DispersionParams(beta=1.0))
        t = np.linspace(-2, 2, 4001)
        c = np.exp(1j * np.outer(t, sym(u0.grid.indices) + 0.7)) * u0.coeffs * (1 + 0.2 * np.cos(5 * t))[:, None]
        sample = SpaceTimeSample(u0.grid, t, c)
        vals = [xsb_norm(sample, 0.0, b, sym, CutoffProfile()) for b in (0.0, 0.25, 0.5)]
        assert vals[0] < vals[1] < vals[2]

    def test_short_window(self):
        u0 = real_field(0, 2)
        with pytest.raises(ValueError):
            xsb_norm(free_sample(u0, BARE, T=0.5, nt=101), 0.0, 0.5, BARE, CutoffProfile())

    def test_resolution_warning(self):
        u0 = SpectralField.from_modes(TorusGrid(1.0, 4), {4: 1.0})
        with pytest.warns(ResolutionWarning):
            xsb_norm(free_sample(u0, BARE, nt=41), 0.0, 0.5, BARE, CutoffProfile())

    def test_trajectory_input(self):
        u0 = real_field(2, 3).scale(0.01)
        traj = evolve(State(u0, -2.0), IntegratorConfig(2.0, EvolutionForm.full(DispersionParams()), dt=1e-3))
        with warnings.catch_warnings():
            warnings.simplefilter("error", ResolutionWarning)
            assert xsb_norm(traj, 0.0, 0.5, BARE, CutoffProfile()) > 0


class TestL4:
    @pytest.mark.parametrize("lam", [1.0, 3.0])
    def test_constant_field(self, lam):
        g = TorusGrid(lam, 2)
        u = SpectralField.from_modes(g, {0: 2 * math.pi * lam})
        t = np.linspace(0.0, 1.5, 31)
        sample = SpaceTimeSample(g, t, np.tile(u.coeffs, (t.size, 1)))
        assert l4_spacetime_norm(sample) == pytest.approx((1.5 * 2 * math.pi * lam) ** 0.25, rel=1e-13)

    def test_single_free_mode(self):
        g = TorusGrid(2.0, 3)
        c = 0.7 - 0.2j
        u0 = SpectralField.from_modes(g, {3: c}, realness=False)
        sample = free_sample(u0, PhaseSymbol.bare(DispersionParams(), 2.0), nt=401)
        amp = abs(c) / g.period
        assert l4_spacetime_norm(sample) == pytest.approx(amp * (4.0 * g.period) ** 0.25, rel=1e-12)

    @given(scale=st.floats(0.01, 100.0))
    @settings(max_examples=20)
    def test_homogeneous(self, scale):
        u0 = real_field(5, 3)
        sample = free_sample(u0, BARE, nt=201)
        scaled = SpaceTimeSample(sample.grid, sample.times, sample.coeffs * scale)
        assert l4_spacetime_norm(scaled, CutoffProfile()) == pytest.approx(
            scale * l4_spacetime_norm(sample, CutoffProfile()), rel=1e-12
        )


class TestStrichartz:
    def test_single_free_mode_closed_form(self):
        g = TorusGrid(1.0, 2)
        u0 = SpectralField.from_modes(g, {2: 0.05}, realness=False)
        sample = free_sample(u0, BARE, nt=8001)
        psi4, _ = integrate.quad(lambda t: cosine_taper(t, 1.0, 2.0) ** 4, -2.0, 2.0, points=[-1.0, 1.0])
        l4 = (0.05 / g.period) * (g.period * psi4) ** 0.25
        xsb = sobolev_norm(u0, 0.0) * weighted_psi_norm(0.31, 1.0, 2.0)
        assert strichartz_ratio(sample, BARE, CutoffProfile(), 0.31) == pytest.approx(l4 / xsb, rel=1e-6)

    def test_zero_field_rejected(self):
        u0 = SpectralField.zeros(TorusGrid(1.0, 2))
        with pytest.raises(ValueError):
            strichartz_ratio(free_sample(u0, BARE, nt=201), BARE, CutoffProfile(), 0.31)

    def test_threshold_on_b(self):
        u0 = real_field(0, 2)
        with pytest.raises(ValueError):
            strichartz_ratio(free_sample(u0, BARE, nt=201), BARE, CutoffProfile(), 0.3)

    def test_smallness_enforced(self):
        with pytest.raises(ValueError):
            StrichartzEnsemble(rho=0.06)

    def test_small_study(self):
        rep = strichartz_ratio_study(StrichartzEnsemble(members=5), 0.31, [1.0, 2.0], seed=3, n_boot=50)
        assert rep.slope_ci[0] <= rep.slope_ci[1]
        assert set(rep.max_ratio) == {1.0, 2.0}
        assert all(np.all(v > 0) for v in rep.ratios.values())

    def test_study_deterministic(self):
        a = strichartz_ratio_study(StrichartzEnsemble(members=3), 0.31, [1.0, 2.0], seed=9, n_boot=20)
        b = strichartz_ratio_study(StrichartzEnsemble(members=3), 0.31, [1.0, 2.0], seed=9, n_boot=20)
        assert a.to_json() == b.to_json()


class TestCounting:
    def test_exponent_zero_counts(self):
        for lam, m in ((1.0, 10), (2.0, 15), (4.0, 40)):
            sym = PhaseSymbol.bare(DispersionParams(), lam)
            count = sum(1 for m1 in range(-5 * m, 5 * m) if m1 / lam > 1 and (m - m1) / lam > 1)
            assert counting_M(123.4, m, 0.25, sym) == pytest.approx(count / (2 * math.pi * lam), rel=1e-14)

    def test_far_from_surface(self):
        sym = PhaseSymbol.bare(DispersionParams())
        m = 12
        sums = [sym(k) + sym(m - k) for k in range(2, m - 1)]
        tau = max(sums) + 1e4
        D = min(abs(tau - a) for a in sums)
        bound = len(sums) / (2 * math.pi) * D ** (1 - 4 * 0.35)
        assert counting_M(tau, m, 0.35, sym) <= bound

    def test_needs_n_above_one(self):
        with pytest.raises(ValueError):
            counting_M(0.0, 2, 0.35, PhaseSymbol.bare(DispersionParams(), 2.0))

    def test_scan_report(self):
        rep = counting_M_scan(0.35, PhaseSymbol.bare(DispersionParams()), 24)
        assert math.isfinite(rep.sup) and rep.sup > 0
        assert set(rep.to_json()) >= {"sup", "argmax_tau", "argmax_m", "grid"}

    def test_data_corrected_close_to_bare(self):
        u0 = real_field(4, 32, lam=2.0, zero_mean=True)
        u0 = u0.scale(0.05 / sobolev_norm(u0, 0.0))
        p = DispersionParams()
        data = PhaseSymbol.from_data(PhaseKind.DATA_CORRECTED, p, u0)
        a = counting_M_scan(0.35, data, 64).sup
        b = counting_M_scan(0.35, PhaseSymbol.bare(p, 2.0), 64).sup
        assert abs(a - b) <= 0.05 * b


class TestSmoothing:
    def _run(self, eps: float, dt: float, T: float = 0.05):
        u0 = real_field(7, 16, lam=2.0, decay=0.5, zero_mean=True)
        u0 = u0.scale(0.05 / sobolev_norm(u0, 0.0))
        form = EvolutionForm.build(FormKind.DATA_RENORMALIZED, DispersionParams(eps=eps), u0)
        return evolve(State(u0), IntegratorConfig(T, form, dt=dt, diagnostics=False))

    def test_zero_at_start(self):
        assert smoothing_functional(self._run(1.0, 1e-3)).values[0] == 0.0

    def test_linear_flow_preserves_moduli(self):
        F = smoothing_functional(self._run(0.0, 1e-3)).values
        assert np.max(F) < 1e-16

    def test_continuity_under_dt_halving(self):
        jumps = [np.max(np.abs(np.diff(smoothing_functional(self._run(1.0, dt)).values))) for dt in (1e-3, 5e-4)]
        assert jumps[1] < jumps[0]

    def test_blocks(self):
        assert dyadic_blocks(8.0) == [1, 2, 4, 8, 16]
        n = np.arange(-10, 11) / 2.0
        assert np.array_equal(np.flatnonzero(block_mask(n, 1)), np.flatnonzero(np.abs(n) <= 1))

    def test_linear_fit(self):
        t = np.linspace(0, 0.02, 21)
        fit = linear_bound_fit(t, 3.0 * t)
        assert fit["C"] == pytest.approx(3.0, rel=1e-12)
        assert fit["worst_ratio"] == pytest.approx(1.0, rel=1e-12)
        assert fit["samples"] == 10
