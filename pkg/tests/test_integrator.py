import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import real_field, seeds
from kawahara.dynamics import EvolutionForm, FormKind, State, gauge_transform, mass_mean
from kawahara.integrator import (
    BlowUpError,
    IntegratorConfig,
    default_dt,
    evolve,
    interaction_derivative_check,
    step,
)
from kawahara.spectral import SpectralField, TorusGrid
from kawahara.symbols import DispersionParams, PhaseSymbol


def smooth_datum(M: int = 4) -> SpectralField:
    return SpectralField.from_modes(TorusGrid(1.0, M), {1: 0.8 * math.pi, 2: -0.4j * math.pi, 3: 0.2 * math.pi})


def final(u: SpectralField, form: EvolutionForm, T: float, dt: float, t0: float = 0.0) -> SpectralField:
    cfg = IntegratorConfig(T, form, dt=dt, snapshot_stride=10**9, diagnostics=False)
    return evolve(State(u, t0), cfg).final.field


class TestStep:
    @pytest.mark.parametrize("m", [1, 3, 7])
    def test_linear_flow_is_exact(self, m):
        p = DispersionParams(beta=1.0, gamma=0.3, eps=0.0)
        u = SpectralField.from_modes(TorusGrid(1.0, 8), {m: 0.5 - 0.2j})
        out = step(State(u), 0.1, EvolutionForm.full(p))
        expected = u.coefficient(m) * np.exp(0.1j * PhaseSymbol.bare(p)(m))
        assert abs(out.field.coefficient(m) - expected) < 1e-15
        assert out.t == 0.1

    @given(seed=seeds)
    def test_preserves_realness(self, seed):
        u = real_field(seed, 6)
        out = step(State(u), 1e-3, EvolutionForm.full(DispersionParams(beta=1.0))).field
        c = out.coeffs
        assert out.realness
        assert np.max(np.abs(c - np.conj(c[::-1]))) <= 1e-14 * np.max(np.abs(c))

    @pytest.mark.parametrize("dt", [0.0, math.inf, math.nan])
    def test_rejects_bad_dt(self, dt):
        with pytest.raises(ValueError):
            step(State(real_field(0, 2)), dt, EvolutionForm.full(DispersionParams()))

    def test_blow_up_guard(self):
        u = SpectralField.from_modes(TorusGrid(1.0, 4), {1: 1e7})
        with pytest.raises(BlowUpError) as info, np.errstate(over="ignore", invalid="ignore"):
            evolve(State(u), IntegratorConfig(1.0, EvolutionForm.full(DispersionParams()), dt=0.1))
        assert math.isfinite(info.value.t_last_finite)


class TestConfig:
    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            IntegratorConfig(1.0, EvolutionForm.full(DispersionParams()), dt=-1e-3)

    def test_rejects_zero_stride(self):
        with pytest.raises(ValueError):
            IntegratorConfig(1.0, EvolutionForm.full(DispersionParams()), snapshot_stride=0)

    def test_dt_larger_than_span(self):
        with pytest.raises(ValueError):
            evolve(State(real_field(0, 2)), IntegratorConfig(0.1, EvolutionForm.full(DispersionParams()), dt=1.0))

    def test_default_dt(self):
        assert default_dt(TorusGrid(1.0, 1)) == 1e-3
        assert default_dt(TorusGrid(2.0, 8)) == pytest.approx(1e-3 * 32 / 8**4)


class TestEvolve:
    def test_uniform_snapshots(self):
        traj = evolve(
            State(real_field(1, 4, decay=2.0).scale(0.01)),
            IntegratorConfig(0.1, EvolutionForm.full(DispersionParams()), dt=1e-3, snapshot_stride=10),
        )
        assert len(traj) == 11
        assert np.allclose(np.diff(traj.times), 1e-2, rtol=1e-12)
        assert set(traj.diagnostics) == {"E", "M", "H", "smoothing"}

    def test_zero_data_stays_zero(self):
        u = SpectralField.zeros(TorusGrid(1.0, 6))
        traj = evolve(State(u), IntegratorConfig(0.2, EvolutionForm.full(DispersionParams()), dt=1e-2))
        assert not np.any(traj.coeffs)

    def test_sine_conservation(self):
        g = TorusGrid(1.0, 16)
        u = SpectralField.from_modes(g, {1: -0.1j * math.pi})
        traj = evolve(State(u), IntegratorConfig(1.0, EvolutionForm.full(DispersionParams()), dt=1e-3, snapshot_stride=50))
        M = traj.diagnostics["M"]
        assert np.max(np.abs(M - M[0])) / M[0] <= 1e-8
        assert traj.max_mass_drift <= 1e-8

    def test_convergence_order(self):
        u = smooth_datum()
        form = EvolutionForm.full(DispersionParams(beta=1.0))
        r = [final(u, form, 1.0, dt).coeffs for dt in (2e-3, 1e-3, 5e-4)]
        order = math.log2(np.max(np.abs(r[0] - r[1])) / np.max(np.abs(r[1] - r[2])))
        assert 3.5 <= order <= 4.5

    def test_time_reversibility(self):
        u = smooth_datum(M=8).scale(0.25)
        form = EvolutionForm.full(DispersionParams(beta=1.0))
        fwd = final(u, form, 1.0, 1e-3)
        back = final(fwd, form, 0.0, 1e-3, t0=1.0)
        assert np.max(np.abs(back.coeffs - u.coeffs)) <= 1e-6

    def test_forms_agree(self):
        u = real_field(11, 12, lam=2.0, decay=2.0, zero_mean=True)
        u = u.scale(0.3 / np.max(np.abs(u.coeffs)))
        p = DispersionParams(beta=1.0, gamma=0.5)
        ref = final(u, EvolutionForm.build(FormKind.FULL, p, u), 1.0, 1e-3).coeffs
        for kind in (FormKind.WICK_ORDERED, FormKind.DATA_RENORMALIZED):
            got = final(u, EvolutionForm.build(kind, p, u), 1.0, 1e-3).coeffs
            assert np.max(np.abs(got - ref)) <= 1e-8
        gauged = final(u, EvolutionForm.build(FormKind.GAUGED, p, u), 1.0, 1e-3)
        back = gauge_transform(State(gauged, 1.0), mass_mean(u), "inverse", p).field.coeffs
        assert np.max(np.abs(back - ref)) <= 1e-8


class TestInteractionDerivative:
    def test_second_order_residual(self):
        s = State(smooth_datum())
        form = EvolutionForm.full(DispersionParams(beta=1.0))
        ratio = interaction_derivative_check(s, form, 1e-3) / interaction_derivative_check(s, form, 5e-4)
        assert 3.0 <= ratio <= 5.0

    @pytest.mark.parametrize("dt_probe", [1e-2, 1e-3, 1e-4])
    def test_linear_only(self, dt_probe):
        s = State(smooth_datum())
        form = EvolutionForm.full(DispersionParams(beta=1.0, eps=0.0))
        assert interaction_derivative_check(s, form, dt_probe) <= 1e-12

    def test_zero_field(self):
        s = State(SpectralField.zeros(TorusGrid(1.0, 4)))
        assert interaction_derivative_check(s, EvolutionForm.full(DispersionParams()), 1e-3) == 0.0
