import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import lambdas, real_field, seeds, small_M
from kawahara.dynamics import (
    EvolutionForm,
    FormKind,
    State,
    conserved_E,
    conserved_H,
    conserved_M,
    gauge_transform,
    hamiltonian_gradient,
    mass_mean,
    nonlinearity_full,
    rhs,
    split_resonant,
    symplectic_form,
)
from kawahara.spectral import SpectralField, TorusGrid, l2_inner
from kawahara.symbols import DispersionParams, PhaseSymbol, phase_difference
from oracles import direct_cubic_sum, direct_nonlinearity

params_st = st.builds(
    DispersionParams,
    beta=st.sampled_from([0.0, 1.0, 2.5]),
    gamma=st.sampled_from([-1.0, 0.0, 0.7]),
    mu=st.sampled_from([1, -1]),
)


def cos_field(lam: float = 1.0, M: int = 4) -> SpectralField:
    return SpectralField.from_modes(TorusGrid(lam, M), {1: math.pi * lam})


class TestNonlinearity:
    def test_constant_gives_zero(self):
        u = SpectralField.from_modes(TorusGrid(1.0, 4), {0: 3.0})
        assert not np.any(nonlinearity_full(u, DispersionParams()).coeffs)

    def test_cosine_hand_computation(self):
        # cos^3 x = (3 cos x + cos 3x) / 4, and -(mu/3) d_x of it is what the Fourier side adds
        u = cos_field(M=4)
        out = nonlinearity_full(u, DispersionParams(mu=1))
        # (mu/3) d_x(cos^3) = -(1/4)(sin x + sin 3x): coefficients of sin kx are -i pi at +k
        expected = SpectralField.from_modes(u.grid, {1: 0.25j * math.pi, 3: 0.25j * math.pi})
        assert np.max(np.abs(out.coeffs - expected.coeffs)) < 1e-14

    @settings(max_examples=30)
    @given(seed=seeds, M=small_M, lam=lambdas, p=params_st)
    def test_matches_direct_convolution(self, seed, M, lam, p):
        u = real_field(seed, M, lam)
        ref = direct_nonlinearity(u.coeffs, M, lam, p.mu)
        got = nonlinearity_full(u, p).coeffs
        assert np.max(np.abs(got - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))


class TestSplitting:
    def test_zero_field(self):
        for part in split_resonant(SpectralField.zeros(TorusGrid(1.0, 3)), DispersionParams()):
            assert not np.any(part.coeffs)

    def test_single_mode_is_fully_resonant_below_third_harmonic(self):
        u = SpectralField.from_modes(TorusGrid(1.0, 2), {1: 0.3 + 0.4j})
        r1, r2, nr = split_resonant(u, DispersionParams())
        assert np.max(np.abs(nr.coeffs)) < 1e-15
        full = nonlinearity_full(u, DispersionParams()).coeffs
        assert np.max(np.abs(r1.coeffs + r2.coeffs - full)) < 1e-15

    def test_single_mode_feeds_only_the_third_harmonic(self):
        u = SpectralField.from_modes(TorusGrid(1.0, 6), {1: 0.3 + 0.4j})
        nr = split_resonant(u, DispersionParams())[2]
        off = [m for m in u.grid.indices if abs(m) != 3]
        assert max(abs(nr.coefficient(m)) for m in off) < 1e-15
        c = u.coefficient(1)
        assert nr.coefficient(3) == pytest.approx(1j * 3 / (3 * (2 * math.pi) ** 2) * c**3, rel=1e-13)

    @settings(max_examples=30)
    @given(seed=seeds, M=st.integers(1, 16), lam=lambdas)
    def test_parts_sum_to_full(self, seed, M, lam):
        u = real_field(seed, M, lam)
        p = DispersionParams()
        r1, r2, nr = split_resonant(u, p)
        full = nonlinearity_full(u, p).coeffs
        assert np.max(np.abs(r1.coeffs + r2.coeffs + nr.coeffs - full)) <= 1e-12 * max(1.0, np.max(np.abs(full)))

    @settings(max_examples=20)
    @given(seed=seeds, M=st.integers(1, 8), lam=lambdas, mu=st.sampled_from([1, -1]))
    def test_nonresonant_matches_restricted_sum(self, seed, M, lam, mu):
        u = real_field(seed, M, lam)
        ref = direct_nonlinearity(u.coeffs, M, lam, mu, restrict_nonresonant=True)
        nr = split_resonant(u, DispersionParams(mu=mu))[2].coeffs
        assert np.max(np.abs(nr - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))

    def test_resonant_formulas(self):
        u = real_field(4, 5, 2.0)
        p = DispersionParams(mu=-1)
        r1, r2, _ = split_resonant(u, p)
        n = u.grid.wavenumbers
        L = u.grid.period
        c = u.coeffs
        assert np.allclose(r1.coeffs, -(p.mu * 1j * n / L**2) * np.abs(c) ** 2 * c, rtol=1e-14, atol=1e-16)
        mass = np.sum(np.abs(c) ** 2) / L
        assert np.allclose(r2.coeffs, (p.mu * 1j * n / L) * mass * c, rtol=1e-14, atol=1e-16)


class TestRhs:
    def test_data_form_resonant_term_vanishes_at_start(self):
        u0 = real_field(1, 6)
        p = DispersionParams()
        form = EvolutionForm.build(FormKind.DATA_RENORMALIZED, p, u0)
        got = rhs(State(u0), form).coeffs
        sym = form.symbol
        nr = split_resonant(u0, p)[2].coeffs
        assert np.max(np.abs(got - (1j * sym(u0.grid.indices) * u0.coeffs + nr))) < 1e-12

    def test_full_on_cosine(self):
        u = cos_field(M=4)
        p = DispersionParams(beta=1.0, gamma=2.0)
        got = rhs(State(u), EvolutionForm.full(p)).coeffs
        lin = SpectralField.from_modes(u.grid, {1: 1j * (1 + 1 - 2) * math.pi})
        nl = SpectralField.from_modes(u.grid, {1: 0.25j * math.pi, 3: 0.25j * math.pi})
        assert np.max(np.abs(got - lin.coeffs - nl.coeffs)) < 1e-13

    @given(seed=seeds, M=small_M, p=params_st)
    def test_all_forms_share_the_vector_field(self, seed, M, p):
        u = real_field(seed, M, 2.0)
        ref = rhs(State(u), EvolutionForm.build(FormKind.FULL, p, u)).coeffs
        for kind in (FormKind.WICK_ORDERED, FormKind.DATA_RENORMALIZED):
            got = rhs(State(u), EvolutionForm.build(kind, p, u)).coeffs
            assert np.max(np.abs(got - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))

    def test_wick_minus_full_is_mass_restructuring(self):
        u = real_field(9, 7)
        p = DispersionParams()
        full = rhs(State(u), EvolutionForm.build(FormKind.FULL, p, u)).coeffs
        wick_form = EvolutionForm.build(FormKind.WICK_ORDERED, p, u)
        wick = rhs(State(u), wick_form).coeffs
        gap = phase_difference(wick_form.symbol, PhaseSymbol.bare(p), u.grid.indices)
        r2 = split_resonant(u, p)[1].coeffs
        # the linear gain i (p0 - p*) u is exactly the R2 term it replaces
        assert np.max(np.abs(1j * gap * u.coeffs - r2)) < 1e-15
        assert np.max(np.abs(wick - full)) < 1e-11

    @given(seed=seeds, M=small_M)
    def test_realness_of_time_derivative(self, seed, M):
        u = real_field(seed, M)
        d = rhs(State(u), EvolutionForm.full(DispersionParams(beta=1))).coeffs
        assert np.max(np.abs(d - np.conj(d[::-1]))) < 1e-12 * max(1.0, np.max(np.abs(d)))

    @settings(max_examples=20)
    @given(seed=seeds, M=st.integers(2, 8), lam=lambdas, mu=st.sampled_from([1, -1]))
    def test_modulus_rate_matches_nonresonant_sum(self, seed, M, lam, mu):
        u0 = real_field(seed, M, lam)
        form = EvolutionForm.build(FormKind.DATA_RENORMALIZED, DispersionParams(mu=mu), u0)
        u = SpectralField(u0.grid, u0.coeffs * 1.1, True)
        d = rhs(State(u), form).coeffs
        rate = 2 * np.real(np.conj(u.coeffs) * d)
        S = direct_cubic_sum(u.coeffs, M, restrict_nonresonant=True)
        n = u.grid.wavenumbers
        # d/dt |u(n)|^2 = -(2 mu / (3 (2 pi lam)^2)) n Im[sum u u u u(-n)]
        ref = -(2 * mu / (3 * u.grid.period**2)) * n * np.imag(S * u.coeffs[::-1])
        assert np.max(np.abs(rate - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))


class TestGauge:
    def test_identity_at_time_zero(self):
        u = real_field(0, 5)
        assert np.array_equal(gauge_transform(State(u, 0.0), 1.3).field.coeffs, u.coeffs)

    @given(seed=seeds, t=st.floats(-3, 3), mass=st.floats(0, 10))
    def test_inverse(self, seed, t, mass):
        u = real_field(seed, 6)
        fwd = gauge_transform(State(u, t), mass, "forward")
        back = gauge_transform(fwd, mass, "inverse")
        assert np.max(np.abs(back.field.coeffs - u.coeffs)) < 1e-14 * max(1.0, np.max(np.abs(u.coeffs)))

    def test_rotation_by_pi(self):
        u = SpectralField.from_modes(TorusGrid(1.0, 2), {1: 1.0})
        g = gauge_transform(State(u, 1.0), math.pi, "forward", DispersionParams(mu=1))
        assert g.field.coefficient(1) == pytest.approx(-1.0, abs=1e-15)

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            gauge_transform(State(real_field(0, 2), 1.0), 1.0, "sideways")

    def test_mass_mean(self):
        u = cos_field()
        assert mass_mean(u) == pytest.approx(0.5, rel=1e-15)


class TestConservedQuantities:
    @pytest.mark.parametrize("beta,gamma,mu", [(0, 0, 1), (1.0, 0.5, -1), (2.0, -1.0, 1)])
    def test_cosine(self, beta, gamma, mu):
        u = cos_field()
        p = DispersionParams(beta=beta, gamma=gamma, mu=mu)
        assert conserved_M(u) == pytest.approx(math.pi / 2, rel=1e-15)
        expected = math.pi / 2 + beta * math.pi / 2 - gamma * math.pi / 2 + mu * math.pi / 16
        assert conserved_H(u, p) == pytest.approx(expected, rel=1e-14)
        assert conserved_E(u) == 0.0

    def test_zero(self):
        u = SpectralField.zeros(TorusGrid(1.0, 3))
        assert conserved_E(u) == conserved_M(u) == conserved_H(u, DispersionParams()) == 0.0

    def test_mean_mode(self):
        u = SpectralField.from_modes(TorusGrid(1.0, 3), {0: 2.5})
        assert conserved_E(u) == 2.5


class TestHamiltonianStructure:
    def test_zero(self):
        u = SpectralField.zeros(TorusGrid(1.0, 3))
        assert not np.any(hamiltonian_gradient(u, DispersionParams()).coeffs)

    def test_cosine(self):
        u = cos_field()
        grad = hamiltonian_gradient(u, DispersionParams(mu=-1)).coeffs
        # cos x - (1/3) cos^3 x = (3/4) cos x - (1/12) cos 3x
        expected = SpectralField.from_modes(u.grid, {1: 0.75 * math.pi, 3: -math.pi / 12}).coeffs
        assert np.max(np.abs(grad - expected)) < 1e-14

    @given(seed=seeds, M=small_M, lam=lambdas, p=params_st)
    def test_derivative_of_gradient_is_full_rhs(self, seed, M, lam, p):
        u = real_field(seed, M, lam)
        grad = hamiltonian_gradient(u, p).coeffs
        d = rhs(State(u), EvolutionForm.full(p, lam)).coeffs
        assert np.max(np.abs(1j * u.grid.wavenumbers * grad - d)) <= 1e-11 * max(1.0, np.max(np.abs(d)))

    def test_directional_derivative_second_order(self):
        p = DispersionParams(beta=1.0, gamma=0.5)
        v, w = real_field(3, 6), real_field(4, 6)
        exact = l2_inner(hamiltonian_gradient(v, p), w).real
        errs = []
        for eps in (1e-2, 5e-3, 2.5e-3):
            fd = (conserved_H(v + w.scale(eps), p) - conserved_H(v - w.scale(eps), p)) / (2 * eps)
            errs.append(abs(fd - exact))
        orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
        assert all(1.8 <= o <= 2.2 for o in orders)


class TestSymplecticForm:
    def test_cos_sin(self):
        g = TorusGrid(1.0, 3)
        v = SpectralField.from_modes(g, {1: math.pi})
        w = SpectralField.from_modes(g, {1: -1j * math.pi})
        assert symplectic_form(v, w) == pytest.approx(-math.pi, rel=1e-15)

    @given(seed=seeds, M=small_M)
    def test_antisymmetric(self, seed, M):
        v = real_field(seed, M, zero_mean=True)
        w = real_field(seed + 7, M, zero_mean=True)
        assert abs(symplectic_form(v, v)) < 1e-13
        assert symplectic_form(v, w) == pytest.approx(-symplectic_form(w, v), rel=1e-12, abs=1e-13)

    @given(seed=seeds, a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_bilinear(self, seed, a, b):
        u, v, w = (real_field(seed + k, 5, zero_mean=True) for k in range(3))
        lhs = symplectic_form(u.scale(a) + v.scale(b), w)
        rhs_ = a * symplectic_form(u, w) + b * symplectic_form(v, w)
        assert lhs == pytest.approx(rhs_, rel=1e-12, abs=1e-13)

    def test_rejects_mean(self):
        with pytest.raises(ValueError):
            symplectic_form(real_field(0, 3), real_field(1, 3, zero_mean=True))
