"""Property-based invariants across randomly generated configurations."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from waveguide_cphase.eigen import build_eigensystems, residuals
from waveguide_cphase.model import (EmitterArray, PulseSpec,
                                    build_optimized_array, wrap_phase)
from waveguide_cphase.quadrature import GridSpec, grid_nodes
from waveguide_cphase.scattering import (coupling_sums, gate_fidelity,
                                         single_photon_transmission,
                                         two_photon_spectrum)
from waveguide_cphase.transfer import (chain_transmission,
                                       transparency_pair_phase)

slow_settings = settings(max_examples=12, deadline=None,
                         suppress_health_check=[HealthCheck.too_slow])

gap_strategy = st.floats(min_value=0.35, max_value=2.8,
                         allow_nan=False, allow_infinity=False)


def palindromic_array(gaps: list[float], gamma: float,
                      delta: float) -> EmitterArray:
    full = list(gaps) + list(gaps[-2::-1]) if len(gaps) > 1 else list(gaps)
    phases = np.concatenate([[0.0], np.cumsum(full)])
    return EmitterArray(phases=tuple(phases), gamma=gamma, delta=delta)


class TestWrapPhase:
    @given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
    def test_lands_on_principal_branch(self, angle: float) -> None:
        wrapped = wrap_phase(angle)
        assert -math.pi < wrapped <= math.pi

    @given(st.floats(min_value=-30.0, max_value=30.0, allow_nan=False),
           st.integers(min_value=-4, max_value=4))
    def test_two_pi_periodic(self, angle: float, turns: int) -> None:
        assert wrap_phase(angle + 2 * math.pi * turns) == pytest.approx(
            wrap_phase(angle), abs=1e-9)


class TestQuadratureProperties:
    @given(st.integers(min_value=0, max_value=20),
           st.floats(min_value=0.2, max_value=4.0))
    @settings(max_examples=30, deadline=None)
    def test_monomials_integrate_exactly(self, degree: int,
                                         scale: float) -> None:
        nodes, weights = grid_nodes(GridSpec(nodes_per_axis=41), scale=scale)
        half = 8.0 * scale
        quad = float(weights @ (nodes / half) ** degree)
        exact = 0.0 if degree % 2 else 2 * half / (degree + 1)
        assert quad == pytest.approx(exact, abs=1e-12 * half)


class TestEigenProperties:
    @given(st.lists(gap_strategy, min_size=3, max_size=7),
           st.floats(min_value=0.4, max_value=2.5))
    @settings(max_examples=25, deadline=None)
    def test_residuals_stay_tiny(self, gaps: list[float],
                                 gamma: float) -> None:
        phases = np.concatenate([[0.0], np.cumsum(gaps)])
        if len(phases) % 2:
            phases = phases[:-1]
        array = EmitterArray(phases=tuple(phases), gamma=gamma, delta=0.0)
        one, two = build_eigensystems(array)
        for system in (one, two):
            eig_res, inv_res = residuals(system)
            assert eig_res < 1e-10
            assert inv_res < 1e-10

    @given(st.lists(gap_strategy, min_size=3, max_size=7),
           st.floats(min_value=0.4, max_value=2.5))
    @settings(max_examples=25, deadline=None)
    def test_completeness_sum_rules(self, gaps: list[float],
                                    gamma: float) -> None:
        phases = np.concatenate([[0.0], np.cumsum(gaps)])
        if len(phases) % 2:
            phases = phases[:-1]
        array = EmitterArray(phases=tuple(phases), gamma=gamma, delta=0.0)
        sums = coupling_sums(array, *build_eigensystems(array))
        n = len(phases)
        assert abs(sums.minus_plus.sum() - n) < 1e-9
        assert abs(sums.plus_minus.sum() - n) < 1e-9
        assert abs(sums.minus_minus.sum()
                   - np.exp(-2j * phases).sum()) < 1e-9
        assert abs(sums.plus_plus.sum() - np.exp(2j * phases).sum()) < 1e-9


class TestScatteringProperties:
    @given(st.lists(gap_strategy, min_size=1, max_size=3),
           st.floats(min_value=0.5, max_value=2.0),
           st.floats(min_value=-0.8, max_value=0.8))
    @slow_settings
    def test_transmitted_norm_never_exceeds_unity(self, gaps: list[float],
                                                  gamma: float,
                                                  delta: float) -> None:
        array = palindromic_array(gaps, gamma, delta * gamma)
        pulse = PulseSpec(shape="gaussian", sigma_omega=0.3 * gamma)
        result = gate_fidelity(array, pulse, GridSpec(nodes_per_axis=41))
        assert result.channel_norm <= 1 + 1e-6
        assert result.sqrt_fidelity <= result.channel_norm + 1e-9

    @given(st.lists(gap_strategy, min_size=1, max_size=3),
           st.floats(min_value=0.5, max_value=2.0))
    @slow_settings
    def test_palindromic_arrays_are_exchange_symmetric(
            self, gaps: list[float], gamma: float) -> None:
        array = palindromic_array(gaps, gamma, 0.31 * gamma)
        pulse = PulseSpec(shape="gaussian", sigma_omega=0.3 * gamma)
        spectrum = two_photon_spectrum(array, pulse,
                                       GridSpec(nodes_per_axis=41))
        asym = np.max(np.abs(spectrum.values - spectrum.values.T))
        assert asym < 1e-10 * np.max(np.abs(spectrum.values))

    @given(st.lists(gap_strategy, min_size=3, max_size=5),
           st.floats(min_value=-1.0, max_value=1.0))
    @settings(max_examples=20, deadline=None)
    def test_single_photon_passivity(self, gaps: list[float],
                                     delta: float) -> None:
        phases = np.concatenate([[0.0], np.cumsum(gaps)])
        if len(phases) % 2:
            phases = phases[:-1]
        array = EmitterArray(phases=tuple(phases), gamma=1.0, delta=delta)
        one, two = build_eigensystems(array)
        sums = coupling_sums(array, one, two)
        omega = np.linspace(-6, 6, 121)
        t = single_photon_transmission(array, sums, one, omega)
        assert np.max(np.abs(t)) <= 1 + 1e-10

    @given(st.floats(min_value=math.pi / 2 + 0.06,
                     max_value=math.pi - 0.06),
           st.floats(min_value=0.5, max_value=2.0))
    @settings(max_examples=25, deadline=None)
    def test_compensated_pair_is_transparent_at_center(self, phi_d: float,
                                                       gamma: float) -> None:
        array = build_optimized_array(1, phi_d, gamma=gamma)
        one, two = build_eigensystems(array)
        sums = coupling_sums(array, one, two)
        t0 = single_photon_transmission(array, sums, one,
                                        np.array([0.0]))[0]
        assert abs(abs(t0) - 1.0) < 1e-10


class TestTransferProperties:
    @given(st.lists(gap_strategy, min_size=1, max_size=7),
           st.floats(min_value=0.4, max_value=2.5),
           st.floats(min_value=-1.5, max_value=1.5),
           st.floats(min_value=-8.0, max_value=8.0))
    @settings(max_examples=40, deadline=None)
    def test_flux_conserved_in_both_modes(self, gaps: list[float],
                                          gamma: float, delta: float,
                                          omega: float) -> None:
        phases = np.concatenate([[0.0], np.cumsum(gaps)])
        if len(phases) % 2:
            phases = phases[:-1]
        array = EmitterArray(phases=tuple(phases), gamma=gamma, delta=delta,
                             light_speed_phase=2e-3)
        for mode in ("markovian", "exact"):
            coeffs = chain_transmission(array, omega, mode=mode)
            total = (abs(coeffs.transmission) ** 2
                     + abs(coeffs.reflection) ** 2)
            assert total == pytest.approx(1.0, abs=1e-10)

    @given(st.floats(min_value=0.3, max_value=3.0),
           st.floats(min_value=0.05, max_value=3.0),
           st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_compensating_pair_transmits_all_center_flux(
            self, gamma: float, magnitude: float, negate: bool) -> None:
        delta = -magnitude if negate else magnitude
        phi = transparency_pair_phase(gamma, delta)
        array = EmitterArray(phases=(0.0, phi), gamma=gamma, delta=delta)
        t0 = chain_transmission(array, 0.0).transmission
        assert abs(t0) == pytest.approx(1.0, abs=1e-10)

    @given(st.lists(gap_strategy, min_size=1, max_size=6),
           st.floats(min_value=0.4, max_value=2.5),
           st.floats(min_value=-6.0, max_value=6.0))
    @settings(max_examples=30, deadline=None)
    def test_exact_mode_reduces_to_markovian_without_transit(
            self, gaps: list[float], gamma: float, omega: float) -> None:
        phases = np.concatenate([[0.0], np.cumsum(gaps)])
        if len(phases) % 2:
            phases = phases[:-1]
        array = EmitterArray(phases=tuple(phases), gamma=gamma, delta=0.7)
        instant = chain_transmission(array, omega, mode="markovian")
        exact = chain_transmission(array, omega, mode="exact")
        assert exact.transmission == pytest.approx(instant.transmission,
                                                   abs=1e-12)
        assert exact.reflection == pytest.approx(instant.reflection,
                                                 abs=1e-12)
