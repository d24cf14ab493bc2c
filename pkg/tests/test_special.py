"""Tests for the complex error function and joint-excitation kernels."""

from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from oracles import erfc_series_small, erfcx_continued_fraction, kernel_dense
from waveguide_cphase.errors import DomainError
from waveguide_cphase.model import PulseSpec
from waveguide_cphase.special import (erfc_complex, erfc_complex_detailed,
                                      erfcx_complex,
                                      joint_excitation_kernel,
                                      joint_excitation_kernel_gaussian,
                                      joint_excitation_kernel_lorentzian,
                                      joint_excitation_kernel_numeric)

mpmath.mp.dps = 40

MODERATE_POINTS = [0.3, 1.0 + 0.5j, 2.0 - 1.3j, 0.01 + 3j, 4.5 + 0.1j,
                   -0.7 + 0.2j, -1.5 - 2.0j, 5.0 - 5.0j]


def mp_erfc(z: complex) -> complex:
    return complex(mpmath.erfc(mpmath.mpc(z)))


def mp_erfcx(z: complex) -> complex:
    zm = mpmath.mpc(z)
    return complex(mpmath.exp(zm * zm) * mpmath.erfc(zm))


class TestErfc:
    @pytest.mark.parametrize("z", MODERATE_POINTS)
    def test_against_mpmath(self, z: complex) -> None:
        ref = mp_erfc(z)
        assert abs(erfc_complex(z) - ref) < 1e-12 * max(1.0, abs(ref))

    @pytest.mark.parametrize("z", MODERATE_POINTS)
    def test_reflection_identity(self, z: complex) -> None:
        total = erfc_complex(z) + erfc_complex(-z)
        assert abs(total - 2.0) < 1e-12 * max(1.0, abs(erfc_complex(z)))

    @pytest.mark.parametrize("z", [0.5, 1.2 - 0.4j, 2.5 + 1.0j])
    def test_against_series(self, z: complex) -> None:
        assert abs(erfc_complex(z) - erfc_series_small(z)) < 1e-12

    def test_error_bound_covers_truth(self) -> None:
        for z in MODERATE_POINTS:
            detail = erfc_complex_detailed(z)
            assert abs(detail.value - mp_erfc(z)) <= 10 * detail.estimated_error
            assert detail.estimated_error <= 1e-12 * max(1.0,
                                                         abs(detail.value))

    def test_underflow_saturates(self) -> None:
        detail = erfc_complex_detailed(40.0)
        assert detail.value == 0.0
        assert detail.saturated

    def test_overflow_saturates(self) -> None:
        detail = erfc_complex_detailed(1j * 40.0)
        assert detail.saturated
        assert not np.isfinite(detail.value.real) or abs(detail.value) > 1e300

    def test_rejects_huge_argument(self) -> None:
        with pytest.raises(DomainError):
            erfc_complex(2e6)


class TestErfcx:
    @pytest.mark.parametrize("z", [0.2, 1.0 + 1.0j, 3.0 - 2.0j, 10.0,
                                   50.0 + 5.0j, 300.0])
    def test_against_mpmath(self, z: complex) -> None:
        ref = mp_erfcx(z)
        value = complex(erfcx_complex(z))
        assert abs(value - ref) < 1e-12 * abs(ref)

    @pytest.mark.parametrize("z", [5.0, 8.0 + 3.0j, 12.0 - 2.0j])
    def test_against_continued_fraction(self, z: complex) -> None:
        value = complex(erfcx_complex(z))
        assert abs(value - erfcx_continued_fraction(z)) < 1e-12 * abs(value)

    def test_broadcasts(self) -> None:
        z = np.array([0.5 + 0.1j, 2.0, 4.0 - 1.0j])
        values = erfcx_complex(z)
        assert values.shape == (3,)
        for zi, vi in zip(z, values):
            assert abs(vi - mp_erfcx(complex(zi))) < 1e-12 * abs(vi)


class TestGaussianKernel:
    @pytest.mark.parametrize("sigma", [0.25, 1.0])
    @pytest.mark.parametrize("decay", [1.0, 0.3 + 0.8j, 2.0 - 1.5j])
    def test_closed_form_vs_dense_quadrature(self, sigma: float,
                                             decay: complex) -> None:
        pulse = PulseSpec(shape="gaussian", sigma_omega=sigma)
        for s in (0.0, sigma, -2.7 * sigma, 4.0 * sigma):
            closed = complex(joint_excitation_kernel_gaussian(s, decay,
                                                              sigma))
            dense = kernel_dense(s, decay, pulse)
            assert abs(closed - dense) < 1e-7 * abs(closed), (s, decay)

    def test_closed_form_vs_adaptive_numeric(self) -> None:
        sigma = 0.4
        pulse = PulseSpec(shape="gaussian", sigma_omega=sigma)
        for s in (-3.0 * sigma, 0.0, 1.7 * sigma):
            for decay in (0.9, 1.1 + 0.6j, 0.2 - 0.3j):
                closed = complex(joint_excitation_kernel(s, decay, pulse))
                numeric = joint_excitation_kernel_numeric(s, decay, pulse)
                assert abs(closed - numeric) < 1e-8 * abs(closed)

    def test_small_width_asymptote(self) -> None:
        # As the pulse narrows, the kernel at s = 0 approaches 1/(2 pi) *
        # integral f(w)^2 / decay = 1/(2 pi decay) by L2 normalization.
        decay = 1.0 + 0.4j
        for sigma in (1e-3, 1e-4):
            value = complex(joint_excitation_kernel_gaussian(0.0, decay,
                                                             sigma))
            assert abs(value - 1 / (2 * math.pi * decay)) \
                < 2e-3 * (sigma / 1e-3) / abs(decay)

    def test_rejects_growing_pole(self) -> None:
        with pytest.raises(DomainError):
            joint_excitation_kernel_gaussian(0.0, -0.1 + 1.0j, 0.3)
        with pytest.raises(DomainError):
            joint_excitation_kernel_gaussian(0.0, 1.0, -0.3)


class TestLorentzianKernel:
    @pytest.mark.parametrize("decay", [1.0, 0.5 + 0.9j, 1.8 - 0.7j])
    def test_closed_form_vs_dense_quadrature(self, decay: complex) -> None:
        sigma = 0.3
        pulse = PulseSpec(shape="lorentzian", sigma_omega=sigma)
        for s in (0.0, 0.7 * sigma, -3.0 * sigma):
            closed = complex(joint_excitation_kernel_lorentzian(s, decay,
                                                                sigma))
            dense = kernel_dense(s, decay, pulse, n_points=400_001,
                                 half_width=2000.0)
            assert abs(closed - dense) < 2e-4 * abs(closed), (s, decay)

    def test_closed_form_vs_adaptive_numeric(self) -> None:
        sigma = 0.3
        pulse = PulseSpec(shape="lorentzian", sigma_omega=sigma)
        for s in (-2.0 * sigma, 0.0, 3.1 * sigma):
            for decay in (1.0, 0.4 + 0.5j, 2.2 - 1.0j):
                closed = complex(joint_excitation_kernel(s, decay, pulse))
                numeric = joint_excitation_kernel_numeric(s, decay, pulse)
                assert abs(closed - numeric) < 1e-8 * abs(closed)

    def test_residue_structure(self) -> None:
        # The closed form is a single upper-half-plane residue: check the
        # exact rational expression at an arbitrary point.
        sigma, decay, s = 0.35, 1.3 - 0.4j, 0.9
        a = sigma
        expected = (a / math.pi) / ((2 * a - 1j * s) * (decay + a - 1j * s))
        value = complex(joint_excitation_kernel_lorentzian(s, decay, sigma))
        assert abs(value - expected) < 1e-14 * abs(expected)


class TestKernelGrid:
    def test_dual_route_match_on_wide_grid(self) -> None:
        # 5 total-frequency points x 5 decay poles x 3 widths, both pulse
        # shapes: closed form against the adaptive quadrature to 1e-8.
        decays = [0.8, 1.0 + 0.9j, 0.35 - 0.55j, 2.4 + 0.2j, 0.15 + 0.1j]
        for shape in ("gaussian", "lorentzian"):
            for sigma in (0.1, 0.3, 1.0):
                pulse = PulseSpec(shape=shape, sigma_omega=sigma)
                for s_over_sigma in (-4.0, -1.0, 0.0, 2.0, 5.0):
                    s = s_over_sigma * sigma
                    for decay in decays:
                        closed = complex(joint_excitation_kernel(s, decay,
                                                                 pulse))
                        numeric = joint_excitation_kernel_numeric(s, decay,
                                                                  pulse)
                        assert abs(closed - numeric) < 1e-8 * abs(closed), \
                            (shape, sigma, s, decay)
