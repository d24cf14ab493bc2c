"""Shared fixtures for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from waveguide_cphase.model import EmitterArray, PulseSpec


@pytest.fixture(scope="session")
def gauss_pulse() -> PulseSpec:
    """Default Gaussian pulse used across regression tests."""
    return PulseSpec(shape="gaussian", sigma_omega=0.25)


@pytest.fixture(scope="session")
def wide_gauss_pulse() -> PulseSpec:
    """Broader Gaussian pulse for oracle cross-checks."""
    return PulseSpec(shape="gaussian", sigma_omega=0.5)


@pytest.fixture(scope="session")
def lorentz_pulse() -> PulseSpec:
    """Lorentzian-density (one-sided exponential) pulse."""
    return PulseSpec(shape="lorentzian", sigma_omega=0.25)


@pytest.fixture(scope="session")
def asym_array() -> EmitterArray:
    """Four atoms with asymmetric gaps: exercises every engine branch."""
    return EmitterArray(phases=(0.0, 1.1, 2.9, 5.3), gamma=1.0, delta=0.0)


@pytest.fixture(scope="session")
def mirror_array() -> EmitterArray:
    """Four atoms with palindromic gaps (1.1, 1.8, 1.1), detuned."""
    return EmitterArray(phases=(0.0, 1.1, 2.9, 4.0), gamma=1.0, delta=0.7)


def make_palindromic(gaps: list[float], gamma: float = 1.0,
                     delta: float = 0.0) -> EmitterArray:
    """Array whose gap sequence reads the same in both directions."""
    full = list(gaps) + list(gaps[-2::-1]) if len(gaps) > 1 else list(gaps)
    phases = np.concatenate([[0.0], np.cumsum(full)])
    return EmitterArray(phases=tuple(phases), gamma=gamma, delta=delta)
