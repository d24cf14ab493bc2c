"""Complex special functions behind the closed-form entangled spectrum.

The scattered two-photon spectrum repeatedly needs the joint-excitation
kernel: the pulse-pair autoconvolution weighted by a decaying collective
mode,

    kernel(s, decay) = integral over w of  f(s - w) * f(w) / (decay - i*w)

for complex ``decay`` with positive real part.  For the Gaussian pulse the
kernel has a closed form in the scaled complementary error function; for the
Lorentzian-density (one-sided exponential) pulse it is a single rational
residue term.  An adaptive quadrature route backs both as an independent
oracle and covers any future pulse shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .errors import ConvergenceError, DomainError
from .model import PulseSpec, spectral_amplitude

_SQRT2 = math.sqrt(2.0)
_TWO_SQRT2PI = 2.0 * math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ComplexErfcResult:
    """Value and a conservative error bound for ``erfc`` at a complex point."""

    value: complex
    estimated_error: float
    saturated: bool = False


def erfcx_complex(z) -> np.ndarray:
    """Scaled complementary error function ``exp(z^2) * erfc(z)``.

    Stable for ``Re z >= 0`` (the only half-plane the kernels use); evaluated
    through the Faddeeva function, ``erfcx(z) = wofz(i z)``.
    """
    z = np.asarray(z, dtype=complex)
    return sps.wofz(1j * z)


def erfc_complex(z: complex) -> complex:
    """Analytic continuation of the complementary error function.

    Uses the Faddeeva function on ``Re z >= 0`` and the reflection
    ``erfc(-z) = 2 - erfc(z)`` elsewhere.  Intermediate overflow (the true
    value exceeds double range) saturates; see :func:`erfc_complex_detailed`.
    """
    return erfc_complex_detailed(z).value


def erfc_complex_detailed(z: complex) -> ComplexErfcResult:
    """As :func:`erfc_complex`, with an error estimate and overflow flag."""
    z = complex(z)
    if abs(z) >= 1e6:
        raise DomainError("erfc argument too large: |z| must stay below 1e6")
    if z.real < 0:
        inner = erfc_complex_detailed(-z)
        return ComplexErfcResult(2.0 - inner.value, inner.estimated_error,
                                 inner.saturated)
    # exp(-z^2) * erfcx(z); |exp(-z^2)| = exp(y^2 - x^2) overflows when the
    # imaginary part dominates -- erfc genuinely blows up there -- and
    # underflows to an exact 0 far along the positive real direction.
    scaled = complex(sps.wofz(1j * z))
    log_mag = (z.imag - z.real) * (z.imag + z.real)
    if log_mag > 700.0:
        return ComplexErfcResult(complex(math.inf, 0.0), math.inf, saturated=True)
    value = complex(np.exp(-z * z) * scaled)
    err = 1e-13 * max(1.0, abs(value))
    return ComplexErfcResult(value, err, saturated=(value == 0.0))


def joint_excitation_kernel_gaussian(s, decay, sigma_omega: float) -> np.ndarray:
    """Closed-form kernel for the Gaussian pulse.

    Evaluated in the numerically stable form
    ``exp(-s^2/(8 sigma^2)) / (2 sqrt(2 pi) sigma) * erfcx((2*decay - i*s) / (2 sqrt(2) sigma))``,
    which is the analytic kernel with the huge ``exp``/``erfc`` factors
    cancelled symbolically.  Broadcasts over ``s`` and ``decay``.
    """
    decay = np.asarray(decay, dtype=complex)
    if np.any(decay.real <= 0):
        raise DomainError("kernel requires decaying poles: Re(decay) > 0")
    if not sigma_omega > 0:
        raise DomainError("sigma_omega must be positive")
    s = np.asarray(s, dtype=float)
    z = (2.0 * decay - 1j * s) / (2.0 * _SQRT2 * sigma_omega)
    envelope = np.exp(-(s * s) / (8.0 * sigma_omega ** 2))
    return envelope * erfcx_complex(z) / (_TWO_SQRT2PI * sigma_omega)


def joint_excitation_kernel_lorentzian(s, decay, sigma_omega: float) -> np.ndarray:
    """Closed-form kernel for the one-sided exponential pulse.

    With amplitude ``f(w) = sqrt(a/pi) / (a - i w)`` and
    ``a = sigma_omega``, both pulse factors and the decaying pole sit in the
    lower half-plane except the single pole of ``f(s - w)`` at
    ``w = s + i a``, so the defining integral is one residue:

    ``kernel(s, decay) = (a/pi) / ((2a - i s) (decay + a - i s))``.
    """
    decay = np.asarray(decay, dtype=complex)
    if np.any(decay.real <= 0):
        raise DomainError("kernel requires decaying poles: Re(decay) > 0")
    if not sigma_omega > 0:
        raise DomainError("sigma_omega must be positive")
    s = np.asarray(s, dtype=float)
    a = sigma_omega
    return (a / math.pi) / ((2.0 * a - 1j * s) * (decay + a - 1j * s))


def joint_excitation_kernel(s, decay, pulse: PulseSpec) -> np.ndarray:
    """Dispatch to the closed form matching the pulse shape.

    The kernel is the double-time Fourier weight of an emitter excited while
    a second photon is still in flight,

    ``kernel(s, decay) = (1/2pi) int dw  f(s - w) f(w) / (decay - i w)``,

    i.e. the spectral autocorrelation of the pulse filtered through one
    decaying pole, evaluated at the total frequency ``s``.
    """
    if pulse.shape == "gaussian":
        return joint_excitation_kernel_gaussian(s, decay, pulse.sigma_omega)
    return joint_excitation_kernel_lorentzian(s, decay, pulse.sigma_omega)


def joint_excitation_kernel_numeric(s: float, decay: complex, pulse: PulseSpec,
                                    rtol: float = 1e-8) -> complex:
    """Adaptive quadrature of the defining integral (oracle route).

    Computes the same ``(1/2pi) int dw f(s-w) f(w) / (decay - i w)`` as the
    closed forms.  Gaussian pulses integrate on a truncated window wide
    enough for the doubly-exponential tails; Lorentzian pulses use the exact
    tangent substitution ``w = a*tan(theta)`` so the rational tails integrate
    on a compact interval.  Node counts double until the result is stable to
    ``rtol``; failure raises :class:`ConvergenceError` with the achieved
    tolerance.
    """
    decay = complex(decay)
    if decay.real <= 0:
        raise DomainError("kernel requires decaying poles: Re(decay) > 0")
    s = float(s)
    sig = pulse.sigma_omega

    if pulse.shape == "gaussian":
        lo = min(-12.0 * sig, s - 12.0 * sig)
        hi = max(12.0 * sig, s + 12.0 * sig)

        def fixed(n: int) -> complex:
            x, w = np.polynomial.legendre.leggauss(n)
            x = (hi + lo) / 2 + (hi - lo) / 2 * x
            w = (hi - lo) / 2 * w
            vals = (spectral_amplitude(pulse, s - x) * spectral_amplitude(pulse, x)
                    / (decay - 1j * x))
            return complex(np.sum(vals * w)) / (2.0 * math.pi)
    else:
        a = pulse.lorentzian_scale

        def fixed(n: int) -> complex:
            theta, w = np.polynomial.legendre.leggauss(n)
            theta = theta * (math.pi / 2)
            w = w * (math.pi / 2)
            x = a * np.tan(theta)
            jac = a / np.cos(theta) ** 2
            vals = (spectral_amplitude(pulse, s - x) * spectral_amplitude(pulse, x)
                    / (decay - 1j * x)) * jac
            return complex(np.sum(vals * w)) / (2.0 * math.pi)

    n = 129
    current = fixed(n)
    for _ in range(5):
        n = 2 * n - 1
        refined = fixed(n)
        err = abs(refined - current)
        if err <= rtol * max(abs(refined), 1e-300):
            return refined
        current = refined
    raise ConvergenceError(
        "kernel quadrature did not converge",
        achieved=err / max(abs(refined), 1e-300))
