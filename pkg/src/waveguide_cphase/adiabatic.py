"""Narrowband closed forms for one transmission-window emitter pair.

A pair of emitters detuned by ``delta`` and separated so that
``tan(phi) = -delta / gamma`` transmits a resonant photon completely.  When
the pulse bandwidth is far below every decay scale, the pair's action
collapses to closed forms: a pure phase response per photon, a pair of
complex collective decay rates governing the two-photon redistribution,
and a predicted conditional phase.  These are the design formulas the
full engines are measured against, and their region of validity is
checked by tests, not assumed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .model import PulseSpec, spectral_amplitude, wrap_phase
from .quadrature import GridSpec, grid_nodes
from .scattering import TwoPhotonSpectrum
from .special import joint_excitation_kernel

__all__ = [
    "AdiabaticSite",
    "make_site",
    "predicted_phase",
    "s1_adiabatic_apply",
    "t_adiabatic",
]


@dataclass(frozen=True)
class AdiabaticSite:
    """One transmission-window pair in the narrowband description.

    Attributes
    ----------
    phi : float
        Window phase in ``(0, pi)`` solving ``tan(phi) = -delta/gamma``;
        in ``(pi/2, pi)`` for positive detuning.
    gamma : float
        Per-emitter decay rate into the waveguide.
    gamma_plus, gamma_minus : complex
        Collective decay rates ``gamma e^{i phi} (1 +- cos phi)/cos phi``
        of the two-photon redistribution blocks.  Both always have a
        positive real part; their sum is ``2 gamma e^{i phi}/cos phi``.
    """

    phi: float
    gamma: float
    gamma_plus: complex
    gamma_minus: complex


def make_site(gamma: float, delta: float) -> AdiabaticSite:
    """Build the narrowband description of a pair at its window condition.

    ``delta = 0`` is rejected: the transmission window closes there (the
    window phase would sit on the half-reflecting ``phi = pi`` point and
    the group delay diverges).
    """
    if gamma <= 0:
        raise DomainError(f"gamma {gamma} must be positive")
    if delta == 0:
        raise DomainError(
            "delta = 0 closes the transmission window; the window "
            "condition tan(phi) = -delta/gamma requires a detuned pair")
    phi = -math.atan(delta / gamma)
    if phi <= 0:
        phi += math.pi
    phase = cmath.exp(1j * phi) / math.cos(phi)
    return AdiabaticSite(
        phi=phi,
        gamma=gamma,
        gamma_plus=gamma * phase * (1.0 + math.cos(phi)),
        gamma_minus=gamma * phase * (1.0 - math.cos(phi)),
    )


def t_adiabatic(site: AdiabaticSite, omega: float) -> complex:
    """Narrowband single-photon response ``-exp(-2i phi + 2i omega
    gamma/delta^2)``.

    Valid for ``|omega|`` far below the decay scales (documented, not
    enforced).  The linear term is the group delay ``2 gamma / delta^2``
    of the window; its sign (a pure Fourier-orientation convention) is
    calibrated against the exact pair engine, the same way the overall
    sign is calibrated by the window-center value.
    """
    delta = -site.gamma * math.tan(site.phi)
    return -cmath.exp(-2j * site.phi
                      + 2j * omega * site.gamma / delta ** 2)


def predicted_phase(site: AdiabaticSite) -> float:
    """Predicted conditional phase ``2 phi - pi`` on the principal branch.

    This is the argument of the ``-e^{2i phi}`` factor the narrowband
    theory attaches to the redistributed component; ``pi/2`` at the
    ``delta = gamma`` window.
    """
    return wrap_phase(2.0 * site.phi - math.pi)


def s1_adiabatic_apply(site: AdiabaticSite, pulse: PulseSpec,
                       grid_spec: Optional[GridSpec] = None
                       ) -> TwoPhotonSpectrum:
    """Apply the narrowband single-site two-photon channel to the pulse pair.

    The output is the separable phase response plus an energy-conserving
    redistribution term with one block per collective rate:

    ``t(w1) t(w2) f(w1) f(w2) - (cos^2 phi / pi) e^{-2i phi} *
    sum_b G_b^2 (1/(G_b - i w1) + 1/(G_b - i w2)) K_b(w1 + w2)``

    where ``K_b(s)`` is the two-pole energy kernel, reduced by partial
    fractions to the one-pole kernel:
    ``K_b(s) = 4 pi * kernel(s, G_b) / (2 G_b - i s)``.
    """
    grid_spec = grid_spec or GridSpec()
    x, w = grid_nodes(grid_spec, pulse.sigma_omega)
    fx = spectral_amplitude(pulse, x)
    t_axis = np.array([t_adiabatic(site, float(omega)) for omega in x])
    values = np.outer(t_axis * fx, t_axis * fx)

    s_grid = x[:, None] + x[None, :]
    cos_phi = math.cos(site.phi)
    prefactor = -(cos_phi ** 2 / math.pi) * cmath.exp(-2j * site.phi)
    for rate in (site.gamma_plus, site.gamma_minus):
        resolvent = 1.0 / (rate - 1j * x)
        block = 4.0 * math.pi * joint_excitation_kernel(s_grid, rate, pulse) \
            / (2.0 * rate - 1j * s_grid)
        values += prefactor * rate ** 2 \
            * (resolvent[:, None] + resolvent[None, :]) * block
    return TwoPhotonSpectrum(grid=x, values=values, quadrature_weights=w)
