"""Analytic two-photon channel for arrays of energy-exchange-coupled pairs.

Each pair sits at its transparency point, where a single photon is fully
transmitted with the unimodular response :func:`t1_interacting`.  Because
the photons always pass through, the two-photon amplitude keeps unit norm:
the linear part is a product of per-photon phase responses, and the only
nonlinearity is an energy-conserving redistribution term, one inner
integral per site and ordering.  Sites are parameterized directly by their
round-trip transit delays, so pair placement enters only through phase
factors on frequency differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Optional

import numpy as np

from .errors import ConvergenceError, DomainError, GeometryError
from .model import GateResult, PulseSpec, spectral_amplitude, wrap_phase
from .quadrature import GridSpec, grid_nodes
from .scattering import TwoPhotonSpectrum

__all__ = [
    "InteractingGateSpec",
    "equally_spaced_spec",
    "gate_fidelity_interacting",
    "inner_integral",
    "scattered_spectrum_interacting",
    "t1_interacting",
]

#: Starting node count for the inner quadrature; doubled until certified.
_NODE_START = 96
#: Hard cap on inner-quadrature nodes before giving up.
_NODE_CAP = 1536
#: Relative tolerance certified by node doubling.
_INNER_RTOL = 1e-7
#: Energy-sum values processed per block to bound peak memory.
_S_CHUNK = 4096


@dataclass(frozen=True)
class InteractingGateSpec:
    """One gate evaluation on an array of transparent interacting pairs.

    Attributes
    ----------
    n_pairs : int
        Number of pair sites.
    site_phases : tuple of float
        Per-site round-trip transit delay ``2 z_j / c`` in the shared
        inverse-frequency units; multiplies frequency *differences* in the
        scattering phase factors, so an all-zero tuple is the colocated
        ideal.
    gamma : float
        Per-emitter decay rate into the waveguide.  Zero is accepted as
        the structural decoupled limit: the channel is then the identity
        (unit response, no redistribution term).
    pulse : PulseSpec
        Shared spectral envelope of both counterpropagating photons.
    """

    n_pairs: int
    site_phases: tuple[float, ...]
    gamma: float
    pulse: PulseSpec

    def __post_init__(self) -> None:
        object.__setattr__(self, "site_phases",
                           tuple(float(p) for p in self.site_phases))
        if self.n_pairs < 1:
            raise GeometryError("need at least one pair site")
        if len(self.site_phases) != self.n_pairs:
            raise GeometryError(
                f"{self.n_pairs} sites but {len(self.site_phases)} "
                "transit delays")
        if self.gamma < 0:
            raise DomainError(f"gamma {self.gamma} must be >= 0")


def equally_spaced_spec(n_pairs: int, gamma_over_sigma: float,
                        sigma_z_over_c: float, gamma: float = 1.0,
                        shape: str = "gaussian") -> InteractingGateSpec:
    """Spec for equally spaced sites, parameterized like the heatmap axes.

    ``sigma_z_over_c`` is the dimensionless product of pulse bandwidth and
    nearest-neighbor transit time; site ``j`` sits at ``j`` times that
    separation.
    """
    if gamma_over_sigma <= 0:
        raise DomainError("gamma_over_sigma must be positive")
    sigma = gamma / gamma_over_sigma
    pulse = PulseSpec(shape=shape, sigma_omega=sigma)
    delays = tuple(2.0 * j * sigma_z_over_c / sigma for j in range(n_pairs))
    return InteractingGateSpec(n_pairs=n_pairs, site_phases=delays,
                               gamma=gamma, pulse=pulse)


def t1_interacting(omega, gamma: float = 1.0):
    """Unimodular single-photon response of one transparent pair."""
    omega = np.asarray(omega, dtype=float)
    value = -(gamma + 1j * omega) / (gamma - 1j * omega)
    if value.ndim == 0:
        return complex(value)
    return value


# ---------------------------------------------------------------------------
# Inner (energy-conserving) quadrature.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _hermite_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(n)


@lru_cache(maxsize=8)
def _legendre_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _quad_nodes(pulse: PulseSpec, s_vals: np.ndarray, n_nodes: int
                ) -> tuple[np.ndarray, np.ndarray]:
    """Inner-rule nodes ``nu`` and weights with the pulse product folded in.

    Returns ``(nu, weight)`` of shape ``(n_nodes, len(s_vals))`` such that
    ``sum_k weight[k, i] * g(nu[k, i])`` approximates
    ``int dnu f(nu) f(s_i - nu) g(nu)``.  Gaussian pulses use a
    Gauss-Hermite rule centered on ``s/2`` with the envelope absorbed
    analytically; other shapes fall back to a wide mapped Gauss-Legendre
    window with the amplitudes evaluated explicitly.
    """
    s_vals = np.asarray(s_vals, dtype=float)
    if pulse.shape == "gaussian":
        sigma = pulse.sigma_omega
        x, w = _hermite_nodes(n_nodes)
        nu = s_vals[None, :] / 2.0 + math.sqrt(2.0) * sigma * x[:, None]
        envelope = np.exp(-s_vals ** 2 / (8.0 * sigma ** 2)) / math.sqrt(math.pi)
        return nu, w[:, None] * envelope[None, :]
    x, w = _legendre_nodes(n_nodes)
    half = 200.0 * pulse.sigma_omega
    nu = s_vals[None, :] / 2.0 + half * x[:, None]
    amp = (spectral_amplitude(pulse, nu)
           * spectral_amplitude(pulse, s_vals[None, :] - nu))
    return nu, (half * w)[:, None] * amp


def _single_inner(s: float, pow_first: int, pow_second: int, delay: float,
                  gamma: float, pulse: PulseSpec, n_nodes: int) -> complex:
    nu, wgt = _quad_nodes(pulse, np.array([s]), n_nodes)
    nu_b = s - nu
    core = (wgt * t1_interacting(nu, gamma) ** pow_first
            * t1_interacting(nu_b, gamma) ** pow_second
            * np.exp(1j * delay * nu)
            / ((gamma - 1j * nu) * (gamma - 1j * nu_b)))
    return complex(core.sum())


def inner_integral(s: float, pow_first: int, pow_second: int, delay: float,
                   gamma: float, pulse: PulseSpec) -> complex:
    """Certified inner integral for one site term.

    ``int dnu u(nu)^pow_first u(s-nu)^pow_second e^{i delay nu}
    f(nu) f(s-nu) / ((gamma-i nu)(gamma-i(s-nu)))`` with ``u`` the pair
    response; node-doubled until two refinements agree to relative
    ``1e-7``.
    """
    nodes = _NODE_START
    prev = _single_inner(s, pow_first, pow_second, delay, gamma, pulse, nodes)
    while 2 * nodes <= _NODE_CAP:
        nodes *= 2
        cur = _single_inner(s, pow_first, pow_second, delay, gamma, pulse,
                            nodes)
        if abs(cur - prev) <= _INNER_RTOL * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise ConvergenceError(
        "inner quadrature did not converge by node doubling",
        achieved=abs(cur - prev))


def _inner_block(spec: InteractingGateSpec, s_blk: np.ndarray, n_nodes: int
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Site-resolved inner integrals on one block of energy sums.

    Returns ``(early, late)`` of shape ``(n_pairs, len(s_blk))``: the
    integrals attached to the resolvent of the first-exiting and
    second-exiting photon respectively.  Site ``j`` carries response
    powers ``j`` on the integration variable and ``n_pairs-1-j`` on its
    energy partner, built cumulatively.
    """
    gamma = spec.gamma
    n_sites = spec.n_pairs
    nu, wgt = _quad_nodes(spec.pulse, s_blk, n_nodes)
    nu_b = s_blk[None, :] - nu
    u_a = t1_interacting(nu, gamma)
    u_b = t1_interacting(nu_b, gamma)
    base = wgt / ((gamma - 1j * nu) * (gamma - 1j * nu_b))
    early = np.empty((n_sites, len(s_blk)), dtype=complex)
    late = np.empty_like(early)
    pow_a = np.ones_like(u_a)
    pow_b = u_b ** (n_sites - 1)
    for j in range(n_sites):
        core = base * pow_a * pow_b
        tau = spec.site_phases[j]
        if tau == 0.0:
            early[j] = core.sum(axis=0)
            late[j] = early[j]
        else:
            early[j] = (core * np.exp(1j * tau * nu)).sum(axis=0)
            late[j] = (core * np.exp(-1j * tau * nu_b)).sum(axis=0)
        if j < n_sites - 1:
            pow_a = pow_a * u_a
            pow_b = pow_b / u_b
    return early, late


def _inner_all(spec: InteractingGateSpec, s_flat: np.ndarray, n_nodes: int
               ) -> tuple[np.ndarray, np.ndarray]:
    early = np.empty((spec.n_pairs, len(s_flat)), dtype=complex)
    late = np.empty_like(early)
    for start in range(0, len(s_flat), _S_CHUNK):
        blk = slice(start, min(start + _S_CHUNK, len(s_flat)))
        early[:, blk], late[:, blk] = _inner_block(spec, s_flat[blk], n_nodes)
    return early, late


def _certified_inner(spec: InteractingGateSpec, s_flat: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Node-doubled inner integrals, certified to the block-relative
    tolerance (the largest pointwise drift over the largest magnitude)."""
    nodes = _NODE_START
    prev = _inner_all(spec, s_flat, nodes)
    while 2 * nodes <= _NODE_CAP:
        nodes *= 2
        cur = _inner_all(spec, s_flat, nodes)
        scale = max(float(np.max(np.abs(cur[0]))),
                    float(np.max(np.abs(cur[1]))), 1e-300)
        drift = max(float(np.max(np.abs(cur[0] - prev[0]))),
                    float(np.max(np.abs(cur[1] - prev[1]))))
        if drift <= _INNER_RTOL * scale:
            return cur
        prev = cur
    raise ConvergenceError(
        "inner quadrature did not converge by node doubling",
        achieved=drift / scale)


# ---------------------------------------------------------------------------
# Spectrum and gate evaluation.
# ---------------------------------------------------------------------------

def scattered_spectrum_interacting(spec: InteractingGateSpec,
                                   grid_spec: Optional[GridSpec] = None
                                   ) -> TwoPhotonSpectrum:
    """Scattered two-photon spectrum of the transparent-pair array."""
    grid_spec = grid_spec or GridSpec()
    x, w = grid_nodes(grid_spec, spec.pulse.sigma_omega)
    fx = spectral_amplitude(spec.pulse, x)
    if spec.gamma == 0.0:
        return TwoPhotonSpectrum(grid=x, values=np.outer(fx, fx),
                                 quadrature_weights=w)
    gamma = spec.gamma
    n_sites = spec.n_pairs
    t_grid = t1_interacting(x, gamma)
    axis = t_grid ** n_sites * fx
    values = np.outer(axis, axis)

    n_grid = len(x)
    s_flat = (x[:, None] + x[None, :]).ravel()
    early, late = _certified_inner(spec, s_flat)
    res = 1.0 / (gamma - 1j * x)
    # Site j multiplies the first-exit axis by the remaining downstream
    # responses and the second-exit axis by the upstream ones.
    pow_w1 = t_grid ** (n_sites - 1)
    pow_w2 = np.ones_like(t_grid)
    redistribution = np.zeros((n_grid, n_grid), dtype=complex)
    for j in range(n_sites):
        early_j = early[j].reshape(n_grid, n_grid)
        late_j = late[j].reshape(n_grid, n_grid)
        tau = spec.site_phases[j]
        if tau == 0.0:
            ph1 = res
            ph2 = res
        else:
            ph1 = np.exp(-1j * tau * x) * res
            ph2 = np.exp(1j * tau * x) * res
        redistribution += np.outer(pow_w1, pow_w2) * (
            ph1[:, None] * early_j + ph2[None, :] * late_j)
        if j < n_sites - 1:
            pow_w1 = pow_w1 / t_grid
            pow_w2 = pow_w2 * t_grid
    # Four emitter-photon vertices make the redistribution term second
    # order in the decay rate; together with the lambda^-2 scaling of the
    # inner integral and lambda^-1 of the outer resolvent this is the
    # unique power that keeps the amplitude density scale covariant
    # under (omega, gamma, sigma) -> lambda * (omega, gamma, sigma).
    values += (-2.0 * gamma ** 2 / math.pi) * redistribution
    return TwoPhotonSpectrum(grid=x, values=values, quadrature_weights=w)


def _describe(spec: InteractingGateSpec, grid_spec: GridSpec) -> dict[str, Any]:
    return {
        "n_pairs": spec.n_pairs,
        "site_phases": list(spec.site_phases),
        "gamma": spec.gamma,
        "pulse_shape": spec.pulse.shape,
        "sigma_omega": spec.pulse.sigma_omega,
        "pulse_center": spec.pulse.center,
        "grid_half_width": grid_spec.half_width_sigmas,
        "grid_nodes": grid_spec.nodes_per_axis,
        "grid_rule": grid_spec.rule,
    }


def _overlap(spec: InteractingGateSpec, grid_spec: GridSpec
             ) -> tuple[complex, float]:
    spectrum = scattered_spectrum_interacting(spec, grid_spec)
    x, wq = spectrum.grid, spectrum.quadrature_weights
    fx = spectral_amplitude(spec.pulse, x)
    if spec.gamma == 0.0:
        axis = fx.astype(complex)
    else:
        axis = t1_interacting(x, spec.gamma) ** spec.n_pairs * fx
    target = np.conj(np.outer(axis, axis))
    ovl = complex(np.einsum("i,j,ij->", wq, wq, target * spectrum.values))
    norm = float(np.sqrt(np.einsum("i,j,ij->", wq, wq,
                                   np.abs(spectrum.values) ** 2).real))
    return ovl, norm


def gate_fidelity_interacting(spec: InteractingGateSpec,
                              grid_spec: Optional[GridSpec] = None, *,
                              certify: bool = False,
                              certify_tol: float = 1e-4) -> GateResult:
    """Gate overlap against the product of fully transmitted photons.

    The target is the separable state carrying each photon's accumulated
    unimodular response, so the overlap modulus measures how much the
    redistribution term entangles the pair, and its argument is the
    conditional phase.  ``certify=True`` repeats the evaluation on a
    node-doubled grid and requires the modulus to agree to
    ``certify_tol``.
    """
    grid_spec = grid_spec or GridSpec()
    ovl, norm = _overlap(spec, grid_spec)
    params = _describe(spec, grid_spec)
    if certify:
        refined, _ = _overlap(spec, grid_spec.doubled())
        drift = abs(abs(refined) - abs(ovl))
        if drift > certify_tol:
            raise ConvergenceError(
                f"grid not converged: overlap drifts by {drift:.2e} on "
                "node doubling", achieved=drift)
        params["certified_drift"] = drift
    return GateResult(
        sqrt_fidelity=abs(ovl),
        phase=wrap_phase(float(np.angle(ovl))),
        channel_norm=norm,
        params=params,
    )
