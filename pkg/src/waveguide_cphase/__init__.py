"""Two-photon CPHASE gate simulator for emitter arrays in a 1-D waveguide."""

from .errors import (ConvergenceError, DegeneracyError, DomainError,
                     GeometryError, OptimizationError)
from .model import (EmitterArray, GateResult, PulseSpec,
                    build_interacting_array, build_optimized_array,
                    spectral_amplitude, wrap_phase)
from .quadrature import GridSpec, grid_nodes, integrate_1d, integrate_2d
from .scattering import (CouplingSums, TwoPhotonSpectrum, coupling_sums,
                         gate_fidelity, single_photon_transmission,
                         two_photon_spectrum)
from .transfer import (SpacingPlan, TransferCoeffs, atom_coefficients,
                       atom_transfer, chain_transmission,
                       equal_spacing_maxima,
                       gaussian_reflection_probability,
                       markovian_validity_gap, optimize_spacing,
                       pi_pair_array, spacing_plan_array,
                       transparency_pair_phase)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "CouplingSums",
    "DegeneracyError",
    "DomainError",
    "EmitterArray",
    "GateResult",
    "GeometryError",
    "GridSpec",
    "OptimizationError",
    "PulseSpec",
    "SpacingPlan",
    "TransferCoeffs",
    "TwoPhotonSpectrum",
    "__version__",
    "atom_coefficients",
    "atom_transfer",
    "build_interacting_array",
    "build_optimized_array",
    "chain_transmission",
    "coupling_sums",
    "equal_spacing_maxima",
    "gate_fidelity",
    "gaussian_reflection_probability",
    "grid_nodes",
    "integrate_1d",
    "integrate_2d",
    "markovian_validity_gap",
    "optimize_spacing",
    "pi_pair_array",
    "single_photon_transmission",
    "spacing_plan_array",
    "spectral_amplitude",
    "transparency_pair_phase",
    "two_photon_spectrum",
    "wrap_phase",
]
