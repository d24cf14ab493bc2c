"""One- and two-excitation decay matrices and their diagonalizations.

The collective decay operator restricted to the single-excitation sector is
the complex symmetric matrix ``M[i, j] = gamma * exp(i*|phi_i - phi_j|)``.
In the two-excitation sector, states are unordered atom pairs ``(l, m)`` with
``l < m``, and the matrix element between pairs ``(l, m)`` and ``(r, s)`` is
``gamma`` times the four-term Kronecker contraction of the same phase factors.
Both matrices are diagonalized once per geometry; everything downstream works
with eigenvalues, right eigenvectors ``P``/``Q`` and their inverses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DegeneracyError
from .model import EmitterArray

#: Eigenvalue gaps below this fraction of gamma trigger the degeneracy retry.
DEGENERACY_TOLERANCE = 1e-8
#: Magnitude of the deterministic phase perturbation used in the retry.
DEGENERACY_NUDGE = 1e-9


@dataclass(frozen=True)
class EigenSystem:
    """Diagonalization of the single-excitation decay matrix.

    Attributes
    ----------
    matrix : ndarray
        The ``N_a x N_a`` complex symmetric decay matrix.
    values : ndarray
        Eigenvalues sorted by ascending real part (ties by imaginary part).
    right_vectors : ndarray
        Right eigenvectors as columns (``P``).
    inverse_vectors : ndarray
        ``P^{-1}`` computed by direct inversion.
    metadata : dict
        Bookkeeping such as the degeneracy nudge applied, if any.
    """

    matrix: np.ndarray
    values: np.ndarray
    right_vectors: np.ndarray
    inverse_vectors: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class TwoExcEigenSystem(EigenSystem):
    """Diagonalization of the two-excitation decay matrix.

    ``pair_index[j]`` is the ``j``-th unordered atom pair ``(l, m)``,
    ``l < m``, in lexicographic order (0-based atom indices).
    """

    pair_index: tuple[tuple[int, int], ...] = ()


def pair_indices(n_atoms: int) -> tuple[tuple[int, int], ...]:
    """Lexicographic list of unordered atom pairs ``(l, m)``, ``l < m``."""
    return tuple((l, m) for l in range(n_atoms) for m in range(l + 1, n_atoms))


def _phase_matrix(phases: np.ndarray, gamma: float) -> np.ndarray:
    diff = np.abs(phases[:, None] - phases[None, :])
    return gamma * np.exp(1j * diff)


def one_excitation_matrix(array: EmitterArray) -> np.ndarray:
    """The complex symmetric decay matrix in the one-excitation sector."""
    return _phase_matrix(np.asarray(array.phases), array.gamma)


def two_excitation_matrix(array: EmitterArray) -> np.ndarray:
    """Decay matrix in the unordered-pair (two-excitation) sector.

    Entry ``[(l, m), (r, s)]`` is
    ``M[l, s]*d(m, r) + M[l, r]*d(m, s) + M[m, s]*d(l, r) + M[m, r]*d(l, s)``
    with ``M`` the one-excitation matrix and ``d`` the Kronecker delta; the
    diagonal comes out ``2*gamma``.
    """
    m1 = one_excitation_matrix(array)
    pairs = pair_indices(array.n_atoms)
    n = len(pairs)
    out = np.zeros((n, n), dtype=complex)
    for a, (l, m) in enumerate(pairs):
        for b, (r, s) in enumerate(pairs):
            val = 0.0 + 0.0j
            if m == r:
                val += m1[l, s]
            if m == s:
                val += m1[l, r]
            if l == r:
                val += m1[m, s]
            if l == s:
                val += m1[m, r]
            out[a, b] = val
    return out


def diagonalize(matrix: np.ndarray,
                gamma_scale: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues (ascending real part), right vectors, and their inverse.

    Raises :class:`DegeneracyError` when the smallest eigenvalue gap falls
    below ``DEGENERACY_TOLERANCE * gamma_scale``; the spectral formulas
    downstream assume simple (or at least safely separated) eigenvalues.
    """
    matrix = np.asarray(matrix, dtype=complex)
    values, vectors = np.linalg.eig(matrix)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]
    if len(values) > 1:
        gaps = np.abs(values[:, None] - values[None, :])
        np.fill_diagonal(gaps, np.inf)
        gap = float(gaps.min())
        if gap < DEGENERACY_TOLERANCE * gamma_scale:
            raise DegeneracyError(
                f"eigenvalue gap {gap:.3e} below degeneracy tolerance", gap=gap)
    inverse = np.linalg.inv(vectors)
    return values, vectors, inverse


def _nudged(array: EmitterArray) -> tuple[EmitterArray, np.ndarray]:
    """Deterministically perturbed copy used by the degeneracy retry.

    Offsets are a fixed low-discrepancy sequence scaled to at most
    ``DEGENERACY_NUDGE`` radians, derived from the atom counter alone so the
    retry is reproducible.
    """
    n = len(array.phases)
    counter = np.arange(1, n + 1, dtype=float)
    offsets = DEGENERACY_NUDGE * ((counter * 0.6180339887498949) % 1.0)
    phases = tuple(np.asarray(array.phases) + offsets)
    nudged = object.__new__(EmitterArray)
    object.__setattr__(nudged, "phases", phases)
    for name in ("gamma", "delta", "delta_int", "light_speed_phase"):
        object.__setattr__(nudged, name, getattr(array, name))
    return nudged, offsets


def build_eigensystems(array: EmitterArray) -> tuple[EigenSystem, TwoExcEigenSystem]:
    """Diagonalize both sectors, with one deterministic degeneracy retry."""
    metadata: dict[str, Any] = {}
    work = array
    for attempt in (0, 1):
        try:
            m1 = one_excitation_matrix(work)
            vals1, p, pinv = diagonalize(m1, work.gamma)
            m2 = two_excitation_matrix(work)
            vals2, q, qinv = diagonalize(m2, work.gamma)
            break
        except DegeneracyError:
            if attempt == 1:
                raise
            work, offsets = _nudged(array)
            metadata["degeneracy_nudge_radians"] = offsets.tolist()
    one = EigenSystem(matrix=m1, values=vals1, right_vectors=p,
                      inverse_vectors=pinv, metadata=dict(metadata))
    two = TwoExcEigenSystem(matrix=m2, values=vals2, right_vectors=q,
                            inverse_vectors=qinv, metadata=dict(metadata),
                            pair_index=pair_indices(work.n_atoms))
    return one, two


def residuals(system: EigenSystem) -> tuple[float, float]:
    """Max-norm diagnostics: eigen residual (relative) and inversion residual.

    Returns ``(|M P - P D|_max / |M|_max, |P P^{-1} - I|_max)``.
    """
    m, p, pinv = system.matrix, system.right_vectors, system.inverse_vectors
    eig_res = np.abs(m @ p - p * system.values[None, :]).max()
    inv_res = np.abs(p @ pinv - np.eye(len(m))).max()
    return float(eig_res / np.abs(m).max()), float(inv_res)
