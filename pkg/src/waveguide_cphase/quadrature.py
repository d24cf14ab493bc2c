"""Shared numerical integration on truncated real lines.

All spectral integrals in the package run over a symmetric window
``[-W*scale, +W*scale]`` where ``scale`` is the pulse's spectral width and
``W`` the half-width in those units.  Fixed Gauss-Legendre rules do the work;
error estimates come from comparing a rule against its node-doubled
refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .errors import ConvergenceError, DomainError

#: Default half-width of the integration window, in units of the pulse width.
DEFAULT_HALF_WIDTH = 8.0
#: Default number of nodes per axis.
DEFAULT_NODES = 161

_RULES = ("gauss_legendre", "trapezoid")


@dataclass(frozen=True)
class GridSpec:
    """Quadrature grid description.

    Attributes
    ----------
    half_width_sigmas : float
        Window half-width ``W``; the domain is ``[-W*scale, +W*scale]``.
    nodes_per_axis : int
        Number of quadrature nodes per axis.
    rule : str
        Either ``"gauss_legendre"`` or ``"trapezoid"``.
    """

    half_width_sigmas: float = DEFAULT_HALF_WIDTH
    nodes_per_axis: int = DEFAULT_NODES
    rule: str = "gauss_legendre"

    def __post_init__(self) -> None:
        if self.rule not in _RULES:
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.half_width_sigmas < 6:
            raise DomainError("window half-width must be at least 6 pulse widths")
        if self.nodes_per_axis < 41:
            raise DomainError("need at least 41 nodes per axis")
        if self.rule == "trapezoid" and self.nodes_per_axis % 2 == 0:
            raise DomainError("trapezoid rule requires an odd node count")

    def with_nodes(self, nodes: int) -> "GridSpec":
        return GridSpec(self.half_width_sigmas, nodes, self.rule)

    def doubled(self) -> "GridSpec":
        """The same window with (roughly) doubled node density.

        Uses ``2n - 1`` so trapezoid rules stay odd and refinements nest.
        """
        return self.with_nodes(2 * self.nodes_per_axis - 1)


@lru_cache(maxsize=32)
def _legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], cached across calls.

    Node-doubled refinements revisit the same sizes constantly and the rule
    computation dominates at several thousand nodes; callers only ever scale
    the returned arrays, never mutate them.
    """
    return roots_legendre(n)


def grid_nodes(spec: GridSpec, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``spec`` on ``[-W*scale, +W*scale]``.

    Returns
    -------
    (nodes, weights)
        Float arrays of length ``spec.nodes_per_axis``; nodes strictly
        increasing and symmetric about zero, weights positive.
    """
    half = spec.half_width_sigmas * scale
    n = spec.nodes_per_axis
    if spec.rule == "gauss_legendre":
        x, w = _legendre_rule(n)
        return x * half, w * half
    x = np.linspace(-half, half, n)
    h = x[1] - x[0]
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return x, w


def _fixed_rule(f: Callable[[np.ndarray], np.ndarray], spec: GridSpec,
                scale: float) -> complex:
    x, w = grid_nodes(spec, scale)
    return complex(np.sum(np.asarray(f(x)) * w))


def integrate_1d(f: Callable[[np.ndarray], np.ndarray], spec: GridSpec,
                 scale: float = 1.0, rtol: float = 1e-9,
                 atol: float = 1e-12, max_doublings: int = 3) -> tuple[complex, float]:
    """Integrate a vectorized complex-valued ``f`` over the spec's window.

    The estimate is certified by node doubling: the returned value is the
    refined result and the error estimate is the difference from the coarser
    rule.  Raises :class:`ConvergenceError` if three doublings do not reach
    ``max(atol, rtol*|I|)``.
    """
    current = _fixed_rule(f, spec, scale)
    for _ in range(max_doublings):
        spec = spec.doubled()
        refined = _fixed_rule(f, spec, scale)
        err = abs(refined - current)
        if err <= max(atol, rtol * abs(refined)):
            return refined, err
        current = refined
    raise ConvergenceError(
        f"1-D quadrature did not converge after {max_doublings} doublings",
        achieved=err)


def integrate_2d(f: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 spec: GridSpec, scale: float = 1.0, rtol: float = 1e-9,
                 atol: float = 1e-12, max_doublings: int = 3) -> tuple[complex, float]:
    """Tensor-product analogue of :func:`integrate_1d` for ``f(w1, w2)``.

    ``f`` must broadcast over meshgrid-style arrays.
    """

    def fixed(s: GridSpec) -> complex:
        x, w = grid_nodes(s, scale)
        vals = np.asarray(f(x[:, None], x[None, :]))
        return complex(np.einsum("i,j,ij->", w, w, vals))

    current = fixed(spec)
    for _ in range(max_doublings):
        spec = spec.doubled()
        refined = fixed(spec)
        err = abs(refined - current)
        if err <= max(atol, rtol * abs(refined)):
            return refined, err
        current = refined
    raise ConvergenceError(
        f"2-D quadrature did not converge after {max_doublings} doublings",
        achieved=err)
