"""Gegenbauer polynomials, weighted eigenfunctions, and their recurrences.

Everything here lives on the interval u in [-1, 1] with the weight
du / sqrt(1 - u^2).  The weighted, normalized family

    E_n(u) = K_n * (1 - u^2)^(lam/2) * C_n^lam(u)

is orthonormal in that inner product; the two recurrence residual routines
certify the three-term actions of multiplication by u and of the
non-symmetric operator (1 - u^2) d/du on grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, QuadratureUnderResolved

__all__ = [
    "SampledFunction",
    "log_gamma",
    "gegenbauer",
    "gegenbauer_derivative",
    "norm_constant",
    "normalized_eigenfunction",
    "lowering_amplitude",
    "raising_amplitude",
    "recurrence_residual_multiplication",
    "recurrence_residual_derivative",
    "orthonormality_matrix",
]

# Below this distance from |u| = 1 the weight factor is taken as exactly 0.
ENDPOINT_GUARD = 1e-14


@dataclass(frozen=True)
class SampledFunction:
    """Function values tabulated on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.array(self.grid, dtype=float)
        v = np.array(self.values)
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        if g.ndim != 1 or g.size == 0:
            raise DomainError("grid must be a non-empty 1-d array")
        if np.any(np.diff(g) <= 0):
            raise DomainError("grid must be strictly increasing")
        if v.shape != g.shape:
            raise DomainError("values must match the grid length")


def _as_points(grid) -> np.ndarray:
    """Accept a SampledFunction or a bare array of nodes."""
    if isinstance(grid, SampledFunction):
        return grid.grid
    return np.asarray(grid, dtype=float)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if x <= 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def gegenbauer(n: int, lam: float, u, allow_extrapolation: bool = False):
    """C_n^lam(u) by the forward three-term recurrence.

    Stable for |u| <= 1 in the degree range used here; set
    ``allow_extrapolation`` to evaluate outside the interval anyway.
    """
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    if lam <= 0:
        raise DomainError(f"order must be > 0, got {lam}")
    u = np.asarray(u, dtype=float)
    if not allow_extrapolation and np.any(np.abs(u) > 1 + 1e-12):
        raise DomainError("argument outside [-1, 1]; pass allow_extrapolation=True to override")
    prev = np.ones_like(u)
    if n == 0:
        return prev
    cur = 2.0 * lam * u
    for k in range(2, n + 1):
        prev, cur = cur, (2.0 * (k + lam - 1.0) * u * cur - (k + 2.0 * lam - 2.0) * prev) / k
    return cur


def gegenbauer_derivative(n: int, lam: float, u):
    """d/du C_n^lam(u) = 2 lam C_{n-1}^{lam+1}(u), with the n = 0 case 0."""
    u = np.asarray(u, dtype=float)
    if n == 0:
        return np.zeros_like(u)
    return 2.0 * lam * gegenbauer(n - 1, lam + 1.0, u)


def _log_norm(n: int, lam: float) -> float:
    return (
        log_gamma(lam)
        + (lam - 0.5) * math.log(2.0)
        - 0.5 * math.log(math.pi)
        + 0.5 * (log_gamma(n + 1.0) + math.log(n + lam) - log_gamma(n + 2.0 * lam))
    )


def norm_constant(n: int, lam: float) -> float:
    """Normalization K_n of the weighted family, evaluated in log space."""
    if lam <= 0.5:
        raise DomainError(f"normalization finite only for order > 1/2, got {lam}")
    return math.exp(_log_norm(n, lam))


def _weight_factor(lam: float, u: np.ndarray) -> np.ndarray:
    """(1 - u^2)^(lam/2) with a hard zero inside the endpoint guard."""
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0 - ENDPOINT_GUARD
    out[inside] = np.exp(0.5 * lam * np.log1p(-u[inside] ** 2))
    return out


def normalized_eigenfunction(n: int, lam: float, u, allow_extrapolation: bool = False):
    """E_n(u) = K_n (1-u^2)^(lam/2) C_n^lam(u)."""
    if lam < 1.0:
        raise DomainError(f"weighted family needs order >= 1, got {lam}")
    u = np.asarray(u, dtype=float)
    poly = gegenbauer(n, lam, u, allow_extrapolation=allow_extrapolation)
    return norm_constant(n, lam) * _weight_factor(lam, u) * poly


def lowering_amplitude(n: int, lam: float) -> float:
    """sqrt(n (n + 2 lam - 1) / (n - 1 + lam)); 0 at n = 0."""
    if n == 0:
        return 0.0
    return math.sqrt(n * (n + 2.0 * lam - 1.0) / (n - 1.0 + lam))


def raising_amplitude(n: int, lam: float) -> float:
    """sqrt((n + 1)(n + 2 lam) / (n + 1 + lam))."""
    return math.sqrt((n + 1.0) * (n + 2.0 * lam) / (n + 1.0 + lam))


def recurrence_residual_multiplication(n: int, lam: float, grid) -> float:
    """Max-abs residual of the three-term action of u on E_n over the grid.

    u E_n = (1 / (2 sqrt(n + lam))) [ low(n) E_{n-1} + raise(n) E_{n+1} ];
    the lowering term is dropped at n = 0.
    """
    u = _as_points(grid)
    lhs = u * normalized_eigenfunction(n, lam, u)
    rhs = raising_amplitude(n, lam) * normalized_eigenfunction(n + 1, lam, u)
    if n >= 1:
        rhs = rhs + lowering_amplitude(n, lam) * normalized_eigenfunction(n - 1, lam, u)
    rhs /= 2.0 * math.sqrt(n + lam)
    return float(np.max(np.abs(lhs - rhs)))


def eigenfunction_slope(n: int, lam: float, u):
    """(1 - u^2) d/du E_n(u), assembled from the closed-form polynomial slope."""
    u = np.asarray(u, dtype=float)
    w = _weight_factor(lam, u)
    poly = gegenbauer(n, lam, u)
    dpoly = gegenbauer_derivative(n, lam, u)
    return norm_constant(n, lam) * w * (-lam * u * poly + (1.0 - u**2) * dpoly)


def recurrence_residual_derivative(n: int, lam: float, grid) -> float:
    """Max-abs residual of the action of (1 - u^2) d/du on E_n over the grid.

    (1-u^2) E_n' = (sqrt(n + lam) / 2) [ low(n) E_{n-1} - raise(n) E_{n+1} ].
    """
    u = _as_points(grid)
    lhs = eigenfunction_slope(n, lam, u)
    rhs = -raising_amplitude(n, lam) * normalized_eigenfunction(n + 1, lam, u)
    if n >= 1:
        rhs = rhs + lowering_amplitude(n, lam) * normalized_eigenfunction(n - 1, lam, u)
    rhs *= 0.5 * math.sqrt(n + lam)
    return float(np.max(np.abs(lhs - rhs)))


def orthonormality_matrix(lam: float, n_max: int, quadrature_points: int | None = None) -> np.ndarray:
    """Gram matrix of E_0..E_{n_max} in the du / sqrt(1 - u^2) inner product.

    The integrand E_n E_m / sqrt(1 - u^2) equals K_n K_m C_n C_m times the
    Jacobi weight (1 - u^2)^(lam - 1/2), so Gauss-Jacobi nodes with exponents
    (lam - 1/2, lam - 1/2) integrate it exactly for every order, integer or
    not, once the node count exceeds n_max + 1.  A plain Chebyshev rule is
    only exact for integer orders and stalls near 1e-5 for half-integer ones
    at practical node counts, which is why it is not used here.
    """
    if lam <= 0.5:
        raise DomainError(f"weight integrable only for order > 1/2, got {lam}")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    if quadrature_points is None:
        quadrature_points = 4 * n_max + 16
    nodes, weights = roots_jacobi(quadrature_points, lam - 0.5, lam - 0.5)
    rows = np.empty((n_max + 1, quadrature_points))
    for n in range(n_max + 1):
        rows[n] = math.exp(_log_norm(n, lam)) * gegenbauer(n, lam, nodes)
    gram = (rows * weights) @ rows.T
    diag_dev = float(np.max(np.abs(np.diag(gram) - 1.0)))
    if diag_dev > 0.01:
        raise QuadratureUnderResolved(
            f"diagonal deviates from 1 by {diag_dev:.3e}; increase quadrature_points"
        )
    return gram
