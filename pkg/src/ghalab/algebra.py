"""Ladder-operator algebra on truncated number bases.

The central objects are a strictly increasing one-step map ``f`` driving the
energy recursion ``eps[n+1] = f(eps[n])``, the resulting :class:`Spectrum`,
and the N x N lowering/raising/Hamiltonian triple built from it.  Operator
identities are only asserted on the interior of the truncation (the first
``N - margin`` basis vectors) because raising operators leak out of the top
of any finite basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DomainError,
    InsufficientSpectrum,
    NonFiniteValue,
    NonIncreasingSpectrum,
)

__all__ = [
    "CharacteristicFunction",
    "affine",
    "sqrt_shift",
    "quon_affine",
    "power_shift",
    "custom_map",
    "Spectrum",
    "iterate_spectrum",
    "generalized_factorial",
    "TruncatedOperator",
    "default_margin",
    "GhaRealization",
    "tabulated_map",
    "build_ladder",
    "Residual",
    "residual_norms",
    "gha_residuals",
    "susy_partner",
    "check_annihilation",
]


@dataclass(frozen=True)
class CharacteristicFunction:
    """Strictly increasing scalar map generating a spectrum by iteration.

    ``kind`` is a short tag used by reports and config round-trips; ``fn``
    does the actual work and must accept numpy arrays.
    """

    kind: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    params: tuple = ()
    domain_min: float = 0.0

    def __call__(self, x):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.fn(np.asarray(x, dtype=float))

    def is_increasing_near(self, x0: float, span: float = 1.0, samples: int = 33) -> bool:
        """Sample-check strict monotonicity on [x0, x0 + span]."""
        xs = np.linspace(x0, x0 + span, samples)
        ys = self(xs)
        return bool(np.all(np.diff(ys) > 0))


def affine(slope: float, intercept: float, domain_min: float = 0.0) -> CharacteristicFunction:
    if slope <= 0:
        raise DomainError(f"affine map needs positive slope, got {slope}")
    return CharacteristicFunction(
        "affine", lambda x: slope * x + intercept, (slope, intercept), domain_min
    )


def sqrt_shift(domain_min: float = 0.0) -> CharacteristicFunction:
    """x -> (sqrt(x) + 1)^2, the square-spectrum one-step map."""
    return CharacteristicFunction(
        "sqrt_shift", lambda x: (np.sqrt(x) + 1.0) ** 2, (), domain_min
    )


def quon_affine(q: float) -> CharacteristicFunction:
    """x -> q*x + 1; increasing only for q in (0, 1]."""
    if not 0.0 < q <= 1.0:
        raise DomainError(f"quon parameter must lie in (0, 1], got {q}")
    return CharacteristicFunction("quon_affine", lambda x: q * x + 1.0, (q,), 0.0)


def power_shift(k: int) -> CharacteristicFunction:
    """x -> (x^(1/(k+1)) + 1)^(k+1); maps n^(k+1) to (n+1)^(k+1)."""
    if k < 1 or int(k) != k:
        raise DomainError(f"power-shift order must be a positive integer, got {k}")
    p = k + 1
    return CharacteristicFunction(
        "power_shift", lambda x: (x ** (1.0 / p) + 1.0) ** p, (k,), 0.0
    )


def custom_map(fn: Callable, name: str = "custom", domain_min: float = 0.0) -> CharacteristicFunction:
    return CharacteristicFunction(name, lambda x: np.asarray(fn(x), dtype=float), (), domain_min)


@dataclass(frozen=True)
class Spectrum:
    """Ordered energies eps[0..n_max] with eps[n+1] = f(eps[n])."""

    epsilon0: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size == 0:
            raise DomainError("spectrum needs a non-empty 1-d value array")
        if not math.isclose(vals[0], self.epsilon0, rel_tol=0.0, abs_tol=1e-12):
            raise DomainError("values[0] must equal epsilon0")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValue("spectrum contains non-finite energies")
        if vals.size > 1 and not np.all(np.diff(vals) > 0):
            raise NonIncreasingSpectrum("spectrum values must be strictly increasing")

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    def gaps_from_ground(self) -> np.ndarray:
        return self.values - self.epsilon0


def iterate_spectrum(f: CharacteristicFunction, epsilon0: float, n_max: int) -> Spectrum:
    """Iterate eps[n+1] = f(eps[n]) from epsilon0, enforcing strict growth."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if n_max > 0 and not f.is_increasing_near(epsilon0):
        raise NonIncreasingSpectrum(
            f"map {f.kind!r} is not strictly increasing near eps0={epsilon0}"
        )
    vals = np.empty(n_max + 1)
    vals[0] = epsilon0
    for n in range(n_max):
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = float(f(vals[n]))
        if not math.isfinite(nxt):
            raise NonFiniteValue(f"spectrum iteration diverged at n={n + 1}")
        if nxt <= vals[n]:
            raise NonIncreasingSpectrum(
                f"eps[{n + 1}]={nxt} <= eps[{n}]={vals[n]} under map {f.kind!r}"
            )
        vals[n + 1] = nxt
    return Spectrum(epsilon0=float(epsilon0), values=vals)


def generalized_factorial(spectrum: Spectrum, n: int) -> float:
    """Product of the first n gaps (eps[j] - eps[0]), with the 0! = 1 convention."""
    if n < 0 or n > spectrum.n_max:
        raise IndexError(f"n={n} outside spectrum range 0..{spectrum.n_max}")
    gaps = spectrum.values[1 : n + 1] - spectrum.epsilon0
    with np.errstate(over="ignore"):
        return float(np.prod(gaps)) if n else 1.0


def default_margin(dim: int) -> int:
    """Interior margin policy: max(2, dim // 8), clipped below dim."""
    return min(dim - 1, max(2, dim // 8))


@dataclass(frozen=True)
class TruncatedOperator:
    """Square matrix tagged with its basis and a truncation-safety margin."""

    entries: np.ndarray
    basis_tag: str = "number"
    interior_margin: int = 0

    def __post_init__(self):
        mat = np.array(self.entries)
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DomainError(f"operator entries must be square, got shape {mat.shape}")
        if not 0 <= self.interior_margin < mat.shape[0]:
            raise DomainError(
                f"margin {self.interior_margin} must satisfy 0 <= m < {mat.shape[0]}"
            )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def interior_dim(self) -> int:
        return self.dim - self.interior_margin

    def like(self, entries: np.ndarray) -> "TruncatedOperator":
        return TruncatedOperator(entries, self.basis_tag, self.interior_margin)


class Residual(NamedTuple):
    """Frobenius norm plus largest-entry magnitude of a residual matrix."""

    fro: float
    max_abs: float


def residual_norms(mat: np.ndarray) -> Residual:
    if mat.size == 0:
        return Residual(0.0, 0.0)
    return Residual(float(np.linalg.norm(mat)), float(np.max(np.abs(mat))))


@dataclass(frozen=True)
class GhaRealization:
    """Self-adjoint triple (c, cdag, H) with cdag = c^dagger and H diagonal."""

    c: TruncatedOperator
    cdag: TruncatedOperator
    H: TruncatedOperator
    f: CharacteristicFunction
    spectrum: Spectrum

    @property
    def dim(self) -> int:
        return self.c.dim

    @property
    def margin(self) -> int:
        return self.c.interior_margin

    @property
    def interior_dim(self) -> int:
        return self.c.interior_dim


def tabulated_map(spectrum: Spectrum) -> CharacteristicFunction:
    """One-step map read off a spectrum: eps[n] -> eps[n+1], interpolated."""
    xs = spectrum.values[:-1]
    ys = spectrum.values[1:]
    return CharacteristicFunction(
        "tabulated", lambda x: np.interp(x, xs, ys), (), float(spectrum.epsilon0)
    )


def build_ladder(
    spectrum: Spectrum,
    N: int,
    margin: int | None = None,
    f: CharacteristicFunction | None = None,
    basis_tag: str = "number",
) -> GhaRealization:
    """Assemble the truncated triple with lowering weights sqrt(eps[n] - eps[0]).

    The lowering operator has c[n-1, n] = sqrt(eps[n] - eps[0]); its transpose
    raises, and H carries the spectrum on the diagonal.  When no one-step map
    is supplied, a table interpolant of the spectrum stands in for it.
    """
    if spectrum.n_max + 1 < N:
        raise InsufficientSpectrum(
            f"need {N} spectrum values, have {spectrum.n_max + 1}"
        )
    if margin is None:
        margin = default_margin(N)
    if f is None:
        f = tabulated_map(spectrum)
    weights = np.sqrt(spectrum.values[1:N] - spectrum.epsilon0)
    c = np.diag(weights, 1)
    H = np.diag(spectrum.values[:N])
    make = lambda m: TruncatedOperator(m, basis_tag, margin)
    sub = Spectrum(spectrum.epsilon0, spectrum.values[:N])
    return GhaRealization(c=make(c), cdag=make(c.T), H=make(H), f=f, spectrum=sub)


def gha_residuals(g: GhaRealization) -> dict:
    """Interior residuals of the three defining relations.

    Keys: ``intertwine`` for c H - f(H) c, ``commutator`` for
    [c, cdag] - (f(H) - H), ``factorization`` for cdag c + eps0 - H.
    All are right-multiplied by the interior projector before taking norms.
    """
    c = g.c.entries
    cd = g.cdag.entries
    H = g.H.entries
    M = g.interior_dim
    diag = np.diag(H)
    fH = np.diag(np.asarray(g.f(diag), dtype=float))
    eps0 = g.spectrum.epsilon0
    ident = np.eye(g.dim)
    res = {
        "intertwine": c @ H - fH @ c,
        "commutator": (c @ cd - cd @ c) - (fH - H),
        "factorization": cd @ c + eps0 * ident - H,
    }
    return {k: residual_norms(v[:, :M]) for k, v in res.items()}


def susy_partner(g: GhaRealization) -> TruncatedOperator:
    """Partner Hamiltonian c cdag + eps0; on the interior its diagonal is eps[n+1]."""
    mat = g.c.entries @ g.cdag.entries + g.spectrum.epsilon0 * np.eye(g.dim)
    return g.H.like(mat)


def check_annihilation(g: GhaRealization) -> float:
    """Norm of c applied to the first basis vector; 0 for a sound realization."""
    return float(np.linalg.norm(g.c.entries[:, 0]))
