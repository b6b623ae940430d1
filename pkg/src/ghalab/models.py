"""Catalog of exactly solvable models and their ladder realizations.

Each model exposes a closed-form spectrum, a one-step spectrum map, position
eigenfunctions where they exist, and (for the trigonometric models) the
dressed ladder operators B, C together with the dressing functions G and T.
Deformation recipes name the bounded similarity maps used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebra, specfun
from .algebra import (
    CharacteristicFunction,
    GhaRealization,
    Residual,
    Spectrum,
    TruncatedOperator,
    residual_norms,
)
from .deform import DghaRealization, deform
from .errors import DomainError, NonPseudoBosonic, UnsupportedModel

__all__ = [
    "SimilarityRecipe",
    "rational_pt_recipe",
    "tanh_shift_recipe",
    "inverse_cosine_recipe",
    "custom_samples_recipe",
    "diagonal_sigma_recipe",
    "diagonal_rational_recipe",
    "ModelSpec",
    "poschl_teller",
    "infinite_well",
    "harmonic_oscillator",
    "quon",
    "pseudo_boson_power_model",
    "analytic_spectrum",
    "model_spectrum",
    "model_realization",
    "position_eigenfunction",
    "hermite_function",
    "LadderCoefficients",
    "ladder_coefficients",
    "dressing_g",
    "dressing_t",
    "pt_ladder_matrices",
    "well_ladder_matrices",
    "ladder_algebra_report",
    "pt_algebra_report",
    "well_algebra_report",
    "quon_realization",
    "pseudo_boson_power",
    "power_shift_identities",
    "effective_potential",
    "effective_potential_minimum",
]


# ---------------------------------------------------------------------------
# deformation recipes


@dataclass(frozen=True)
class SimilarityRecipe:
    """Named bounded similarity map, either multiplication by a function of
    position or a function of the shifted number operator."""

    kind: str
    alpha: float | None = None
    k0: int | None = None
    samples: np.ndarray | None = None
    sigma: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    sigma_bounds: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in (
            "rational_pt",
            "tanh_shift",
            "inverse_cosine",
            "custom_samples",
            "diagonal_sigma",
        ):
            raise DomainError(f"unknown recipe kind {self.kind!r}")
        if self.kind == "inverse_cosine":
            if self.alpha is None or self.alpha <= 1:
                raise DomainError("inverse_cosine needs alpha > 1")
            if self.k0 is None or self.k0 < 1 or int(self.k0) != self.k0:
                raise DomainError("inverse_cosine needs integer k0 >= 1")
        if self.kind == "diagonal_sigma":
            if self.sigma is None or self.sigma_bounds is None:
                raise DomainError("diagonal_sigma needs a sigma map and its bounds")
            lo, hi = self.sigma_bounds
            if not 0 < lo <= hi < math.inf:
                raise DomainError(f"sigma bounds must satisfy 0 < lo <= hi, got {self.sigma_bounds}")

    @property
    def is_multiplication(self) -> bool:
        return self.kind != "diagonal_sigma"

    def sample(self, x) -> np.ndarray:
        """Multiplication values S(x) on the given nodes."""
        x = np.asarray(x, dtype=float)
        if self.kind == "rational_pt":
            return (1.0 + 2.0 * x) / (1.0 + x)
        if self.kind == "tanh_shift":
            return 2.0 + np.tanh(x)
        if self.kind == "inverse_cosine":
            return 1.0 / (self.alpha + np.cos(self.k0 * x))
        if self.kind == "custom_samples":
            if self.samples is None or len(self.samples) != x.size:
                raise DomainError("custom samples must match the node count")
            return np.asarray(self.samples, dtype=float)
        raise UnsupportedModel("diagonal recipes have no position samples")

    def sigma_values(self, count: int) -> np.ndarray:
        """sigma(t) at the shifted number values t = 1 .. count."""
        if self.kind != "diagonal_sigma":
            raise UnsupportedModel("only diagonal recipes act through the number operator")
        t = np.arange(1, count + 1, dtype=float)
        vals = np.asarray(self.sigma(t), dtype=float)
        lo, hi = self.sigma_bounds
        if np.any(vals < lo - 1e-12) or np.any(vals > hi + 1e-12):
            raise DomainError("sigma samples violate the declared bounds")
        return vals


def rational_pt_recipe() -> SimilarityRecipe:
    """S(x) = (1 + 2x) / (1 + x), bounded with bounded inverse on [0, pi]."""
    return SimilarityRecipe("rational_pt")


def tanh_shift_recipe() -> SimilarityRecipe:
    """S(x) = 2 + tanh(x), increasing from 1 to 3 on the line."""
    return SimilarityRecipe("tanh_shift")


def inverse_cosine_recipe(alpha: float, k0: int) -> SimilarityRecipe:
    """S(x) = 1 / (alpha + cos(k0 x)) with alpha > 1, integer k0 >= 1."""
    return SimilarityRecipe("inverse_cosine", alpha=alpha, k0=k0)


def custom_samples_recipe(samples) -> SimilarityRecipe:
    samples = np.asarray(samples, dtype=float)
    if np.any(samples <= 0):
        raise DomainError("custom multiplication samples must stay positive")
    return SimilarityRecipe("custom_samples", samples=samples)


def diagonal_sigma_recipe(sigma: Callable, bounds: tuple[float, float]) -> SimilarityRecipe:
    """S = sigma(N + 1), a bounded function of the number operator."""
    return SimilarityRecipe("diagonal_sigma", sigma=sigma, sigma_bounds=bounds)


def diagonal_rational_recipe() -> SimilarityRecipe:
    """sigma(t) = (1 + 2t) / (1 + t), bounded in [3/2, 2)."""
    return diagonal_sigma_recipe(lambda t: (1.0 + 2.0 * t) / (1.0 + t), (1.5, 2.0))


# ---------------------------------------------------------------------------
# model specification


@dataclass(frozen=True)
class ModelSpec:
    """One of the catalog models, optionally paired with a deformation."""

    kind: str
    lam: float | None = None
    q: float | None = None
    k: int | None = None
    deformation: SimilarityRecipe | None = None

    def __post_init__(self):
        if self.kind == "poschl_teller":
            if self.lam is None or self.lam < 1.0:
                raise DomainError(f"trigonometric model needs lam >= 1, got {self.lam}")
        elif self.kind == "quon":
            if self.q is None or not 0.0 < self.q <= 1.0:
                raise DomainError(f"quon parameter must lie in (0, 1], got {self.q}")
        elif self.kind == "pseudo_boson_power":
            if self.k is None or self.k < 1 or int(self.k) != self.k:
                raise DomainError(f"power model needs integer k >= 1, got {self.k}")
        elif self.kind not in ("infinite_well", "harmonic_oscillator"):
            raise DomainError(f"unknown model kind {self.kind!r}")

    @property
    def label(self) -> str:
        extra = {
            "poschl_teller": f"(lam={self.lam})",
            "quon": f"(q={self.q})",
            "pseudo_boson_power": f"(k={self.k})",
        }.get(self.kind, "")
        return self.kind + extra

    @property
    def epsilon0(self) -> float:
        if self.kind == "poschl_teller":
            return self.lam**2
        if self.kind == "infinite_well":
            return 1.0
        return 0.0

    @property
    def interval(self) -> tuple[float, float] | None:
        if self.kind in ("poschl_teller", "infinite_well"):
            return (0.0, math.pi)
        if self.kind == "harmonic_oscillator":
            return (-math.inf, math.inf)
        return None

    def characteristic(self) -> CharacteristicFunction:
        if self.kind in ("poschl_teller", "infinite_well"):
            return algebra.sqrt_shift(domain_min=self.epsilon0)
        if self.kind == "harmonic_oscillator":
            return algebra.affine(1.0, 1.0)
        if self.kind == "quon":
            return algebra.quon_affine(self.q)
        return algebra.power_shift(self.k)


def poschl_teller(lam: float, deformation: SimilarityRecipe | None = None) -> ModelSpec:
    return ModelSpec("poschl_teller", lam=lam, deformation=deformation)


def infinite_well(deformation: SimilarityRecipe | None = None) -> ModelSpec:
    return ModelSpec("infinite_well", deformation=deformation)


def harmonic_oscillator(deformation: SimilarityRecipe | None = None) -> ModelSpec:
    return ModelSpec("harmonic_oscillator", deformation=deformation)


def quon(q: float, deformation: SimilarityRecipe | None = None) -> ModelSpec:
    return ModelSpec("quon", q=q, deformation=deformation)


def pseudo_boson_power_model(k: int) -> ModelSpec:
    return ModelSpec("pseudo_boson_power", k=k)


def analytic_spectrum(model: ModelSpec, n: int) -> float:
    """Closed-form n-th eigenvalue of the undeformed model."""
    if n < 0:
        raise DomainError("level index must be >= 0")
    if model.kind == "poschl_teller":
        return (n + model.lam) ** 2
    if model.kind == "infinite_well":
        return float((n + 1) ** 2)
    if model.kind == "harmonic_oscillator":
        return float(n)
    if model.kind == "quon":
        if model.q == 1.0:
            return float(n)
        return (1.0 - model.q**n) / (1.0 - model.q)
    return float(n ** (model.k + 1))


def model_spectrum(model: ModelSpec, n_max: int) -> Spectrum:
    vals = np.array([analytic_spectrum(model, n) for n in range(n_max + 1)])
    return Spectrum(model.epsilon0, vals)


def model_realization(model: ModelSpec, N: int, margin: int | None = None) -> GhaRealization:
    """Truncated self-adjoint ladder triple of the model in its number basis."""
    return algebra.build_ladder(
        model_spectrum(model, N),
        N,
        margin=margin,
        f=model.characteristic(),
        basis_tag=model.label,
    )


# ---------------------------------------------------------------------------
# position representation


def hermite_function(n: int, x) -> np.ndarray:
    """Normalized oscillator eigenfunction, ground state pi^(-1/4) exp(-x^2/2)."""
    x = np.asarray(x, dtype=float)
    psi_prev = math.pi**-0.25 * np.exp(-(x**2) / 2.0)
    if n == 0:
        return psi_prev
    psi = math.sqrt(2.0) * x * psi_prev
    for m in range(2, n + 1):
        psi_prev, psi = psi, math.sqrt(2.0 / m) * x * psi - math.sqrt((m - 1.0) / m) * psi_prev
    return psi


def position_eigenfunction(model: ModelSpec, n: int, x):
    """Normalized eigenfunction of the undeformed model at position x."""
    if n < 0:
        raise DomainError("level index must be >= 0")
    x = np.asarray(x, dtype=float)
    if model.kind in ("poschl_teller", "infinite_well"):
        if np.any(x < -1e-12) or np.any(x > math.pi + 1e-12):
            raise DomainError("position outside [0, pi]")
        # lam = 1 reduces to the flat-box sines, which the weighted family
        # reproduces; route directly to avoid the degenerate dressing there
        if model.kind == "infinite_well" or model.lam == 1.0:
            return math.sqrt(2.0 / math.pi) * np.sin((n + 1) * x)
        return specfun.normalized_eigenfunction(n, model.lam, np.cos(x))
    if model.kind == "harmonic_oscillator":
        return hermite_function(n, x)
    raise UnsupportedModel(f"{model.label} has no canonical position realization")


# ---------------------------------------------------------------------------
# dressed ladder operators for the trigonometric models


def dressing_g(lam: float, t) -> np.ndarray:
    """G(t) = sqrt((t + 2 lam)(t - 1 + lam) / ((t + 2 lam - 1)(t + lam)))."""
    t = np.asarray(t, dtype=float)
    num = (t + 2.0 * lam) * (t - 1.0 + lam)
    den = (t + 2.0 * lam - 1.0) * (t + lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sqrt(np.where(den != 0, num / den, 0.0))
    return np.where(num < 0, 0.0, out)


def dressing_t(lam: float, t) -> np.ndarray:
    """T(t) = (t + lam) / (t + 2 lam), increasing from 1/2 toward 1."""
    t = np.asarray(t, dtype=float)
    return (t + lam) / (t + 2.0 * lam)


def _raw_lowering(lam: float, n: np.ndarray) -> np.ndarray:
    """Ladder amplitude of the undressed operator B at level n >= 1."""
    return np.sqrt(n * (n + lam) * (n + 2.0 * lam - 1.0) / (n - 1.0 + lam))


def _ladder_suite(lam: float, N: int, margin: int | None) -> dict:
    if N < 2:
        raise DomainError("need at least two levels")
    if margin is None:
        margin = algebra.default_margin(N)
    tag = f"trig(lam={lam})"
    make = lambda m: TruncatedOperator(m, tag, margin)
    t = np.arange(N, dtype=float)
    B = np.diag(_raw_lowering(lam, t[1:]), 1)
    G = np.diag(dressing_g(lam, t))
    T = np.diag(dressing_t(lam, t))
    C = B @ G
    ops = {
        "B": make(B),
        "Bdag": make(B.T),
        "Nhat": make(np.diag(t)),
        "G": make(G),
        "T": make(T),
        "C": make(C),
        "Cdag": make(C.T),
    }
    # construction self-check: the two dressing functions are one object
    gt = dressing_g(lam, t[1:]) - np.sqrt(dressing_t(lam, t[1:] - 1) / dressing_t(lam, t[1:]))
    if np.max(np.abs(gt)) > 1e-12:
        raise DomainError("dressing functions G and T disagree; construction bug")
    return ops


def pt_ladder_matrices(lam: float, N: int, margin: int | None = None) -> dict:
    """Dressed ladder suite {B, Bdag, Nhat, G, T, C, Cdag} for lam > 1."""
    if lam <= 1.0:
        raise DomainError("dressed suite needs lam > 1; use the flat-box suite at lam = 1")
    return _ladder_suite(lam, N, margin)


def well_ladder_matrices(N: int, margin: int | None = None) -> dict:
    """The lam = 1 specialization: G(t) = sqrt(t(t+2))/(t+1), T(t) = (t+1)/(t+2)."""
    return _ladder_suite(1.0, N, margin)


def ladder_algebra_report(ops: dict, lam: float, margin: int | None = None) -> dict:
    """Residuals of every dressed-ladder identity on the truncation interior.

    Covers the diagonal product formula for Bdag B, the factorized products
    of C with its adjoint, the ladder commutator, the intertwining relation,
    and the two smooth-function commutation rules that slide G through B.
    """
    B = ops["B"].entries
    Bd = ops["Bdag"].entries
    C = ops["C"].entries
    Cd = ops["Cdag"].entries
    N = ops["B"].dim
    if margin is None:
        margin = ops["B"].interior_margin
    M = N - margin
    t = np.arange(N, dtype=float)
    eps = (t + lam) ** 2
    eps0 = lam**2
    H = np.diag(eps)
    fH = np.diag((t + lam + 1.0) ** 2)
    ident = np.eye(N)
    g_vals = dressing_g(lam, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        dressing_diag = np.where(g_vals > 0, (eps - eps0) / g_vals**2, 0.0)
    G_up = np.diag(dressing_g(lam, t + 1.0))
    G_dn = np.diag(dressing_g(lam, t - 1.0))
    G = ops["G"].entries
    res = {
        "dressed_product": Bd @ B - np.diag(dressing_diag),
        "factorization": Cd @ C - (H - eps0 * ident),
        "shifted_factorization": C @ Cd - (fH - eps0 * ident),
        "commutator": (C @ Cd - Cd @ C) - (fH - H),
        "intertwine": C @ H - fH @ C,
        "smooth_raise": G_up @ B - B @ G,
        "smooth_lower": G_dn @ Bd - Bd @ G,
    }
    report = {k: residual_norms(v[:, :M]) for k, v in res.items()}
    tgrid = t[1:]
    gt = dressing_g(lam, tgrid) - np.sqrt(dressing_t(lam, tgrid - 1) / dressing_t(lam, tgrid))
    report["gt_identity"] = Residual(float(np.linalg.norm(gt)), float(np.max(np.abs(gt))))
    return report


def pt_algebra_report(lam: float, N: int, margin: int | None = None) -> dict:
    if lam <= 1.0:
        raise DomainError("dressed suite needs lam > 1")
    return ladder_algebra_report(pt_ladder_matrices(lam, N, margin), lam, margin)


def well_algebra_report(N: int, margin: int | None = None) -> dict:
    return ladder_algebra_report(well_ladder_matrices(N, margin), 1.0, margin)


# ---------------------------------------------------------------------------
# ladder coefficient maps


@dataclass(frozen=True)
class LadderCoefficients:
    """Lowering/raising amplitudes as functions of the level index."""

    lowering: Callable[[int], float]
    raising: Callable[[int], float]


def ladder_coefficients(model: ModelSpec) -> LadderCoefficients:
    eps0 = model.epsilon0

    def lowering(n: int) -> float:
        return math.sqrt(analytic_spectrum(model, n) - eps0) if n >= 1 else 0.0

    return LadderCoefficients(lowering=lowering, raising=lambda n: lowering(n + 1))


# ---------------------------------------------------------------------------
# quons and pseudo-boson powers


def quon_realization(
    q: float,
    N: int,
    margin: int | None = None,
    recipe: SimilarityRecipe | None = None,
) -> DghaRealization:
    """Triple (a, b, h) with a b - q b a = 1 on the interior and h = b a.

    q = 1 recovers the canonical pair.  A diagonal recipe conjugates the
    triple by sigma(N + 1); multiplication recipes are rejected because the
    model has no canonical position realization.
    """
    model = quon(q)
    g = model_realization(model, N, margin)
    if recipe is not None:
        if recipe.is_multiplication:
            raise UnsupportedModel("quons only support diagonal deformations")
        sig = recipe.sigma_values(N)
        return deform(g, np.diag(sig), np.diag(1.0 / sig))
    e0 = np.zeros(N)
    e0[0] = 1.0
    return DghaRealization(
        a=g.c, b=g.cdag, h=g.H, f=g.f, phi0=e0, psi0=e0, spectrum=g.spectrum
    )


def _interior_cols(mat: np.ndarray, margin: int) -> np.ndarray:
    return mat[:, : mat.shape[1] - margin]


def pseudo_boson_power(
    k: int,
    N: int | None = None,
    base: DghaRealization | None = None,
    margin: int | None = None,
    comm_tol: float = 1e-10,
) -> DghaRealization:
    """Power-deformed pseudo-boson triple a = A, b = N0^k B, h = N0^(k+1).

    The base pair must satisfy [A, B] = 1 on the interior; by default the
    self-adjoint oscillator pair is used.  The number operator N0 = B A has
    the level index as its spectrum, so h carries n^(k+1) and the one-step
    map is the power shift.
    """
    if k < 1 or int(k) != k:
        raise DomainError(f"power order must be a positive integer, got {k}")
    if base is None:
        if N is None:
            raise DomainError("give either a base realization or a dimension")
        base = quon_realization(1.0, N, margin)
    A = base.a.entries
    B = base.b.entries
    dim = base.dim
    comm = A @ B - B @ A - np.eye(dim)
    defect = np.linalg.norm(_interior_cols(comm, base.margin))
    if defect > comm_tol:
        raise NonPseudoBosonic(
            f"base commutator deviates from 1 by {defect:.3e} on the interior"
        )
    number = B @ A
    h = np.linalg.matrix_power(number, k + 1)
    b = np.linalg.matrix_power(number, k) @ B
    f = algebra.power_shift(k)
    spectrum = Spectrum(0.0, np.arange(dim, dtype=float) ** (k + 1))
    out = DghaRealization(
        a=base.a,
        b=base.b.like(b),
        h=base.h.like(h),
        f=f,
        phi0=base.phi0,
        psi0=base.psi0,
        spectrum=spectrum,
    )
    # closed form of the one-step map on h: (N0 + 1)^(k+1)
    fh = np.linalg.matrix_power(number + np.eye(dim), k + 1)
    hmat = out.h.entries
    scale = max(1.0, float(np.max(np.abs(fh))))
    checks = {
        "hb": hmat @ b - b @ fh,
        "ah": A @ hmat - fh @ A,
        "comm": A @ b - b @ A - (fh - hmat),
    }
    for name, mat in checks.items():
        if np.linalg.norm(_interior_cols(mat, out.margin)) > comm_tol * scale:
            raise NonPseudoBosonic(f"derived triple violates the {name} relation")
    return out


def power_shift_identities(base: DghaRealization, k: int) -> dict:
    """Interior residuals of the three operator-shift identities used above:
    A N0^k = (N0+1)^k A, N0^k B = B (N0+1)^k, B N0^k = (N0-1)^k B."""
    A = base.a.entries
    B = base.b.entries
    dim = base.dim
    number = B @ A
    ident = np.eye(dim)
    npow = np.linalg.matrix_power
    m = base.margin
    return {
        "lower_through": residual_norms(
            _interior_cols(A @ npow(number, k) - npow(number + ident, k) @ A, m)
        ),
        "raise_through": residual_norms(
            _interior_cols(npow(number, k) @ B - B @ npow(number + ident, k), m)
        ),
        "reverse_through": residual_norms(
            _interior_cols(B @ npow(number, k) - npow(number - ident, k) @ B, m)
        ),
    }


# ---------------------------------------------------------------------------
# deformed-oscillator effective potential


def effective_potential(model: ModelSpec, x):
    """x^2/2 - 2(1 - tanh x), the printed effective potential of the
    tanh-deformed oscillator; reported as printed, without endorsing the
    drift term it came with."""
    if model.kind != "harmonic_oscillator" or model.deformation is None or (
        model.deformation.kind != "tanh_shift"
    ):
        raise UnsupportedModel("effective potential defined for the tanh-deformed oscillator")
    x = np.asarray(x, dtype=float)
    return x**2 / 2.0 - 2.0 * (1.0 - np.tanh(x))


def effective_potential_minimum(
    lo: float = -4.0, hi: float = 4.0, step: float = 1e-4
) -> tuple[float, float]:
    """Brute-force grid argmin of the effective potential on [lo, hi]."""
    model = harmonic_oscillator(tanh_shift_recipe())
    count = int(round((hi - lo) / step)) + 1
    x = lo + step * np.arange(count)
    v = effective_potential(model, x)
    i = int(np.argmin(v))
    return float(x[i]), float(v[i])
