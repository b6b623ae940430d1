"""Check orchestration and report emission.

``run_suite`` executes every check applicable to a configuration and folds
the results into a :class:`Report`; check failures never abort the suite,
they become failed entries.  Each check carries the algebraic identity it
certifies, the measured value, its threshold, and a pass/fail verdict;
informational checks (``gated=False``) can never fail the suite.  Reports
are bit-stable for a fixed config and seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from . import algebra, deform, discretize, models, specfun
from .config import RunConfig
from .discretize import Grid
from .errors import GhalabError

__all__ = [
    "CheckResult",
    "Report",
    "run_suite",
    "emit",
    "OPERATIONS",
    "coverage_audit",
    "selftest_configs",
]

REPORT_SCHEMA = "ghalab-report/1"

# every public operation the suite must reach from at least one config
OPERATIONS = frozenset(
    {
        "iterate_spectrum",
        "generalized_factorial",
        "build_ladder",
        "gha_residuals",
        "susy_partner",
        "check_annihilation",
        "gegenbauer",
        "log_gamma",
        "normalized_eigenfunction",
        "recurrence_residual_multiplication",
        "recurrence_residual_derivative",
        "orthonormality_matrix",
        "analytic_spectrum",
        "position_eigenfunction",
        "pt_ladder_matrices",
        "pt_algebra_report",
        "well_ladder_matrices",
        "quon_realization",
        "pseudo_boson_power",
        "effective_potential",
        "deform",
        "build_families",
        "dgha_residuals",
        "eigencheck",
        "quasi_basis_check",
        "frame_diagnostics",
        "reconstruct_gha",
        "nlpb_check",
        "build_hamiltonian",
        "conjugate_by_multiplication",
        "printed_form_residual",
        "eigensolve",
        "compare_eigenfunctions",
    }
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    gated: bool
    identity: str
    note: str = ""
    ops: tuple = ()


@dataclass
class Report:
    config: dict
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    schema: str = REPORT_SCHEMA

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gated)

    def failed_names(self) -> list:
        return [c.name for c in self.checks if c.gated and not c.passed]


def _check(
    checks: list,
    name: str,
    identity: str,
    ops: tuple,
    fn,
    threshold: float,
    gated: bool = True,
    note: str = "",
):
    """Run one check body; exceptions become failed (or noted) entries."""
    try:
        value = float(fn())
    except (GhalabError, OverflowError, np.linalg.LinAlgError) as exc:
        checks.append(
            CheckResult(name, math.nan, threshold, not gated, gated, identity, f"error: {exc}", ops)
        )
        return
    ok = (value <= threshold) if gated else True
    checks.append(CheckResult(name, value, threshold, ok, gated, identity, note, ops))


def _quon_safe_top(q: float, cap: int = 50) -> int:
    """Largest level at which the q-number recursion is still resolvable."""
    if q >= 1.0:
        return cap
    return min(cap, int(math.log(1e-14) / math.log(q)))


# ---------------------------------------------------------------------------
# check groups


def _spectrum_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    n_top = cfg.n_levels
    if model.kind == "quon":
        n_top = min(n_top, _quon_safe_top(model.q))

    def recursion_error():
        spec = algebra.iterate_spectrum(model.characteristic(), model.epsilon0, n_top)
        closed = np.array([models.analytic_spectrum(model, n) for n in range(n_top + 1)])
        scale = np.maximum(np.abs(closed), 1.0)
        return np.max(np.abs(spec.values - closed) / scale)

    _check(
        checks,
        "spectrum_recursion",
        "eps[n+1] = f(eps[n]) matches the closed form",
        ("iterate_spectrum", "analytic_spectrum"),
        recursion_error,
        1e-12,
    )


def _algebra_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    g = models.model_realization(model, cfg.n_levels, cfg.margin)
    tol = cfg.tolerances["algebra"]
    res = algebra.gha_residuals(g)
    identities = {
        "intertwine": "c H = f(H) c",
        "commutator": "[c, cdag] = f(H) - H",
        "factorization": "cdag c + eps0 = H",
    }
    for key, formula in identities.items():
        _check(
            checks,
            f"ladder_{key}",
            formula,
            ("build_ladder", "gha_residuals"),
            lambda key=key: res[key].fro,
            tol,
        )
    M = g.interior_dim

    def susy_gap():
        part = algebra.susy_partner(g)
        expected = g.spectrum.values[1 : M + 1]
        return np.max(np.abs(np.diag(part.entries)[:M] - expected))

    _check(
        checks,
        "susy_shift",
        "c cdag + eps0 has the once-shifted spectrum",
        ("susy_partner",),
        susy_gap,
        tol * max(1.0, float(g.spectrum.values[-1])),
    )
    _check(
        checks,
        "ground_annihilated",
        "c e0 = 0",
        ("check_annihilation",),
        lambda: algebra.check_annihilation(g),
        tol,
    )
    _check(
        checks,
        "factorial_convention",
        "(eps_0 - eps_0)! = 1",
        ("generalized_factorial",),
        lambda: abs(algebra.generalized_factorial(g.spectrum, 0) - 1.0),
        0.0,
    )


def _weighted_family_checks(cfg: RunConfig, checks: list):
    """Recurrence and orthonormality checks for the trigonometric models."""
    model = cfg.model
    lam = model.lam if model.kind == "poschl_teller" else 1.0
    qtol = cfg.tolerances["quadrature"]
    grid = np.linspace(-1.0, 1.0, 203)[1:-1]

    def worst_multiplication():
        return max(
            specfun.recurrence_residual_multiplication(n, lam, grid) for n in range(21)
        )

    def worst_derivative():
        return max(
            specfun.recurrence_residual_derivative(n, lam, grid) for n in range(21)
        )

    _check(
        checks,
        "recurrence_multiplication",
        "u E_n three-term action",
        ("recurrence_residual_multiplication", "normalized_eigenfunction", "gegenbauer", "log_gamma"),
        worst_multiplication,
        qtol,
    )
    _check(
        checks,
        "recurrence_derivative",
        "(1-u^2) d/du E_n three-term action",
        ("recurrence_residual_derivative", "normalized_eigenfunction", "gegenbauer", "log_gamma"),
        worst_derivative,
        qtol,
    )
    _check(
        checks,
        "orthonormality",
        "gram of E_0..E_20 in the weighted inner product",
        ("orthonormality_matrix",),
        lambda: np.max(np.abs(specfun.orthonormality_matrix(lam, 20) - np.eye(21))),
        qtol,
    )

    atol = cfg.tolerances["algebra"]
    if model.kind == "poschl_teller" and lam > 1.0:
        suite = models.pt_algebra_report(lam, cfg.n_levels, cfg.margin)
        ops = ("pt_ladder_matrices", "pt_algebra_report")
    else:
        suite = models.well_algebra_report(cfg.n_levels, cfg.margin)
        ops = ("well_ladder_matrices", "pt_algebra_report")
    formulas = {
        "dressed_product": "Bdag B = G(N)^-2 (H - eps0)",
        "factorization": "Cdag C = H - eps0",
        "shifted_factorization": "C Cdag = f(H) - eps0",
        "commutator": "[C, Cdag] = f(H) - H",
        "intertwine": "C H = f(H) C",
        "smooth_raise": "G(N+1) B = B G(N)",
        "smooth_lower": "G(N-1) Bdag = Bdag G(N)",
        "gt_identity": "G(t) = sqrt(T(t-1)/T(t))",
    }
    for key, formula in formulas.items():
        _check(
            checks,
            f"dressed_{key}",
            formula,
            ops,
            lambda key=key: suite[key].fro,
            atol,
        )


def _quon_dims(cfg: RunConfig) -> tuple:
    """Truncation for quons, capped where the q-number recursion saturates."""
    n_lev = min(cfg.n_levels, _quon_safe_top(cfg.model.q))
    margin = min(cfg.margin, max(1, n_lev // 4))
    return n_lev, margin


def _quon_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    q = model.q
    n_lev, margin = _quon_dims(cfg)
    d = models.quon_realization(q, n_lev, margin)

    def commutation():
        a, b = d.a.entries, d.b.entries
        M = d.interior_dim
        return np.linalg.norm((a @ b - q * b @ a - np.eye(d.dim))[:, :M])

    _check(
        checks,
        "quon_commutation",
        "a b - q b a = 1",
        ("quon_realization",),
        commutation,
        cfg.tolerances["algebra"],
        note=f"truncation capped at {n_lev} levels by double-precision saturation" if n_lev < cfg.n_levels else "",
    )


def _power_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    base = models.quon_realization(1.0, cfg.n_levels, cfg.margin)
    shifts = models.power_shift_identities(base, model.k)
    tol = cfg.tolerances["algebra"]
    scale = float(cfg.n_levels ** model.k)
    formulas = {
        "lower_through": "A N^k = (N+1)^k A",
        "raise_through": "N^k B = B (N+1)^k",
        "reverse_through": "B N^k = (N-1)^k B",
    }
    for key, formula in formulas.items():
        _check(
            checks,
            f"power_{key}",
            formula,
            ("pseudo_boson_power",),
            lambda key=key: shifts[key].fro,
            tol * scale,
            note="threshold scaled by N^k",
        )


def _exact_dgha(cfg: RunConfig):
    """Deformed realization in an exact basis, and its natural family depth."""
    model = cfg.model
    if model.kind == "quon":
        n_lev, margin = _quon_dims(cfg)
        d = models.quon_realization(model.q, n_lev, margin, recipe=model.deformation)
        return d, min(cfg.n_max, d.interior_dim - 1)
    if model.kind == "pseudo_boson_power":
        d = models.pseudo_boson_power(model.k, N=cfg.n_levels, margin=cfg.margin)
        # family norms grow like (n!)^(k/2); keep absolute residuals meaningful
        return d, min(cfg.n_max, 8)
    g = models.model_realization(model, cfg.n_levels, cfg.margin)
    recipe = model.deformation
    if recipe is None:
        return deform.deform(g, np.eye(cfg.n_levels)), cfg.n_max
    sig = recipe.sigma_values(cfg.n_levels)
    return deform.deform(g, np.diag(sig), np.diag(1.0 / sig)), cfg.n_max


def _dgha_suite(
    cfg: RunConfig,
    checks: list,
    d,
    n_max: int,
    label: str,
    tol: float,
    extra_ops: tuple = (),
    gate_frames: bool = False,
    sigma_bound: float | None = None,
):
    """The deformed-algebra residual battery shared by every route."""
    fam = deform.build_families(d, n_max)
    res = deform.dgha_residuals(d, fam)
    base_ops = ("deform", "build_families", "dgha_residuals") + extra_ops
    matrix_formulas = {
        "hb_intertwine": "h b = b f(h)",
        "ah_intertwine": "a h = f(h) a",
        "commutator": "[a, b] = f(h) - h",
    }
    for key, formula in matrix_formulas.items():
        _check(
            checks,
            f"{label}_{key}",
            formula,
            base_ops,
            lambda key=key: res[key].fro,
            tol,
        )
    vector_formulas = {
        "lowering_phi": "a phi_n = sqrt(eps_n - eps_0) phi_{n-1}",
        "lowering_psi": "bdag psi_n = sqrt(eps_n - eps_0) psi_{n-1}",
        "number_pair_ba": "b a phi_n = (eps_n - eps_0) phi_n",
        "number_pair_ab": "a b phi_n = (eps_{n+1} - eps_0) phi_n",
    }
    for key, formula in vector_formulas.items():
        _check(
            checks,
            f"{label}_{key}",
            formula,
            base_ops,
            lambda key=key: res[key],
            tol,
        )
    _check(
        checks,
        f"{label}_gram",
        "<psi_n, phi_m> = delta_nm",
        base_ops,
        fam.gram_error,
        cfg.tolerances["biorthogonality"],
    )
    _check(
        checks,
        f"{label}_eigencheck",
        "h phi_n = eps_n phi_n and hdag psi_n = eps_n psi_n",
        base_ops + ("eigencheck",),
        lambda: deform.eigencheck(d, fam)["max"],
        tol,
    )

    def nlpb_value():
        rep = deform.nlpb_check(d, fam, trials=16, seed=cfg.seed)
        worst = max(rep["p1_annihilation"], rep["p2_annihilation"], rep["positivity_error"])
        if not rep["all_gaps_positive"]:
            worst = max(worst, 1.0)
        return worst

    _check(
        checks,
        f"{label}_nlpb",
        "ground states annihilated; <phi,[a,b]phi> = spectrum gap > 0",
        base_ops + ("nlpb_check", "quasi_basis_check"),
        nlpb_value,
        max(tol, tol * float(np.max(np.abs(fam.spectrum.values)))),
        note="positivity residual scaled by the top energy",
    )

    quasi_gated = gate_frames and fam.n_max + 1 >= fam.interior_dim
    _check(
        checks,
        f"{label}_quasi_basis",
        "<f,g> = sum <f,psi_n><phi_n,g> on the interior",
        base_ops + ("quasi_basis_check",),
        lambda: max(deform.quasi_basis_check(fam, trials=100, seed=cfg.seed).values()),
        cfg.tolerances["biorthogonality"] if quasi_gated else math.inf,
        gated=quasi_gated,
        note="" if quasi_gated else "informational: family does not span the interior or deformation is not diagonal",
    )
    if gate_frames:
        def frame_value():
            diag = deform.frame_diagnostics(fam, seed=cfg.seed)
            bound = sigma_bound if sigma_bound is not None else math.inf
            worst = max(diag.s_phi_condition - bound, diag.frame_product_error)
            return max(worst, 0.0)

        _check(
            checks,
            f"{label}_frame_condition",
            "cond(S_phi) <= (sigma_max/sigma_min)^2 and S_phi S_psi = 1",
            base_ops + ("frame_diagnostics",),
            frame_value,
            1e-6,
            note=f"condition bound {sigma_bound!r}",
        )

        def roundtrip_value():
            rec, residuals = deform.reconstruct_gha(d, fam)
            return max(
                residuals["adjoint_restored"].fro,
                residuals["hamiltonian_diagonal"].fro,
                residuals["basis_orthonormal"],
            )

        _check(
            checks,
            f"{label}_reconstruction",
            "S_psi^(1/2) (a,b,h) S_phi^(1/2) restores the self-adjoint triple",
            base_ops + ("frame_diagnostics", "reconstruct_gha"),
            roundtrip_value,
            1e-8,
        )


def _deformation_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    recipe = model.deformation
    exact_kinds = model.kind in ("quon", "pseudo_boson_power")
    diagonal = recipe is not None and not recipe.is_multiplication
    if exact_kinds or diagonal or recipe is None:
        d, n_max = _exact_dgha(cfg)
        sigma_bound = None
        gate_frames = model.kind not in ("pseudo_boson_power",)
        if diagonal:
            sig = recipe.sigma_values(cfg.n_levels)
            sigma_bound = float((np.max(sig) / np.min(sig)) ** 2)
        elif gate_frames:
            sigma_bound = 1.0  # undeformed frames are orthonormal
        extra = ("quon_realization",) if model.kind == "quon" else ()
        extra = ("pseudo_boson_power",) if model.kind == "pseudo_boson_power" else extra
        # the gated frame checks need the family to span the whole interior
        depth = n_max if not gate_frames else max(n_max, d.interior_dim - 1)
        _dgha_suite(
            cfg,
            checks,
            d,
            depth,
            "deformed",
            cfg.tolerances["algebra"],
            extra_ops=extra,
            gate_frames=gate_frames,
            sigma_bound=sigma_bound,
        )
        if diagonal:
            g = models.model_realization(model, cfg.n_levels, cfg.margin)
            _check(
                checks,
                "diagonal_hamiltonian_unchanged",
                "sigma(N+1) commutes with H, so h = H",
                ("deform",),
                lambda: float(np.max(np.abs(d.h.entries - g.H.entries))),
                cfg.tolerances["algebra"],
            )
        return

    # multiplication recipe: mode-compressed grid realization
    mode_grid = cfg.grid
    if model.kind == "harmonic_oscillator":
        # the sampled mode basis needs a wider box than the FD default
        mode_grid = Grid(-12.0, 12.0, cfg.grid.n_points)
    n_modes = min(40, cfg.n_levels)
    margin = min(cfg.margin, n_modes // 4)
    d = discretize.grid_mode_dgha(models.ModelSpec(
        kind=model.kind, lam=model.lam, q=model.q, k=model.k
    ), recipe, mode_grid, n_modes=n_modes, margin=margin)
    _dgha_suite(
        cfg,
        checks,
        d,
        min(cfg.n_max, n_modes - margin - 1, 12),
        "grid_deformed",
        cfg.tolerances["grid_algebra"],
        extra_ops=("position_eigenfunction",),
        gate_frames=False,
    )


def _grid_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    if model.interval is None:
        return
    base_model = models.ModelSpec(kind=model.kind, lam=model.lam, q=model.q, k=model.k)
    grid = cfg.grid
    etol = cfg.tolerances["eigen"]

    def fd_relative_error():
        errs = discretize.fd_spectrum_errors(base_model, grid, 6)
        exact = np.array([models.analytic_spectrum(base_model, j) for j in range(6)])
        return np.max(errs / np.maximum(np.abs(exact), 1.0))

    _check(
        checks,
        "fd_spectrum",
        "lowest FD eigenvalues match the closed form",
        ("build_hamiltonian", "analytic_spectrum"),
        fd_relative_error,
        etol,
    )

    def convergence_ratio_gap():
        coarse = Grid(grid.x_min, grid.x_max, (grid.n_points + 1) // 2 - 1)
        err_c = discretize.fd_spectrum_errors(base_model, coarse, 6)
        err_f = discretize.fd_spectrum_errors(base_model, grid, 6)
        ratios = err_c / err_f
        return float(np.max(np.abs(ratios - 4.0)))

    _check(
        checks,
        "fd_convergence_order",
        "halving the spacing divides the eigenvalue error by ~4",
        ("build_hamiltonian",),
        convergence_ratio_gap,
        1.0,
        note="distance of the refinement ratio from 4",
    )

    recipe = model.deformation
    if recipe is None or not recipe.is_multiplication:
        _effective_potential_checks(cfg, checks)
        return

    H = discretize.build_hamiltonian(base_model, grid)
    S = recipe.sample(grid.nodes)
    conjugated = discretize.conjugate_by_multiplication(H, S)
    main = np.diag(H).copy()
    off = np.diag(H, 1).copy()
    reference = scipy.linalg.eigh_tridiagonal(main, off, select="i", select_range=(0, 9))[0]
    solve = discretize.eigensolve(conjugated, 10)

    _check(
        checks,
        "similarity_spectrum",
        "diag(S) H diag(S)^-1 keeps the spectrum of H",
        ("conjugate_by_multiplication", "eigensolve"),
        lambda: float(np.max(np.abs(np.sort(solve.eigenvalues.real) - reference))),
        cfg.tolerances["similarity"],
    )
    _check(
        checks,
        "similarity_real_spectrum",
        "conjugated spectrum stays real",
        ("eigensolve",),
        lambda: solve.max_imag,
        cfg.tolerances["biorthogonality"],
    )
    _check(
        checks,
        "left_right_biorthogonality",
        "<w_j, v_k> = delta_jk after pairing",
        ("eigensolve",),
        lambda: solve.biorth_error,
        cfg.tolerances["biorthogonality"],
    )

    def shape_distance():
        worst = 0.0
        for n in range(3):
            for side in ("right", "left"):
                worst = max(
                    worst,
                    discretize.compare_eigenfunctions(solve, base_model, grid, n, S, side),
                )
        return worst

    _check(
        checks,
        "eigenfunction_shapes",
        "right vectors follow S e_n, left vectors follow e_n / S",
        ("compare_eigenfunctions", "position_eigenfunction"),
        shape_distance,
        etol,
    )

    _printed_form_checks(cfg, checks)
    _effective_potential_checks(cfg, checks)


def _printed_form_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    recipe = model.deformation
    grid = cfg.grid
    variant = None
    kwargs = {}
    if model.kind == "poschl_teller" and recipe.kind == "rational_pt":
        variant = "pt_rational"
        kwargs = {"lam": model.lam}
    elif model.kind == "harmonic_oscillator" and recipe.kind == "tanh_shift":
        variant = "ho_tanh"
    elif model.kind == "infinite_well" and recipe.kind == "inverse_cosine":
        variant = "well_cosine"
        kwargs = {"alpha": recipe.alpha, "k0": recipe.k0}
    if variant is None:
        return
    result = discretize.printed_form_residual(variant, grid, **kwargs)
    if variant == "pt_rational":
        _check(
            checks,
            "printed_zeroth_identity",
            "printed potential shift equals S''/S - 2 (S'/S)^2",
            ("printed_form_residual",),
            lambda: result.zeroth_identity_error,
            1e-10,
        )

        def printed_convergence():
            coarse = Grid(grid.x_min, grid.x_max, (grid.n_points + 1) // 2 - 1)
            r_c = discretize.printed_form_residual(variant, coarse, **kwargs)
            return float(abs(r_c.residual / result.residual - 4.0))

        _check(
            checks,
            "printed_form_convergence",
            "printed operator matches the conjugation oracle at order h^2",
            ("printed_form_residual", "conjugate_by_multiplication"),
            printed_convergence,
            1.5,
            note=f"residual at this grid: {result.residual:.3e}",
        )
    else:
        _check(
            checks,
            f"printed_form_{variant}",
            "printed operator vs conjugation oracle",
            ("printed_form_residual", "conjugate_by_multiplication"),
            lambda: result.residual,
            math.inf if not result.gated else cfg.tolerances["eigen"],
            gated=result.gated,
            note=(
                f"drift mismatch {result.drift_mismatch:.3e}; "
                f"zeroth mismatch {result.zeroth_identity_error:.3e}"
            ),
        )


def _effective_potential_checks(cfg: RunConfig, checks: list):
    model = cfg.model
    if model.kind != "harmonic_oscillator" or model.deformation is None:
        return
    if model.deformation.kind != "tanh_shift":
        return
    _check(
        checks,
        "effective_potential_origin",
        "V_eff(0) = -2",
        ("effective_potential",),
        lambda: abs(models.effective_potential(model, 0.0) + 2.0),
        0.0,
    )
    x_star, v_star = models.effective_potential_minimum()
    _check(
        checks,
        "effective_potential_minimum",
        "brute-force argmin of V_eff on [-4, 4]",
        ("effective_potential",),
        lambda: 0.0,
        math.inf,
        gated=False,
        note=f"argmin x={x_star:.4f}, V={v_star:.6f}",
    )


def _tables(cfg: RunConfig) -> dict:
    tables = {}
    model = cfg.model
    base_model = models.ModelSpec(kind=model.kind, lam=model.lam, q=model.q, k=model.k)
    if "spectrum" in cfg.outputs:
        rows = []
        count = 8
        if model.interval is not None:
            H = discretize.build_hamiltonian(base_model, cfg.grid)
            vals = scipy.linalg.eigh_tridiagonal(
                np.diag(H).copy(), np.diag(H, 1).copy(), select="i", select_range=(0, count - 1)
            )[0]
        else:
            vals = [models.analytic_spectrum(base_model, n) for n in range(count)]
        for n in range(count):
            exact = models.analytic_spectrum(base_model, n)
            rows.append((n, exact, float(vals[n]), abs(float(vals[n]) - exact)))
        tables["spectrum"] = (("n", "analytic", "computed", "error"), rows)
    if (
        "potential" in cfg.outputs
        and model.kind == "harmonic_oscillator"
        and model.deformation is not None
        and model.deformation.kind == "tanh_shift"
    ):
        xs = (np.arange(801) - 400) * 0.01
        vs = models.effective_potential(model, xs)
        tables["potential"] = (("x", "V_eff"), [(float(a), float(b)) for a, b in zip(xs, vs)])
    return tables


GROUPS = ("spectrum", "algebra", "weighted", "model", "deformation", "grid")


def run_suite(cfg: RunConfig, groups=None) -> Report:
    """Execute every check applicable to the configuration.

    ``groups`` restricts the run to a subset of check families; by default
    everything applicable runs.
    """
    wanted = set(GROUPS if groups is None else groups)
    unknown = wanted - set(GROUPS)
    if unknown:
        raise ValueError(f"unknown check groups {sorted(unknown)}")
    checks: list = []
    model = cfg.model
    if "spectrum" in wanted:
        _spectrum_checks(cfg, checks)
    if "algebra" in wanted:
        _algebra_checks(cfg, checks)
    if "weighted" in wanted and model.kind in ("poschl_teller", "infinite_well"):
        _weighted_family_checks(cfg, checks)
    if "model" in wanted and model.kind == "quon":
        _quon_checks(cfg, checks)
    if "model" in wanted and model.kind == "pseudo_boson_power":
        _power_checks(cfg, checks)
    if "deformation" in wanted:
        _deformation_checks(cfg, checks)
    if "grid" in wanted:
        _grid_checks(cfg, checks)
    return Report(config=dict(cfg.echo), checks=checks, tables=_tables(cfg))


def coverage_audit(reports) -> tuple:
    """Operations exercised across reports vs the full registry."""
    seen: set = set()
    for report in reports:
        for check in report.checks:
            seen.update(check.ops)
    return seen & OPERATIONS, OPERATIONS - seen


def selftest_configs() -> list:
    """Canned small configs that jointly reach every operation."""
    from .config import config_from_dict

    small = {"truncation": {"n_levels": 24, "margin": 4}, "grid": {"n_points": 400}, "n_max": 10}
    raw = [
        {"model": "poschl_teller", "lambda": 2.0, "deformation": {"kind": "rational_pt"}, **small},
        {"model": "infinite_well", "deformation": {"kind": "inverse_cosine", "alpha": 2.0, "k0": 1}, **small},
        {"model": "infinite_well", "deformation": {"kind": "diagonal_sigma", "sigma": "rational"}, **small},
        {"model": "harmonic_oscillator", "deformation": {"kind": "tanh_shift"}, **small},
        {"model": "quon", "q": 0.5, **small},
        {"model": "pseudo_boson_power", "k": 1, **small},
    ]
    return [config_from_dict(r) for r in raw]


# ---------------------------------------------------------------------------
# emission


def _json_safe(value):
    if value is None or isinstance(value, str) or isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    return value if math.isfinite(value) else None


def _report_dict(report: Report) -> dict:
    return {
        "schema": report.schema,
        "config": report.config,
        "passed": report.passed,
        "checks": [
            {
                "name": c.name,
                "value": _json_safe(c.value),
                "threshold": _json_safe(c.threshold),
                "passed": c.passed,
                "gated": c.gated,
                "identity": c.identity,
                "note": c.note,
            }
            for c in report.checks
        ],
    }


def _render_table(report: Report) -> str:
    lines = [f"{'check':<38} {'value':>12} {'threshold':>12}  verdict"]
    lines.append("-" * 78)
    for c in report.checks:
        value = "nan" if not math.isfinite(c.value) else f"{c.value:.3e}"
        threshold = "-" if not math.isfinite(c.threshold) else f"{c.threshold:.1e}"
        verdict = ("PASS" if c.passed else "FAIL") if c.gated else "info"
        lines.append(f"{c.name:<38} {value:>12} {threshold:>12}  {verdict}")
        if c.note:
            lines.append(f"    {c.note}")
    lines.append("-" * 78)
    lines.append(f"overall: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, data: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


def emit(report: Report, fmt: str = "json", out_dir=".") -> list:
    """Write the report (and any requested tables) into out_dir.

    Returns the written paths.  Output is byte-stable for identical config
    and seed.
    """
    if fmt not in ("json", "csv", "table"):
        raise ValueError(f"unknown format {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        path = out / "report.json"
        _atomic_write(path, json.dumps(_report_dict(report), indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        path = out / "checks.csv"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "value", "threshold", "passed", "gated", "identity", "note"])
        for c in report.checks:
            writer.writerow(
                [
                    c.name,
                    repr(c.value),
                    repr(c.threshold),
                    c.passed,
                    c.gated,
                    c.identity,
                    c.note,
                ]
            )
        _atomic_write(path, buf.getvalue())
    else:
        path = out / "report.txt"
        _atomic_write(path, _render_table(report))
    written.append(path)

    for name, (header, rows) in report.tables.items():
        tpath = out / f"{name}.csv"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        _atomic_write(tpath, buf.getvalue())
        written.append(tpath)
    return written
