import math

import numpy as np
import pytest

from ghalab import deform, discretize, models
from ghalab.errors import (
    AlignmentFailure,
    DefectivePair,
    DomainError,
    NearZeroSample,
    UnsupportedModel,
)

WELL = models.infinite_well()
PT2 = models.poschl_teller(2.0)
HO = models.harmonic_oscillator()


class TestGrid:
    def test_spacing_and_nodes(self):
        grid = discretize.Grid(0.0, math.pi, 99)
        assert grid.spacing == pytest.approx(math.pi / 100)
        assert grid.nodes[0] == pytest.approx(grid.spacing)
        assert grid.nodes[-1] == pytest.approx(math.pi - grid.spacing)

    def test_minimum_size(self):
        with pytest.raises(DomainError):
            discretize.Grid(0.0, 1.0, 8)

    def test_refinement_halves_spacing(self):
        grid = discretize.Grid(0.0, math.pi, 499)
        fine = grid.refined()
        assert fine.spacing == pytest.approx(grid.spacing / 2)

    def test_default_grids(self):
        assert discretize.default_grid(WELL, 100).x_max == pytest.approx(math.pi)
        ho = discretize.default_grid(HO, 100)
        assert (ho.x_min, ho.x_max) == (-8.0, 8.0)
        with pytest.raises(UnsupportedModel):
            discretize.default_grid(models.quon(0.5), 100)


class TestBuildHamiltonian:
    def test_well_low_spectrum(self):
        grid = discretize.Grid(0.0, math.pi, 800)
        errs = discretize.fd_spectrum_errors(WELL, grid, 3)
        exact = np.array([1.0, 4.0, 9.0])
        assert np.all(errs / exact < 1e-3)

    def test_pt_low_spectrum(self):
        grid = discretize.Grid(0.0, math.pi, 800)
        errs = discretize.fd_spectrum_errors(PT2, grid, 3)
        exact = np.array([4.0, 9.0, 16.0])
        assert np.all(errs / exact < 1e-3)

    def test_oscillator_low_spectrum(self):
        grid = discretize.Grid(-8.0, 8.0, 800)
        errs = discretize.fd_spectrum_errors(HO, grid, 4)
        # ground energy is 0 by convention; check absolute accuracy
        assert np.all(errs < 2e-3)

    @pytest.mark.parametrize("model", [WELL, PT2])
    def test_second_order_convergence(self, model):
        coarse = discretize.Grid(0.0, math.pi, 500)
        fine = coarse.refined()
        err_c = discretize.fd_spectrum_errors(model, coarse, 6)
        err_f = discretize.fd_spectrum_errors(model, fine, 6)
        ratios = err_c / err_f
        assert np.all(ratios > 3.5)
        assert np.all(ratios < 4.5)

    def test_quon_has_no_position_form(self):
        with pytest.raises(UnsupportedModel):
            discretize.build_hamiltonian(models.quon(0.5), discretize.Grid(0, 1, 32))

    def test_pt_potential_capped(self):
        grid = discretize.Grid(0.0, math.pi, 10**6 - 1)
        x = grid.nodes[:1]
        v = discretize.potential_on_grid(models.poschl_teller(8.0), x)
        assert v[0] <= discretize.POTENTIAL_CAP


class TestConjugation:
    def test_unit_samples_no_op(self):
        grid = discretize.Grid(0.0, math.pi, 64)
        H = discretize.build_hamiltonian(WELL, grid)
        np.testing.assert_array_equal(
            discretize.conjugate_by_multiplication(H, np.ones(64)), H
        )

    def test_exact_spectrum_preservation(self):
        grid = discretize.Grid(0.0, math.pi, 400)
        H = discretize.build_hamiltonian(PT2, grid)
        S = models.rational_pt_recipe().sample(grid.nodes)
        hC = discretize.conjugate_by_multiplication(H, S)
        wH = np.sort(np.linalg.eigvalsh(H))[:10]
        wC = np.sort(np.linalg.eigvals(hC).real)[:10]
        assert np.max(np.abs(wH - wC)) < 1e-9

    def test_near_zero_sample_rejected(self):
        grid = discretize.Grid(0.0, math.pi, 32)
        H = discretize.build_hamiltonian(WELL, grid)
        bad = np.ones(32)
        bad[5] = 1e-12
        with pytest.raises(NearZeroSample):
            discretize.conjugate_by_multiplication(H, bad)

    def test_eigenvalues_match_continuum_after_conjugation(self):
        grid = discretize.Grid(0.0, math.pi, 700)
        H = discretize.build_hamiltonian(PT2, grid)
        S = models.rational_pt_recipe().sample(grid.nodes)
        report = discretize.eigensolve(discretize.conjugate_by_multiplication(H, S), 3)
        exact = np.array([4.0, 9.0, 16.0])
        assert np.max(np.abs(report.eigenvalues.real - exact) / exact) < 1e-3


class TestEigensolve:
    def test_symmetric_left_equals_right(self):
        grid = discretize.Grid(0.0, math.pi, 200)
        H = discretize.build_hamiltonian(WELL, grid)
        report = discretize.eigensolve(H, 5)
        assert report.biorth_error < 1e-10
        np.testing.assert_allclose(report.right_vectors, report.left_vectors)
        assert np.all(report.residual_per_pair < 1e-8)

    def test_conjugated_matrix_real_spectrum_biorthogonal(self):
        grid = discretize.Grid(0.0, math.pi, 500)
        H = discretize.build_hamiltonian(PT2, grid)
        S = models.rational_pt_recipe().sample(grid.nodes)
        report = discretize.eigensolve(discretize.conjugate_by_multiplication(H, S), 10)
        assert report.max_imag < 1e-8
        assert report.biorth_error < 1e-8
        assert np.all(report.residual_per_pair < 1e-7)

    def test_near_defective_pair_flagged(self):
        # the two eigenvectors are parallel to within 1e-8, so the pairing
        # falls under any threshold above that
        A = np.array([[1.0, 1.0], [0.0, 1.0 + 1e-8]])
        with pytest.raises(DefectivePair):
            discretize.eigensolve(A, 2, defective_tol=1e-6)

    def test_clean_pair_not_flagged(self):
        A = np.array([[1.0, 1.0], [0.0, 2.0]])
        report = discretize.eigensolve(A, 2, defective_tol=1e-6)
        assert report.biorth_error < 1e-12

    def test_k_bounds(self):
        with pytest.raises(DomainError):
            discretize.eigensolve(np.eye(4), 9)


class TestCompareEigenfunctions:
    def test_undeformed_well_ground_state(self):
        grid = discretize.Grid(0.0, math.pi, 800)
        report = discretize.eigensolve(discretize.build_hamiltonian(WELL, grid), 3)
        dist = discretize.compare_eigenfunctions(report, WELL, grid, n=0)
        assert dist < 1e-3

    def test_tanh_deformed_oscillator_shapes(self):
        grid = discretize.Grid(-8.0, 8.0, 900)
        H = discretize.build_hamiltonian(HO, grid)
        S = models.tanh_shift_recipe().sample(grid.nodes)
        report = discretize.eigensolve(
            discretize.conjugate_by_multiplication(H, S), 3
        )
        right = discretize.compare_eigenfunctions(report, HO, grid, 0, S, "right")
        left = discretize.compare_eigenfunctions(report, HO, grid, 0, S, "left")
        assert right < 1e-3
        assert left < 1e-3

    def test_inverse_cosine_left_vector_expansion(self):
        # the left ground vector of the sigma-conjugated well follows
        # sigma(x) e_0(x) = alpha e_0 + (e_1 - 0)/2 for k0 = 1
        alpha, k0 = 2.0, 1
        grid = discretize.Grid(0.0, math.pi, 900)
        H = discretize.build_hamiltonian(WELL, grid)
        S = models.inverse_cosine_recipe(alpha, k0).sample(grid.nodes)
        report = discretize.eigensolve(
            discretize.conjugate_by_multiplication(H, S), 3
        )
        left = discretize.compare_eigenfunctions(report, WELL, grid, 0, S, "left")
        assert left < 1e-3
        x = grid.nodes
        e = lambda n: math.sqrt(2 / math.pi) * np.sin((n + 1) * x)
        target = alpha * e(0) + 0.5 * e(1)
        v = np.array(report.left_vectors[:, 0])
        v /= np.linalg.norm(v)
        target /= np.linalg.norm(target)
        v *= np.sign(np.vdot(v, target).real)
        assert math.sqrt(grid.spacing) * np.linalg.norm(v - target) < 1e-3

    def test_misaligned_request_raises(self):
        import dataclasses

        grid = discretize.Grid(0.0, math.pi, 400)
        report = discretize.eigensolve(discretize.build_hamiltonian(WELL, grid), 3)
        shuffled = dataclasses.replace(
            report,
            right_vectors=report.right_vectors[:, ::-1],
            left_vectors=report.left_vectors[:, ::-1],
        )
        with pytest.raises(AlignmentFailure):
            discretize.compare_eigenfunctions(shuffled, WELL, grid, n=0)


class TestPrintedForms:
    def test_pt_zeroth_identity_pointwise(self):
        grid = discretize.Grid(0.0, math.pi, 500)
        res = discretize.printed_form_residual("pt_rational", grid, lam=2.0)
        assert res.zeroth_identity_error < 1e-10
        assert res.drift_mismatch < 1e-12
        assert res.gated

    def test_pt_residual_second_order(self):
        coarse = discretize.Grid(0.0, math.pi, 400)
        fine = coarse.refined()
        r_c = discretize.printed_form_residual("pt_rational", coarse, lam=2.0)
        r_f = discretize.printed_form_residual("pt_rational", fine, lam=2.0)
        assert 3.0 < r_c.residual / r_f.residual < 5.0
        assert r_f.residual < 1e-4

    def test_pt_drift_coefficient_at_origin(self):
        # 2 / ((1+x)(1+2x)) -> 2 as x -> 0
        x = 1e-9
        drift = 2.0 / ((1 + x) * (1 + 2 * x))
        assert drift == pytest.approx(2.0, abs=1e-8)

    def test_oscillator_form_informational(self):
        grid = discretize.Grid(-8.0, 8.0, 500)
        res = discretize.printed_form_residual("ho_tanh", grid)
        assert not res.gated
        assert res.residual > 0.01  # kinetic convention mismatch is O(1)
        x = grid.nodes
        S = 2 + np.tanh(x)
        oracle_drift = 2 * (1 - np.tanh(x) ** 2) / S
        printed_drift = 2 * (1 - np.tanh(x))
        expected = float(np.max(np.abs(printed_drift - oracle_drift)))
        assert res.drift_mismatch == pytest.approx(expected, rel=1e-12)

    def test_well_cosine_unit_frequency_gated(self):
        coarse = discretize.Grid(0.0, math.pi, 400)
        fine = coarse.refined()
        r_c = discretize.printed_form_residual("well_cosine", coarse, alpha=2.0, k0=1)
        r_f = discretize.printed_form_residual("well_cosine", fine, alpha=2.0, k0=1)
        assert r_c.gated
        assert r_c.zeroth_identity_error < 1e-12
        assert r_c.residual / r_f.residual > 3.0
        assert r_f.residual < 1e-5

    def test_well_cosine_higher_frequency_reports_mismatch(self):
        grid = discretize.Grid(0.0, math.pi, 400)
        res = discretize.printed_form_residual("well_cosine", grid, alpha=2.0, k0=2)
        assert not res.gated
        assert res.zeroth_identity_error > 0.1

    def test_unknown_variant(self):
        with pytest.raises(DomainError):
            discretize.printed_form_residual("nope", discretize.Grid(0, 1, 32))


class TestModeBasis:
    def test_well_basis_orthonormal(self):
        grid = discretize.Grid(0.0, math.pi, 600)
        U = discretize.sampled_mode_basis(WELL, grid, 24)
        gram = grid.spacing * U.T @ U
        assert np.max(np.abs(gram - np.eye(24))) < 1e-12

    def test_oscillator_needs_wide_box(self):
        tight = discretize.Grid(-6.0, 6.0, 600)
        with pytest.raises(DomainError):
            discretize.sampled_mode_basis(HO, tight, 40)
        wide = discretize.Grid(-12.0, 12.0, 600)
        U = discretize.sampled_mode_basis(HO, wide, 40)
        assert U.shape == (600, 40)

    @pytest.mark.parametrize(
        "model,recipe,grid",
        [
            (PT2, models.rational_pt_recipe(), discretize.Grid(0.0, math.pi, 900)),
            (WELL, models.inverse_cosine_recipe(2.0, 1), discretize.Grid(0.0, math.pi, 900)),
            (HO, models.tanh_shift_recipe(), discretize.Grid(-12.0, 12.0, 900)),
        ],
    )
    def test_grid_mode_dgha_residuals_tight(self, model, recipe, grid):
        d = discretize.grid_mode_dgha(model, recipe, grid, n_modes=40, margin=8)
        fam = deform.build_families(d, 12)
        report = deform.dgha_residuals(d, fam)
        for key in ("hb_intertwine", "ah_intertwine", "commutator"):
            assert report[key].fro < 1e-6, key
        for key in ("lowering_phi", "lowering_psi", "number_pair_ba", "number_pair_ab"):
            assert report[key] < 1e-6, key

    def test_inverse_cosine_raising_has_three_terms(self):
        # sigma * (b e_n) carries exactly the three printed amplitudes
        alpha, k0 = 2.0, 1
        grid = discretize.Grid(0.0, math.pi, 900)
        d = discretize.grid_mode_dgha(
            WELL, models.inverse_cosine_recipe(alpha, k0), grid, n_modes=32, margin=6
        )
        N = 32
        U = discretize.sampled_mode_basis(WELL, grid, N)
        sigma = alpha + np.cos(k0 * grid.nodes)
        sigma_mat = grid.spacing * U.T @ (sigma[:, None] * U)
        eps = (np.arange(N + 2) + 1.0) ** 2
        n = 5
        e_n = np.zeros(N)
        e_n[n] = 1.0
        lifted = sigma_mat @ (d.b.entries @ e_n)
        expected = np.zeros(N)
        expected[n + 1] = alpha * math.sqrt(eps[n + 1] - 1.0)
        expected[n + k0 + 1] = 0.5 * math.sqrt(eps[n + k0 + 1] - 1.0)
        expected[n - k0 + 1] = 0.5 * math.sqrt(eps[n - k0 + 1] - 1.0)
        np.testing.assert_allclose(lifted.real, expected, atol=1e-9)

    def test_multiplication_only(self):
        grid = discretize.Grid(0.0, math.pi, 600)
        with pytest.raises(UnsupportedModel):
            discretize.grid_mode_dgha(WELL, models.diagonal_rational_recipe(), grid)


class TestFdOscillator:
    def test_eigencheck_fd_limited(self):
        # order-h^2 accuracy needs the full production grid to reach 1e-3
        grid = discretize.Grid(-8.0, 8.0, 2000)
        d = discretize.fd_oscillator_dgha(models.tanh_shift_recipe(), grid)
        fam = deform.build_families(d, 5)
        rep = deform.eigencheck(d, fam)
        assert rep["max"] < 1e-3

    def test_ground_state_shapes(self):
        grid = discretize.Grid(-8.0, 8.0, 900)
        d = discretize.fd_oscillator_dgha(models.tanh_shift_recipe(), grid)
        x = grid.nodes
        S = 2 + np.tanh(x)
        e0 = models.hermite_function(0, x)
        want_phi = S * e0 / np.linalg.norm(S * e0)
        got_phi = d.phi0.real / np.linalg.norm(d.phi0)
        np.testing.assert_allclose(got_phi, want_phi, atol=1e-12)

    def test_diagonal_recipe_rejected(self):
        grid = discretize.Grid(-8.0, 8.0, 100)
        with pytest.raises(UnsupportedModel):
            discretize.fd_oscillator_dgha(models.diagonal_rational_recipe(), grid)
