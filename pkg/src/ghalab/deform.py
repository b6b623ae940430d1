"""Similarity deformation of ladder realizations and biorthogonal machinery.

A deformed triple (a, b, h) = (S c S^-1, S cdag S^-1, S H S^-1) keeps the
spectrum of H but loses self-adjointness.  Its eigenvectors come in a
biorthogonal pair of families built by repeated raising from the two ground
states, normalized by the generalized factorial of spectrum gaps.  The
routines here certify the deformed intertwining/commutation relations, the
ladder action on the families, quasi-basis resolution of the identity,
frame-operator conditioning, and the reverse reconstruction of a
self-adjoint triple from the deformed one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import (
    CharacteristicFunction,
    GhaRealization,
    Residual,
    Spectrum,
    TruncatedOperator,
    generalized_factorial,
    residual_norms,
)
from .errors import (
    DefectiveOperator,
    DomainError,
    NotInverse,
    NotPositive,
    RankDeficient,
    SingularMap,
)

__all__ = [
    "DghaRealization",
    "BiorthogonalFamily",
    "FrameDiagnostics",
    "deform",
    "build_families",
    "dgha_residuals",
    "eigencheck",
    "quasi_basis_check",
    "frame_diagnostics",
    "reconstruct_gha",
    "nlpb_check",
]


@dataclass(frozen=True)
class DghaRealization:
    """Non-self-adjoint triple (a, b, h) with paired ground states.

    After construction <psi0, phi0> = 1; a and b play the lowering/raising
    roles that c and cdag play in the undeformed algebra.
    """

    a: TruncatedOperator
    b: TruncatedOperator
    h: TruncatedOperator
    f: CharacteristicFunction
    phi0: np.ndarray
    psi0: np.ndarray
    spectrum: Spectrum

    def __post_init__(self):
        phi = np.array(self.phi0, dtype=complex)
        psi = np.array(self.psi0, dtype=complex)
        phi.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "phi0", phi)
        object.__setattr__(self, "psi0", psi)
        if phi.shape != (self.a.dim,) or psi.shape != (self.a.dim,):
            raise DomainError("ground-state vectors must match the operator dimension")
        pairing = np.vdot(psi, phi)
        if abs(pairing - 1.0) > 1e-6:
            raise DomainError(f"<psi0, phi0> = {pairing:.6g}, expected 1 after normalization")

    @property
    def dim(self) -> int:
        return self.a.dim

    @property
    def margin(self) -> int:
        return self.a.interior_margin

    @property
    def interior_dim(self) -> int:
        return self.a.interior_dim


def _pair_ground_states(phi0: np.ndarray, psi0: np.ndarray):
    """Unit-normalize both vectors, then rescale psi0 so <psi0, phi0> = 1."""
    phi = phi0 / np.linalg.norm(phi0)
    psi = psi0 / np.linalg.norm(psi0)
    pairing = np.vdot(psi, phi)
    if abs(pairing) < 1e-12:
        raise SingularMap("ground states are numerically orthogonal; cannot pair them")
    return phi, psi / np.conj(pairing)


def deform(
    g: GhaRealization,
    S,
    S_inv=None,
    inverse_tol: float = 1e-8,
) -> DghaRealization:
    """Conjugate a self-adjoint realization by an invertible map.

    Produces a = S c S^-1, b = S cdag S^-1, h = S H S^-1, with ground states
    phi0 = S e0 and psi0 = (S^-1)^dagger e0, normalized to unit pairing.  The
    spectrum is untouched: finite matrices are exactly similar.
    """
    S_mat = S.entries if isinstance(S, TruncatedOperator) else np.asarray(S)
    if S_mat.shape != (g.dim, g.dim):
        raise DomainError(f"similarity map shape {S_mat.shape} does not match dim {g.dim}")
    if S_inv is None:
        try:
            S_inv_mat = np.linalg.inv(S_mat)
        except np.linalg.LinAlgError as exc:
            raise SingularMap(f"similarity map is singular: {exc}") from exc
    else:
        S_inv_mat = S_inv.entries if isinstance(S_inv, TruncatedOperator) else np.asarray(S_inv)
    defect = np.max(np.abs(S_mat @ S_inv_mat - np.eye(g.dim)))
    if defect > inverse_tol:
        raise NotInverse(f"S @ S_inv deviates from identity by {defect:.3e}")

    def conj(op: TruncatedOperator) -> TruncatedOperator:
        return op.like(S_mat @ op.entries @ S_inv_mat)

    phi0, psi0 = _pair_ground_states(S_mat[:, 0], S_inv_mat.conj().T[:, 0])
    return DghaRealization(
        a=conj(g.c),
        b=conj(g.cdag),
        h=conj(g.H),
        f=g.f,
        phi0=phi0,
        psi0=psi0,
        spectrum=g.spectrum,
    )


@dataclass(frozen=True)
class BiorthogonalFamily:
    """Paired eigenfamilies phi_n of h and psi_n of h^dagger, with their Gram matrix."""

    phis: np.ndarray  # rows are phi_0 .. phi_n_max
    psis: np.ndarray
    gram: np.ndarray
    spectrum: Spectrum
    interior_dim: int

    @property
    def n_max(self) -> int:
        return self.phis.shape[0] - 1

    def gram_error(self) -> float:
        return float(np.max(np.abs(self.gram - np.eye(self.n_max + 1))))


def build_families(d: DghaRealization, n_max: int) -> BiorthogonalFamily:
    """Raise the paired ground states n_max times with factorial normalization.

    phi_n = b^n phi0 / sqrt((eps_n - eps_0)!) and psi_n uses a^dagger; the
    recursion is sequential because each member feeds the next.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    if n_max + d.margin > d.dim:
        raise DomainError(
            f"family depth {n_max} + margin {d.margin} exceeds dimension {d.dim}"
        )
    if n_max > d.spectrum.n_max:
        raise DomainError("spectrum too short for the requested family depth")
    b = d.b.entries
    a_dag = d.a.entries.conj().T
    phis = np.empty((n_max + 1, d.dim), dtype=complex)
    psis = np.empty_like(phis)
    phis[0] = d.phi0
    psis[0] = d.psi0
    up_phi = np.array(d.phi0)
    up_psi = np.array(d.psi0)
    for n in range(1, n_max + 1):
        up_phi = b @ up_phi
        up_psi = a_dag @ up_psi
        fact = generalized_factorial(d.spectrum, n)
        if not math.isfinite(fact) or fact <= 0:
            raise OverflowError(
                f"generalized factorial overflowed at n={n}; reduce n_max"
            )
        scale = 1.0 / math.sqrt(fact)
        phis[n] = up_phi * scale
        psis[n] = up_psi * scale
    gram = psis.conj() @ phis.T
    return BiorthogonalFamily(
        phis=phis,
        psis=psis,
        gram=gram,
        spectrum=d.spectrum,
        interior_dim=d.interior_dim,
    )


def _sorted_eigensystem(d: DghaRealization, cond_cap: float):
    """Eigendecomposition of h, sorted by real part, with its inverse."""
    w, V = np.linalg.eig(d.h.entries)
    order = np.argsort(w.real, kind="stable")
    w = w[order]
    V = V[:, order]
    cond = np.linalg.cond(V)
    if cond > cond_cap:
        raise DefectiveOperator(
            f"eigenvector condition number {cond:.3e} exceeds cap {cond_cap:.1e}; "
            "matrix functions of h are untrustworthy"
        )
    W = np.linalg.inv(V)
    return w, V, W


def _interior_projector(V: np.ndarray, W: np.ndarray, M: int) -> np.ndarray:
    """Oblique projector onto the span of the M lowest eigenvectors of h.

    For a diagonal h this reduces to the coordinate projector onto the first
    M basis vectors.  Using the spectral version keeps the projector
    similarity-covariant, so truncation-edge defects (which live in the top
    modes) cannot leak into the reported interior residuals.
    """
    return V[:, :M] @ W[:M, :]


def dgha_residuals(
    d: DghaRealization,
    fam: BiorthogonalFamily | None = None,
    cond_cap: float = 1e8,
) -> dict:
    """Interior residuals of the deformed algebra.

    Matrix-level: ``hb_intertwine`` for h b - b f(h), ``ah_intertwine`` for
    a h - f(h) a, ``commutator`` for [a, b] - (f(h) - h), with f(h) evaluated
    through the eigendecomposition of h.  When a family is supplied, the
    vector-level lowering and number-pair residuals are reported as
    ``lowering_phi``, ``lowering_psi``, ``number_pair_ba``, ``number_pair_ab``
    (each the max over the family), plus the spectral imaginary leakage of h.
    """
    a = d.a.entries
    b = d.b.entries
    h = d.h.entries
    M = d.interior_dim
    w, V, W = _sorted_eigensystem(d, cond_cap)
    fh = (V * np.asarray(d.f(w.real), dtype=complex)) @ W
    proj = _interior_projector(V, W, M)
    out: dict = {
        "hb_intertwine": residual_norms((h @ b - b @ fh) @ proj),
        "ah_intertwine": residual_norms((a @ h - fh @ a) @ proj),
        "commutator": residual_norms((a @ b - b @ a - (fh - h)) @ proj),
        "spectrum_imag": float(np.max(np.abs(w.imag))),
    }
    if fam is not None:
        gaps = np.sqrt(fam.spectrum.gaps_from_ground())
        low_phi = low_psi = 0.0
        pair_ba = pair_ab = 0.0
        b_dag = b.conj().T
        for n in range(fam.n_max + 1):
            phi = fam.phis[n]
            psi = fam.psis[n]
            if n >= 1:
                low_phi = max(low_phi, float(np.linalg.norm(a @ phi - gaps[n] * fam.phis[n - 1])))
                low_psi = max(low_psi, float(np.linalg.norm(b_dag @ psi - gaps[n] * fam.psis[n - 1])))
            pair_ba = max(pair_ba, float(np.linalg.norm(b @ (a @ phi) - gaps[n] ** 2 * phi)))
            if n + 1 <= fam.spectrum.n_max:
                up = fam.spectrum.values[n + 1] - fam.spectrum.epsilon0
                pair_ab = max(pair_ab, float(np.linalg.norm(a @ (b @ phi) - up * phi)))
        out["lowering_phi"] = low_phi
        out["lowering_psi"] = low_psi
        out["number_pair_ba"] = pair_ba
        out["number_pair_ab"] = pair_ab
    return out


def eigencheck(d: DghaRealization, fam: BiorthogonalFamily) -> dict:
    """Relative eigen-residuals of h on phi_n and of h^dagger on psi_n, per n."""
    h = d.h.entries
    h_dag = h.conj().T
    eps = fam.spectrum.values
    right = np.empty(fam.n_max + 1)
    left = np.empty(fam.n_max + 1)
    for n in range(fam.n_max + 1):
        phi = fam.phis[n]
        psi = fam.psis[n]
        right[n] = np.linalg.norm(h @ phi - eps[n] * phi) / np.linalg.norm(phi)
        left[n] = np.linalg.norm(h_dag @ psi - eps[n] * psi) / np.linalg.norm(psi)
    return {"right": right, "left": left, "max": float(max(right.max(), left.max()))}


def quasi_basis_check(fam: BiorthogonalFamily, trials: int = 100, seed: int = 0) -> dict:
    """Test the two-sided resolution of the identity on random interior vectors.

    Draws complex Gaussian pairs (f, g) supported on the interior coordinates
    and reports the worst deviation of <f, g> from the family sums
    sum_n <f, psi_n><phi_n, g> and the role-swapped version.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    K = fam.interior_dim
    dim = fam.phis.shape[1]
    worst_direct = 0.0
    worst_swapped = 0.0
    for _ in range(trials):
        f = np.zeros(dim, dtype=complex)
        g = np.zeros(dim, dtype=complex)
        f[:K] = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        g[:K] = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        f /= np.linalg.norm(f)
        g /= np.linalg.norm(g)
        exact = np.vdot(f, g)
        direct = np.sum((fam.psis.conj() @ f).conj() * (fam.phis.conj() @ g))
        swapped = np.sum((fam.phis.conj() @ f).conj() * (fam.psis.conj() @ g))
        worst_direct = max(worst_direct, abs(exact - direct))
        worst_swapped = max(worst_swapped, abs(exact - swapped))
    return {"direct": worst_direct, "swapped": worst_swapped}


@dataclass(frozen=True)
class FrameDiagnostics:
    """Condition numbers of the two frame operators on the interior block."""

    s_phi_condition: float
    s_psi_condition: float
    quasi_basis_residual: float
    riesz_flag: bool
    frame_product_error: float


def _frame_blocks(fam: BiorthogonalFamily):
    K = fam.interior_dim
    Phi = fam.phis[:, :K]
    Psi = fam.psis[:, :K]
    s_phi = Phi.T @ Phi.conj()
    s_psi = Psi.T @ Psi.conj()
    return s_phi, s_psi


def frame_diagnostics(
    fam: BiorthogonalFamily,
    cond_cap: float = 1e6,
    trials: int = 32,
    seed: int = 0,
) -> FrameDiagnostics:
    """Build S_phi = sum |phi_n><phi_n| and S_psi on the interior and assess them.

    Riesz-ness in finite truncation is a heuristic: the flag only says both
    condition numbers stay under the cap and the product S_phi S_psi is close
    to the identity.
    """
    s_phi, s_psi = _frame_blocks(fam)
    K = fam.interior_dim

    def spd_condition(mat, name):
        vals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
        if vals[-1] <= 0 or vals[0] <= 1e-14 * vals[-1]:
            raise RankDeficient(f"{name} is numerically singular on the interior block")
        return float(vals[-1] / vals[0])

    cond_phi = spd_condition(s_phi, "S_phi")
    cond_psi = spd_condition(s_psi, "S_psi")
    product_err = float(np.max(np.abs(s_phi @ s_psi - np.eye(K))))
    quasi = quasi_basis_check(fam, trials=trials, seed=seed)
    return FrameDiagnostics(
        s_phi_condition=cond_phi,
        s_psi_condition=cond_psi,
        quasi_basis_residual=float(max(quasi["direct"], quasi["swapped"])),
        riesz_flag=bool(cond_phi <= cond_cap and cond_psi <= cond_cap),
        frame_product_error=product_err,
    )


def _spd_sqrt(mat: np.ndarray, name: str) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    if vals[0] < -1e-12:
        raise NotPositive(f"{name} has negative eigenvalue {vals[0]:.3e} on the interior")
    if vals[0] < 0:
        warnings.warn(f"{name}: clamping tiny negative eigenvalue {vals[0]:.3e} to 0")
        vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def reconstruct_gha(d: DghaRealization, fam: BiorthogonalFamily):
    """Undo a deformation through the frame-operator square roots.

    Returns a self-adjoint realization on the interior block, built as
    c = S_psi^(1/2) a S_phi^(1/2) (and likewise for cdag and H), together
    with the residuals measuring how well self-adjointness and diagonality
    were actually restored.
    """
    s_phi, s_psi = _frame_blocks(fam)
    K = fam.interior_dim
    root_phi = _spd_sqrt(s_phi, "S_phi")
    root_psi = _spd_sqrt(s_psi, "S_psi")
    a_blk = d.a.entries[:K, :K]
    b_blk = d.b.entries[:K, :K]
    h_blk = d.h.entries[:K, :K]
    c_rec = root_psi @ a_blk @ root_phi
    cdag_rec = root_psi @ b_blk @ root_phi
    H_rec = root_psi @ h_blk @ root_phi
    basis_rec = (root_phi @ fam.psis[: min(K, fam.n_max + 1), :K].T).T

    eps = fam.spectrum.values[:K]
    inner = slice(0, K - 1)
    residuals = {
        "adjoint_restored": residual_norms((c_rec - cdag_rec.conj().T)[:, inner]),
        "hamiltonian_diagonal": residual_norms(
            (H_rec - np.diag(eps))[:, inner]
        ),
        "basis_orthonormal": float(
            np.max(np.abs(basis_rec.conj() @ basis_rec.T - np.eye(basis_rec.shape[0])))
        ),
    }
    margin = max(1, min(d.margin, K - 1))
    tag = d.a.basis_tag + "/reconstructed"
    H_sym = (H_rec + H_rec.conj().T) / 2.0
    realization = GhaRealization(
        c=TruncatedOperator(c_rec, tag, margin),
        cdag=TruncatedOperator(c_rec.conj().T, tag, margin),
        H=TruncatedOperator(H_sym, tag, margin),
        f=d.f,
        spectrum=Spectrum(d.spectrum.epsilon0, eps),
    )
    return realization, residuals


def nlpb_check(
    d: DghaRealization,
    fam: BiorthogonalFamily,
    trials: int = 32,
    seed: int = 0,
) -> dict:
    """Verify the nonlinear pseudo-boson axioms with the ground energy shifted to 0.

    p1/p2: the two ground states are annihilated by a and b^dagger; p3: the
    lowering actions carry sqrt(eps_n - eps_0); the positivity indicator
    <phi_n, [a,b] phi_n> / |phi_n|^2 must equal the spectrum gap
    eps_{n+1} - eps_n.  The basis property (p4) is reported through the
    quasi-basis residual, not asserted.
    """
    a = d.a.entries
    b = d.b.entries
    shifted = fam.spectrum.values - fam.spectrum.epsilon0
    p1 = float(np.linalg.norm(a @ d.phi0) / np.linalg.norm(d.phi0))
    p2 = float(np.linalg.norm(b.conj().T @ d.psi0) / np.linalg.norm(d.psi0))
    p3 = 0.0
    for n in range(1, fam.n_max + 1):
        p3 = max(
            p3,
            float(
                np.linalg.norm(a @ fam.phis[n] - math.sqrt(shifted[n]) * fam.phis[n - 1])
            ),
        )
    comm = a @ b - b @ a
    n_top = min(fam.n_max, fam.spectrum.n_max - 1)
    positivity = np.empty(n_top + 1)
    for n in range(n_top + 1):
        phi = fam.phis[n]
        positivity[n] = np.real(np.vdot(phi, comm @ phi)) / np.linalg.norm(phi) ** 2
    expected_gaps = np.diff(fam.spectrum.values)[: n_top + 1]
    quasi = quasi_basis_check(fam, trials=trials, seed=seed)
    return {
        "p1_annihilation": p1,
        "p2_annihilation": p2,
        "p3_lowering": p3,
        "positivity_values": positivity,
        "positivity_error": float(np.max(np.abs(positivity - expected_gaps))),
        "all_gaps_positive": bool(np.all(positivity > 0)),
        "p4_quasi_basis": float(max(quasi["direct"], quasi["swapped"])),
    }
