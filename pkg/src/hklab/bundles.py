"""Curvature-level bundle checks on the flat torus.

Line bundles carry constant curvature 2-forms; higher rank enters only
through finite-difference experiments on smoothly varying subbundles of a
trivial flat bundle.  For a subbundle frame F with orthogonal complement G,
the full second fundamental form is sigma_mu = G^H d_mu F; its (0,1) part
with respect to a complex structure L vanishes exactly when the subbundle is
L-holomorphic.  With the flat ambient connection the induced curvatures obey

    Theta_1 = sigma^dagger ∧ sigma,      Theta_3 = sigma ∧ sigma^dagger,

which reduce to the classical sub/quotient identities when the subbundle is
holomorphic (sigma of pure type).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import forms
from .ambient import AffineSubtorus
from .forms import ConstantForm, is_su2_invariant, lambda_op
from .quaternions import ImaginaryUnit, complex_structure_operator, fibonacci_structures

__all__ = [
    "is_hyperholomorphic",
    "yang_mills_defect",
    "degree_slope",
    "SubbundleField",
    "second_fundamental_form",
    "full_second_fundamental_form",
    "gauss_codazzi_check",
    "GaussCodazziReport",
    "splitting_check",
    "triholomorphic_section_parallel",
    "dbar_split",
]


# ---------------------------------------------------------------------------
# constant-curvature line bundles

def is_hyperholomorphic(F: ConstantForm, tol: float = 1e-10) -> bool:
    """True iff the curvature form is SU(2)-invariant.

    Equivalent to being of type (1,1) for every induced complex structure.
    """
    if F.degree != 2:
        raise ValueError("curvature of a line bundle is a 2-form")
    return is_su2_invariant(F, tol)


def yang_mills_defect(F: ConstantForm, L: ImaginaryUnit) -> float:
    """|Lambda_L(F)|; vanishes for every L when F is hyperholomorphic."""
    return float(np.abs(lambda_op(F, L).coeffs[0]))


def degree_slope(F: ConstantForm, L: ImaginaryUnit, rank: int,
                 volume: float = 1.0) -> tuple[float, float]:
    """Degree of the first Chern representative and slope = degree / rank."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    from .calibration import degree as degree_functional
    deg = float(np.real(degree_functional(F, L, volume)))
    return deg, deg / rank


# ---------------------------------------------------------------------------
# subbundle fields over a box in the torus

class SubbundleField:
    """Smoothly varying k-dimensional subbundle of the trivial C^rank bundle.

    frame(x) returns an orthonormal (rank, k) basis of the fiber over a point
    x of the base box in R^{4n}.  Differentiation is by central differences
    with local unitary (Procrustes) re-gauging, so the frame's own gauge
    wiggle does not masquerade as geometry.
    """

    def __init__(self, base_dim: int, rank: int, k: int, frame, h: float = 1e-4):
        if not 0 < k < rank:
            raise ValueError("need a proper nonzero subbundle")
        self.base_dim = base_dim
        self.rank = rank
        self.k = k
        self.frame_fn = frame
        self.h = float(h)

    def frame(self, x) -> np.ndarray:
        F = np.asarray(self.frame_fn(np.asarray(x, dtype=float)), dtype=complex)
        if F.shape != (self.rank, self.k):
            raise ValueError(f"frame must be {self.rank} x {self.k}")
        return F

    def complement(self, F: np.ndarray) -> np.ndarray:
        full, _ = np.linalg.qr(np.column_stack([F, np.eye(self.rank)]))
        return full[:, self.k:self.rank]

    def grid(self, resolution: int = 3, box=None) -> np.ndarray:
        box = np.array([[0.1, 0.9]] * self.base_dim) if box is None else np.asarray(box)
        axes = [np.linspace(a, b, resolution) for a, b in box]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def _align(F: np.ndarray, F0: np.ndarray) -> np.ndarray:
    """Unitary Procrustes gauge: rotate F's columns to best match F0."""
    M = F.conj().T @ F0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] < 0.1:
        raise ValueError("frame discontinuity: principal-angle jump between "
                         "neighboring frames (bad gauge)")
    U, _, Vh = np.linalg.svd(M)
    return F @ (U @ Vh)


def full_second_fundamental_form(S: SubbundleField, x, h: float | None = None) -> np.ndarray:
    """sigma[mu] = G^H (d_mu F) at x, shape (base_dim, rank-k, k)."""
    h = S.h if h is None else h
    x = np.asarray(x, dtype=float)
    F0 = S.frame(x)
    G0 = S.complement(F0)
    sigma = np.empty((S.base_dim, S.rank - S.k, S.k), dtype=complex)
    for mu in range(S.base_dim):
        e = np.zeros(S.base_dim); e[mu] = h
        Fp = _align(S.frame(x + e), F0)
        Fm = _align(S.frame(x - e), F0)
        dF = (Fp - Fm) / (2 * h)
        sigma[mu] = G0.conj().T @ dF
    return sigma


def _antiholomorphic_part(covector_field: np.ndarray, Lmat: np.ndarray) -> np.ndarray:
    """(0,1) part of a matrix-valued covector: (theta + i theta∘L)/2."""
    composed = np.tensordot(Lmat, covector_field, axes=(0, 0))
    return 0.5 * (covector_field + 1j * composed)


def second_fundamental_form(S: SubbundleField, L: ImaginaryUnit,
                            x=None, grid=None, h: float | None = None):
    """(0,1) part (w.r.t. L) of the second fundamental form.

    Vanishes exactly when the subbundle is L-holomorphic; vanishing of the
    full form (both types) means the subbundle is parallel.  Returns the
    array A[mu, :, :] at a point, or a list over grid nodes.
    """
    if S.base_dim % 4:
        raise ValueError("the base must be a torus R^{4n}")
    Lmat = complex_structure_operator(L, S.base_dim // 4)
    if x is not None:
        sigma = full_second_fundamental_form(S, x, h)
        return _antiholomorphic_part(sigma, Lmat)
    nodes = S.grid() if grid is None else grid
    return [_antiholomorphic_part(full_second_fundamental_form(S, t, h), Lmat)
            for t in nodes]


def _plaquette_curvature(S: SubbundleField, frames_of, x, mu, nu, h) -> np.ndarray:
    """Discrete curvature of the induced connection from the holonomy of an
    h x h coordinate plaquette centered at x; O(h^2) accurate."""
    e_mu = np.zeros(S.base_dim); e_mu[mu] = 0.5 * h
    e_nu = np.zeros(S.base_dim); e_nu[nu] = 0.5 * h
    corners = [x - e_mu - e_nu, x + e_mu - e_nu, x + e_mu + e_nu, x - e_mu + e_nu]
    Fs = [frames_of(c) for c in corners]

    def link(Fa, Fb):
        M = Fa.conj().T @ Fb
        U, sv, Vh = np.linalg.svd(M)
        if sv[-1] < 0.1:
            raise ValueError("frame discontinuity across a plaquette link")
        return U @ Vh

    P = link(Fs[0], Fs[1]) @ link(Fs[1], Fs[2]) @ link(Fs[2], Fs[3]) @ link(Fs[3], Fs[0])
    return (P - P.conj().T) / (2 * h * h)


def _wedge_pair(a: np.ndarray, b: np.ndarray, mu: int, nu: int) -> np.ndarray:
    """(a ∧ b)_{mu nu} = a_mu b_nu - a_nu b_mu for matrix-valued covectors."""
    return a[mu] @ b[nu] - a[nu] @ b[mu]


@dataclass
class GaussCodazziReport:
    r1: float
    r3: float
    rows: list[dict]
    max_sigma: float

    def csv_lines(self) -> list[str]:
        header = "node,r1,r3,norm_A,lambda_defect_1,lambda_defect_3"
        lines = [header]
        for row in self.rows:
            lines.append("{node},{r1!r},{r3!r},{norm_A!r},{ld1!r},{ld3!r}".format(**row))
        return lines


def gauss_codazzi_check(S: SubbundleField, L: ImaginaryUnit, h: float,
                        grid=None) -> GaussCodazziReport:
    """Residuals of the curvature identities for the induced connections.

    ``r1`` is the worst-node norm of Theta_1 - sigma^dagger ∧ sigma and ``r3``
    of Theta_3 - sigma ∧ sigma^dagger, with Theta measured from plaquette
    holonomies of the projected connections; both are O(h^2).
    """
    if S.base_dim % 4:
        raise ValueError("the base must be a torus R^{4n}")
    Lmat = complex_structure_operator(L, S.base_dim // 4)
    nodes = S.grid() if grid is None else grid
    omega_pairs = list(itertools.combinations(range(S.base_dim), 2))
    omega_matrix = Lmat.T
    rows = []
    r1_max = r3_max = 0.0
    sigma_max = 0.0
    for node_idx, x in enumerate(nodes):
        sigma = full_second_fundamental_form(S, x, h)
        sigma_dag = np.conj(np.transpose(sigma, (0, 2, 1)))
        F0 = S.frame(x)
        G0 = S.complement(F0)
        frames_sub = lambda c: _align(S.frame(c), F0)
        frames_quot = lambda c: _align(S.complement(_align(S.frame(c), F0)), G0)
        ld1 = ld3 = 0.0
        worst1 = worst3 = 0.0
        for mu, nu in omega_pairs:
            theta1 = _plaquette_curvature(S, frames_sub, x, mu, nu, h)
            theta3 = _plaquette_curvature(S, frames_quot, x, mu, nu, h)
            pred1 = _wedge_pair(sigma_dag, sigma, mu, nu)
            pred3 = _wedge_pair(sigma, sigma_dag, mu, nu)
            worst1 = max(worst1, float(np.linalg.norm(theta1 - pred1)))
            worst3 = max(worst3, float(np.linalg.norm(theta3 - pred3)))
            w = omega_matrix[mu, nu]
            ld1 += w * theta1
            ld3 += w * theta3
        ld1_n = float(np.linalg.norm(ld1)) if np.ndim(ld1) else 0.0
        ld3_n = float(np.linalg.norm(ld3)) if np.ndim(ld3) else 0.0
        sig_n = float(np.max(np.abs(sigma)))
        rows.append({"node": node_idx, "r1": worst1, "r3": worst3,
                     "norm_A": sig_n, "ld1": ld1_n, "ld3": ld3_n})
        r1_max = max(r1_max, worst1)
        r3_max = max(r3_max, worst3)
        sigma_max = max(sigma_max, sig_n)
    return GaussCodazziReport(r1_max, r3_max, rows, sigma_max)


def positivity_trace(A: np.ndarray, L: ImaginaryUnit, base_dim: int) -> float:
    """trace of i·Lambda_L(A^dagger ∧ A) for a (0,1)-valued form A; >= 0."""
    Lmat = complex_structure_operator(L, base_dim // 4)
    omega_matrix = Lmat.T
    A_dag = np.conj(np.transpose(A, (0, 2, 1)))
    total = None
    for mu, nu in itertools.combinations(range(base_dim), 2):
        term = omega_matrix[mu, nu] * _wedge_pair(A_dag, A, mu, nu)
        total = term if total is None else total + term
    return float(np.real(np.trace(1j * total)))


def splitting_check(S: SubbundleField, L: ImaginaryUnit, tol: float = 1e-8,
                    h: float | None = None, grid=None) -> dict:
    """Audit the Yang-Mills splitting mechanism on a subbundle field.

    Reports the Lambda-defects of the measured curvatures and the size of the
    second fundamental form; 'splits' is True when the Lambda-defects vanish
    and the second fundamental form is zero at the same tolerance, so the
    implication (Lambda(Theta) = 0 => parallel splitting) is auditable.
    """
    h = S.h if h is None else h
    report = gauss_codazzi_check(S, L, h, grid=grid)
    ld = max(max(row["ld1"], row["ld3"]) for row in report.rows)
    sigma = report.max_sigma
    scale = max(sigma, 1.0)
    lambda_zero = ld <= tol * scale
    sigma_zero = sigma <= tol
    return {"lambda_defect": ld, "norm_A": sigma,
            "lambda_zero": lambda_zero, "splits": bool(lambda_zero and sigma_zero),
            "implication_violated": bool(lambda_zero and not sigma_zero)}


# ---------------------------------------------------------------------------
# triholomorphic sections over a quaternionic subtorus

def dbar_split(section, X: AffineSubtorus, L: ImaginaryUnit,
               grid_resolution: int = 3, h: float = 1e-6):
    """Norms (|dbar_L nu|, |d nu|) of a vector-valued section along X.

    The tangent space of X must be L-stable (quaternionic subtori are).
    """
    Q = X.tangent_frame
    Lmat = X.torus.structure_operator(L)
    Lt = Q.T @ Lmat @ Q
    if np.linalg.norm(Lt @ Lt + np.eye(X.d)) > 1e-9:
        raise ValueError("the subtorus tangent space is not L-stable")
    worst_dbar = 0.0
    worst_d = 0.0
    for p in X.grid(grid_resolution):
        D = np.stack([(np.asarray(section(p + h * Q[:, a]))
                       - np.asarray(section(p - h * Q[:, a]))) / (2 * h)
                      for a in range(X.d)], axis=0)
        dbar = 0.5 * (D + 1j * np.tensordot(Lt, D, axes=(0, 0)))
        worst_dbar = max(worst_dbar, float(np.max(np.abs(dbar))))
        worst_d = max(worst_d, float(np.max(np.abs(D))))
    return worst_dbar, worst_d


def triholomorphic_section_parallel(section, X: AffineSubtorus, I: ImaginaryUnit,
                                    tol: float = 1e-8, grid_resolution: int = 3,
                                    h: float = 1e-6) -> dict:
    """Check dbar_I nu = dbar_{-I} nu = 0  =>  d nu = 0 on a flat bundle.

    Returns the three norms and 'parallel'; since dbar_I + dbar_{-I} is the
    full differential, a holomorphic-but-not-antiholomorphic section is
    correctly not flagged parallel.
    """
    dbar_I, d_norm = dbar_split(section, X, I, grid_resolution, h)
    dbar_mI, _ = dbar_split(section, X, -I, grid_resolution, h)
    premise = dbar_I <= tol and dbar_mI <= tol
    parallel = premise and d_norm <= 2 * tol
    if premise and d_norm > 2 * tol:
        raise AssertionError("dbar_I and dbar_{-I} vanish but d nu does not; "
                             "the flat-connection identity is broken")
    return {"dbar_I": dbar_I, "dbar_minus_I": dbar_mI, "d": d_norm,
            "parallel": bool(parallel)}
