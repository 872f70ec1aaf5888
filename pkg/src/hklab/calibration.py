"""Calibration machinery: Wirtinger ratios, volumes, trianalyticity verdicts,
degrees of classes, and dual classes of subtori.

Normalization: xi_ratio divides the restricted omega^m by m! * Vol, so the
ratio lies in [0, 1] and equals 1 exactly on complex subspaces (checked
against a brute-force restriction oracle in the tests).  The raw ratio
|omega^m / Vol| is exposed separately.  All verdicts key off the equality
case only, which is normalization independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import forms
from .ambient import (AffineSubtorus, HKTorus, ParametrizedPatch, _oriented_qr,
                      structure_kernel)
from .forms import ConstantForm, kahler_form, pullback, top_coefficient, wedge, wedge_power
from .quaternions import (ImaginaryUnit, complex_structure_operator,
                          fibonacci_structures, standard_triple)

__all__ = [
    "OracleDisagreement",
    "TrianalyticVerdict",
    "pfaffian",
    "xi_ratio",
    "xi_ratio_raw",
    "symplectic_volume",
    "is_complex_analytic",
    "is_trianalytic",
    "degree",
    "degree_su2_invariance_check",
    "dual_class",
    "integrate_constant_form_over",
    "isometry_image_check",
    "riemannian_volume_patch",
]


class OracleDisagreement(RuntimeError):
    """Volume verdict and exact linear oracle disagree: convention or quadrature bug."""


def pfaffian(A) -> float:
    """Pfaffian of a real antisymmetric matrix (recursive expansion, small n)."""
    A = np.asarray(A)
    n = A.shape[0]
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    if n == 2:
        return float(A[0, 1])
    total = 0.0
    idx = list(range(1, n))
    for pos, j in enumerate(idx):
        if A[0, j] == 0.0:
            continue
        rest = [k for k in idx if k != j]
        sign = (-1.0) ** pos
        total += sign * A[0, j] * pfaffian(A[np.ix_(rest, rest)])
    return float(total)


def _omega_matrix(L: ImaginaryUnit, n: int) -> np.ndarray:
    """Matrix S with omega_L(v, w) = v^T S w."""
    return complex_structure_operator(L, n).T


def _restricted_pfaffian(W, L: ImaginaryUnit) -> float:
    W = np.asarray(W, dtype=float)
    dim = W.shape[0]
    if dim % 4:
        raise ValueError("ambient dimension must be 4n")
    if W.shape[1] % 2:
        raise ValueError("odd-dimensional subspace has no symplectic volume")
    Q = _oriented_qr(W)
    S = _omega_matrix(L, dim // 4)
    return pfaffian(Q.T @ S @ Q)


def xi_ratio(W, L: ImaginaryUnit) -> float:
    """|(omega_L restricted to W)^m / (m! Vol_W)| for a 2m-dimensional subspace.

    Lies in [0, 1]; equals 1 iff W is L-complex.
    """
    return abs(_restricted_pfaffian(W, L))


def xi_ratio_raw(W, L: ImaginaryUnit) -> float:
    """The unnormalized ratio |omega^m / Vol|; equals m! on complex subspaces."""
    m = np.asarray(W).shape[1] // 2
    return math.factorial(m) * xi_ratio(W, L)


def symplectic_volume(X, L: ImaginaryUnit, quadrature: int = 8):
    """(1/m!) |integral of omega_L^m| over the submanifold.

    Exact for affine subtori (constant restriction); tensor Gauss-Legendre
    quadrature with a reported error estimate for patches.  Returns a float
    for subtori and (value, error_estimate) for patches.
    """
    if isinstance(X, AffineSubtorus):
        return xi_ratio(X.periods, L) * X.riemannian_volume()
    if isinstance(X, ParametrizedPatch):
        val1 = _patch_symplectic(X, L, quadrature)
        val2 = _patch_symplectic(X, L, quadrature + 4)
        return abs(val2), abs(val2 - val1)
    raise TypeError(f"unsupported submanifold {type(X)!r}")


def _patch_symplectic(patch: ParametrizedPatch, L: ImaginaryUnit, order: int) -> float:
    if patch.d % 2:
        raise ValueError("odd-dimensional patch has no symplectic volume")
    S = _omega_matrix(L, patch.ambient.n)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    axes, wts = [], []
    for a, b in patch.box:
        axes.append(0.5 * (b - a) * nodes + 0.5 * (a + b))
        wts.append(0.5 * (b - a) * weights)
    mesh = np.meshgrid(*axes, indexing="ij")
    wmesh = np.meshgrid(*wts, indexing="ij")
    pts = np.stack([m_.ravel() for m_ in mesh], axis=-1)
    wall = np.prod(np.stack([w.ravel() for w in wmesh]), axis=0)
    total = 0.0
    for t, w in zip(pts, wall):
        J = patch.jacobian(t)
        # signed density: the pullback of omega^m / m! is Pf(J^T S J) dt
        total += w * pfaffian(J.T @ S @ J)
    return total


def riemannian_volume_patch(patch: ParametrizedPatch, order: int = 8) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    axes, wts = [], []
    for a, b in patch.box:
        axes.append(0.5 * (b - a) * nodes + 0.5 * (a + b))
        wts.append(0.5 * (b - a) * weights)
    mesh = np.meshgrid(*axes, indexing="ij")
    wmesh = np.meshgrid(*wts, indexing="ij")
    pts = np.stack([m_.ravel() for m_ in mesh], axis=-1)
    wall = np.prod(np.stack([w.ravel() for w in wmesh]), axis=0)
    total = 0.0
    for t, w in zip(pts, wall):
        J = patch.jacobian(t)
        total += w * math.sqrt(np.linalg.det(J.T @ J))
    return total


def is_complex_analytic(X, L: ImaginaryUnit, tol: float = 1e-8) -> bool:
    """True iff symplectic volume equals Riemannian volume (relative tol)."""
    if isinstance(X, AffineSubtorus):
        riem = X.riemannian_volume()
        sympl = symplectic_volume(X, L)
        return bool(abs(sympl - riem) <= tol * riem)
    sympl, err = symplectic_volume(X, L)
    riem = riemannian_volume_patch(X)
    return bool(abs(sympl - riem) <= max(tol * riem, 10 * err))


@dataclass
class TrianalyticVerdict:
    name: str | None
    dims: tuple[int, int]            # (subspace dim, ambient dim)
    per_structure: list[dict]
    verdict: str                     # 'trianalytic' | 'complex-only-for' | 'not-complex'
    complex_axes: list[np.ndarray] = field(default_factory=list)
    kernel_dim: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "dims": list(self.dims),
            "per_structure": self.per_structure,
            "verdict": self.verdict,
            "complex_axes": [list(map(float, a)) for a in self.complex_axes],
        }


def is_trianalytic(X, tol: float = 1e-8, sphere_samples: int = 16) -> TrianalyticVerdict:
    """Aggregate the volume-equality test over sampled structures.

    For affine subtori the exact linear oracle (structure kernel) is
    cross-checked against the sampled verdicts; a mismatch raises
    OracleDisagreement.
    """
    if sphere_samples < 3:
        raise ValueError("need at least 3 structure samples (i, j, k included)")
    structures = fibonacci_structures(sphere_samples, include_axes=True)
    per = []
    affine = isinstance(X, AffineSubtorus)
    if affine:
        riem = X.riemannian_volume()
    else:
        riem = riemannian_volume_patch(X)
    equalities = []
    for L in structures:
        if affine:
            sympl = symplectic_volume(X, L)
            defect = abs(sympl - riem) / riem
        else:
            sympl, err = symplectic_volume(X, L)
            defect = abs(sympl - riem) / riem
        ok = defect <= tol
        equalities.append(ok)
        per.append({"L": [float(v) for v in L.as_array()],
                    "sympl": float(sympl), "riem": float(riem),
                    "defect": float(defect)})
    n_eq = sum(equalities)
    if affine:
        kdim, dirs = structure_kernel(X.periods)
        if kdim == 3:
            verdict = "trianalytic"
            if not all(equalities):
                raise OracleDisagreement(
                    f"{X.name}: quaternionic subspace fails volume equality")
        elif kdim == 1:
            verdict = "complex-only-for"
            axis = dirs[0].as_array()
            for rec, ok in zip(per, equalities):
                aligned = abs(abs(np.dot(rec["L"], axis)) - 1.0) <= 1e-9
                if ok != aligned:
                    raise OracleDisagreement(
                        f"{X.name}: volume equality at L={rec['L']} "
                        f"disagrees with linear oracle axis {axis}")
        else:
            verdict = "not-complex"
            if any(equalities):
                raise OracleDisagreement(
                    f"{X.name}: volume equality found for a subspace complex for no L")
        return TrianalyticVerdict(X.name, (X.d, X.torus.dim), per, verdict,
                                  [d.as_array() for d in dirs], kdim)
    verdict = ("trianalytic" if all(equalities)
               else "complex-only-for" if n_eq else "not-complex")
    return TrianalyticVerdict(getattr(X, "name", None),
                              (X.d, X.ambient.dim), per, verdict)


def degree(alpha: ConstantForm, L: ImaginaryUnit, volume: float = 1.0):
    """Degree functional: integral over the torus of omega_L^{m-p} wedge alpha."""
    dim = alpha.dim
    if dim % 4:
        raise ValueError("ambient dimension must be 4n")
    if alpha.degree % 2:
        raise ValueError("degree functional needs an even-degree form")
    m = dim // 2
    p = alpha.degree // 2
    if p > m:
        raise ValueError("form degree exceeds the ambient top degree")
    omega = kahler_form(L, dim // 4)
    total = wedge(wedge_power(omega, m - p), alpha)
    return top_coefficient(total) * volume


def degree_su2_invariance_check(alpha: ConstantForm, samples: int = 20,
                                tol: float = 1e-10, volume: float = 1.0) -> dict:
    """Degrees of an SU(2)-invariant form across sampled structures.

    Returns max pairwise spread and checks the divisibility claim: a nonzero
    degree forces the form degree to be divisible by 4.  A spread above tol
    for an invariant form raises (it signals a bug, not a math fact).
    """
    if not forms.is_su2_invariant(alpha, tol=1e-8):
        raise ValueError("form is not SU(2)-invariant; spread is meaningless")
    structures = fibonacci_structures(samples, include_axes=True)
    degs = np.array([degree(alpha, L, volume) for L in structures])
    if np.iscomplexobj(degs) and np.max(np.abs(degs.imag)) < 1e-12:
        degs = degs.real
    spread = float(np.max(np.abs(degs[:, None] - degs[None, :])))
    nonzero = bool(np.max(np.abs(degs)) > tol)
    dim_ok = (alpha.degree % 4 == 0) if nonzero else True
    report = {"degrees": [float(d) for d in np.real(degs)],
              "max_spread": spread, "nonzero": nonzero,
              "degree_divisible_by_4": dim_ok}
    if spread > tol:
        raise OracleDisagreement(
            f"invariant form has degree spread {spread:.3e} > {tol:.1e}")
    if not dim_ok:
        raise OracleDisagreement(
            "nonzero-degree invariant form of degree not divisible by 4")
    return report


def dual_class(X: AffineSubtorus) -> ConstantForm:
    """Constant representative of the class dual to X.

    Supported on the normal covectors and scaled so that wedging against any
    constant form beta and integrating over the torus equals the integral of
    beta over X.
    """
    dim = X.torus.dim
    d = X.d
    if d == dim:
        return forms.scalar_form(dim, X.riemannian_volume() / X.torus.volume)
    QT, QN = X.tangent_frame, X.normal_frame
    nu = _plucker_form(QN)
    tau = _plucker_form(QT)
    orient = top_coefficient(wedge(nu, tau))
    scale = X.riemannian_volume() / X.torus.volume / orient
    return nu * scale


def _plucker_form(Q) -> ConstantForm:
    """Wedge of the column covectors of an orthonormal frame."""
    dim, k = Q.shape
    out = forms.scalar_form(dim, 1.0)
    for col in range(k):
        out = wedge(out, forms.covector_from_vector(Q[:, col]))
    return out


def integrate_constant_form_over(X: AffineSubtorus, beta: ConstantForm):
    """Integral of a constant degree-d form over the d-dimensional subtorus."""
    if beta.degree != X.d:
        raise ValueError("form degree must match the subtorus dimension")
    restricted = pullback(beta, X.tangent_frame)
    return top_coefficient(restricted) * X.riemannian_volume()


def isometry_image_check(X: AffineSubtorus, Q, translation=None,
                         tol: float = 1e-8, sphere_samples: int = 16) -> TrianalyticVerdict:
    """Verdict of the image of X under an affine lattice-preserving isometry.

    The linear part must be orthogonal and map the lattice to itself; for a
    trianalytic X the image must again be trianalytic.
    """
    Q = np.asarray(Q, dtype=float)
    if np.linalg.norm(Q.T @ Q - np.eye(Q.shape[0])) > 1e-10:
        raise ValueError("linear part is not orthogonal")
    image = X.apply_linear(Q, translation,
                           name=f"{X.name or 'subtorus'}-image")
    verdict = is_trianalytic(image, tol=tol, sphere_samples=sphere_samples)
    source = is_trianalytic(X, tol=tol, sphere_samples=sphere_samples)
    if source.verdict == "trianalytic" and verdict.verdict != "trianalytic":
        raise OracleDisagreement("isometric image of a trianalytic subtorus "
                                 "is not trianalytic")
    return verdict
