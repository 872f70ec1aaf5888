"""Constant-coefficient exterior algebra on R^N with the SU(2) form machinery.

Forms are stored densely over lexicographically sorted multi-indices; the
inner product declares sorted coordinate wedges orthonormal.  The SU(2)
action on forms is induced by the quaternionic module action on tangent
vectors (left multiplication); its three infinitesimal generators are the
complex-structure operators I, J, K extended as derivations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
import scipy.linalg

from .quaternions import (ImaginaryUnit, Quaternion, complex_structure_operator,
                          left_action_operator, qmul, standard_triple)

__all__ = [
    "ConstantForm",
    "FourierForm",
    "subsets",
    "zero_form",
    "scalar_form",
    "covector",
    "volume_form",
    "two_form_from_matrix",
    "random_form",
    "wedge",
    "wedge_power",
    "pullback",
    "interior_product",
    "top_coefficient",
    "kahler_form",
    "holomorphic_symplectic",
    "hodge_components",
    "su2_pullback",
    "su2_invariant_project",
    "is_su2_invariant",
    "invariant_projector",
    "lambda_op",
    "wedge_matrix",
    "exterior_derivative",
    "codifferential",
    "hodge_laplacian",
    "su2_pullback_fourier",
    "hodge_component",
    "matrix_from_two_form",
    "covector_from_vector",
    "derivation_matrix",
]


@lru_cache(maxsize=None)
def subsets(dim: int, degree: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(dim), degree))


@lru_cache(maxsize=None)
def _subset_index(dim: int, degree: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(subsets(dim, degree))}


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]):
    """Sorted merge of two disjoint sorted tuples and the permutation sign."""
    merged = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            merged.append(a[i]); i += 1
        else:
            # b[j] hops over the remaining len(a) - i entries of a
            if (len(a) - i) % 2:
                sign = -sign
            merged.append(b[j]); j += 1
    merged.extend(a[i:]); merged.extend(b[j:])
    return tuple(merged), sign


@lru_cache(maxsize=None)
def _wedge_table(dim: int, p: int, q: int):
    """Index/sign table for the wedge Λ^p x Λ^q -> Λ^{p+q}."""
    ia, ib, iout, signs = [], [], [], []
    out_index = _subset_index(dim, p + q)
    for i, A in enumerate(subsets(dim, p)):
        sa = set(A)
        for j, B in enumerate(subsets(dim, q)):
            if sa & set(B):
                continue
            merged, sign = _merge_sign(A, B)
            ia.append(i); ib.append(j)
            iout.append(out_index[merged]); signs.append(sign)
    return (np.array(ia, dtype=np.intp), np.array(ib, dtype=np.intp),
            np.array(iout, dtype=np.intp), np.array(signs, dtype=np.float64))


class ConstantForm:
    """A degree-p form with constant coefficients on R^dim."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs):
        # degree > dim is allowed and has no coefficients (the zero form)
        if degree < 0:
            raise ValueError(f"negative degree {degree}")
        coeffs = np.asarray(coeffs)
        if coeffs.dtype not in (np.float64, np.complex128):
            coeffs = coeffs.astype(np.float64 if not np.iscomplexobj(coeffs)
                                   else np.complex128)
        if coeffs.shape != (comb(dim, degree),):
            raise ValueError(f"expected {comb(dim, degree)} coefficients, got {coeffs.shape}")
        self.dim = dim
        self.degree = degree
        self.coeffs = coeffs

    def _check_compatible(self, other: "ConstantForm"):
        if self.dim != other.dim or self.degree != other.degree:
            raise ValueError("forms live on different spaces or degrees")

    def __add__(self, other: "ConstantForm") -> "ConstantForm":
        self._check_compatible(other)
        return ConstantForm(self.dim, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "ConstantForm") -> "ConstantForm":
        self._check_compatible(other)
        return ConstantForm(self.dim, self.degree, self.coeffs - other.coeffs)

    def __neg__(self) -> "ConstantForm":
        return ConstantForm(self.dim, self.degree, -self.coeffs)

    def __mul__(self, c) -> "ConstantForm":
        return ConstantForm(self.dim, self.degree, self.coeffs * c)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "ConstantForm"):
        """Hermitian inner product; sorted coordinate wedges are orthonormal."""
        self._check_compatible(other)
        val = np.vdot(self.coeffs, other.coeffs)
        return val.real if not np.iscomplexobj(val) or abs(val.imag) == 0.0 else val

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs)

    def real(self) -> "ConstantForm":
        return ConstantForm(self.dim, self.degree, np.real(self.coeffs).copy())

    def imag(self) -> "ConstantForm":
        return ConstantForm(self.dim, self.degree, np.imag(self.coeffs).copy())

    def conjugate(self) -> "ConstantForm":
        return ConstantForm(self.dim, self.degree, np.conj(self.coeffs))

    def coefficient(self, index: tuple[int, ...]):
        return self.coeffs[_subset_index(self.dim, self.degree)[tuple(index)]]

    def evaluate(self, *vectors) -> complex | float:
        """Evaluate on degree-many vectors."""
        if len(vectors) != self.degree:
            raise ValueError("wrong number of vectors")
        if self.degree == 0:
            return self.coeffs[0]
        T = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
        return pullback(self, T).coeffs[0]

    def wedge(self, other: "ConstantForm") -> "ConstantForm":
        return wedge(self, other)

    def allclose(self, other: "ConstantForm", tol: float = 1e-12) -> bool:
        self._check_compatible(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=tol))

    def __repr__(self):
        return f"ConstantForm(dim={self.dim}, degree={self.degree}, |coeffs|={self.norm():.3g})"


def zero_form(dim: int, degree: int) -> ConstantForm:
    return ConstantForm(dim, degree, np.zeros(comb(dim, degree)))


def scalar_form(dim: int, value) -> ConstantForm:
    return ConstantForm(dim, 0, np.array([value]))


def covector(dim: int, axis: int) -> ConstantForm:
    c = np.zeros(dim)
    c[axis] = 1.0
    return ConstantForm(dim, 1, c)


def covector_from_vector(v) -> ConstantForm:
    v = np.asarray(v, dtype=float)
    return ConstantForm(v.shape[0], 1, v.copy())


def volume_form(dim: int) -> ConstantForm:
    return ConstantForm(dim, dim, np.array([1.0]))


def two_form_from_matrix(S) -> ConstantForm:
    """2-form alpha(v, w) = v^T S w from an antisymmetric matrix."""
    S = np.asarray(S)
    dim = S.shape[0]
    A = 0.5 * (S - S.T)
    idx = subsets(dim, 2)
    return ConstantForm(dim, 2, np.array([A[a, b] for a, b in idx]))


def matrix_from_two_form(alpha: ConstantForm) -> np.ndarray:
    S = np.zeros((alpha.dim, alpha.dim), dtype=alpha.coeffs.dtype)
    for (a, b), c in zip(subsets(alpha.dim, 2), alpha.coeffs):
        S[a, b] = c
        S[b, a] = -c
    return S


def random_form(rng: np.random.Generator, dim: int, degree: int,
                complex_coeffs: bool = False) -> ConstantForm:
    n = comb(dim, degree)
    c = rng.normal(size=n)
    if complex_coeffs:
        c = c + 1j * rng.normal(size=n)
    return ConstantForm(dim, degree, c)


def wedge(a: ConstantForm, b: ConstantForm) -> ConstantForm:
    if a.dim != b.dim:
        raise ValueError("forms live on different spaces")
    if a.degree + b.degree > a.dim:
        return zero_form(a.dim, a.degree + b.degree)
    ia, ib, iout, signs = _wedge_table(a.dim, a.degree, b.degree)
    out = np.zeros(comb(a.dim, a.degree + b.degree),
                   dtype=np.result_type(a.coeffs, b.coeffs))
    np.add.at(out, iout, signs * a.coeffs[ia] * b.coeffs[ib])
    return ConstantForm(a.dim, a.degree + b.degree, out)


def wedge_power(a: ConstantForm, m: int) -> ConstantForm:
    if m < 0:
        raise ValueError("negative wedge power")
    out = scalar_form(a.dim, 1.0)
    for _ in range(m):
        out = wedge(out, a)
    return out


def wedge_matrix(omega: ConstantForm, degree: int) -> np.ndarray:
    """Matrix of beta -> omega ∧ beta from Λ^degree to Λ^{degree+omega.degree}."""
    dim = omega.dim
    ia, ib, iout, signs = _wedge_table(dim, omega.degree, degree)
    M = np.zeros((comb(dim, degree + omega.degree), comb(dim, degree)),
                 dtype=omega.coeffs.dtype)
    np.add.at(M, (iout, ib), signs * omega.coeffs[ia])
    return M


def pullback(alpha: ConstantForm, T) -> ConstantForm:
    """Pullback along the linear map T: R^d -> R^dim (columns = images).

    (T*alpha)(v_1, ..., v_p) = alpha(T v_1, ..., T v_p).
    """
    T = np.asarray(T, dtype=float)
    if T.shape[0] != alpha.dim:
        raise ValueError("linear map has wrong codomain dimension")
    d = T.shape[1]
    p = alpha.degree
    if p == 0:
        return ConstantForm(d, 0, alpha.coeffs.copy())
    if p > d:
        return zero_form(d, p)
    rows = np.array(subsets(alpha.dim, p))
    cols = np.array(subsets(d, p))
    # stack all p x p minors, shape (nrows, ncols, p, p), one det call
    sub = T[rows[:, None, :, None], cols[None, :, None, :]]
    minors = np.linalg.det(sub)
    return ConstantForm(d, p, alpha.coeffs @ minors)


def interior_product(v, alpha: ConstantForm) -> ConstantForm:
    """Contraction of alpha with the vector v in the first slot."""
    v = np.asarray(v)
    if alpha.degree == 0:
        raise ValueError("cannot contract a 0-form")
    p = alpha.degree
    out = np.zeros(comb(alpha.dim, p - 1), dtype=np.result_type(alpha.coeffs, v))
    out_index = _subset_index(alpha.dim, p - 1)
    for A, c in zip(subsets(alpha.dim, p), alpha.coeffs):
        for t, a in enumerate(A):
            rest = A[:t] + A[t + 1:]
            out[out_index[rest]] += ((-1) ** t) * c * v[a]
    return ConstantForm(alpha.dim, p - 1, out)


def top_coefficient(alpha: ConstantForm):
    if alpha.degree != alpha.dim:
        raise ValueError("not a top-degree form")
    return alpha.coeffs[0]


def derivation_matrix(dim: int, degree: int, G) -> np.ndarray:
    """Extension of theta -> theta∘G on covectors to Λ^degree as a derivation."""
    G = np.asarray(G)
    n = comb(dim, degree)
    M = np.zeros((n, n), dtype=G.dtype)
    index = _subset_index(dim, degree)
    for col, A in enumerate(subsets(dim, degree)):
        for t, a in enumerate(A):
            others = A[:t] + A[t + 1:]
            occupied = set(others)
            slot_sign = -1.0 if t % 2 else 1.0  # move the new covector to the front
            for b in range(dim):
                g = G[a, b]
                if g == 0.0 or b in occupied:
                    continue
                merged, sign = _merge_sign((b,), others)
                M[index[merged], col] += slot_sign * sign * g
    return M


# ---------------------------------------------------------------------------
# hyperkähler forms

def _structure_matrix(L: ImaginaryUnit, n: int) -> np.ndarray:
    return complex_structure_operator(L, n)


def kahler_form(L: ImaginaryUnit, n: int) -> ConstantForm:
    """omega_L(v, w) = <L v, w> on R^{4n}."""
    Lmat = _structure_matrix(L, n)
    return two_form_from_matrix(Lmat.T)


def holomorphic_symplectic(I: ImaginaryUnit, J: ImaginaryUnit, K: ImaginaryUnit,
                           n: int, tol: float = 1e-9) -> ConstantForm:
    """Omega = omega_J + sqrt(-1) omega_K for a triple with I∘J = K."""
    prod = qmul(I.quaternion, J.quaternion)
    if (prod - K.quaternion).norm() > tol:
        raise ValueError("structures do not satisfy I∘J = K")
    wj = kahler_form(J, n)
    wk = kahler_form(K, n)
    return ConstantForm(wj.dim, 2, wj.coeffs + 1j * wk.coeffs)


def hodge_components(alpha: ConstantForm, L: ImaginaryUnit) -> list[tuple[tuple[int, int], ConstantForm]]:
    """Decompose alpha into its (a, b) Hodge components with respect to L.

    The derivation extension D of L has eigenvalue i(a - b) on (a, b)-forms;
    components are recovered by polynomial spectral projectors, so the sum of
    the returned pieces reproduces alpha exactly.
    """
    if alpha.dim % 4:
        raise ValueError("Hodge decomposition needs an ambient R^{4n}")
    n = alpha.dim // 4
    p = alpha.degree
    D = derivation_matrix(alpha.dim, p, _structure_matrix(L, n)).astype(np.complex128)
    coeffs = alpha.coeffs.astype(np.complex128)
    eigvals = [1j * (p - 2 * b) for b in range(p + 1)]
    out = []
    for b, lam in enumerate(eigvals):
        proj = coeffs
        for b2, mu in enumerate(eigvals):
            if b2 == b:
                continue
            proj = (D @ proj - mu * proj) / (lam - mu)
        out.append(((p - b, b), ConstantForm(alpha.dim, p, proj)))
    return out


def hodge_component(alpha: ConstantForm, L: ImaginaryUnit, a: int, b: int) -> ConstantForm:
    for (aa, bb), comp in hodge_components(alpha, L):
        if (aa, bb) == (a, b):
            return comp
    raise ValueError(f"no ({a},{b}) component in degree {alpha.degree}")


def su2_pullback(u: Quaternion, alpha: ConstantForm) -> ConstantForm:
    """Pullback of alpha under the module action v -> u·v of a unit quaternion.

    Maps omega_L to omega_{u* L u} and fixes the volume form; preserves
    degree and wedge products.
    """
    if alpha.dim % 4:
        raise ValueError("SU(2) acts on forms over R^{4n}")
    T = left_action_operator(u, alpha.dim // 4)
    return pullback(alpha, T)


@lru_cache(maxsize=None)
def _su2_generators(dim: int, degree: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = dim // 4
    return tuple(derivation_matrix(dim, degree, complex_structure_operator(L, n))
                 for L in standard_triple())


@lru_cache(maxsize=None)
def invariant_projector(dim: int, degree: int) -> np.ndarray:
    """Orthogonal projector onto the SU(2)-invariant part of Λ^degree.

    Computed once per (dim, degree) as the joint nullspace of the three
    infinitesimal generators (SVD); deterministic and tolerance-free.
    """
    if dim % 4:
        raise ValueError("SU(2) invariants need an ambient R^{4n}")
    if degree == 0:
        return np.eye(1)
    gens = _su2_generators(dim, degree)
    stacked = np.vstack(gens)
    null = scipy.linalg.null_space(stacked)
    return null @ null.T


def su2_invariant_project(alpha: ConstantForm) -> ConstantForm:
    P = invariant_projector(alpha.dim, alpha.degree)
    if alpha.is_real:
        return ConstantForm(alpha.dim, alpha.degree, P @ alpha.coeffs)
    return ConstantForm(alpha.dim, alpha.degree,
                        P @ alpha.coeffs.real + 1j * (P @ alpha.coeffs.imag))


def is_su2_invariant(alpha: ConstantForm, tol: float = 1e-10) -> bool:
    nrm = alpha.norm()
    if nrm == 0.0:
        return True
    return (alpha - su2_invariant_project(alpha)).norm() <= tol * nrm


def lambda_op(alpha: ConstantForm, L: ImaginaryUnit) -> ConstantForm:
    """Adjoint of wedging with omega_L; drops the degree by 2."""
    if alpha.degree < 2:
        raise ValueError("lambda operator needs degree >= 2")
    if alpha.dim % 4:
        raise ValueError("lambda operator needs an ambient R^{4n}")
    omega = kahler_form(L, alpha.dim // 4)
    M = wedge_matrix(omega, alpha.degree - 2)
    return ConstantForm(alpha.dim, alpha.degree - 2, M.T @ alpha.coeffs)


# ---------------------------------------------------------------------------
# single Fourier modes on the flat torus

@dataclass(frozen=True)
class FourierForm:
    """base · exp(2πi <freq, x>) on the flat torus R^dim / Z^dim.

    Integer frequencies give honest torus forms; rotated (non-integer)
    frequencies appear as images of the SU(2) pullback and are kept as plain
    forms on R^dim.
    """

    base: ConstantForm
    freq: tuple[float, ...]

    def __post_init__(self):
        if len(self.freq) != self.base.dim:
            raise ValueError("frequency dimension mismatch")

    def freq_array(self) -> np.ndarray:
        return np.asarray(self.freq, dtype=float)

    def norm(self) -> float:
        return self.base.norm()

    def allclose(self, other: "FourierForm", tol: float = 1e-10) -> bool:
        return (np.allclose(self.freq_array(), other.freq_array(), atol=tol)
                and self.base.allclose(other.base, tol))


def exterior_derivative(F: FourierForm) -> FourierForm:
    lam = covector_from_vector(F.freq_array())
    d_base = wedge(2j * np.pi * lam, _complexify(F.base))
    return FourierForm(d_base, F.freq)


def codifferential(F: FourierForm) -> FourierForm:
    if F.base.degree == 0:
        return FourierForm(zero_form(F.base.dim, 0), F.freq)
    contracted = interior_product(F.freq_array(), _complexify(F.base))
    return FourierForm(-2j * np.pi * contracted, F.freq)


def hodge_laplacian(F: FourierForm) -> FourierForm:
    """dd* + d*d; acts on a Fourier mode as the scalar (2π|freq|)²."""
    a = exterior_derivative(codifferential(F)) if F.base.degree > 0 else None
    b = codifferential(exterior_derivative(F))
    base = b.base if a is None else a.base + b.base
    return FourierForm(base, F.freq)


def su2_pullback_fourier(u: Quaternion, F: FourierForm) -> FourierForm:
    """Pullback under x -> u·x; rotates the frequency, preserving its norm."""
    T = left_action_operator(u, F.base.dim // 4)
    new_base = pullback(_complexify(F.base), T)
    new_freq = tuple(T.T @ F.freq_array())
    return FourierForm(new_base, new_freq)


def _complexify(alpha: ConstantForm) -> ConstantForm:
    if np.iscomplexobj(alpha.coeffs):
        return alpha
    return ConstantForm(alpha.dim, alpha.degree, alpha.coeffs.astype(np.complex128))
