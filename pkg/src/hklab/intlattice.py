"""Exact integer linear algebra for lattice-rational subspaces.

Small dense problems only (ambient rank <= 16); plain python integers keep
everything overflow-free.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = [
    "LatticeRationalityError",
    "integer_kernel",
    "saturate",
    "rational_span_basis",
]


class LatticeRationalityError(ValueError):
    """The subspace does not meet the lattice in full rank."""


def integer_kernel(C) -> np.ndarray:
    """Integer basis (columns) of {z in Z^n : C z = 0} for an integer matrix C.

    Column reduction of [C; I] by unimodular operations; the returned basis
    generates the full kernel subgroup (it is saturated by construction).
    """
    C = np.asarray(C, dtype=object)
    if C.ndim != 2:
        raise ValueError("need a matrix")
    m, n = C.shape
    M = [[int(C[i, j]) for j in range(n)] for i in range(m)]
    M += [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    rows = m + n

    def swap_cols(a, b):
        for r in range(rows):
            M[r][a], M[r][b] = M[r][b], M[r][a]

    def addmul_col(dst, src, q):
        for r in range(rows):
            M[r][dst] += q * M[r][src]

    pivot_col = 0
    for r in range(m):
        if pivot_col >= n:
            break
        # euclidean reduction across columns pivot_col..n-1 on row r
        while True:
            nonzero = [c for c in range(pivot_col, n) if M[r][c] != 0]
            if not nonzero:
                break
            c_min = min(nonzero, key=lambda c: abs(M[r][c]))
            swap_cols(pivot_col, c_min)
            done = True
            for c in range(pivot_col + 1, n):
                if M[r][c] != 0:
                    q = M[r][c] // M[r][pivot_col]
                    addmul_col(c, pivot_col, -q)
                    if M[r][c] != 0:
                        done = False
            if done:
                break
        if any(M[r][c] != 0 for c in range(pivot_col, n)) and M[r][pivot_col] != 0:
            pivot_col += 1
    kernel_cols = [c for c in range(n)
                   if all(M[r][c] == 0 for r in range(m))]
    basis = np.array([[M[m + i][c] for c in kernel_cols] for i in range(n)],
                     dtype=object)
    return basis.astype(np.int64) if basis.size else np.zeros((n, 0), dtype=np.int64)


def saturate(Z) -> np.ndarray:
    """Basis of the full subgroup Z^n ∩ span_Q(Z) for integer columns Z."""
    Z = np.asarray(Z, dtype=np.int64)
    n = Z.shape[0]
    if Z.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.int64)
    complement = integer_kernel(Z.T)          # integer basis of span(Z)^perp
    if complement.shape[1] == 0:
        return np.eye(n, dtype=np.int64)
    return integer_kernel(complement.T)


def _rref(A, tol):
    """Float reduced row echelon form with partial pivoting."""
    A = np.array(A, dtype=float)
    rows, cols = A.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r >= rows:
            break
        p = r + int(np.argmax(np.abs(A[r:, c])))
        if abs(A[p, c]) <= tol:
            continue
        A[[r, p]] = A[[p, r]]
        A[r] = A[r] / A[r, c]
        for rr in range(rows):
            if rr != r:
                A[rr] = A[rr] - A[rr, c] * A[r]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rational_span_basis(W, tol: float = 1e-9, max_denominator: int = 1000) -> np.ndarray:
    """Integer columns spanning span(W) over Q, or raise LatticeRationalityError.

    Row-reduces W^T so a rational span yields rational entries regardless of
    the scaling of the input columns, then reconstructs the fractions with a
    bounded denominator and verifies the span via orthogonal projectors.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[1] == 0:
        raise ValueError("need a nonempty basis matrix")
    scale = max(np.abs(W).max(), 1.0)
    R, _ = _rref(W.T / scale, tol=1e-12)
    if R.shape[0] != np.linalg.matrix_rank(W, tol=1e-10):
        raise LatticeRationalityError("basis is rank deficient")
    vectors = []
    for row in R:
        fracs = [Fraction(float(x)).limit_denominator(max_denominator) for x in row]
        denom = 1
        for f in fracs:
            denom = denom * f.denominator // np.gcd(denom, f.denominator)
        vectors.append([int(f * denom) for f in fracs])
    Z = np.array(vectors, dtype=np.int64).T
    if np.linalg.matrix_rank(Z) != W.shape[1]:
        raise LatticeRationalityError("rational reconstruction lost rank")
    # verify the reconstructed span matches the input span
    QW, _ = np.linalg.qr(W)
    QZ, _ = np.linalg.qr(Z.astype(float))
    if np.linalg.norm(QW @ QW.T - QZ @ QZ.T) > max(tol, 1e-12) * W.shape[0]:
        raise LatticeRationalityError(
            "subspace is not lattice-rational (projector mismatch "
            f"{np.linalg.norm(QW @ QW.T - QZ @ QZ.T):.2e})")
    return Z
