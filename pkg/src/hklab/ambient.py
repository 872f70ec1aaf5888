"""Ambient spaces with closed-form geodesics and their submanifolds.

The flat torus H^n/Λ is the primary ambient; the round sphere is a curved
control used to show that the geodesic/holonomy probes detect curvature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import intlattice
from .quaternions import ImaginaryUnit, complex_structure_operator, standard_triple

__all__ = [
    "HKTorus",
    "RoundSphere",
    "AffineSubtorus",
    "ParametrizedPatch",
    "geodesic_distance",
    "tangent_splitting",
    "is_quaternionic_subspace",
    "quaternionic_defect_matrix",
    "structure_kernel",
    "is_completely_geodesic",
    "second_fundamental_form_defect",
    "patch_from_subtorus",
]


def _oriented_qr(W):
    """QR with positive diagonal of R; deterministic orthonormal frame."""
    Q, R = np.linalg.qr(W)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


class HKTorus:
    """Flat torus R^{4n} / Λ with the standard Euclidean metric.

    Geodesics are straight lines mod the lattice; together with the left
    quaternion action the flat metric satisfies the hyperkähler axioms
    exactly.
    """

    def __init__(self, n: int, lattice=None):
        if n < 1:
            raise ValueError("quaternionic dimension must be >= 1")
        self.n = n
        self.dim = 4 * n
        if lattice is None:
            self.lattice = np.eye(self.dim)
        else:
            lattice = np.asarray(lattice, dtype=float)
            if lattice.shape != (self.dim, self.dim):
                raise ValueError("lattice basis has wrong shape")
            if abs(np.linalg.det(lattice)) < 1e-12:
                raise ValueError("lattice basis is singular")
            self.lattice = lattice
        self._inv = np.linalg.inv(self.lattice)
        self.is_unit_lattice = bool(np.allclose(self.lattice, np.eye(self.dim)))
        self.volume = abs(np.linalg.det(self.lattice))
        self._translates = None

    def reduce(self, x):
        """Representative with lattice coordinates in [-1/2, 1/2)."""
        c = self._inv @ np.asarray(x, dtype=float)
        c = c - np.round(c)
        return self.lattice @ c

    def distance(self, x, y) -> float:
        delta = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        c = self._inv @ delta
        c = c - np.round(c)
        if self.is_unit_lattice:
            return float(np.linalg.norm(c))
        # exhaustive search over lattice translates in [-2, 2]^dim around the
        # reduced representative; sufficient for reduced bases at desk scale
        if self._translates is None:
            if self.dim > 9:
                raise NotImplementedError(
                    "general-lattice distance enumeration is desk scale (dim <= 9)")
            grid = np.array(list(itertools.product(range(-2, 3), repeat=self.dim)))
            self._translates = grid @ self.lattice.T
        pts = self.lattice @ c + self._translates
        return float(np.min(np.linalg.norm(pts, axis=1)))

    def random_point(self, rng: np.random.Generator):
        return self.lattice @ rng.uniform(size=self.dim)

    def structure_operator(self, L: ImaginaryUnit) -> np.ndarray:
        return complex_structure_operator(L, self.n)


class RoundSphere:
    """Round sphere S^m of given radius embedded in R^{m+1}."""

    def __init__(self, m: int, radius: float = 1.0):
        if m < 1 or radius <= 0:
            raise ValueError("need dimension >= 1 and positive radius")
        self.m = m
        self.dim = m
        self.radius = float(radius)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return abs(np.linalg.norm(x) - self.radius) <= tol

    def distance(self, x, y) -> float:
        r = self.radius
        c = float(np.dot(x, y) / (r * r))
        return r * float(np.arccos(np.clip(c, -1.0, 1.0)))

    def tangent_projector(self, x) -> np.ndarray:
        u = np.asarray(x, dtype=float) / np.linalg.norm(x)
        return np.eye(len(u)) - np.outer(u, u)


def geodesic_distance(ambient, x, y) -> float:
    """Exact geodesic distance in the ambient space."""
    return ambient.distance(x, y)


class AffineSubtorus:
    """Affine subtorus offset + span(W) of a flat torus.

    The column span of W must meet the lattice in rank dim(W); non-rational
    subspaces are rejected since their closures are not subtori.
    """

    def __init__(self, torus: HKTorus, basis, offset=None, name: str | None = None,
                 max_denominator: int = 1000):
        self.torus = torus
        basis = np.asarray(basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != torus.dim:
            raise ValueError(f"basis must be {torus.dim} x d")
        if np.linalg.matrix_rank(basis, tol=1e-10) != basis.shape[1]:
            raise ValueError("basis columns are dependent")
        self.name = name
        self.d = basis.shape[1]
        self.offset = (np.zeros(torus.dim) if offset is None
                       else np.asarray(offset, dtype=float))
        # integer sublattice in lattice coordinates, saturated
        coords = torus._inv @ basis
        Z = intlattice.rational_span_basis(coords, max_denominator=max_denominator)
        self.sublattice = intlattice.saturate(Z)
        self.periods = torus.lattice @ self.sublattice.astype(float)  # ambient periods
        self.tangent_frame = _oriented_qr(self.periods)
        self.normal_frame = _complement_frame(self.tangent_frame, torus.dim)

    @property
    def basis(self) -> np.ndarray:
        return self.periods

    def riemannian_volume(self) -> float:
        gram = self.periods.T @ self.periods
        return float(np.sqrt(np.linalg.det(gram)))

    def tangent_projector(self) -> np.ndarray:
        Q = self.tangent_frame
        return Q @ Q.T

    def normal_projector(self) -> np.ndarray:
        return np.eye(self.torus.dim) - self.tangent_projector()

    def chart(self, t):
        """Map chart coordinates in [0,1)^d to ambient points."""
        t = np.asarray(t, dtype=float)
        return self.offset + self.periods @ t

    def grid(self, resolution: int) -> np.ndarray:
        """Regular grid of points covering the subtorus once."""
        axes = [np.arange(resolution) / resolution for _ in range(self.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        ts = np.stack([m.ravel() for m in mesh], axis=-1)
        return ts @ self.periods.T + self.offset

    def contains(self, x, tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.normal_residual(x)) <= tol)

    def normal_residual(self, x):
        """Normal component of x relative to the nearest leaf translate.

        Local test: reduces x - offset by full-lattice rounding first, so it
        is reliable for points near the subtorus (transport drift checks).
        """
        delta = np.asarray(x, dtype=float) - self.offset
        c = self.torus._inv @ delta
        delta_red = delta - self.torus.lattice @ np.round(c)
        return self.normal_projector() @ delta_red

    def translate(self, v) -> "AffineSubtorus":
        return AffineSubtorus(self.torus, self.periods, self.offset + np.asarray(v),
                              name=self.name)

    def apply_linear(self, Q, translation=None, name=None) -> "AffineSubtorus":
        """Image under an affine map x -> Q x + t with lattice-preserving Q."""
        Q = np.asarray(Q, dtype=float)
        check = self.torus._inv @ Q @ self.torus.lattice
        if np.linalg.norm(check - np.round(check)) > 1e-9 or \
           abs(abs(np.linalg.det(check)) - 1.0) > 1e-9:
            raise ValueError("linear part does not preserve the lattice")
        t = np.zeros(self.torus.dim) if translation is None else np.asarray(translation)
        return AffineSubtorus(self.torus, Q @ self.periods, Q @ self.offset + t,
                              name=name or self.name)


def _complement_frame(Q, dim):
    if Q.shape[1] == dim:
        return np.zeros((dim, 0))
    full, _ = np.linalg.qr(np.column_stack([Q, np.eye(dim)]))
    comp = full[:, Q.shape[1]:dim]
    # orient deterministically
    return comp


def tangent_splitting(X: AffineSubtorus):
    """Orthonormal frames of TX and NX; together they span R^{4n}."""
    return X.tangent_frame, X.normal_frame


def quaternionic_defect_matrix(W) -> np.ndarray:
    """3x3 PSD matrix whose kernel directions are the structures preserving span(W).

    Entry (p, q) is tr(P_N L_p P L_q^T P) for the generators i, j, k, built so
    that v^T M v = |(1-P) L_v P|_F^2 for a direction v on the structure sphere.
    """
    W = np.asarray(W, dtype=float)
    dim = W.shape[0]
    if dim % 4:
        raise ValueError("ambient dimension must be 4n")
    n = dim // 4
    Q = _oriented_qr(W)
    P = Q @ Q.T
    PN = np.eye(dim) - P
    gens = [complex_structure_operator(L, n) for L in standard_triple()]
    mats = [PN @ G @ P for G in gens]
    M = np.array([[np.tensordot(A, B) for B in mats] for A in mats])
    return 0.5 * (M + M.T)


def structure_kernel(W, tol: float = 1e-10):
    """Eigen-analysis of the defect matrix: (kernel dimension, kernel directions).

    Kernel dimension is 0, 1 or 3: complex for no L, for exactly ±L0, or
    quaternionic.
    """
    M = quaternionic_defect_matrix(W)
    vals, vecs = np.linalg.eigh(M)
    scale = max(vals[-1], 1.0)
    kdim = int(np.sum(vals <= tol * scale))
    dirs = [ImaginaryUnit.from_vector(vecs[:, idx]) for idx in range(kdim)]
    return kdim, dirs


def is_quaternionic_subspace(W, tol: float = 1e-10) -> bool:
    """True iff the operators of i, j, k all map span(W) into itself."""
    kdim, _ = structure_kernel(W, tol)
    if kdim == 3:
        d = np.asarray(W).shape[1]
        if d % 4:
            raise AssertionError("quaternionic subspace of dimension not divisible by 4")
        return True
    return False


class ParametrizedPatch:
    """Numerically sampled submanifold patch t in box -> ambient point.

    The evaluation map must be smooth on the closed box with a full-rank
    jacobian at every grid node.
    """

    def __init__(self, ambient, box, fn, h: float = 1e-4, resolution: int = 5):
        self.ambient = ambient
        self.box = np.asarray(box, dtype=float)
        if self.box.ndim != 2 or self.box.shape[1] != 2:
            raise ValueError("box must be d x 2 (per-axis bounds)")
        if resolution < 3:
            raise ValueError("grid resolution must be >= 3 per axis")
        self.d = self.box.shape[0]
        self.fn = fn
        self.h = float(h)
        self.resolution = int(resolution)

    def grid(self) -> np.ndarray:
        axes = [np.linspace(a, b, self.resolution) for a, b in self.box]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def jacobian(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        h = self.h
        cols = []
        for a in range(self.d):
            e = np.zeros(self.d)
            e[a] = h
            cols.append((self.fn(t + e) - self.fn(t - e)) / (2 * h))
        J = np.column_stack(cols)
        if np.linalg.matrix_rank(J, tol=1e-8) != self.d:
            raise ValueError(f"rank-deficient jacobian at t = {t}")
        return J

    def second_derivatives(self, t, h=None) -> np.ndarray:
        """Array H[a, b] of ambient-space second partials, O(h^2) central."""
        t = np.asarray(t, dtype=float)
        h = self.h if h is None else h
        f = self.fn
        H = np.zeros((self.d, self.d, len(f(t))))
        for a in range(self.d):
            ea = np.zeros(self.d); ea[a] = h
            H[a, a] = (f(t + ea) - 2 * f(t) + f(t - ea)) / h ** 2
            for b in range(a + 1, self.d):
                eb = np.zeros(self.d); eb[b] = h
                mixed = (f(t + ea + eb) - f(t + ea - eb)
                         - f(t - ea + eb) + f(t - ea - eb)) / (4 * h ** 2)
                H[a, b] = mixed
                H[b, a] = mixed
        return H


def patch_from_subtorus(X: AffineSubtorus, resolution: int = 3,
                        h: float = 1e-4) -> ParametrizedPatch:
    box = np.array([[0.0, 1.0]] * X.d)
    return ParametrizedPatch(X.torus, box, lambda t: X.chart(t), h=h,
                             resolution=resolution)


def second_fundamental_form_defect(patch: ParametrizedPatch, t) -> float:
    """Max norm of the second fundamental form at one node (Richardson h, h/2)."""
    def raw(h):
        J = patch.jacobian(t)
        H = patch.second_derivatives(t, h=h)
        x = patch.fn(np.asarray(t, dtype=float))
        QT = _oriented_qr(J)
        PT = QT @ QT.T
        amb = patch.ambient
        if isinstance(amb, RoundSphere):
            PS = amb.tangent_projector(x)
            PN = PS - PT @ PS @ PT if False else PS - PT
            # covariant second derivative on the sphere = tangential projection
            vals = [PS @ H[a, b] for a in range(patch.d) for b in range(patch.d)]
            vals = [(np.eye(len(x)) - PT) @ v for v in vals]
        else:
            vals = [(np.eye(len(x)) - PT) @ H[a, b]
                    for a in range(patch.d) for b in range(patch.d)]
        return max(np.linalg.norm(v) for v in vals)

    r1 = raw(patch.h)
    r2 = raw(patch.h / 2)
    return abs((4 * r2 - r1) / 3)


def is_completely_geodesic(patch: ParametrizedPatch, tol: float = 1e-6) -> bool:
    """True iff the second fundamental form vanishes at all grid nodes."""
    return all(second_fundamental_form_defect(patch, t) <= tol
               for t in patch.grid())
