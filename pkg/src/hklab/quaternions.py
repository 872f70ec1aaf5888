"""Quaternion arithmetic and the 2-sphere of complex structures on H^n = R^{4n}.

Complex structures act on tangent vectors by componentwise *left* quaternion
multiplication, so that I∘J = K holds with ordinary composition.  Unit
quaternions rotate the structure sphere by conjugation q -> u q u*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quaternion",
    "ImaginaryUnit",
    "qmul",
    "left_mult_matrix",
    "right_mult_matrix",
    "complex_structure_operator",
    "left_action_operator",
    "su2_tangent_action",
    "rotate_structure",
    "standard_triple",
    "rotate_triple",
    "random_unit_quaternion",
    "random_imaginary_unit",
    "fibonacci_structures",
]

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Quaternion:
    """A quaternion w + x·i + y·j + z·k."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return qmul(self, other)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def scale(self, c: float) -> "Quaternion":
        return Quaternion(c * self.w, c * self.x, c * self.y, c * self.z)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero quaternion")
        return self.scale(1.0 / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @staticmethod
    def from_array(v) -> "Quaternion":
        w, x, y, z = np.asarray(v, dtype=float)
        return Quaternion(float(w), float(x), float(y), float(z))

    def is_unit(self, tol: float = _UNIT_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product p·q."""
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


QUAT_ONE = Quaternion(1.0)
QUAT_I = Quaternion(0.0, 1.0)
QUAT_J = Quaternion(0.0, 0.0, 1.0)
QUAT_K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ImaginaryUnit:
    """A point a·i + b·j + c·k of the structure sphere (a²+b²+c² = 1)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        r = self.a ** 2 + self.b ** 2 + self.c ** 2
        if abs(r - 1.0) > 1e-12:
            raise ValueError(f"imaginary unit must lie on the unit sphere, |q|^2 = {r}")

    @property
    def quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.a, self.b, self.c)

    def __neg__(self) -> "ImaginaryUnit":
        return ImaginaryUnit(-self.a, -self.b, -self.c)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @staticmethod
    def from_vector(v) -> "ImaginaryUnit":
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0.0:
            raise ValueError("zero vector does not define a structure")
        v = v / n
        return ImaginaryUnit(float(v[0]), float(v[1]), float(v[2]))

    @staticmethod
    def from_quaternion(q: Quaternion, tol: float = 1e-9) -> "ImaginaryUnit":
        if abs(q.w) > tol:
            raise ValueError(f"quaternion has a real part {q.w}")
        return ImaginaryUnit.from_vector([q.x, q.y, q.z])


UNIT_I = ImaginaryUnit(1.0, 0.0, 0.0)
UNIT_J = ImaginaryUnit(0.0, 1.0, 0.0)
UNIT_K = ImaginaryUnit(0.0, 0.0, 1.0)

_BASIS = [QUAT_ONE, QUAT_I, QUAT_J, QUAT_K]


def left_mult_matrix(q: Quaternion) -> np.ndarray:
    """4x4 matrix of v -> q·v in the basis 1, i, j, k."""
    return np.column_stack([qmul(q, e).as_array() for e in _BASIS])


def right_mult_matrix(q: Quaternion) -> np.ndarray:
    """4x4 matrix of v -> v·q."""
    return np.column_stack([qmul(e, q).as_array() for e in _BASIS])


def _blockwise(mat4: np.ndarray, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("quaternionic dimension must be >= 1")
    if n == 1:
        return mat4
    return np.kron(np.eye(n), mat4)


def complex_structure_operator(L: ImaginaryUnit, n: int) -> np.ndarray:
    """The operator of L acting on H^n = R^{4n} by left multiplication.

    Squares to -Id, is orthogonal and skew; the operators of i, j, k
    compose as I∘J = K.
    """
    return _blockwise(left_mult_matrix(L.quaternion), n)


def left_action_operator(u: Quaternion, n: int) -> np.ndarray:
    """Quaternionic module action v -> u·v of a unit quaternion on R^{4n}.

    This is the action whose induced transformation of exterior forms is
    used for all invariance questions; its generators at u = exp(t·q) are
    the complex-structure operators themselves.
    """
    if not u.is_unit():
        raise ValueError("left action requires a unit quaternion")
    return _blockwise(left_mult_matrix(u), n)


def su2_tangent_action(u: Quaternion, n: int) -> np.ndarray:
    """Two-sided conjugation v -> u·v·u* on R^{4n} for a unit quaternion u.

    Orthogonal; u and -u give the same operator (the action factors
    through SO(3) and rotates the structure sphere).
    """
    if not u.is_unit():
        raise ValueError("conjugation action requires a unit quaternion")
    mat4 = left_mult_matrix(u) @ right_mult_matrix(u.conjugate())
    return _blockwise(mat4, n)


def rotate_structure(u: Quaternion, L: ImaginaryUnit) -> ImaginaryUnit:
    """Rotate a structure by conjugation: L -> u·L·u*."""
    if not u.is_unit():
        raise ValueError("structure rotation requires a unit quaternion")
    q = qmul(qmul(u, L.quaternion), u.conjugate())
    return ImaginaryUnit.from_vector([q.x, q.y, q.z])


def standard_triple() -> tuple[ImaginaryUnit, ImaginaryUnit, ImaginaryUnit]:
    return UNIT_I, UNIT_J, UNIT_K


def rotate_triple(u: Quaternion) -> tuple[ImaginaryUnit, ImaginaryUnit, ImaginaryUnit]:
    """The triple (uiu*, uju*, uku*); satisfies I'∘J' = K' for any unit u."""
    return tuple(rotate_structure(u, L) for L in standard_triple())


def is_triple(I: ImaginaryUnit, J: ImaginaryUnit, K: ImaginaryUnit,
              tol: float = 1e-9) -> bool:
    """Check I·J = K in the quaternion algebra (hence anticommutation)."""
    prod = qmul(I.quaternion, J.quaternion)
    return (prod - K.quaternion).norm() <= tol


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    v = rng.normal(size=4)
    return Quaternion.from_array(v / np.linalg.norm(v))


def random_imaginary_unit(rng: np.random.Generator) -> ImaginaryUnit:
    v = rng.normal(size=3)
    return ImaginaryUnit.from_vector(v)


def fibonacci_structures(count: int, include_axes: bool = True) -> list[ImaginaryUnit]:
    """Deterministic well-spread sample of the structure sphere.

    Fibonacci lattice on S²; with include_axes the exact i, j, k come first
    (the lattice itself almost never hits them).
    """
    if count < 1:
        raise ValueError("need at least one sample")
    out: list[ImaginaryUnit] = []
    if include_axes:
        out.extend(standard_triple())
    golden = math.pi * (3.0 - math.sqrt(5.0))
    remaining = max(count - len(out), 0)
    for idx in range(remaining):
        z = 1.0 - 2.0 * (idx + 0.5) / remaining
        r = math.sqrt(max(1.0 - z * z, 0.0))
        phi = golden * idx
        out.append(ImaginaryUnit.from_vector([r * math.cos(phi), r * math.sin(phi), z]))
    return out[:count] if not include_axes else out
