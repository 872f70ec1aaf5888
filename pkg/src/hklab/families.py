"""Families of completely geodesic submanifolds and their natural connection.

The connection lifts base motion to fiber-normal motion; integrating the lift
along base paths produces the transport maps, whose isometry, holomorphy,
path independence and holonomy are measured here.  Torus families move an
affine subtorus by a (possibly curvilinear) displacement of the ambient;
the great-circle family on the round sphere is the curved control whose
holonomy has a closed form (the enclosed axis-area).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .ambient import AffineSubtorus, HKTorus, RoundSphere, geodesic_distance
from .quaternions import (ImaginaryUnit, complex_structure_operator,
                          fibonacci_structures, standard_triple)

__all__ = [
    "TorusFamily",
    "GreatCircleFamily",
    "TransportMap",
    "NormalSection",
    "transport",
    "normal_field",
    "normal_field_holomorphy_check",
    "verify_parallel",
    "verify_killing",
    "verify_isometry",
    "verify_holomorphy",
    "family_curvature",
    "path_independence_check",
    "connection_axiom_defect",
    "weight_representation_singular_values",
    "weight_invariant_rank",
    "solid_angle",
    "axis_rotation",
]


class IntegrationError(RuntimeError):
    """The connection lift could not be integrated along the path."""


# ---------------------------------------------------------------------------
# families

class TorusFamily:
    """Family of parallel affine subtori X_s = X_0 + c(s).

    ``displacement`` c maps base parameters in R^k to ambient translations
    with c(0) = 0; every fiber is a translate of the template subtorus, hence
    completely geodesic and (when the template is quaternionic) trianalytic.
    A nonlinear tangential component of c exercises the connection without
    changing the fibers.
    """

    def __init__(self, template: AffineSubtorus, displacement, displacement_jac,
                 base_dim: int, name: str = "torus-family"):
        self.template = template
        self.torus: HKTorus = template.torus
        self.displacement = displacement
        self.displacement_jac = displacement_jac
        self.base_dim = base_dim
        self.name = name

    @classmethod
    def translation(cls, template: AffineSubtorus, B, name: str = "translation"):
        """phi(s, x) = x + B s with B mapping the base into the ambient."""
        B = np.asarray(B, dtype=float)
        return cls(template, lambda s: B @ np.asarray(s, dtype=float),
                   lambda s: B, B.shape[1], name=name)

    @classmethod
    def sheared(cls, template: AffineSubtorus, B, shear, amplitude: float = 0.3,
                name: str = "sheared-translation"):
        """Translation family with a sinusoidal tangential chart slide.

        c(s) = B s + W sin(s) componentwise, W columns tangent to X_0: the
        fibers equal the translation family's fibers as sets, but the
        evaluation map slides along them, so the connection lift integrates a
        non-polynomial field.  The holonomy is still exactly zero because c
        is a gradient; only the integrator's discretization error survives.
        """
        B = np.asarray(B, dtype=float)
        shear = np.asarray(shear, dtype=float)  # 4n x k, columns tangent to X_0
        k = B.shape[1]
        # coordinate mixing with distinct weights so the slide along one base
        # axis feels the others asymmetrically (no accidental cancellation of
        # the probe's quadrature error around loops)
        mix = np.eye(k) + 2.0 * np.triu(np.ones((k, k)), 1)

        def disp(s):
            s = np.asarray(s, dtype=float)
            return B @ s + shear @ (amplitude * np.sin(mix @ s))

        def jac(s):
            s = np.asarray(s, dtype=float)
            return B + shear @ (amplitude * np.cos(mix @ s)[:, None] * mix)

        return cls(template, disp, jac, k, name=name)

    def fiber(self, s) -> AffineSubtorus:
        return self.template.translate(self.displacement(s))

    def fiber_points(self, s, chart_coords) -> np.ndarray:
        base = np.atleast_2d(chart_coords) @ self.template.periods.T
        return base + self.template.offset + self.displacement(s)

    def sample_chart(self, count: int, rng=None) -> np.ndarray:
        if rng is None:
            # deterministic low-discrepancy-ish grid
            d = self.template.d
            per_axis = max(2, int(round(count ** (1.0 / d))))
            axes = [np.arange(per_axis) / per_axis] * d
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=-1)
            return pts[:count] if len(pts) >= count else pts
        return rng.uniform(size=(count, self.template.d))

    def lift_velocity(self, s, s_dot) -> np.ndarray:
        """Chart velocity of the connection lift (same for every fiber point)."""
        PT = self.template.tangent_projector()
        v = self.displacement_jac(s) @ np.asarray(s_dot, dtype=float)
        Gplus = np.linalg.pinv(self.template.periods)
        return -Gplus @ (PT @ v)


class GreatCircleFamily:
    """Great circles on a round 2-sphere, parametrized by their unit axis.

    axis(s) tilts the north pole by rotations about x then y; transporting a
    point of the circle as the axis moves is exactly parallel transport of a
    unit tangent vector along the axis curve, so loop holonomy is a rotation
    by the enclosed spherical area.
    """

    def __init__(self, sphere: RoundSphere, name: str = "great-circle-family"):
        if sphere.m != 2:
            raise ValueError("the great-circle control lives on S^2")
        self.sphere = sphere
        self.base_dim = 2
        self.name = name

    def axis(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return _rot_x(s[0]) @ _rot_y(s[1]) @ np.array([0.0, 0.0, 1.0])

    def axis_jac(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        Kx = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
        Ky = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        e3 = np.array([0.0, 0.0, 1.0])
        d1 = Kx @ _rot_x(s[0]) @ _rot_y(s[1]) @ e3
        d2 = _rot_x(s[0]) @ Ky @ _rot_y(s[1]) @ e3
        return np.column_stack([d1, d2])

    def fiber_points(self, s, angles) -> np.ndarray:
        r = self.sphere.radius
        a = self.axis(s)
        u, v = _circle_frame(a)
        angles = np.atleast_1d(angles)
        return r * (np.outer(np.cos(angles), u) + np.outer(np.sin(angles), v))

    def sample_chart(self, count: int, rng=None) -> np.ndarray:
        if rng is None:
            return np.arange(count) * (2 * math.pi / count)
        return rng.uniform(0.0, 2 * math.pi, size=count)


def _rot_x(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[1.0, 0, 0], [0, c, -s], [0, s, c]])


def _rot_y(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0, s], [0, 1.0, 0], [-s, 0, c]])


def _circle_frame(a):
    """Orthonormal (u, v) spanning the plane perpendicular to the unit axis a."""
    ref = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(ref, a)) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    u = ref - np.dot(ref, a) * a
    u /= np.linalg.norm(u)
    v = np.cross(a, u)
    return u, v


# ---------------------------------------------------------------------------
# paths and transport

def _path_segments(waypoints):
    pts = [np.asarray(p, dtype=float) for p in waypoints]
    if len(pts) < 2:
        raise ValueError("a path needs at least two waypoints")
    return pts


@dataclass
class TransportMap:
    family: object
    waypoints: list
    start_state: np.ndarray     # chart coords (torus) or ambient points (sphere)
    end_state: np.ndarray
    start_points: np.ndarray    # ambient positions on the source fiber
    end_points: np.ndarray      # ambient positions on the target fiber
    fiber_drift: float          # worst distance of an image from the target fiber
    nfev: int


def transport(family, waypoints, samples, rtol: float = 1e-10,
              atol: float = 1e-12, fixed_steps: int | None = None,
              probe_order: int = 4) -> TransportMap:
    """Integrate the connection lift along a piecewise-linear base path.

    samples: chart coordinates (torus families) or circle angles (sphere).
    fixed_steps switches to a non-adaptive Runge-Kutta probe (order 4, or 2
    with probe_order=2) with that many steps per segment, used by the
    holonomy convergence studies.
    """
    pts = _path_segments(waypoints)
    if isinstance(family, TorusFamily):
        return _transport_torus(family, pts, samples, rtol, atol, fixed_steps,
                                probe_order)
    if isinstance(family, GreatCircleFamily):
        return _transport_sphere(family, pts, samples, rtol, atol, fixed_steps,
                                 probe_order)
    raise TypeError(f"unsupported family {type(family)!r}")


def _rk4(f, y0, t0, t1, steps):
    y = y0.copy()
    h = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y, 4 * steps


def _rk2(f, y0, t0, t1, steps):
    y = y0.copy()
    h = (t1 - t0) / steps
    t = t0
    for _ in range(steps):
        k = f(t + h / 2, y + h / 2 * f(t, y))
        y = y + h * k
        t += h
    return y, 2 * steps


def _integrate_segments(f_on_segment, y0, segments, rtol, atol, fixed_steps,
                        probe_order=4):
    y = np.asarray(y0, dtype=float).copy()
    nfev = 0
    for (sa, sb) in segments:
        f = f_on_segment(sa, sb)
        if fixed_steps is not None:
            stepper = _rk2 if probe_order == 2 else _rk4
            y, used = stepper(f, y, 0.0, 1.0, fixed_steps)
            nfev += used
        else:
            sol = solve_ivp(f, (0.0, 1.0), y, method="RK45", rtol=rtol, atol=atol)
            if not sol.success:
                raise IntegrationError(sol.message)
            y = sol.y[:, -1]
            nfev += sol.nfev
    return y, nfev


def _transport_torus(family: TorusFamily, pts, samples, rtol, atol, fixed_steps,
                     probe_order=4):
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    d = family.template.d

    def f_on_segment(sa, sb):
        ds = sb - sa

        def f(t, y):
            s = sa + t * ds
            v = family.lift_velocity(s, ds)
            return np.tile(v, len(samples))
        return f

    y0 = samples.ravel()
    segments = list(zip(pts[:-1], pts[1:]))
    y_end, nfev = _integrate_segments(f_on_segment, y0, segments, rtol, atol,
                                      fixed_steps, probe_order)
    end_chart = y_end.reshape(-1, d)
    start_points = family.fiber_points(pts[0], samples)
    end_points = family.fiber_points(pts[-1], end_chart)
    target = family.fiber(pts[-1])
    drift = max(float(np.linalg.norm(target.normal_residual(p))) for p in end_points)
    return TransportMap(family, pts, samples, end_chart, start_points,
                        end_points, drift, nfev)


def _transport_sphere(family: GreatCircleFamily, pts, samples, rtol, atol,
                      fixed_steps, probe_order=4):
    angles = np.atleast_1d(np.asarray(samples, dtype=float))
    start_points = family.fiber_points(pts[0], angles)
    n = len(start_points)

    def f_on_segment(sa, sb):
        ds = sb - sa

        def f(t, y):
            s = sa + t * ds
            a = family.axis(s)
            adot = family.axis_jac(s) @ ds
            x = y.reshape(n, 3)
            lam = -(x @ adot)
            return (lam[:, None] * a[None, :]).ravel()
        return f

    segments = list(zip(pts[:-1], pts[1:]))
    y_end, nfev = _integrate_segments(f_on_segment, start_points.ravel(),
                                      segments, rtol, atol, fixed_steps,
                                      probe_order)
    end_points = y_end.reshape(n, 3)
    a_end = family.axis(pts[-1])
    drift = float(np.max(np.abs(end_points @ a_end)))
    drift = max(drift, float(np.max(np.abs(
        np.linalg.norm(end_points, axis=1) - family.sphere.radius))))
    return TransportMap(family, pts, angles, end_points, start_points,
                        end_points, drift, nfev)


# ---------------------------------------------------------------------------
# normal sections

@dataclass
class NormalSection:
    """Vector field normal to a fiber, sampled on a chart grid.

    ``evaluate`` extends the section off the sample points so derivative
    checks can use small stencils.
    """

    family: object
    s: np.ndarray
    points: np.ndarray
    values: np.ndarray
    evaluate: object = None


def normal_field(family, s, t, grid_resolution: int = 3,
                 eps: float = 1e-6) -> NormalSection:
    """Derivative of the evaluation map along base direction t, projected
    to the fiber's normal space at each node."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if isinstance(family, TorusFamily):
        fiber = family.fiber(s)
        PN = fiber.normal_projector()
        chart = fiber.grid(grid_resolution)  # ambient nodes
        v = (family.displacement(s + eps * t) - family.displacement(s - eps * t)) / (2 * eps)
        value = PN @ v

        def evaluate(x):
            return value

        vals = np.tile(value, (len(chart), 1))
        return NormalSection(family, s, chart, vals, evaluate)
    if isinstance(family, GreatCircleFamily):
        a = family.axis(s)
        adot = family.axis_jac(s) @ t

        def evaluate(x):
            # in-sphere normal direction of the circle at x is the axis itself
            return -np.dot(x, adot) * a

        angles = family.sample_chart(max(grid_resolution * 4, 8))
        pts = family.fiber_points(s, angles)
        vals = np.array([evaluate(p) for p in pts])
        return NormalSection(family, s, pts, vals, evaluate)
    raise TypeError(f"unsupported family {type(family)!r}")


def normal_field_holomorphy_check(eta: NormalSection, L: ImaginaryUnit,
                                  tol: float = 1e-8, h: float = 1e-6) -> bool:
    """dbar_L defect of a normal section along a trianalytic torus fiber."""
    family = eta.family
    if not isinstance(family, TorusFamily):
        raise TypeError("holomorphy checks need a torus family")
    from .bundles import dbar_split
    fiber = family.fiber(eta.s)
    dbar, _ = dbar_split(eta.evaluate, fiber, L, grid_resolution=3, h=h)
    return bool(dbar <= tol)


def verify_parallel(eta: NormalSection, tol: float = 1e-8, h: float = 1e-6) -> bool:
    """Finite-difference covariant derivative of eta along all fiber directions."""
    family = eta.family
    if isinstance(family, TorusFamily):
        fiber = family.fiber(eta.s)
        Q = fiber.tangent_frame
        worst = 0.0
        for p in fiber.grid(3):
            for a in range(Q.shape[1]):
                d = (np.asarray(eta.evaluate(p + h * Q[:, a]))
                     - np.asarray(eta.evaluate(p - h * Q[:, a]))) / (2 * h)
                worst = max(worst, float(np.linalg.norm(d)))
        return bool(worst <= tol)
    if isinstance(family, GreatCircleFamily):
        sphere = family.sphere
        a = family.axis(eta.s)
        u, v = _circle_frame(a)
        r = sphere.radius
        worst = 0.0
        for th in family.sample_chart(8):
            x = r * (math.cos(th) * u + math.sin(th) * v)
            tangent = -math.sin(th) * u + math.cos(th) * v
            d = (np.asarray(eta.evaluate(x + h * tangent))
                 - np.asarray(eta.evaluate(x - h * tangent))) / (2 * h)
            cov = sphere.tangent_projector(x) @ d
            worst = max(worst, float(np.linalg.norm(cov)))
        return bool(worst <= tol)
    raise TypeError(f"unsupported family {type(family)!r}")


def verify_killing(ambient, field, points, tol: float = 1e-8,
                   h: float = 1e-5) -> dict:
    """Symmetrized covariant derivative defect of a vector field.

    For every sample point and every coordinate pair (a, b) it measures
    <grad_a field, b> + <grad_b field, a>; a Killing field gives zero.
    """
    worst = 0.0
    for x in points:
        x = np.asarray(x, dtype=float)
        dim = len(x)
        if isinstance(ambient, RoundSphere):
            P = ambient.tangent_projector(x)
            frame = _sphere_frame(x, P)
        else:
            frame = np.eye(dim)
        cols = []
        for a in range(frame.shape[1]):
            e = frame[:, a]
            d = (np.asarray(field(x + h * e)) - np.asarray(field(x - h * e))) / (2 * h)
            if isinstance(ambient, RoundSphere):
                d = ambient.tangent_projector(x) @ d
            cols.append(frame.T @ d)
        Jt = np.column_stack(cols)       # Jt[i, a] = <grad_a field, frame_i>
        sym = Jt + Jt.T
        worst = max(worst, float(np.max(np.abs(sym))))
    return {"max_defect": worst, "killing": bool(worst <= tol)}


def _sphere_frame(x, P):
    basis = []
    for k in range(len(x)):
        v = P @ np.eye(len(x))[k]
        for b in basis:
            v = v - np.dot(v, b) * b
        n = np.linalg.norm(v)
        if n > 1e-8:
            basis.append(v / n)
    return np.column_stack(basis)


# ---------------------------------------------------------------------------
# verification of integrated transports

def verify_isometry(T: TransportMap, pair_samples: int = 200, tol: float = 1e-6,
                    seed: int = 0) -> dict:
    """Max |d(x,y) - d(Psi x, Psi y)| over sampled pairs, geodesic distances."""
    rng = np.random.default_rng(seed)
    family = T.family
    ambient = family.torus if isinstance(family, TorusFamily) else family.sphere
    n = len(T.start_points)
    worst = 0.0
    for _ in range(pair_samples):
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        d0 = geodesic_distance(ambient, T.start_points[i], T.start_points[j])
        d1 = geodesic_distance(ambient, T.end_points[i], T.end_points[j])
        worst = max(worst, abs(d0 - d1))
    return {"max_defect": worst, "isometry": bool(worst <= tol),
            "pairs": pair_samples}


def verify_holomorphy(T: TransportMap, structures=None, tol: float = 1e-6,
                      eps: float = 1e-5) -> dict:
    """Commutator defect |dPsi ∘ L - L ∘ dPsi| on fiber tangent vectors.

    dPsi is measured by transporting perturbed samples; for trianalytic torus
    fibers the tangent space is L-stable for every induced structure.
    """
    family = T.family
    if not isinstance(family, TorusFamily):
        raise TypeError("holomorphy checks need a torus family")
    if structures is None:
        structures = list(standard_triple())
    fiber0 = family.fiber(T.waypoints[0])
    Q = fiber0.tangent_frame
    d = Q.shape[1]
    base_chart = np.atleast_2d(T.start_state)[:1]
    # columns of dPsi in the tangent frame via perturbed transports
    perturbed = [base_chart[0]]
    Gplus = np.linalg.pinv(family.template.periods)
    for a in range(d):
        perturbed.append(base_chart[0] + eps * (Gplus @ (Q @ Q.T) @ Q[:, a]))
    Tp = transport(family, T.waypoints, np.array(perturbed))
    base_img = Tp.end_points[0]
    M = np.column_stack([(Tp.end_points[1 + a] - base_img) / eps for a in range(d)])
    n_quat = family.torus.n
    worst = {}
    for L in structures:
        Lmat = complex_structure_operator(L, n_quat)
        Lt = Q.T @ Lmat @ Q
        comm = Lmat @ M - M @ Lt
        worst[_structure_key(L)] = float(np.linalg.norm(comm, ord=2))
    return {"per_structure": worst, "max_defect": max(worst.values()),
            "holomorphic": bool(max(worst.values()) <= tol)}


def _structure_key(L: ImaginaryUnit) -> str:
    return "[" + ",".join(f"{v:+.4f}" for v in L.as_array()) + "]"


def family_curvature(family, s, a, b, h: float, samples=None,
                     fixed_steps: int | None = None, rtol: float = 1e-10,
                     atol: float = 1e-12, probe_order: int = 4) -> dict:
    """Holonomy density probe: transport around the parallelogram
    s -> s+ha -> s+ha+hb -> s+hb -> s and return displacement / h^2."""
    s = np.asarray(s, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    loop = [s, s + h * a, s + h * a + h * b, s + h * b, s]
    if samples is None:
        samples = family.sample_chart(8)
    T = transport(family, loop, samples, rtol=rtol, atol=atol,
                  fixed_steps=fixed_steps, probe_order=probe_order)
    disp = np.linalg.norm(T.end_points - T.start_points, axis=-1)
    return {"max_displacement": float(np.max(disp)),
            "defect": float(np.max(disp)) / (h * h),
            "transport": T}


def path_independence_check(family, path1, path2, samples, tol: float = 1e-7,
                            **kw) -> dict:
    """Transports along two paths with shared endpoints; max pointwise distance."""
    p1 = _path_segments(path1)
    p2 = _path_segments(path2)
    if not (np.allclose(p1[0], p2[0]) and np.allclose(p1[-1], p2[-1])):
        raise ValueError("paths must share endpoints")
    T1 = transport(family, p1, samples, **kw)
    T2 = transport(family, p2, samples, **kw)
    ambient = family.torus if isinstance(family, TorusFamily) else family.sphere
    worst = max(geodesic_distance(ambient, x, y)
                for x, y in zip(T1.end_points, T2.end_points))
    return {"max_defect": float(worst), "independent": bool(worst <= tol)}


def connection_axiom_defect(family, s, directions=None) -> float:
    """|p(lift(nu)) - nu| over normal vectors: the lift must be a section of
    the projection to the fiber-normal bundle."""
    s = np.asarray(s, dtype=float)
    if isinstance(family, TorusFamily):
        fiber = family.fiber(s)
        PN = fiber.normal_projector()
        B = family.displacement_jac(s)
        PT = fiber.tangent_projector()
        worst = 0.0
        if directions is None:
            directions = np.eye(family.base_dim)
        for t in np.atleast_2d(directions):
            chart_dot = family.lift_velocity(s, t)
            dphi = B @ t + family.template.periods @ chart_dot
            nu = PN @ (B @ t)
            # the lifted velocity must be purely normal and project back to nu
            worst = max(worst, float(np.linalg.norm(PN @ dphi - nu)),
                        float(np.linalg.norm(PT @ dphi)))
        return worst
    if isinstance(family, GreatCircleFamily):
        a = family.axis(s)
        J = family.axis_jac(s)
        worst = 0.0
        for t in np.eye(2):
            adot = J @ t
            for th in family.sample_chart(8):
                x = family.fiber_points(s, [th])[0]
                vel = -np.dot(x, adot) * a     # the lift at x
                tangent = np.cross(a, x)
                tangent /= np.linalg.norm(tangent)
                worst = max(worst, abs(float(np.dot(vel, tangent))))
        return worst
    raise TypeError(f"unsupported family {type(family)!r}")


# ---------------------------------------------------------------------------
# the finite-dimensional engine of the flatness proof

def _lambda2_matrix(G: np.ndarray) -> np.ndarray:
    """Induced action of a generator G on Lambda^2 of the base space."""
    n = G.shape[0]
    import itertools as it
    pairs = list(it.combinations(range(n), 2))
    M = np.zeros((len(pairs), len(pairs)))
    index = {p: i for i, p in enumerate(pairs)}
    for col, (a, b) in enumerate(pairs):
        for c in range(n):
            for (x, y, coef) in ((c, b, G[c, a]), (a, c, G[c, b])):
                if x == y:
                    continue
                s = 1.0
                if x > y:
                    x, y, s = y, x, -1.0
                M[index[(x, y)], col] += s * coef
    return M


def weight_representation_singular_values() -> np.ndarray:
    """Singular values of the invariance constraint on Hom(Lambda^2 V, V).

    V = R^4 with the unit quaternions acting by left multiplication (the
    weight-one representation carried by fiber tangents and base normals).
    A trivial subrepresentation would show up as a zero singular value; there
    is none, which is what forces the family connection to be flat.
    """
    gens = [complex_structure_operator(L, 1) for L in standard_triple()]
    blocks = []
    for G in gens:
        G2 = _lambda2_matrix(G)
        blocks.append(np.kron(np.eye(6), G) - np.kron(G2.T, np.eye(4)))
    K = np.vstack(blocks)
    return np.linalg.svd(K, compute_uv=False)


def weight_invariant_rank(tol: float = 1e-10) -> int:
    sv = weight_representation_singular_values()
    return int(np.sum(sv <= tol))


# ---------------------------------------------------------------------------
# sphere holonomy closed form

def solid_angle(family: GreatCircleFamily, s0, a, b, h: float,
                order: int = 24) -> float:
    """Signed spherical area swept by the axis over the h-parallelogram at s0.

    Gauss-Legendre quadrature of the pullback of the area form; by
    Gauss-Bonnet the transport around the loop is exactly the rotation of the
    circle by this angle about the axis.
    """
    s0 = np.asarray(s0, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0) * h
    weights = 0.5 * h * weights
    total = 0.0
    for x1, w1 in zip(nodes, weights):
        for x2, w2 in zip(nodes, weights):
            s = s0 + x1 * a + x2 * b
            J = family.axis_jac(s)
            d1 = J @ a
            d2 = J @ b
            total += w1 * w2 * float(np.dot(family.axis(s), np.cross(d1, d2)))
    return total


def axis_rotation(axis, angle) -> np.ndarray:
    """Rotation by angle about the unit axis (Rodrigues)."""
    a = np.asarray(axis, dtype=float)
    Kx = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return np.eye(3) + math.sin(angle) * Kx + (1 - math.cos(angle)) * Kx @ Kx
