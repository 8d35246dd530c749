"""Circle and torus actions, their lifts to the Maslov bundles, and the
quantities built from them: Q_beta, local indices, momentum maps.

Two base spaces are supported.  On R^2n a :class:`LinearCircleAction`
rotates each complex coordinate ``z_j = q_j + i p_j`` with integer weight
``m_j``; its square-determinant bundle is trivialised by constant frames,
so total-space points are ``[x, theta]`` with ``theta`` in turns.  On S^2 a
:class:`~maslov.sphere.SphereRotation` turns the sphere about an axis and
acts on frames (SO(3)) by left multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bundle, conventions, grassmann, sphere
from .errors import (
    InternalError,
    InvariantConnectionRequired,
    NoFixedPoints,
    NotAPotential,
    NotFixedPoint,
    NotPeriodic,
    UndersampledLoop,
    WrongBundle,
)
from .forms import OneForm, liouville_form
from .so3 import TWO_PI, expm, fiber_act, hat, random_rotations
from .sphere import SphereRotation
from .symplin import linear_rotation, standard_symplectic, standard_triple

FIXED_TOL = 1e-10
FIXED_TIMES = (0.25, 0.5, (np.sqrt(5.0) - 1.0) / 2.0)
ORBIT_SAMPLES = 512
MAX_ORBIT_SAMPLES = 8192
UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class LinearCircleAction:
    """``z_j -> exp(2 pi i m_j t) z_j`` on R^2n."""

    weights: tuple

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights))
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty integer vector")
        if not np.all(np.asarray(w, dtype=float) == np.rint(np.asarray(w, dtype=float))):
            raise ValueError("weights must be integers")
        object.__setattr__(self, "weights", tuple(int(v) for v in w))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def matrix(self, t) -> np.ndarray:
        return linear_rotation(self.weights, t)

    def generator(self) -> np.ndarray:
        """Matrix ``K`` with ``matrix(t) = exp(t K)``."""
        return TWO_PI * standard_symplectic(self.n).matrix @ np.diag(np.tile(self.weights, 2))

    @property
    def fiber_rate(self) -> int:
        """Turns of the square-determinant fiber per period over a fixed point."""
        return conventions.orientation() * 2 * sum(self.weights)


@dataclass(frozen=True)
class TorusAction:
    """Commuting circle factors on one base space."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a torus action needs at least one circle factor")
        kinds = {type(c) for c in comps}
        if len(kinds) != 1 or not kinds <= {LinearCircleAction, SphereRotation}:
            raise ValueError("torus factors must all be linear actions or all sphere rotations")
        if isinstance(comps[0], LinearCircleAction) and len({c.n for c in comps}) != 1:
            raise ValueError("linear torus factors must act on the same R^2n")
        object.__setattr__(self, "components", comps)
        err = self.commutation_error()
        if err > 1e-9:
            raise ValueError(f"torus factors do not commute (error {err:.3e})")

    @property
    def rank(self) -> int:
        return len(self.components)

    def commutation_error(self, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(4):
            t = rng.uniform(0.0, 1.0, size=2)
            for a in self.components:
                for b in self.components:
                    ma, mb = a.matrix(t[0]), b.matrix(t[1])
                    worst = max(worst, float(np.abs(ma @ mb - mb @ ma).max()))
        return worst


def _action_kind(action) -> str:
    if isinstance(action, LinearCircleAction):
        return "linear"
    if isinstance(action, SphereRotation):
        return "sphere"
    raise TypeError(f"unsupported action {action!r}")


def flow(action, t, x) -> np.ndarray:
    """Time-``t`` map of the period-1 flow applied to the base point ``x``."""
    x = np.asarray(x, dtype=float)
    if isinstance(action, TorusAction):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if t.shape != (action.rank,):
            raise ValueError(f"torus flow needs {action.rank} times")
        for comp, tk in zip(action.components, t):
            x = flow(comp, tk, x)
        return x
    kind = _action_kind(action)
    if kind == "linear" and x.shape[-1] != action.dim:
        raise ValueError(f"point must lie in R^{action.dim}")
    return x @ action.matrix(t).T


def is_fixed(action, p, tol: float = FIXED_TOL) -> bool:
    """Fixed-point test at a few incommensurate times."""
    p = np.asarray(p, dtype=float)
    if isinstance(action, TorusAction):
        return all(is_fixed(c, p, tol) for c in action.components)
    return all(np.linalg.norm(flow(action, t, p) - p) < tol for t in FIXED_TIMES)


def _require_fixed(action, p):
    if not is_fixed(action, p):
        raise NotFixedPoint(f"{np.asarray(p).tolist()} is not fixed by the action")


def _check_unitary(a, triple):
    gj, j = triple.g_j, triple.j
    err = max(float(np.abs(a.T @ gj @ a - gj).max()), float(np.abs(a @ j - j @ a).max()))
    if err > UNITARITY_TOL:
        raise InternalError(f"tangent map is not unitary (error {err:.3e})")


def tangent_phase(action: LinearCircleAction, t) -> complex:
    """``det^2`` of the unitary part of the time-``t`` tangent map."""
    triple = standard_triple(action.n)
    a = action.matrix(t)
    _check_unitary(a, triple)
    reference = np.vstack([np.eye(action.n), np.zeros((action.n, action.n))])
    before = grassmann.det_squared(grassmann.unitary_of_frame(reference, triple))
    after = grassmann.det_squared(grassmann.unitary_of_frame(a @ reference, triple))
    return after * np.conj(before)


def lifted_flow_gamma2(action, t, w) -> np.ndarray:
    """Flow on the square-determinant bundle.

    On R^2n the base moves by the linear map and the fiber turns by
    ``fiber_rate * t``; the closed-form phase is compared with ``det^2`` of
    the tangent map at every call.  On S^2 frames are multiplied on the left.
    """
    if _action_kind(action) == "sphere":
        return np.asarray(action.matrix(t), dtype=float) @ np.asarray(w, dtype=float)
    w = np.asarray(w, dtype=float)
    x, theta = w[:-1], w[-1]
    turns = action.fiber_rate * float(t)
    z = tangent_phase(action, t)
    if abs(z - np.exp(2j * np.pi * turns)) > 1e-9:
        raise InternalError("closed-form fiber phase disagrees with the tangent-map determinant")
    return np.concatenate([flow(action, t, x), [theta + turns]])


def _lift_point(action, p, w=None):
    if w is not None:
        return np.asarray(w, dtype=float)
    if _action_kind(action) == "sphere":
        return sphere.lift_point(p)
    return bundle.trivial_point(p)


def _orbit(action, w0, n_intervals):
    t = np.linspace(0.0, 1.0, n_intervals + 1)
    if _action_kind(action) == "sphere":
        mats = expm(np.multiply.outer(t, action.generator))
        values = mats @ w0
        tangents = hat(action.generator) @ values
        return grassmann.SampledLoop(t, values, "point"), tangents
    x0 = w0[:-1]
    xs = np.stack([action.matrix(tk) @ x0 for tk in t])
    turns = w0[-1] + action.fiber_rate * t
    values = np.column_stack([xs, turns])
    tangents = np.column_stack([xs @ action.generator().T, np.full(len(t), float(action.fiber_rate))])
    return grassmann.SampledLoop(t, values, "fibered"), tangents


def _check_bundle(action, beta):
    want = "sphere" if _action_kind(action) == "sphere" else "trivial"
    if beta.kind != want:
        raise WrongBundle(f"{type(action).__name__} needs a {want} connection, got {beta.kind}")
    if want == "trivial" and beta.dim != action.dim:
        raise WrongBundle(f"connection lives over R^{beta.dim}, action over R^{action.dim}")


@dataclass(frozen=True)
class QResult:
    point: tuple
    value: float
    is_fixed: bool
    nearest_even: int | None
    samples: int

    def as_dict(self) -> dict:
        return {"point": list(self.point), "value": self.value, "is_fixed": self.is_fixed,
                "nearest_even": self.nearest_even, "samples": self.samples}


def orbit_maslov_data(action, beta, p, w=None, n_intervals: int = ORBIT_SAMPLES) -> tuple[float, int]:
    """Connection integral along the lifted orbit through ``w``; refines on undersampling."""
    _check_bundle(action, beta)
    w0 = _lift_point(action, p, w)
    n = n_intervals
    while True:
        try:
            loop, tangents = _orbit(action, w0, n)
            return bundle.maslov_data(loop, beta, tangents), n
        except UndersampledLoop:
            if 2 * n > MAX_ORBIT_SAMPLES:
                raise
            n *= 2


def q_beta(action, beta, p, w=None, n_intervals: int = ORBIT_SAMPLES) -> QResult:
    """Maslov data of the lifted period-1 orbit over ``p`` in the square-determinant bundle.

    On S^2 the orbit is integrated in the frame bundle and doubled: the
    square-determinant bundle is its quotient by ``+-1``, which wraps each
    fiber twice.
    """
    value, used = orbit_maslov_data(action, beta, p, w, n_intervals)
    if _action_kind(action) == "sphere":
        value *= 2.0
    fixed = is_fixed(action, p)
    nearest = None
    if fixed:
        nearest = int(2 * np.rint(value / 2.0))
        if abs(value - nearest) > 1e-6:
            raise InternalError(f"Q at a fixed point is {value!r}, not an even integer")
    return QResult(tuple(float(c) for c in np.ravel(p)), float(value), fixed, nearest, used)


def _fiber_phase_orbit(action, p, n_intervals):
    t = np.linspace(0.0, 1.0, n_intervals + 1)
    if _action_kind(action) == "sphere":
        z = sphere.fiber_orbit_phases(action, p, n_intervals)
        return z**2
    return np.array([tangent_phase(action, tk) for tk in t])


def local_index(action, p, n_intervals: int = 64) -> int:
    """Winding of the fiber phase over a fixed point; always even."""
    _require_fixed(action, p)
    n = n_intervals
    while True:
        try:
            degree = grassmann.loop_degree(_fiber_phase_orbit(action, p, n)).degree
            break
        except UndersampledLoop:
            if 2 * n > MAX_ORBIT_SAMPLES:
                raise
            n *= 2
    if degree % 2:
        raise InternalError(f"local index {degree} is odd")
    return degree


def resonance_type(action, p, t: float = 1e-3) -> tuple:
    """Integer weights of the linearised action at a fixed point.

    Read from eigenphases of the time-``t`` tangent map.  On S^2 the tangent
    plane is oriented by the frame basis ``(u, p x u)``.
    """
    _require_fixed(action, p)
    if _action_kind(action) == "sphere":
        w = sphere.lift_point(np.asarray(p, dtype=float))
        r = action.matrix(t)
        u, v = w[:, 0], w[:, 1]
        phases = np.array([np.arctan2(v @ r @ u, u @ r @ u)])
        phases = conventions.orientation() * phases
    else:
        triple = standard_triple(action.n)
        basis = triple.complex_basis()
        c = np.linalg.solve(basis, action.matrix(t) @ basis)
        n = action.n
        u = c[:n, :n] + 1j * c[n:, :n]
        if conventions.orientation() < 0:
            u = u.conj()
        if np.abs(u - np.diag(np.diag(u))).max() < 1e-12:
            eig = np.diag(u)
        else:
            eig = np.linalg.eigvals(u)
        phases = np.angle(eig)
    ratios = phases / (TWO_PI * t)
    weights = np.rint(ratios)
    if np.abs(ratios - weights).max() > 1e-6:
        raise NotPeriodic(f"eigenphase ratios {ratios} are not integers")
    return tuple(int(m) for m in weights)


def q_vector(taction: TorusAction, beta, p, n_intervals: int = ORBIT_SAMPLES) -> np.ndarray:
    """Componentwise ``Q_beta`` for the circle factors of a torus action."""
    return np.array([q_beta(c, beta, p, n_intervals=n_intervals).value for c in taction.components])


class SO3OnSphere:
    """The rotation group acting on S^2; used as the action of a momentum map."""

    def __repr__(self):
        return "SO3OnSphere()"


@dataclass(frozen=True)
class LinearPotential:
    """``eta = vertical * dtheta + pi^* tau`` on ``R^2n x S^1``."""

    tau: OneForm
    vertical: float = 1.0


@dataclass(frozen=True)
class SpherePotential:
    """``eta = scale * f`` on SO(3); ``scale = -1/r`` makes it a potential."""

    connection: object
    scale: float


def liouville_potential(n: int, vertical: float = 1.0) -> LinearPotential:
    """Potential from ``1/2 sum (q dp - p dq)``, whose derivative is minus the standard form."""
    return LinearPotential(liouville_form(n), vertical)


def sphere_potential(connection=None) -> SpherePotential:
    beta = bundle.SphereConnection() if connection is None else connection
    return SpherePotential(beta, -1.0 / sphere.curvature_ratio())


def _check_potential(potential, tol: float = 1e-8, seed: int = 0):
    rng = np.random.default_rng(seed)
    if isinstance(potential, LinearPotential):
        tau = potential.tau
        omega = standard_symplectic(tau.dim // 2)
        x, u, v = rng.standard_normal((3, 20, tau.dim))
        err = np.abs(tau.d(x, u, v) + omega(u, v)).max()
    elif isinstance(potential, SpherePotential):
        err = 0.0
        for w in random_rotations(rng, 20):
            xi, eta = rng.standard_normal((2, 3))
            ez = np.array([0.0, 0.0, 1.0])
            area = sphere.omega_s2(w[:, 2], w @ np.cross(xi, ez), w @ np.cross(eta, ez))
            d_eta = potential.scale * sphere.exterior_on_so3(potential.connection, w, xi, eta)
            err = max(err, abs(d_eta + area))
    else:
        raise NotAPotential(f"unknown potential {potential!r}")
    if err > tol:
        raise NotAPotential(f"d eta + omega does not vanish (max error {err:.3e})")


class MomentumMap:
    """``p -> (eta(X_1), ..., eta(X_l))`` for the generators of the action.

    For a circle action the single component is the Hamiltonian of the
    period-1 generator.  For SO(3) the components pair with the basis
    rotations ``e_1, e_2, e_3`` of so(3) at unit angular speed.
    """

    def __init__(self, action, potential):
        self.action = action
        self.potential = potential
        if isinstance(action, TorusAction):
            self.generators = list(action.components)
        elif isinstance(action, SO3OnSphere):
            self.generators = [np.eye(3)[i] for i in range(3)]
        else:
            self.generators = [action]
        self._sphere = isinstance(potential, SpherePotential)

    def _eval_one(self, gen, p, w=None):
        p = np.asarray(p, dtype=float)
        if self._sphere:
            w = sphere.lift_point(p) if w is None else w
            omega = gen.generator if isinstance(gen, SphereRotation) else np.asarray(gen, dtype=float)
            return self.potential.scale * float(self.potential.connection(w, hat(omega) @ w))
        vel = p @ gen.generator().T
        return self.potential.vertical * gen.fiber_rate + float(self.potential.tau.pair(p, vel))

    def __call__(self, p, w=None) -> np.ndarray:
        return np.array([self._eval_one(g, p, w) for g in self.generators])

    def hamiltonian(self, index: int = 0):
        return lambda p: self._eval_one(self.generators[index], p)

    def vector_field(self, index, p):
        gen = self.generators[index]
        p = np.asarray(p, dtype=float)
        if self._sphere:
            omega = gen.generator if isinstance(gen, SphereRotation) else np.asarray(gen, dtype=float)
            return np.cross(omega, p)
        return p @ gen.generator().T

    def gradient_error(self, index, p, step: float = 1e-5) -> float:
        """``max |dH(e) - omega(X, e)|`` over a tangent basis, central differences."""
        p = np.asarray(p, dtype=float)
        h = self.hamiltonian(index)
        x = self.vector_field(index, p)
        if self._sphere:
            w = sphere.lift_point(p)
            errs = []
            for e in (w[:, 0], w[:, 1]):
                # move along great circles so the probes stay on the sphere
                plus = np.cos(step) * p + np.sin(step) * e
                minus = np.cos(step) * p - np.sin(step) * e
                dh = (h(plus) - h(minus)) / (2 * step)
                errs.append(abs(dh - sphere.omega_s2(p, x, e)))
            return float(max(errs))
        omega = standard_symplectic(p.size // 2)
        errs = []
        for e in np.eye(p.size):
            dh = (h(p + step * e) - h(p - step * e)) / (2 * step)
            errs.append(abs(dh - omega(x, e)))
        return float(max(errs))


def _on_sphere(action) -> bool:
    if isinstance(action, TorusAction):
        action = action.components[0]
    return isinstance(action, (SO3OnSphere, SphereRotation))


def momentum_map(action, potential) -> MomentumMap:
    """Momentum map of ``action`` built from a symplectic potential.

    Raises :class:`NotAPotential` unless ``d eta = -pi^* omega`` at sampled points.
    """
    if isinstance(potential, SpherePotential) != _on_sphere(action):
        raise WrongBundle("potential and action live on different spaces")
    _check_potential(potential)
    return MomentumMap(action, potential)


def _invariance_error(action, beta, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    err = 0.0
    if beta.kind == "sphere":
        for w in random_rotations(rng, 8):
            v = w @ hat(rng.standard_normal(3))
            for t in rng.uniform(0, 1, 3):
                a = action.matrix(t)
                err = max(err, abs(float(beta(a @ w, a @ v)) - float(beta(w, v))))
        return err
    for _ in range(8):
        w = np.concatenate([rng.standard_normal(action.dim), [rng.uniform()]])
        v = rng.standard_normal(action.dim + 1)
        for t in rng.uniform(0, 1, 3):
            a = action.matrix(t)
            w2 = np.concatenate([a @ w[:-1], [w[-1]]])
            v2 = np.concatenate([a @ v[:-1], [v[-1]]])
            err = max(err, abs(float(beta(w2, v2)) - float(beta(w, v))))
    return err


def check_conservation(action, beta, x0, steps: int = 512) -> float:
    """Largest drift of ``Q_v = f_beta(generator)`` along the orbit of ``x0``."""
    _check_bundle(action, beta)
    err = _invariance_error(action, beta)
    if err > 1e-9:
        raise InvariantConnectionRequired(f"connection is not invariant under the lifted action (error {err:.3e})")
    x0 = np.asarray(x0, dtype=float)
    t = np.arange(steps + 1) / steps

    if _action_kind(action) == "sphere":
        def q(x):
            w = sphere.lift_point(x)
            return float(beta(w, hat(action.generator) @ w))
    else:
        def q(x):
            return action.fiber_rate + float(beta.tau.pair(x, x @ action.generator().T))

    ref = q(x0)
    return float(max(abs(q(flow(action, tk, x0)) - ref) for tk in t))


def fixed_subspace(action: LinearCircleAction) -> np.ndarray:
    """Orthonormal basis (columns) of the fixed set of a linear action."""
    zero = [j for j, m in enumerate(action.weights) if m == 0]
    cols = [np.eye(action.dim)[:, j] for j in zero] + [np.eye(action.dim)[:, j + action.n] for j in zero]
    return np.array(cols).T.reshape(action.dim, len(cols))


def fixed_point_indices(action, n_samples: int = 20, rng=None, scale: float = 2.0) -> list:
    """Local indices at the origin and at random points of the fixed subspace."""
    if not isinstance(action, LinearCircleAction):
        raise WrongBundle("index comparison needs a trivial bundle; only linear actions on R^2n qualify")
    rng = np.random.default_rng(0) if rng is None else rng
    basis = fixed_subspace(action)
    if basis.shape[1] == 0:
        points = [np.zeros(action.dim)]
    else:
        points = [basis @ (scale * rng.standard_normal(basis.shape[1])) for _ in range(n_samples)]
    points = [x for x in points if is_fixed(action, x)]
    if not points:
        raise NoFixedPoints("no fixed points found")
    return [(x, local_index(action, x)) for x in points]


def equal_indices_flat(action, n_samples: int = 20, rng=None) -> bool:
    """True iff the local index is the same at every sampled fixed point."""
    return len({k for _, k in fixed_point_indices(action, n_samples, rng)}) <= 1


def orbit_frame_loop(action: LinearCircleAction, p, frame=None, n_intervals: int = 64) -> grassmann.SampledLoop:
    """Loop of Lagrangian planes ``A_t F`` carried along the orbit of ``p``."""
    p = np.asarray(p, dtype=float)
    if frame is None:
        frame = np.vstack([np.eye(action.n), np.zeros((action.n, action.n))])
    t = np.linspace(0.0, 1.0, n_intervals + 1)
    frames = np.stack([action.matrix(tk) @ frame for tk in t])
    points = np.stack([action.matrix(tk) @ p for tk in t])
    return grassmann.SampledLoop(t, frames, "frame", points)


def random_fiber_points(action, p, rng, k: int = 5) -> list:
    """``k`` total-space points over ``p`` with random fiber coordinates."""
    base = _lift_point(action, p)
    turns = rng.uniform(0.0, 1.0, size=k)
    if _action_kind(action) == "sphere":
        return [fiber_act(base, s) for s in turns]
    return [bundle.trivial_point(p, s) for s in turns]
