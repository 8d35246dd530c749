"""The unit sphere and its bundle of unitary frames, realised as SO(3).

Tangent vectors at a frame ``w`` are handled as ambient ``3 x 3`` matrices
``v`` with ``w^T v`` antisymmetric; the body coordinates ``vee(w^T v)`` make
left invariance exact up to rounding.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import conventions
from .errors import InvalidFrame, NotFixedPoint, NotIsotropy, NotTangent
from .grassmann import loop_degree
from .so3 import (
    TWO_PI,
    expm,
    fiber_act,
    fiber_turns,
    hat,
    is_rotation,
    random_rotations,
    rotation,
    vee,
)

TANGENT_TOL = 1e-10
FD_STEP = 1e-5


def _unit(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3 or np.any(np.abs(np.linalg.norm(p, axis=-1) - 1.0) > 1e-12):
        raise ValueError("sphere points must be unit 3-vectors")
    return p


def _tangent(p, *vectors):
    for u in vectors:
        u = np.asarray(u, dtype=float)
        scale = np.maximum(np.linalg.norm(u, axis=-1), 1.0)
        if np.any(np.abs(np.sum(p * u, axis=-1)) > TANGENT_TOL * scale):
            raise NotTangent("vector is not tangent to the sphere at p")


def omega_s2(p, u, v):
    """Area form ``p . (u x v)``."""
    p = _unit(p)
    _tangent(p, u, v)
    return np.sum(p * np.cross(u, v), axis=-1)


def j_s2(p, u):
    """Compatible almost complex structure ``u -> -p x u``."""
    p = _unit(p)
    _tangent(p, u)
    return -np.cross(p, u)


def g_s2(p, u, v):
    """Metric ``omega(J u, v)``; the round metric on tangent vectors."""
    return omega_s2(p, j_s2(p, u), v)


def frame_to_so3(p, u) -> np.ndarray:
    """Matrix ``[u, p x u, p]`` of the unitary frame ``u`` at ``p``."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(p) - 1.0) > 1e-10 or abs(np.linalg.norm(u) - 1.0) > 1e-10 or abs(p @ u) > 1e-10:
        raise InvalidFrame("need unit p and a unit tangent u at p")
    return np.column_stack([u, np.cross(p, u), p])


def so3_to_frame(w):
    """Inverse of :func:`frame_to_so3`: returns ``(p, u)``."""
    w = np.asarray(w, dtype=float)
    if not is_rotation(w):
        raise InvalidFrame("not a rotation matrix")
    return w[:, 2].copy(), w[:, 0].copy()


def lift_point(p, reference=(1.0, 0.0, 0.0)) -> np.ndarray:
    """Some frame over ``p``: ``u`` is the normalised tangential part of ``reference``."""
    p = _unit(p)
    ref = np.asarray(reference, dtype=float)
    u = ref - (ref @ p) * p
    if np.linalg.norm(u) < 0.3:
        ref = np.array([0.0, 1.0, 0.0])
        u = ref - (ref @ p) * p
    return frame_to_so3(p, u / np.linalg.norm(u))


def lifted_action(a, w) -> np.ndarray:
    """Tangent-map lift of a rotation ``a`` to frames: left multiplication."""
    return np.asarray(a, dtype=float) @ np.asarray(w, dtype=float)


def body(w, v, tol: float = 1e-9) -> np.ndarray:
    """Body coordinates ``vee(w^T v)`` of a tangent vector ``v`` at ``w``."""
    xi = np.swapaxes(np.asarray(w, dtype=float), -1, -2) @ np.asarray(v, dtype=float)
    scale = np.maximum(np.abs(xi).max(), 1.0)
    if np.abs(xi + np.swapaxes(xi, -1, -2)).max() > tol * scale:
        raise NotTangent("v is not tangent to SO(3) at w")
    return vee(xi)


def invariant_connection_eval(w, v):
    """SO(3)-invariant connection form: normalised third Maurer-Cartan coordinate.

    Takes the value 1 on the structural generator and 0 on the two
    complementary left-invariant directions.
    """
    return conventions.orientation() * body(w, v)[..., 2] / TWO_PI


def exterior_on_so3(form, w, xi, eta, step: float = FD_STEP) -> float:
    """``d form(w xi^, w eta^)`` by central differences in exponential coordinates.

    The chart is ``(a, b) -> w exp(a xi) exp(b eta)``; the pulled-back
    coefficients are differentiated numerically, so no Lie bracket enters.
    """
    xi_h, eta_h = hat(xi), hat(eta)

    def coeffs(a, b):
        ea, eb = expm(a * np.asarray(xi, float)), expm(b * np.asarray(eta, float))
        point = w @ ea @ eb
        return form(point, w @ ea @ xi_h @ eb), form(point, point @ eta_h)

    d_a_fb = (coeffs(step, 0.0)[1] - coeffs(-step, 0.0)[1]) / (2 * step)
    d_b_fa = (coeffs(0.0, step)[0] - coeffs(0.0, -step)[0]) / (2 * step)
    return float(d_a_fb - d_b_fa)


@functools.lru_cache(maxsize=8)
def _measure_ratio(n_points: int, seed: int, orientation: int):
    rng = np.random.default_rng(seed)
    ratios = []
    for w in random_rotations(rng, n_points):
        while True:
            xi, eta = rng.standard_normal((2, 3))
            ez = np.array([0.0, 0.0, 1.0])
            area = omega_s2(w[:, 2], w @ np.cross(xi, ez), w @ np.cross(eta, ez))
            if abs(area) > 0.1:
                break
        ratios.append(exterior_on_so3(invariant_connection_eval, w, xi, eta) / area)
    ratios = np.asarray(ratios)
    return float(ratios.mean()), float(ratios.max() - ratios.min())


def measure_curvature_ratio(n_points: int = 100, seed: int = 0):
    """Fit ``d f = r pi^* omega`` for the invariant connection.

    Returns ``(r, spread)`` where ``spread`` is the max-min range of the
    pointwise ratios over ``n_points`` Haar-random frames.
    """
    return _measure_ratio(n_points, seed, conventions.orientation())


def curvature_ratio() -> float:
    return measure_curvature_ratio()[0]


def hamiltonian_of_rotation(v, p, w=None):
    """Hamiltonian of the rotation field ``p -> v x p``.

    Computed as ``-(1/r) f(X_v)`` at a frame over ``p`` with the measured
    ratio ``r``; the value does not depend on the frame.
    """
    p = _unit(p)
    w = lift_point(p) if w is None else np.asarray(w, dtype=float)
    gen = hat(v) @ w
    return -invariant_connection_eval(w, gen) / curvature_ratio()


def rotation_field(v, p):
    return np.cross(np.asarray(v, dtype=float), p)


def isotropy_phase(p, h) -> complex:
    """Phase ``z`` with ``h . w = w . z`` for frames ``w`` over a point fixed by ``h``."""
    p = _unit(p)
    h = np.asarray(h, dtype=float)
    if np.linalg.norm(h @ p - p) > 1e-10:
        raise NotIsotropy("h does not fix p")
    w = lift_point(p)
    return complex(np.exp(2j * np.pi * fiber_turns(w, h @ w)))


def transitivity_singular_values(w) -> np.ndarray:
    gens = np.stack([(hat(e) @ w).ravel() for e in np.eye(3)])
    return np.linalg.svd(gens, compute_uv=False)


def transitivity_rank(w, threshold: float = 1e-6) -> int:
    """Rank of the span of the lifted infinitesimal generators at ``w``."""
    if not is_rotation(w):
        raise InvalidFrame("not a rotation matrix")
    return int((transitivity_singular_values(w) > threshold).sum())


def base_generator_rank(p, threshold: float = 1e-6) -> int:
    gens = np.cross(np.eye(3), _unit(p))
    return int((np.linalg.svd(gens, compute_uv=False) > threshold).sum())


@dataclass(frozen=True)
class SphereRotation:
    """Circle action rotating S^2 by ``2 pi weight t`` about ``axis``."""

    axis: tuple
    weight: int = 1

    def __post_init__(self):
        a = np.asarray(self.axis, dtype=float)
        if a.shape != (3,) or abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("rotation axis must be a unit 3-vector")
        if int(self.weight) != self.weight:
            raise ValueError("weight must be an integer")
        object.__setattr__(self, "axis", tuple(float(c) for c in a))
        object.__setattr__(self, "weight", int(self.weight))

    @property
    def generator(self) -> np.ndarray:
        """Angular velocity of the period-1 flow."""
        return TWO_PI * self.weight * np.asarray(self.axis)

    def matrix(self, t) -> np.ndarray:
        return expm(self.generator * t)

    def is_fixed(self, p, tol: float = 1e-10) -> bool:
        p = np.asarray(p, dtype=float)
        return all(np.linalg.norm(self.matrix(t) @ p - p) < tol for t in (0.25, 0.5, (np.sqrt(5) - 1) / 2))


def fiber_orbit_phases(action: SphereRotation, p, n_intervals: int = 64):
    """Fiber phases (in the frame bundle) of the lifted orbit over a fixed point."""
    p = _unit(p)
    if not action.is_fixed(p):
        raise NotFixedPoint(f"{p} is not fixed by the rotation")
    w = lift_point(p)
    t = np.linspace(0.0, 1.0, n_intervals + 1)
    turns = np.array([fiber_turns(w, action.matrix(tk) @ w) for tk in t])
    return np.exp(2j * np.pi * turns)


def gamma_winding_pair(action: SphereRotation, p, n_intervals: int = 64) -> tuple[int, int]:
    """Windings of the lifted orbit over a fixed point in the frame bundle and in its quotient by +-1."""
    z = fiber_orbit_phases(action, p, n_intervals)
    first = loop_degree(z)
    second = loop_degree(z**2)
    return first.degree, second.degree


def minimal_section(base, frame, p) -> np.ndarray:
    """Frame over ``p`` carried from ``frame`` (over ``base``) by the minimal rotation.

    Smooth everywhere except at the antipode of ``base``.
    """
    base = np.asarray(base, dtype=float)
    axis = np.cross(base, p)
    s = np.linalg.norm(axis)
    angle = np.arctan2(s, base @ p)
    r = np.eye(3) if s < 1e-15 else rotation(axis, angle)
    return r @ np.asarray(frame, dtype=float)


def _north_section(p):
    return minimal_section([0.0, 0.0, 1.0], np.eye(3), p)


def _south_section(p):
    return minimal_section([0.0, 0.0, -1.0], np.diag([1.0, -1.0, -1.0]), p)


def clutching_degree(n_intervals: int = 256) -> int:
    """Characteristic integer of the frame bundle from its clutching map.

    Frames over the two closed hemispheres are compared along the equator,
    traversed counterclockwise about z-hat.  Stokes on both hemispheres
    gives ``integral of curvature = -deg(south / north)``.
    """
    phi = np.linspace(0.0, TWO_PI, n_intervals + 1)
    turns = []
    for a in phi:
        p = np.array([np.cos(a), np.sin(a), 0.0])
        turns.append(fiber_turns(_north_section(p), _south_section(p)))
    unwrapped = np.unwrap(TWO_PI * np.asarray(turns)) / TWO_PI
    return -int(np.rint(unwrapped[-1] - unwrapped[0]))


def fiber_point(w, turns):
    return fiber_act(w, turns)
