"""Principal circle bundles with connection forms.

Two bundles are supported.

* ``trivial``: ``R^2n x S^1``.  A total-space point is the array
  ``[x_1..x_2n, theta]`` with ``theta`` in turns; a tangent vector is
  ``[xdot, thetadot]``.  The connection is ``f = dtheta + pi^* tau``.
* ``sphere``: the unitary frame bundle of S^2, identified with SO(3).
  The connection is the invariant Maurer-Cartan form plus an optional
  pulled-back base 1-form.

The structural circle has period 1, so windings are integers.
"""

from __future__ import annotations

import numpy as np

from . import conventions, sphere
from .errors import IntegrationFailed, LiftFailed, UndersampledLoop, WrongBundle
from .forms import OneForm, zero_form
from .grassmann import SampledLoop
from .so3 import TWO_PI, expm, fiber_act, fiber_generator, fiber_turns, hat, logm

MAX_FIBER_STEP = 0.25
MAX_ROTATION_STEP = np.pi / 2
MAX_LIFT_STEP = 0.5


def _wrap_turns(d):
    return d - np.rint(d)


class TrivialConnection:
    """``f = dtheta + pi^* tau`` on ``R^dim x S^1``."""

    kind = "trivial"

    def __init__(self, tau: OneForm | None = None, dim: int | None = None):
        if tau is None:
            if dim is None:
                raise ValueError("need tau or the base dimension")
            tau = zero_form(dim)
        self.tau = tau
        self.dim = tau.dim

    def __repr__(self):
        return f"TrivialConnection(tau={self.tau.name!r}, dim={self.dim})"

    def _split(self, w):
        w = np.asarray(w, dtype=float)
        if w.shape[-1] != self.dim + 1:
            raise WrongBundle(f"expected points of R^{self.dim} x S^1, got trailing shape {w.shape[-1:]}")
        return w[..., :-1], w[..., -1]

    def __call__(self, w, v):
        x, _ = self._split(w)
        xdot, thetadot = self._split(v)
        return thetadot + self.tau.pair(x, xdot)

    def curvature(self, x, u, v):
        return self.tau.d(x, u, v)

    def shifted(self, sigma: OneForm) -> "TrivialConnection":
        return TrivialConnection(self.tau + sigma)

    def base_form(self) -> OneForm:
        return self.tau


class SphereConnection:
    """Invariant connection on SO(3) -> S^2 plus ``pi^* sigma``.

    ``sigma`` is an ambient 1-form on R^3; only its restriction to tangent
    vectors of the sphere matters.
    """

    kind = "sphere"

    def __init__(self, perturbation: OneForm | None = None):
        if perturbation is not None and perturbation.dim != 3:
            raise ValueError("sphere perturbations are 1-forms on R^3")
        self.perturbation = perturbation

    def __repr__(self):
        name = None if self.perturbation is None else self.perturbation.name
        return f"SphereConnection(perturbation={name!r})"

    def __call__(self, w, v):
        w = np.asarray(w, dtype=float)
        v = np.asarray(v, dtype=float)
        if w.shape[-2:] != (3, 3) or v.shape[-2:] != (3, 3):
            raise WrongBundle("sphere connection expects 3x3 frames and tangents")
        val = sphere.invariant_connection_eval(w, v)
        if self.perturbation is not None:
            val = val + self.perturbation.pair(w[..., :, 2], v[..., :, 2])
        return val

    def curvature(self, p, u, v):
        val = sphere.curvature_ratio() * sphere.omega_s2(p, u, v)
        if self.perturbation is not None:
            val = val + self.perturbation.d(p, u, v)
        return val

    def shifted(self, sigma: OneForm) -> "SphereConnection":
        pert = sigma if self.perturbation is None else self.perturbation + sigma
        return SphereConnection(pert)

    @property
    def is_invariant(self) -> bool:
        return self.perturbation is None


def connection_eval(beta, w, v) -> float:
    """``f_beta(v)`` for a tangent vector ``v`` at the total-space point ``w``."""
    return beta(w, v)


def vertical_vector(beta, w):
    """Structural generator ``d/dtheta`` at ``w``."""
    if beta.kind == "trivial":
        v = np.zeros(beta.dim + 1)
        v[-1] = 1.0
        return v
    return fiber_generator(w)


def trivial_point(x, turns: float = 0.0) -> np.ndarray:
    return np.concatenate([np.asarray(x, dtype=float), [float(turns)]])


def _segment_values_trivial(beta, w):
    x, theta = beta._split(w)
    dx = np.diff(x, axis=0)
    dtheta = _wrap_turns(np.diff(theta))
    if np.abs(dtheta).max(initial=0.0) > MAX_FIBER_STEP:
        raise UndersampledLoop("fiber phase moves more than a quarter turn between samples")
    mid = 0.5 * (x[1:] + x[:-1])
    return dtheta + beta.tau.pair(mid, dx)


def _segment_values_sphere(beta, w):
    rel = np.swapaxes(w[:-1], -1, -2) @ w[1:]
    xi = logm(rel)
    if np.linalg.norm(xi, axis=-1).max(initial=0.0) > MAX_ROTATION_STEP:
        raise UndersampledLoop("frames rotate by more than pi/2 between samples")
    mid = w[:-1] @ expm(0.5 * xi)
    return beta(mid, mid @ hat(xi))


def maslov_data(loop: SampledLoop, beta, tangents=None) -> float:
    """Integral of the connection form along a sampled loop in the total space.

    With ``tangents`` (velocities at each sample) the composite trapezoid
    rule is used; it is spectrally accurate for smooth periodic integrands
    on a uniform grid.  Without them each segment contributes the form at
    its geodesic midpoint applied to the increment.
    """
    w = np.asarray(loop.values, dtype=float)
    if tangents is not None:
        tangents = np.asarray(tangents, dtype=float)
        vals = np.asarray(beta(w, tangents), dtype=float)
        _guard_steps(beta, w)
        _guard_rates(beta, w, tangents, np.diff(loop.times))
        return float(np.trapezoid(vals, loop.times))
    if beta.kind == "trivial":
        return float(np.sum(_segment_values_trivial(beta, w)))
    if beta.kind == "sphere":
        return float(np.sum(_segment_values_sphere(beta, w)))
    raise WrongBundle(f"unknown bundle kind {beta.kind!r}")


def _guard_steps(beta, w):
    if beta.kind == "trivial":
        _, theta = beta._split(w)
        if np.abs(_wrap_turns(np.diff(theta))).max(initial=0.0) > MAX_FIBER_STEP:
            raise UndersampledLoop("fiber phase moves more than a quarter turn between samples")
    else:
        rel = np.swapaxes(w[:-1], -1, -2) @ w[1:]
        cos = np.clip((np.trace(rel, axis1=-2, axis2=-1) - 1) / 2, -1, 1)
        if np.arccos(cos).max(initial=0.0) > MAX_ROTATION_STEP:
            raise UndersampledLoop("frames rotate by more than pi/2 between samples")


def _guard_rates(beta, w, tangents, dt):
    # wrapped increments cannot see a fiber that turns by more than half a turn per step
    if beta.kind == "trivial":
        step = np.abs(tangents[:-1, -1]) * dt
        limit = MAX_FIBER_STEP
    else:
        step = np.linalg.norm(sphere.body(w[:-1], tangents[:-1]), axis=-1) * dt
        limit = MAX_ROTATION_STEP
    if step.max(initial=0.0) > limit:
        raise UndersampledLoop("velocities move the loop too far between samples")


def curvature(beta, base_point, u, v):
    """Curvature 2-form ``Omega`` with ``pi^* Omega = d f_beta``."""
    return beta.curvature(base_point, u, v)


def _sphere_grid(n_theta: int, n_phi: int):
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phi = TWO_PI * np.arange(n_phi) / n_phi
    ct, ph = np.meshgrid(x, phi, indexing="ij")
    st = np.sqrt(1.0 - ct**2)
    p = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
    e_theta = np.stack([ct * np.cos(ph), ct * np.sin(ph), -st], axis=-1)
    e_phi = np.stack([-np.sin(ph), np.cos(ph), np.zeros_like(ph)], axis=-1)
    weights = np.multiply.outer(wx, np.full(n_phi, TWO_PI / n_phi))
    return p.reshape(-1, 3), e_theta.reshape(-1, 3), e_phi.reshape(-1, 3), weights.ravel()


def integrate_over_sphere(two_form, n_theta: int = 64, n_phi: int = 128) -> float:
    """Integral of ``two_form(p, u, v)`` over S^2 with its outward orientation."""
    p, e_t, e_p, wts = _sphere_grid(n_theta, n_phi)
    return float(np.sum(wts * two_form(p, e_t, e_p)))


def characteristic_number(beta, n_theta: int = 64, n_phi: int = 128, tol: float = 1e-6) -> float:
    """Integral of the curvature over the base.

    Trivial bundles report 0: their characteristic class vanishes.  On the
    sphere the value is checked against a half-resolution rule.
    """
    if beta.kind == "trivial":
        return 0.0
    if beta.kind != "sphere":
        raise WrongBundle(f"unknown bundle kind {beta.kind!r}")
    fine = integrate_over_sphere(beta.curvature, n_theta, n_phi)
    coarse = integrate_over_sphere(beta.curvature, n_theta // 2, n_phi // 2)
    if abs(fine - coarse) > tol:
        raise IntegrationFailed(f"curvature quadrature not converged: {fine!r} vs {coarse!r}")
    return fine


def holonomy(beta, base_loop, start) -> complex:
    """Phase of the horizontal lift's endpoint relative to ``start``.

    ``base_loop`` is a :class:`SampledLoop` of base points or an array of
    them (first equal to last).  The sign follows ``holonomy_sign``.
    """
    pts = np.asarray(base_loop.values if isinstance(base_loop, SampledLoop) else base_loop, dtype=float)
    sign = conventions.get_conventions().holonomy_sign
    if beta.kind == "trivial":
        x0, _ = beta._split(start)
        if np.linalg.norm(pts[0] - x0) > 1e-10:
            raise LiftFailed("start does not lie over the first base point")
        turns = -beta.tau.line_integral(pts)
    elif beta.kind == "sphere":
        turns = _sphere_transport(beta, pts, np.asarray(start, dtype=float))
    else:
        raise WrongBundle(f"unknown bundle kind {beta.kind!r}")
    return complex(np.exp(2j * np.pi * sign * turns))


def _sphere_transport(beta, pts, start):
    if np.linalg.norm(start[:, 2] - pts[0]) > 1e-10:
        raise LiftFailed("start does not lie over the first base point")
    w = start
    for p0, p1 in zip(pts[:-1], pts[1:]):
        axis = np.cross(p0, p1)
        s = np.linalg.norm(axis)
        angle = np.arctan2(s, p0 @ p1)
        if angle > MAX_LIFT_STEP:
            raise LiftFailed(f"base step of {angle:.3f} rad is too large to transport")
        if s < 1e-15:
            continue
        xi_space = axis / s * angle
        r_half = expm(0.5 * xi_space)
        mid = r_half @ w
        drift = beta(mid, hat(xi_space) @ mid)
        w = fiber_act(expm(xi_space) @ w, -drift)
    if np.linalg.norm(w[:, 2] - start[:, 2]) > 1e-8:
        raise LiftFailed("base loop is not closed")
    return fiber_turns(start, w)


def stokes_defect(beta, center, radius: float, n_boundary: int = 256, n_radial: int = 32) -> float:
    """Boundary integral of a section's pullback minus the curvature integral over a small disc.

    Trivial bundles use the zero section on a disc in the first ``q, p``
    plane; the sphere uses the minimal-rotation section spreading a frame
    at ``center`` over a geodesic cap.  The boundary rule is the periodic
    trapezoid with velocities, so it converges spectrally.
    """
    xr, wr = np.polynomial.legendre.leggauss(n_radial)
    rad = 0.5 * radius * (xr + 1.0)
    wrad = 0.5 * radius * wr
    ang = TWO_PI * np.arange(n_boundary) / n_boundary
    dphi = TWO_PI / n_boundary
    c = np.asarray(center, dtype=float)
    if beta.kind == "trivial":
        n = beta.dim // 2
        e1, e2 = np.eye(beta.dim)[0], np.eye(beta.dim)[n]
        circ = np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2
        vel = radius * (-np.sin(ang)[:, None] * e1 + np.cos(ang)[:, None] * e2)
        around = dphi * float(np.sum(beta.tau.pair(c + radius * circ, vel)))
        rr = rad[:, None, None]
        x = c + rr * circ[None]
        omega = beta.curvature(x, np.broadcast_to(e1, x.shape), np.broadcast_to(e2, x.shape))
        inside = float(np.sum(np.multiply.outer(wrad * rad, np.full(n_boundary, dphi)) * omega))
        return around - inside
    c = c / np.linalg.norm(c)
    frame = sphere.lift_point(c)
    e1, e2 = frame[:, 0], frame[:, 1]

    def cap_point(r, a):
        return np.cos(r) * c + np.sin(r) * (np.cos(a) * e1 + np.sin(a) * e2)

    def section(a):
        return sphere.minimal_section(c, frame, cap_point(radius, a))

    h = 1e-5
    around = 0.0
    for a in ang:
        w = section(a)
        v = (section(a + h) - section(a - h)) / (2 * h)
        xi = w.T @ v
        around += dphi * float(beta(w, w @ (0.5 * (xi - xi.T))))
    inside = 0.0
    for r, wgt in zip(rad, wrad):
        for a in ang:
            p = cap_point(r, a)
            u = -np.sin(r) * c + np.cos(r) * (np.cos(a) * e1 + np.sin(a) * e2)
            v = np.sin(r) * (-np.sin(a) * e1 + np.cos(a) * e2)
            # (u, v) is positively oriented; v already carries the sin(r) area factor
            inside += wgt * dphi * beta.curvature(p, u, v)
    return around - inside
