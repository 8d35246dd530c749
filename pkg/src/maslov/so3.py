"""Rotation-group primitives: hat/vee, exponential, logarithm, fiber action.

SO(3) doubles as the total space of the circle bundle of unitary frames of
S^2: a matrix ``w = [u, p x u, p]`` is a frame ``u`` at the point ``p``
(its third column).  The structural circle rotates the frame about ``p``.
"""

from __future__ import annotations

import numpy as np

from . import conventions

TWO_PI = 2.0 * np.pi


def hat(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return 0.5 * np.stack([m[..., 2, 1] - m[..., 1, 2],
                           m[..., 0, 2] - m[..., 2, 0],
                           m[..., 1, 0] - m[..., 0, 1]], axis=-1)


def expm(v) -> np.ndarray:
    """Rodrigues formula for ``exp(hat(v))``."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)[..., None, None]
    k = hat(v)
    small = theta < 1e-8
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
    return np.eye(3) + a * k + b * (k @ k)


def logm(r) -> np.ndarray:
    """Rotation vector of ``r``; valid for rotation angles below pi."""
    r = np.asarray(r, dtype=float)
    cos = np.clip((np.trace(r, axis1=-2, axis2=-1) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(cos)[..., None]
    axis = vee(r)
    sin = np.sin(theta)
    small = theta < 1e-8
    scale = np.where(small, 1.0 + theta**2 / 6.0, theta / np.where(small, 1.0, sin))
    return scale * axis


def rotation(axis, angle) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    return expm(a / np.linalg.norm(a) * angle)


def rot_z(angle) -> np.ndarray:
    return expm(np.multiply.outer(np.asarray(angle, dtype=float), np.array([0.0, 0.0, 1.0])))


def is_rotation(r, tol: float = 1e-10) -> bool:
    r = np.asarray(r, dtype=float)
    return (r.shape == (3, 3) and np.abs(r.T @ r - np.eye(3)).max() < tol
            and abs(np.linalg.det(r) - 1.0) < tol)


def fiber_act(w, turns) -> np.ndarray:
    """Structural circle action ``w . exp(2 pi i turns)``."""
    return np.asarray(w, dtype=float) @ rot_z(TWO_PI * conventions.orientation() * np.asarray(turns, dtype=float))


def fiber_generator(w) -> np.ndarray:
    """Vertical vector ``d/dtheta`` at ``w`` (ambient 3x3 form)."""
    return np.asarray(w, dtype=float) @ hat([0.0, 0.0, TWO_PI * conventions.orientation()])


def fiber_turns(w0, w1) -> float:
    """Fiber coordinate of ``w1`` relative to ``w0`` over the same base point, in (-1/2, 1/2]."""
    m = np.asarray(w0, dtype=float).T @ np.asarray(w1, dtype=float)
    return float(conventions.orientation() * np.arctan2(m[1, 0], m[0, 0]) / TWO_PI)


def random_rotations(rng, k: int) -> np.ndarray:
    """Haar-distributed rotations via normalised quaternions."""
    q = rng.standard_normal((k, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q.T
    return np.stack([
        np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1),
        np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1),
        np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1),
    ], axis=1)
