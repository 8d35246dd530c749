"""Lagrangian frames, the squared-determinant map and loop degrees.

A Lagrangian plane is stored as a ``2n x n`` frame whose columns span it.
Given a compatible triple the frame is orthonormalised for ``g_J``, written
in complex coordinates (multiplication by ``i`` is ``J``) and sent to the
circle by ``U -> det(U)^2``.  Degrees of sampled circle-valued loops come from
summing principal-branch argument increments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import conventions
from .errors import (
    AmbiguousDegree,
    DegenerateFrame,
    InvalidDimension,
    NotLagrangian,
    OpenLoop,
    UndersampledLoop,
)
from .forms import OneForm
from .symplin import CompatibleTriple, standard_triple

MIN_INTERVALS = 8
CLOSURE_TOL = 1e-8
PHASE_GAP_GUARD = np.pi / 2
MAX_RESIDUAL = 0.25


def plane_projector(frame) -> np.ndarray:
    """Euclidean orthogonal projector onto the column span of ``frame``."""
    f = np.asarray(frame, dtype=float)
    q, _ = np.linalg.qr(f)
    return q @ q.T


def plane_distance(f1, f2) -> float:
    return float(np.linalg.norm(plane_projector(f1) - plane_projector(f2), 2))


def _loop_distance(kind, a, b):
    if kind == "phase":
        return float(abs(a - b))
    if kind == "frame":
        return plane_distance(a, b)
    if kind == "fibered":
        d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        d[-1] -= np.rint(d[-1])
        return float(np.linalg.norm(d))
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


@dataclass(frozen=True)
class SampledLoop:
    """Samples of a closed curve at ``0 = t_0 < ... < t_N = 1``.

    ``values[k]`` is the payload at ``times[k]``; the last sample repeats the
    first.  ``kind`` is ``"phase"`` (unit complex numbers), ``"frame"``
    (``2n x n`` Lagrangian frames), ``"point"`` (any array payload) or
    ``"fibered"`` (points ``[x, theta]`` of ``R^d x S^1``, ``theta`` in turns,
    so closure holds modulo whole turns).
    ``points`` optionally carries the base point under each sample.
    """

    times: np.ndarray
    values: np.ndarray
    kind: str = "phase"
    points: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        vals = np.asarray(self.values, dtype=complex if self.kind == "phase" else float)
        if t.ndim != 1 or len(t) != len(vals):
            raise ValueError("times and values must have the same length")
        if len(t) < MIN_INTERVALS + 1:
            raise ValueError(f"a loop needs at least {MIN_INTERVALS} intervals, got {len(t) - 1}")
        if np.any(np.diff(t) <= 0) or abs(t[0]) > 1e-12 or abs(t[-1] - 1.0) > 1e-12:
            raise ValueError("times must increase strictly from 0 to 1")
        if self.kind == "phase":
            mod = np.abs(vals)
            if np.any(np.abs(mod - 1.0) > 1e-6):
                raise ValueError("phase samples must lie on the unit circle")
            vals = vals / mod
        gap = _loop_distance(self.kind, vals[0], vals[-1])
        if gap > CLOSURE_TOL:
            raise OpenLoop(f"loop does not close: endpoint distance {gap:.3e}")
        pts = None
        if self.points is not None:
            pts = np.asarray(self.points, dtype=float)
            if len(pts) != len(t):
                raise ValueError("points must align with times")
            if np.linalg.norm(pts[0] - pts[-1]) > CLOSURE_TOL:
                raise OpenLoop("base projection of the loop does not close")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "points", pts)

    @property
    def n_intervals(self) -> int:
        return len(self.times) - 1

    @classmethod
    def from_function(cls, fn, n_intervals: int, kind: str = "phase", point_fn=None) -> "SampledLoop":
        """Sample ``fn`` on a uniform grid of ``[0, 1]``."""
        t = np.linspace(0.0, 1.0, n_intervals + 1)
        vals = np.stack([np.asarray(fn(tk)) for tk in t])
        pts = None if point_fn is None else np.stack([np.asarray(point_fn(tk), float) for tk in t])
        return cls(t, vals, kind, pts)


def concatenate(first: SampledLoop, second: SampledLoop) -> SampledLoop:
    """Traverse ``first`` then ``second`` (sharing a basepoint) in unit time."""
    if first.kind != second.kind:
        raise ValueError("cannot concatenate loops of different kinds")
    if _loop_distance(first.kind, first.values[-1], second.values[0]) > CLOSURE_TOL:
        raise OpenLoop("loops do not share a basepoint")
    t = np.concatenate([0.5 * first.times, 0.5 + 0.5 * second.times[1:]])
    v = np.concatenate([first.values, second.values[1:]])
    pts = None
    if first.points is not None and second.points is not None:
        pts = np.concatenate([first.points, second.points[1:]])
    return SampledLoop(t, v, first.kind, pts)


@dataclass(frozen=True)
class DegreeResult:
    raw: float
    degree: int
    residual: float
    samples: int
    max_step: float

    def as_dict(self) -> dict:
        return {"raw": self.raw, "degree": self.degree, "residual": self.residual,
                "samples": self.samples, "max_step": self.max_step}


def check_lagrangian(frame, omega_matrix, tol: float = 1e-10) -> np.ndarray:
    f = np.asarray(frame, dtype=float)
    d = omega_matrix.shape[0]
    if f.ndim != 2 or f.shape != (d, d // 2):
        raise InvalidDimension(f"expected a {d}x{d // 2} frame, got shape {f.shape}")
    sv = np.linalg.svd(f, compute_uv=False)
    if sv.min() <= 1e-10 * max(sv.max(), 1.0):
        raise DegenerateFrame(f"frame is rank deficient (smallest singular value {sv.min():.3e})")
    iso = np.abs(f.T @ omega_matrix @ f).max() / max(sv.max() ** 2, 1.0)
    if iso > tol:
        raise NotLagrangian(f"omega does not vanish on the plane (max |F^T M F| = {iso:.3e})")
    return f


def unitary_of_frame(frame, triple: CompatibleTriple | None = None) -> np.ndarray:
    """Unitary ``n x n`` matrix of a Lagrangian frame.

    The columns are orthonormalised for ``g_J`` (Cholesky form of
    Gram-Schmidt, repeated once, which keeps the column order) and each ``e_k`` is read
    as the complex vector whose real part pairs with ``e_k`` and imaginary
    part with ``J e_k``.

    >>> unitary_of_frame(np.array([[0.0], [1.0]])).round(12)
    array([[0.+1.j]])
    """
    f = np.asarray(frame, dtype=float)
    if triple is None:
        triple = standard_triple(f.shape[1])
    f = check_lagrangian(f, triple.omega.matrix)
    gj = triple.g_j
    e = f
    # two Cholesky passes: the second removes the cond^2 loss of the first
    for _ in range(2):
        gram = e.T @ gj @ e
        chol = np.linalg.cholesky(0.5 * (gram + gram.T))
        e = np.linalg.solve(chol, e.T).T
    n = triple.n
    c = np.linalg.solve(triple.complex_basis(), e)
    u = c[:n] + 1j * c[n:]
    if conventions.orientation() < 0:
        u = u.conj()
    err = np.abs(u.conj().T @ u - np.eye(n)).max()
    if err > 1e-8:
        raise DegenerateFrame(f"orthonormalised frame is not unitary (error {err:.3e})")
    return u


def det_squared(u) -> complex:
    """``det(U)^2``, well defined on U(n)/O(n)."""
    z = np.linalg.det(np.asarray(u, dtype=complex)) ** 2
    return complex(z / abs(z))


def _phases(loop):
    if isinstance(loop, SampledLoop):
        if loop.kind != "phase":
            raise ValueError(f"loop_degree needs a phase loop, got {loop.kind!r}")
        return loop.values
    z = np.asarray(loop, dtype=complex)
    return z / np.abs(z)


def loop_degree(loop) -> DegreeResult:
    """Winding number of a sampled closed curve in the unit circle.

    Raises
    ------
    UndersampledLoop
        A consecutive argument jump reaches pi/2; resample more finely.
    AmbiguousDegree
        The total argument is a quarter turn or more away from an integer.
    """
    z = _phases(loop)
    steps = np.angle(z[1:] * np.conj(z[:-1]))
    max_step = float(np.abs(steps).max()) if len(steps) else 0.0
    if max_step >= PHASE_GAP_GUARD:
        raise UndersampledLoop(
            f"argument jump {max_step:.3f} rad >= pi/2 between samples; refine the loop "
            f"(currently {len(z) - 1} intervals)"
        )
    raw = float(steps.sum() / (2 * np.pi))
    degree = int(np.rint(raw))
    residual = abs(raw - degree)
    if residual >= MAX_RESIDUAL:
        raise AmbiguousDegree(f"winding {raw:.4f} is not close to an integer")
    return DegreeResult(raw, degree, residual, len(z), max_step)


def frame_phases(frames, triple: CompatibleTriple | None = None) -> np.ndarray:
    return np.array([det_squared(unitary_of_frame(f, triple)) for f in frames])


def maslov_index(loop: SampledLoop, triple: CompatibleTriple | None = None,
                 section_tau: OneForm | None = None) -> DegreeResult:
    """Maslov index of a closed loop of Lagrangian planes.

    The squared-determinant phases are divided by the phase of the section
    whose horizontal form is ``section_tau``: with ``I(t)`` the running
    integral of ``section_tau`` along the base projection, each sample is
    multiplied by ``exp(-2 pi i I(t))``.  On R^2n every closed ``tau``
    integrates to zero around the loop, so the integer does not depend on it.
    """
    if loop.kind != "frame":
        raise ValueError(f"maslov_index needs a frame loop, got {loop.kind!r}")
    z = frame_phases(loop.values, triple)
    if section_tau is not None:
        if loop.points is None:
            raise ValueError("a section form needs the loop's base points")
        z = z * np.exp(-2j * np.pi * section_tau.cumulative_integral(loop.points))
    return loop_degree(z)
