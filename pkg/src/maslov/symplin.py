"""Dense linear symplectic algebra on R^2n.

Coordinates are ordered ``x = (q_1..q_n, p_1..p_n)`` and a symplectic form
with matrix ``M`` acts as ``omega(u, v) = u^T M v``.  The standard form is
``M = [[0, -I], [I, 0]]``, the same block matrix as the standard complex
structure ``J0``, so that ``omega(J0 u, u) = |u|^2``.

Compatibility is ``g_J(u, v) = omega(J u, v)``: the metric is obtained by
feeding the complex structure into the first slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AveragingFailed,
    CompatibleStructureFailed,
    InvalidDimension,
    NotPositiveDefinite,
)

MAX_HALF_DIM = 32
EIG_FLOOR = 1e-14


def _check_half_dim(n):
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_HALF_DIM:
        raise InvalidDimension(f"half-dimension must be an integer in [1, {MAX_HALF_DIM}], got {n!r}")
    return int(n)


@dataclass(frozen=True)
class SymplecticForm:
    """Constant nondegenerate antisymmetric bilinear form on R^2n."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidDimension(f"symplectic matrix must be 2n x 2n, got shape {m.shape}")
        _check_half_dim(m.shape[0] // 2)
        scale = max(np.abs(m).max(), 1e-300)
        if np.abs(m + m.T).max() > 1e-12 * scale:
            raise ValueError("symplectic matrix is not antisymmetric")
        if abs(np.linalg.det(m / scale)) <= 1e-12:
            raise ValueError("symplectic matrix is degenerate")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, u, v):
        return np.einsum("...i,ij,...j->...", np.asarray(u, float), self.matrix, np.asarray(v, float))


@dataclass(frozen=True)
class Metric:
    """Constant Riemannian metric ``g(u, v) = u^T G v``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimension(f"metric must be square, got shape {m.shape}")
        scale = max(np.abs(m).max(), 1e-300)
        if np.abs(m - m.T).max() > 1e-12 * scale:
            raise NotPositiveDefinite("metric is not symmetric")
        m = 0.5 * (m + m.T)
        if np.linalg.eigvalsh(m).min() <= 0:
            raise NotPositiveDefinite("metric is not positive definite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, u, v):
        return np.einsum("...i,ij,...j->...", np.asarray(u, float), self.matrix, np.asarray(v, float))


@dataclass(frozen=True)
class GroupSampler:
    """Quadrature rule on a compact group acting linearly.

    ``samples`` has shape ``(K, d, d)``; ``weights`` are nonnegative and sum
    to one.
    """

    kind: str
    samples: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.kind not in ("circle-weights", "torus-weights", "SO3"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        s = np.array(self.samples, dtype=float)
        w = np.array(self.weights, dtype=float)
        if s.ndim != 3 or s.shape[1] != s.shape[2] or w.shape != (s.shape[0],):
            raise ValueError("samples must be (K, d, d) with K weights")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("quadrature weights must be nonnegative and sum to 1")
        if np.min(np.abs(np.linalg.det(s))) < 1e-12:
            raise ValueError("sampler contains a singular matrix")
        s.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)


def standard_symplectic(n: int) -> SymplecticForm:
    """Return the standard form ``[[0, -I], [I, 0]]`` on R^2n.

    >>> standard_symplectic(1).matrix.tolist()
    [[0.0, -1.0], [1.0, 0.0]]
    """
    n = _check_half_dim(n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return SymplecticForm(np.block([[zero, -eye], [eye, zero]]))


def standard_complex_structure(n: int) -> np.ndarray:
    return standard_symplectic(n).matrix.copy()


def linear_rotation(weights, t) -> np.ndarray:
    """Real matrix of ``z_j -> exp(2 pi i m_j t) z_j`` with ``z_j = q_j + i p_j``."""
    m = np.asarray(weights, dtype=float)
    n = m.size
    phi = 2.0 * np.pi * m * t
    c, s = np.cos(phi), np.sin(phi)
    out = np.zeros((2 * n, 2 * n))
    idx = np.arange(n)
    out[idx, idx] = c
    out[idx, idx + n] = -s
    out[idx + n, idx] = s
    out[idx + n, idx + n] = c
    return out


def circle_sampler(weights, n_points: int = 256) -> GroupSampler:
    """Uniform quadrature on the circle acting with integer ``weights``."""
    t = np.arange(n_points) / n_points
    samples = np.stack([linear_rotation(weights, tk) for tk in t])
    return GroupSampler("circle-weights", samples, np.full(n_points, 1.0 / n_points))


def torus_sampler(weight_rows, n_points: int = 64) -> GroupSampler:
    """Product uniform quadrature on T^l; ``weight_rows`` is ``(l, n)``."""
    rows = np.atleast_2d(np.asarray(weight_rows, dtype=float))
    grids = np.meshgrid(*([np.arange(n_points) / n_points] * rows.shape[0]), indexing="ij")
    times = np.stack([g.ravel() for g in grids], axis=-1)
    samples = []
    for tt in times:
        a = np.eye(2 * rows.shape[1])
        for row, t in zip(rows, tt):
            a = linear_rotation(row, t) @ a
        samples.append(a)
    k = len(samples)
    return GroupSampler("torus-weights", np.stack(samples), np.full(k, 1.0 / k))


def _rot_z(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_y(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def so3_sampler(n_nodes: int = 16) -> GroupSampler:
    """Haar quadrature on SO(3) from ZYZ Euler angles.

    Gauss-Legendre nodes in ``cos(beta)``; uniform nodes in the two periodic
    angles.  Exact for matrix entries up to degree ``n_nodes - 1``.
    """
    x, wx = np.polynomial.legendre.leggauss(n_nodes)
    betas = np.arccos(x)
    angles = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    samples, weights = [], []
    for b, wb in zip(betas, wx):
        for a in angles:
            for g in angles:
                samples.append(_rot_z(a) @ _rot_y(b) @ _rot_z(g))
                weights.append(wb / 2.0 / n_nodes**2)
    w = np.asarray(weights)
    return GroupSampler("SO3", np.stack(samples), w / w.sum())


def sqrt_spd(m) -> np.ndarray:
    """Symmetric square root of a symmetric positive definite matrix."""
    m = np.asarray(m, dtype=float)
    scale = max(np.abs(m).max(), 1e-300)
    if np.abs(m - m.T).max() > 1e-10 * scale:
        raise NotPositiveDefinite("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    if vals.min() < -1e-12 * scale:
        raise NotPositiveDefinite(f"negative eigenvalue {vals.min():.3e}")
    root = np.sqrt(np.maximum(vals, EIG_FLOOR))
    out = (vecs * root) @ vecs.T
    return 0.5 * (out + out.T)


def average_metric(g: Metric, sampler: GroupSampler) -> Metric:
    """Average ``g`` over the group: ``sum_k w_k A_k^T G A_k``."""
    a = sampler.samples
    if a.shape[1] != g.dim:
        raise InvalidDimension(f"sampler acts on R^{a.shape[1]}, metric is on R^{g.dim}")
    avg = np.einsum("k,kji,jl,klm->im", sampler.weights, a, g.matrix, a)
    avg = 0.5 * (avg + avg.T)
    lam = np.linalg.eigvalsh(avg)
    if lam.min() <= 1e-14 * lam.max():
        raise AveragingFailed(f"averaged metric is not positive definite (eigenvalues {lam.min():.3e}..{lam.max():.3e})")
    return Metric(avg)


@dataclass(frozen=True)
class CompatibleTriple:
    """``(omega, g, J)`` with ``J = A^{-1} sqrt(-A^2)`` and ``omega(u, .) = g(A u, .)``."""

    omega: SymplecticForm
    g: Metric
    j: np.ndarray
    a: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.omega.n

    @property
    def g_j(self) -> np.ndarray:
        """Matrix of ``g_J(u, v) = omega(J u, v)``."""
        out = self.j.T @ self.omega.matrix
        return 0.5 * (out + out.T)

    def invariant_errors(self, rng=None) -> dict:
        rng = np.random.default_rng(0) if rng is None else rng
        d = self.omega.dim
        u, v = rng.standard_normal((2, 8, d))
        gj = self.j.T @ self.omega.matrix
        return {
            "j_squared": float(np.linalg.norm(self.j @ self.j + np.eye(d))),
            "omega_invariance": float(np.abs(self.omega(u @ self.j.T, v @ self.j.T) - self.omega(u, v)).max()),
            "g_j_asymmetry": float(np.abs(gj - gj.T).max()),
            "g_j_min_eig": float(np.linalg.eigvalsh(0.5 * (gj + gj.T)).min()),
        }

    def complex_basis(self) -> np.ndarray:
        """Real basis ``R = [b_1..b_n, J b_1..J b_n]`` orthonormal for ``g_J``.

        ``J R = R J0``, so the coordinates ``c = R^{-1} v`` of a vector give its
        complex coordinates ``c[:n] + i c[n:]``.  For the standard triple this
        is the identity.
        """
        return _complex_basis(self.j, self.g_j)


def _complex_basis(j, gj):
    d = j.shape[0]
    n = d // 2
    cols = []
    for k in range(d):
        v = np.eye(d)[:, k]
        for b in cols:
            v = v - (b @ gj @ v) * b
            jb = j @ b
            v = v - (jb @ gj @ v) * jb
        norm = np.sqrt(max(v @ gj @ v, 0.0))
        if norm > 1e-8:
            cols.append(v / norm)
        if len(cols) == n:
            break
    if len(cols) < n:
        raise CompatibleStructureFailed("could not build a unitary reference basis")
    b = np.stack(cols, axis=1)
    return np.hstack([b, j @ b])


def build_compatible_j(omega: SymplecticForm, g: Metric) -> CompatibleTriple:
    """Polar construction of the almost complex structure compatible with ``omega``."""
    if g.dim != omega.dim:
        raise InvalidDimension(f"metric on R^{g.dim} does not match form on R^{omega.dim}")
    gm = g.matrix
    a = np.linalg.solve(gm, omega.matrix.T)
    # conjugate into an orthonormal frame of g, where A is skew-symmetric
    g_half = sqrt_spd(gm)
    g_half_inv = np.linalg.inv(g_half)
    b = g_half @ a @ g_half_inv
    b = 0.5 * (b - b.T)
    neg_sq = -(b @ b)
    try:
        root = sqrt_spd(0.5 * (neg_sq + neg_sq.T))
    except NotPositiveDefinite as exc:
        cond = np.linalg.cond(neg_sq)
        raise CompatibleStructureFailed(f"sqrt(-A^2) failed (condition number {cond:.3e}): {exc}") from exc
    j = np.linalg.solve(a, g_half_inv @ root @ g_half)
    triple = CompatibleTriple(omega, g, j, a)
    errs = triple.invariant_errors()
    if errs["j_squared"] > 1e-8 or errs["g_j_min_eig"] <= 0:
        raise CompatibleStructureFailed(
            f"J failed its invariants: |J^2 + I| = {errs['j_squared']:.3e}, "
            f"min eig g_J = {errs['g_j_min_eig']:.3e}, cond(A) = {np.linalg.cond(a):.3e}"
        )
    return triple


def standard_triple(n: int) -> CompatibleTriple:
    return build_compatible_j(standard_symplectic(n), Metric(np.eye(2 * n)))
