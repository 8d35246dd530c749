"""Differential 1-forms on a Euclidean base, evaluated pointwise.

A :class:`OneForm` maps points ``x`` of shape ``(..., dim)`` to covectors of
the same shape.  Polynomial forms carry an exact exterior derivative; any
other form falls back to central finite differences.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

FD_STEP = 1e-5


class PolynomialField:
    """Scalar polynomial ``sum_k c_k prod_i x_i^{a_ki}``."""

    def __init__(self, coefficients: Sequence[float], powers, dim: int):
        self.coefficients = np.asarray(coefficients, dtype=float).reshape(-1)
        self.powers = np.asarray(powers, dtype=int).reshape(len(self.coefficients), dim)
        if (self.powers < 0).any():
            raise ValueError("negative exponent in polynomial")
        self.dim = dim

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        mono = np.prod(x[..., None, :] ** self.powers, axis=-1)
        return mono @ self.coefficients

    def derivative(self, i: int) -> "PolynomialField":
        p = self.powers.copy()
        c = self.coefficients * p[:, i]
        p[:, i] = np.maximum(p[:, i] - 1, 0)
        return PolynomialField(c, p, self.dim)

    def gradient(self, x):
        return np.stack([self.derivative(i)(x) for i in range(self.dim)], axis=-1)


class OneForm:
    """A 1-form ``tau`` on R^dim given by its coefficient field.

    Parameters
    ----------
    coefficients : callable
        ``x -> tau(x)``, vectorised over leading axes.
    dim : int
        Dimension of the base.
    exterior : callable, optional
        ``(x, u, v) -> d tau(u, v)`` in closed form.
    closed : bool
        Declares ``d tau = 0``; used by callers that need a closed form.
    """

    def __init__(self, coefficients: Callable, dim: int, exterior: Callable | None = None,
                 name: str = "", closed: bool = False):
        self._coefficients = coefficients
        self.dim = int(dim)
        self._exterior = exterior
        self.name = name or "form"
        self.closed = closed

    def __repr__(self):
        return f"OneForm({self.name!r}, dim={self.dim})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self._coefficients(x), x.shape)

    def pair(self, x, v):
        return np.sum(self(x) * np.asarray(v, dtype=float), axis=-1)

    def d(self, x, u, v, step: float = FD_STEP):
        """Exterior derivative ``d tau(u, v)`` at ``x``."""
        x, u, v = (np.asarray(a, dtype=float) for a in (x, u, v))
        if self._exterior is not None:
            return self._exterior(x, u, v)
        du = (self(x + step * u) - self(x - step * u)) / (2 * step)
        dv = (self(x + step * v) - self(x - step * v)) / (2 * step)
        return np.sum(du * v, axis=-1) - np.sum(dv * u, axis=-1)

    def cumulative_integral(self, points):
        """Running integral along the polyline through ``points`` (midpoint rule)."""
        pts = np.asarray(points, dtype=float)
        mid = 0.5 * (pts[1:] + pts[:-1])
        inc = self.pair(mid, np.diff(pts, axis=0))
        return np.concatenate([[0.0], np.cumsum(inc)])

    def line_integral(self, points) -> float:
        return float(self.cumulative_integral(points)[-1])

    def __add__(self, other: "OneForm") -> "OneForm":
        if other.dim != self.dim:
            raise ValueError("cannot add forms on different bases")
        ext = None
        if self._exterior is not None and other._exterior is not None:
            def ext(x, u, v, a=self, b=other):
                return a.d(x, u, v) + b.d(x, u, v)
        return OneForm(lambda x, a=self, b=other: a(x) + b(x), self.dim, ext,
                       f"{self.name}+{other.name}", self.closed and other.closed)

    def scaled(self, c: float) -> "OneForm":
        ext = None
        if self._exterior is not None:
            def ext(x, u, v, a=self):
                return c * a.d(x, u, v)
        return OneForm(lambda x, a=self: c * a(x), self.dim, ext, f"{c}*{self.name}", self.closed)


def zero_form(dim: int) -> OneForm:
    return OneForm(lambda x: np.zeros_like(x), dim, lambda x, u, v: np.zeros(np.broadcast(x, u, v).shape[:-1]),
                   "zero", closed=True)


def constant_bilinear_potential(matrix, name: str = "potential") -> OneForm:
    """``tau_x(v) = 1/2 x^T B v`` with ``B`` antisymmetric; ``d tau(u, v) = u^T B v``."""
    b = np.asarray(matrix, dtype=float)

    def coeff(x):
        return 0.5 * x @ b

    def ext(x, u, v):
        return np.einsum("...i,ij,...j->...", u, b, v)

    return OneForm(coeff, b.shape[0], ext, name)


def liouville_form(n: int) -> OneForm:
    """``1/2 sum_i (q_i dp_i - p_i dq_i)``; its derivative is ``sum dq_i ^ dp_i``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    b = np.block([[zero, eye], [-eye, zero]])
    return constant_bilinear_potential(b, "liouville")


def polynomial_form(terms, dim: int, name: str = "poly") -> OneForm:
    """1-form with polynomial coefficients.

    ``terms`` is a sequence of ``(component, coefficient, powers)``; each
    contributes ``coefficient * x^powers dx_component``.
    """
    fields = []
    for i in range(dim):
        sel = [(c, p) for comp, c, p in terms if int(comp) == i]
        if sel:
            cs, ps = zip(*sel)
            fields.append(PolynomialField(cs, ps, dim))
        else:
            fields.append(None)

    def coeff(x):
        out = np.zeros_like(x)
        for i, f in enumerate(fields):
            if f is not None:
                out[..., i] = f(x)
        return out

    def ext(x, u, v):
        total = 0.0
        for i, f in enumerate(fields):
            if f is None:
                continue
            g = f.gradient(x)
            total = total + np.sum(g * u, axis=-1) * v[..., i] - np.sum(g * v, axis=-1) * u[..., i]
        return total * np.ones(np.broadcast(x, u, v).shape[:-1])

    return OneForm(coeff, dim, ext, name)


def exact_form(coefficients, powers, dim: int, name: str = "exact") -> OneForm:
    """Differential ``d phi`` of the polynomial ``phi = sum c_k x^{a_k}``."""
    phi = PolynomialField(coefficients, powers, dim)
    form = OneForm(phi.gradient, dim, lambda x, u, v: np.zeros(np.broadcast(x, u, v).shape[:-1]),
                   name, closed=True)
    form.potential = phi
    return form


def random_exact_form(dim: int, rng, degree: int = 3, n_terms: int = 6, scale: float = 0.3) -> OneForm:
    """Exact form from a random polynomial potential, for property tests."""
    powers = rng.integers(0, degree + 1, size=(n_terms, dim))
    powers[powers.sum(axis=1) > degree] //= 2
    coefficients = scale * rng.standard_normal(n_terms)
    return exact_form(coefficients, powers, dim, "random-exact")
