"""Named invariant checks across all modules.

Each check takes a seeded generator and returns ``(value, tolerance)``;
it passes when ``value <= tolerance``.  Exceptions count as failures and
are reported by class name.  :func:`run_checks` is what ``maslov verify``
prints.
"""

from __future__ import annotations

import contextlib
from typing import Callable
from unittest import mock

import numpy as np

from . import actions, bundle, grassmann, so3, sphere, symplin
from .forms import exact_form, liouville_form, polynomial_form, random_exact_form
from .grassmann import SampledLoop

CHECKS: dict[str, Callable] = {}


def check(name):
    def register(fn):
        CHECKS[name] = fn
        return fn
    return register


def _random_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_orthogonal(rng, n):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q


def _random_spd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


@check("symplin.average_idempotent")
def _(rng):
    sampler = symplin.circle_sampler([1, 2])
    g = symplin.Metric(_random_spd(rng, 4))
    once = symplin.average_metric(g, sampler)
    twice = symplin.average_metric(once, sampler)
    return float(np.abs(twice.matrix - once.matrix).max()), 1e-10


@check("symplin.j_commutes_with_group")
def _(rng):
    sampler = symplin.circle_sampler([1, -1])
    gbar = symplin.average_metric(symplin.Metric(_random_spd(rng, 4)), sampler)
    triple = symplin.build_compatible_j(symplin.standard_symplectic(2), gbar)
    err = max(np.linalg.norm(h @ triple.j - triple.j @ h) for h in sampler.samples)
    return float(err), 1e-9


@check("symplin.g_j_invariant")
def _(rng):
    sampler = symplin.so3_sampler(12)
    gbar = symplin.average_metric(symplin.Metric(_random_spd(rng, 3)), sampler)
    err = max(np.abs(h.T @ gbar.matrix @ h - gbar.matrix).max() for h in sampler.samples)
    return float(err), 1e-9


@check("grassmann.orthogonal_invariance")
def _(rng):
    err = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        u, o = _random_unitary(rng, n), _random_orthogonal(rng, n)
        err = max(err, abs(grassmann.det_squared(u @ o) - grassmann.det_squared(u)))
    return float(err), 1e-12


@check("grassmann.concatenation_additive")
def _(rng):
    err = 0
    for _ in range(10):
        a, b = (int(k) for k in rng.integers(-3, 4, size=2))
        la = SampledLoop.from_function(lambda t: np.exp(2j * np.pi * a * t), 64)
        lb = SampledLoop.from_function(lambda t: np.exp(2j * np.pi * b * t), 64)
        both = grassmann.loop_degree(grassmann.concatenate(la, lb)).degree
        err = max(err, abs(both - a - b))
    return float(err), 0.0


@check("grassmann.refinement_stable")
def _(rng):
    err = 0
    for _ in range(10):
        k = int(rng.integers(-3, 4))
        bump = rng.uniform(0, 0.5)
        fn = lambda t: np.exp(2j * np.pi * (k * t + bump * np.sin(2 * np.pi * t)))  # noqa: E731
        d1 = grassmann.loop_degree(SampledLoop.from_function(fn, 64)).degree
        d2 = grassmann.loop_degree(SampledLoop.from_function(fn, 128)).degree
        err = max(err, abs(d1 - d2))
    return float(err), 0.0


@check("grassmann.section_independent")
def _(rng):
    action = actions.LinearCircleAction((1,))
    loop = actions.orbit_frame_loop(action, rng.standard_normal(2))
    degrees = {grassmann.maslov_index(loop, section_tau=random_exact_form(2, rng)).degree for _ in range(5)}
    degrees.add(grassmann.maslov_index(loop).degree)
    return float(len(degrees) - 1), 0.0


@check("bundle.flat_for_exact_tau")
def _(rng):
    beta = bundle.TrivialConnection(random_exact_form(4, rng))
    x, u, v = rng.standard_normal((3, 100, 4))
    return float(np.abs(beta.curvature(x, u, v)).max()), 1e-8


@check("bundle.sphere_not_flat")
def _(rng):
    beta = bundle.SphereConnection()
    p = rng.standard_normal(3)
    p /= np.linalg.norm(p)
    w = sphere.lift_point(p)
    value = abs(beta.curvature(p, w[:, 0], w[:, 1]))
    # passes when the curvature is at least 0.01
    return float(0.01 - value), 0.0


def _orbit_through(rng, weights, tau):
    action = actions.LinearCircleAction(weights)
    p = rng.standard_normal(action.dim)
    beta = bundle.TrivialConnection(tau)
    return action, p, beta


@check("bundle.gauge_shift")
def _(rng):
    action, p, beta = _orbit_through(rng, (1, 2), liouville_form(2))
    sigma = polynomial_form([(0, 0.7, [0, 0, 0, 0]), (1, -0.4, [0, 0, 0, 0]), (2, 0.3, [0, 0, 0, 0])], 4, "const")
    before = actions.orbit_maslov_data(action, beta, p)[0]
    after = actions.orbit_maslov_data(action, beta.shifted(sigma), p)[0]
    exact = exact_form(rng.standard_normal(3), [[1, 1, 0, 0], [0, 2, 1, 0], [0, 0, 0, 3]], 4)
    shifted = actions.orbit_maslov_data(action, beta.shifted(exact), p)[0]
    # constant forms are closed and integrate to zero around any loop
    return float(max(abs(after - before), abs(shifted - before))), 1e-8


@check("bundle.fiber_start_invariant")
def _(rng):
    err = 0.0
    action = actions.SphereRotation((0.0, 0.6, 0.8))
    sig = polynomial_form([(0, 0.3, [0, 1, 1]), (2, -0.2, [1, 0, 0])], 3)
    beta = bundle.SphereConnection(sig)
    p = np.array([1.0, 0.0, 0.0])
    ref = actions.orbit_maslov_data(action, beta, p)[0]
    for w in actions.random_fiber_points(action, p, rng):
        err = max(err, abs(actions.orbit_maslov_data(action, beta, p, w)[0] - ref))
    return float(err), 1e-10


@check("bundle.stokes")
def _(rng):
    sig = polynomial_form([(0, 0.3, [0, 1, 1]), (2, -0.2, [1, 0, 0]), (1, 0.5, [2, 0, 1])], 3)
    c = rng.standard_normal(3)
    err = max(abs(bundle.stokes_defect(bundle.SphereConnection(), c, 0.3)),
              abs(bundle.stokes_defect(bundle.SphereConnection(sig), c, 0.3)),
              abs(bundle.stokes_defect(bundle.TrivialConnection(liouville_form(2)), rng.standard_normal(4), 0.5)))
    return float(err), 1e-6


@check("bundle.characteristic_number")
def _(rng):
    value = bundle.characteristic_number(bundle.SphereConnection())
    sig = polynomial_form([(0, 0.3, [0, 1, 1]), (2, -0.2, [1, 0, 0])], 3)
    other = bundle.characteristic_number(bundle.SphereConnection(sig))
    return float(max(abs(value - sphere.clutching_degree()), abs(value - other))), 1e-3


def _random_tangents(rng, k):
    p = rng.standard_normal((k, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    u, v = rng.standard_normal((2, k, 3))
    u -= np.sum(u * p, axis=1, keepdims=True) * p
    v -= np.sum(v * p, axis=1, keepdims=True) * p
    return p, u, v


@check("sphere.metric_compatible")
def _(rng):
    p, u, v = _random_tangents(rng, 100)
    return float(np.abs(sphere.g_s2(p, u, v) - np.sum(u * v, axis=1)).max()), 1e-10


@check("sphere.connection_invariant")
def _(rng):
    err = 0.0
    for a, w in zip(so3.random_rotations(rng, 50), so3.random_rotations(rng, 50)):
        v = w @ so3.hat(rng.standard_normal(3))
        err = max(err, abs(sphere.invariant_connection_eval(a @ w, a @ v) - sphere.invariant_connection_eval(w, v)))
    return float(err), 1e-9


@check("sphere.hamiltonian_fiber_independent")
def _(rng):
    err = 0.0
    for w in so3.random_rotations(rng, 20):
        v = rng.standard_normal(3)
        z = rng.uniform()
        err = max(err, abs(sphere.hamiltonian_of_rotation(v, w[:, 2], w)
                           - sphere.hamiltonian_of_rotation(v, w[:, 2], so3.fiber_act(w, z))))
    return float(err), 1e-10


@check("sphere.coadjoint_equivariant")
def _(rng):
    mu = actions.momentum_map(actions.SO3OnSphere(), actions.sphere_potential())
    err = 0.0
    for a, w in zip(so3.random_rotations(rng, 50), so3.random_rotations(rng, 50)):
        lhs = mu(a @ w[:, 2], a @ w)
        rhs = a @ mu(w[:, 2], w)
        err = max(err, float(np.abs(lhs - rhs).max()))
    return err, 1e-9


@check("sphere.curvature_ratio_constant")
def _(rng):
    return sphere.measure_curvature_ratio()[1], 1e-6


@check("sphere.transitive")
def _(rng):
    worst = 0
    for w in so3.random_rotations(rng, 100):
        worst = max(worst, 3 - sphere.transitivity_rank(w))
    return float(worst), 0.0


def _index_cases():
    linear = [(1,), (1, 1), (2, -1), (3, 0, -1), (1, -1), (2, 0)]
    out = [(actions.LinearCircleAction(m), np.zeros(2 * len(m)), 2 * sum(m)) for m in linear]
    rot = actions.SphereRotation((0.0, 0.0, 1.0))
    out += [(rot, np.array([0.0, 0.0, 1.0]), 2), (rot, np.array([0.0, 0.0, -1.0]), -2)]
    return out


@check("actions.fixed_point_formula")
def _(rng):
    err = 0
    for action, p, expected in _index_cases():
        err = max(err, abs(actions.local_index(action, p) - expected))
    return float(err), 0.0


@check("actions.indices_even")
def _(rng):
    odd = 0
    for action, p, _ in _index_cases():
        odd += actions.local_index(action, p) % 2
    return float(odd), 0.0


@check("actions.q_independent_of_connection")
def _(rng):
    err = 0.0
    action = actions.LinearCircleAction((2, -1))
    p = np.zeros(4)
    ref = actions.q_beta(action, bundle.TrivialConnection(dim=4), p).value
    for _ in range(5):
        beta = bundle.TrivialConnection(random_exact_form(4, rng) + liouville_form(2))
        err = max(err, abs(actions.q_beta(action, beta, p).value - ref))
    return float(err), 1e-6


@check("actions.q_independent_of_fiber_point")
def _(rng):
    action = actions.LinearCircleAction((1, 1))
    p = rng.standard_normal(4)
    beta = bundle.TrivialConnection(liouville_form(2))
    vals = [actions.q_beta(action, beta, p, w).value for w in actions.random_fiber_points(action, p, rng)]
    return float(np.ptp(vals)), 1e-10


@check("actions.orbit_indices_uniform")
def _(rng):
    action = actions.LinearCircleAction((1, 2))
    degrees = {grassmann.maslov_index(actions.orbit_frame_loop(action, rng.standard_normal(4))).degree
               for _ in range(10)}
    return float(len(degrees) - 1), 0.0


@check("actions.conservation")
def _(rng):
    lin = actions.check_conservation(actions.LinearCircleAction((1, 1)),
                                     bundle.TrivialConnection(liouville_form(2)), rng.standard_normal(4))
    x0 = np.array([0.6, 0.0, 0.8])
    sph = actions.check_conservation(actions.SphereRotation((0.0, 0.0, 1.0)), bundle.SphereConnection(), x0)
    return max(lin, sph), 1e-8


@check("actions.flat_indices_equal")
def _(rng):
    ok = actions.equal_indices_flat(actions.LinearCircleAction((1, 0)), 20, rng)
    ok &= actions.equal_indices_flat(actions.LinearCircleAction((2, 0)), 20, rng)
    return float(not ok), 0.0


@check("actions.torus_lattice")
def _(rng):
    torus = actions.TorusAction((actions.LinearCircleAction((1, 0)), actions.LinearCircleAction((0, 1))))
    q = actions.q_vector(torus, bundle.TrivialConnection(liouville_form(2)), np.zeros(4))
    return float(np.abs(q - 2 * np.rint(q / 2)).max()), 1e-6


@check("actions.gamma_doubling")
def _(rng):
    err = 0
    rot = actions.SphereRotation((0.0, 0.0, 1.0))
    for p in ([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]):
        first, second = sphere.gamma_winding_pair(rot, np.array(p))
        err = max(err, abs(second - 2 * first))
    return float(err), 0.0


def _det_without_square(u) -> complex:
    z = np.linalg.det(np.asarray(u, dtype=complex))
    return complex(z / abs(z))


FAULTS = {"det-unsquared": lambda: mock.patch.object(grassmann, "det_squared", _det_without_square)}


def run_checks(seed: int = 0, names=None, fault: str | None = None) -> list[dict]:
    """Run the registered checks; each record has name, passed, value, tolerance, error."""
    selected = list(CHECKS) if names is None else list(names)
    ctx = FAULTS[fault]() if fault else contextlib.nullcontext()
    records = []
    with ctx:
        for i, name in enumerate(selected):
            rng = np.random.default_rng([seed, i])
            record = {"name": name, "passed": False, "value": None, "tolerance": None, "error": None}
            try:
                value, tol = CHECKS[name](rng)
                record.update(value=float(value), tolerance=float(tol), passed=bool(value <= tol))
            except Exception as exc:  # reported, not raised: one failure must not hide the rest
                record["error"] = f"{type(exc).__name__}: {exc}"
            records.append(record)
    return records
