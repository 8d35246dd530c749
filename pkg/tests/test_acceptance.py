"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line; pytest prints them in its terminal
summary, and ``python3 tests/test_acceptance.py`` prints them directly.
"""

import time

import numpy as np

from maslov import actions, bundle, grassmann, so3, sphere
from maslov.actions import LinearCircleAction, SO3OnSphere, SphereRotation, TorusAction
from maslov.bundle import SphereConnection, TrivialConnection
from maslov.forms import liouville_form, random_exact_form
from maslov.grassmann import SampledLoop

RESULTS: dict[int, str] = {}
INDICES: list[int] = []
EZ = np.array([0.0, 0.0, 1.0])


def record(number, title, ok, detail):
    RESULTS[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    assert ok, RESULTS[number]


def test_01_fixed_point_formula():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    cases = {(1,): 2, (1, 1): 4, (2, -1): 2, (3, 0, -1): 4}
    got, spread = {}, 0.0
    for m, expected in cases.items():
        origin = np.zeros(2 * len(m))
        action = LinearCircleAction(m)
        got[m] = actions.local_index(action, origin)
        INDICES.append(got[m])
        q = [actions.q_beta(action, TrivialConnection(random_exact_form(2 * len(m), rng) + liouville_form(len(m))),
                            origin).value for _ in range(5)]
        spread = max(spread, float(np.ptp(q)), max(abs(v - expected) for v in q))
    elapsed = time.perf_counter() - start
    ok = all(got[m] == e and isinstance(got[m], int) for m, e in cases.items()) and spread < 1e-8 and elapsed < 5
    record(1, "fixed-point formula", ok,
           f"indices {list(got.values())}, q spread {spread:.1e}, {elapsed:.2f}s")


def test_02_loop_degree_engine():
    worst, degrees = 0.0, []
    for k in range(-3, 4):
        r = grassmann.loop_degree(SampledLoop.from_function(lambda t: np.exp(2j * np.pi * k * t), 64))
        degrees.append(r.degree)
        worst = max(worst, r.residual)
    ok = degrees == list(range(-3, 4)) and worst < 1e-10
    record(2, "loop degree", ok, f"degrees {degrees}, max residual {worst:.1e}")


def test_03_section_independence():
    rng = np.random.default_rng(3)
    loop = actions.orbit_frame_loop(LinearCircleAction((1,)), np.array([0.7, -0.4]))
    degrees = [grassmann.maslov_index(loop, section_tau=random_exact_form(2, rng)).degree for _ in range(5)]
    record(3, "section independence", degrees == [2] * 5, f"indices {degrees}")


def test_04_sphere_nontrivial():
    c = bundle.characteristic_number(SphereConnection())
    clutch = sphere.clutching_degree()
    ok = abs(abs(c) - 2) < 1e-3 and int(np.rint(c)) == clutch
    record(4, "S^2 characteristic number", ok, f"quadrature {c:.10f}, clutching degree {clutch}")


def test_05_pole_indices():
    rot = SphereRotation(tuple(EZ))
    qn = actions.q_beta(rot, SphereConnection(), EZ)
    qs = actions.q_beta(rot, SphereConnection(), -EZ)
    kn, ks = actions.local_index(rot, EZ), actions.local_index(rot, -EZ)
    INDICES.extend([kn, ks, qn.nearest_even, qs.nearest_even])
    for axis in (np.array([1.0, 2.0, 2.0]) / 3, np.array([0.0, 1.0, 0.0])):
        for w in (1, 2, -1):
            r = SphereRotation(tuple(axis), w)
            INDICES.extend([actions.local_index(r, axis), actions.local_index(r, -axis)])
    near = max(abs(qn.value - 2), abs(qs.value + 2))
    even = all(k % 2 == 0 for k in INDICES)
    ok = (kn, ks) == (2, -2) and (qn.nearest_even, qs.nearest_even) == (2, -2) and near < 1e-6 and even
    record(5, "pole indices", ok, f"k_N={kn}, k_S={ks}, |Q - even| {near:.1e}, {len(INDICES)} indices all even={even}")


def test_06_hamiltonian_recovery():
    rng = np.random.default_rng(6)
    step, worst = 1e-5, 0.0
    for _ in range(100):
        v = rng.standard_normal(3)
        w = so3.random_rotations(rng, 1)[0]
        p, e = w[:, 2], w[:, int(rng.integers(0, 2))]
        plus, minus = np.cos(step) * p + np.sin(step) * e, np.cos(step) * p - np.sin(step) * e
        dh = (sphere.hamiltonian_of_rotation(v, plus) - sphere.hamiltonian_of_rotation(v, minus)) / (2 * step)
        worst = max(worst, abs(dh - sphere.omega_s2(p, np.cross(v, p), e)))
    pts = rng.standard_normal((100, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    h = np.array([sphere.hamiltonian_of_rotation(EZ, p) for p in pts])
    c = float(np.linalg.lstsq(pts[:, 2:], h, rcond=None)[0][0])
    resid = float(np.abs(h - c * pts[:, 2]).max())
    record(6, "Hamiltonian recovery", worst < 1e-6 and resid < 1e-8,
           f"max |dH - i_X omega| {worst:.1e}, H = {c:.10f} p_z (residual {resid:.1e})")


def test_07_transitivity():
    rng = np.random.default_rng(7)
    frames = so3.random_rotations(rng, 100)
    ranks = [sphere.transitivity_rank(w) for w in frames]
    smallest = min(sphere.transitivity_singular_values(w).min() for w in frames)
    record(7, "transitivity", set(ranks) == {3} and smallest > 1e-6,
           f"ranks {sorted(set(ranks))}, smallest singular value {smallest:.3f}")


def test_08_momentum_map():
    rng = np.random.default_rng(8)
    mu = actions.momentum_map(SO3OnSphere(), actions.sphere_potential())
    eq = 0.0
    for a, w in zip(so3.random_rotations(rng, 50), so3.random_rotations(rng, 50)):
        # mu(a w)(v) = mu(w)(Ad_{a^-1} v), i.e. mu(a w) = a mu(w) as vectors
        eq = max(eq, float(np.abs(mu(a @ w[:, 2], a @ w) - a @ mu(w[:, 2], w)).max()))
    m = (2, -1, 3)
    lin = actions.momentum_map(LinearCircleAction(m), actions.liouville_potential(3, vertical=0.0))
    x = rng.standard_normal((40, 6))
    z2 = x[:, :3] ** 2 + x[:, 3:] ** 2
    h = np.array([lin(p)[0] for p in x])
    c = float(np.linalg.lstsq((z2 @ np.array(m))[:, None], h, rcond=None)[0][0])
    # oracle: the Liouville form on the generator field integrates to pi * sum m_j |z_j|^2
    record(8, "momentum map", eq < 1e-9 and abs(c - np.pi) < 1e-8,
           f"equivariance error {eq:.1e}, c - pi = {c - np.pi:.1e}")


def test_09_conservation():
    rng = np.random.default_rng(9)
    lin = actions.check_conservation(LinearCircleAction((1, 2)), TrivialConnection(liouville_form(2)),
                                     rng.standard_normal(4), steps=512)
    sph = max(actions.check_conservation(SphereRotation(tuple(EZ)), SphereConnection(), p, steps=512)
              for p in (np.array([0.6, 0.0, 0.8]), np.array([0.0, -1.0, 0.0])))
    record(9, "conservation", lin < 1e-8 and sph < 1e-8, f"drift R^4 {lin:.1e}, S^2 {sph:.1e}")


def test_10_flat_bundle_equality():
    found = actions.fixed_point_indices(LinearCircleAction((1, 0)), 20, np.random.default_rng(10))
    ks = [k for _, k in found]
    INDICES.extend(ks)
    ok = len(ks) == 20 and set(ks) == {2} and actions.equal_indices_flat(LinearCircleAction((1, 0)))
    record(10, "flat-bundle equality", ok, f"{len(ks)} fixed points, indices {sorted(set(ks))}")


def test_11_torus_lattice():
    rng = np.random.default_rng(11)
    torus = TorusAction((LinearCircleAction((1, 0)), LinearCircleAction((0, 1))))
    worst, vectors = 0.0, []
    for tau in (liouville_form(2), random_exact_form(4, rng) + liouville_form(2)):
        q = actions.q_vector(torus, TrivialConnection(tau), np.zeros(4))
        vectors.append(q.round(12).tolist())
        worst = max(worst, float(np.abs(q - 2 * np.rint(q / 2)).max()))
    record(11, "torus fixed-point lattice", worst < 1e-6, f"q vectors {vectors}, distance to 2Z^2 {worst:.1e}")


def test_12_gamma_doubling():
    pairs = []
    for axis in (EZ, np.array([1.0, 2.0, 2.0]) / 3, np.array([-1.0, 0.0, 0.0])):
        for w in (1, -1, 2, 0):
            r = SphereRotation(tuple(axis), w)
            pairs += [sphere.gamma_winding_pair(r, axis, 128), sphere.gamma_winding_pair(r, -axis, 128)]
    ok = all(b == 2 * a for a, b in pairs) and pairs[:2] == [(1, 2), (-1, -2)]
    record(12, "Gamma to Gamma^2 doubling", ok, f"{len(pairs)} pole orbits, first {pairs[:2]}")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                failed += 1
            except Exception as exc:  # report and continue
                number = int(name.split("_")[1])
                RESULTS.setdefault(number, f"criterion {number:2d} FAIL  {name}: {type(exc).__name__}: {exc}")
                failed += 1
    for number in sorted(RESULTS):
        print(RESULTS[number])
    sys.exit(1 if failed else 0)
