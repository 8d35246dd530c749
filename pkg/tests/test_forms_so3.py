import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maslov import so3
from maslov.conventions import Conventions, get_conventions, use_conventions
from maslov.forms import OneForm, exact_form, liouville_form, polynomial_form


def test_liouville_derivative_is_dq_dp():
    tau = liouville_form(2)
    x = np.array([0.3, -0.1, 0.7, 0.2])
    e = np.eye(4)
    assert tau.d(x, e[0], e[2]) == 1.0 and tau.d(x, e[1], e[3]) == 1.0 and tau.d(x, e[0], e[1]) == 0.0


def test_polynomial_derivative_matches_finite_differences(rng):
    form = polynomial_form([(0, 1.5, [1, 2, 0]), (1, -0.5, [0, 1, 3]), (2, 2.0, [2, 0, 1])], 3)
    fd = OneForm(form, 3)
    x, u, v = rng.standard_normal((3, 20, 3))
    assert np.abs(form.d(x, u, v) - fd.d(x, u, v)).max() < 1e-7


def test_exact_form_integrates_to_potential_difference(rng):
    form = exact_form([1.0, -2.0, 0.5], [[2, 1], [0, 3], [1, 1]], 2)
    t = np.linspace(0, 1, 4001)
    path = np.stack([np.cos(3 * t), t**2], axis=-1)
    expected = form.potential(path[-1]) - form.potential(path[0])
    assert abs(form.line_integral(path) - expected) < 1e-5


def test_closed_loop_integral_of_liouville_is_area():
    t = np.linspace(0, 1, 2001)
    circle = 0.5 * np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)], axis=-1)
    assert abs(liouville_form(1).line_integral(circle) - np.pi * 0.25) < 1e-5


def test_forms_add_and_scale():
    a, b = liouville_form(1), polynomial_form([(0, 1.0, [0, 1])], 2)
    x, u, v = np.array([0.2, 0.4]), np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert abs((a + b).d(x, u, v) - (a.d(x, u, v) + b.d(x, u, v))) < 1e-15
    assert abs(a.scaled(-2.0).d(x, u, v) + 2.0) < 1e-15
    with pytest.raises(ValueError):
        a + liouville_form(2)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_exp_log_round_trip(v):
    v = np.asarray(v)
    if np.linalg.norm(v) >= np.pi - 1e-6:
        v = v / np.linalg.norm(v) * 3.0
    r = so3.expm(v)
    assert so3.is_rotation(r)
    assert np.abs(so3.logm(r) - v).max() < 1e-7


def test_hat_vee_inverse(rng):
    v = rng.standard_normal((5, 3))
    assert np.abs(so3.vee(so3.hat(v)) - v).max() == 0
    assert np.abs(so3.hat(v[0]) @ v[1] - np.cross(v[0], v[1])).max() < 1e-15


def test_fiber_turns_inverts_fiber_action(rng):
    w = so3.random_rotations(rng, 1)[0]
    for s in (-0.4, 0.0, 0.13, 0.49):
        assert abs(so3.fiber_turns(w, so3.fiber_act(w, s)) - s) < 1e-12
    with use_conventions(orientation=-1):
        assert abs(so3.fiber_turns(w, so3.fiber_act(w, 0.2)) - 0.2) < 1e-12


def test_haar_samples_are_rotations(rng):
    assert all(so3.is_rotation(r) for r in so3.random_rotations(rng, 50))


def test_conventions_scoped():
    assert get_conventions() == Conventions()
    with use_conventions(orientation=-1, holonomy_sign=-1):
        assert get_conventions().as_dict() == {"orientation": -1, "holonomy_sign": -1}
    assert get_conventions() == Conventions()
    with pytest.raises(ValueError):
        Conventions(orientation=2)
