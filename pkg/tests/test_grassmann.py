import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maslov.actions import LinearCircleAction, orbit_frame_loop
from maslov.conventions import use_conventions
from maslov.errors import AmbiguousDegree, DegenerateFrame, NotLagrangian, OpenLoop, UndersampledLoop
from maslov.forms import liouville_form, random_exact_form
from maslov.grassmann import (
    SampledLoop,
    concatenate,
    det_squared,
    frame_phases,
    loop_degree,
    maslov_index,
    plane_distance,
    unitary_of_frame,
)
from maslov.symplin import Metric, build_compatible_j, standard_symplectic

from conftest import random_lagrangian_frame, random_spd


def winding(k, n=64):
    return SampledLoop.from_function(lambda t: np.exp(2j * np.pi * k * t), n)


def test_horizontal_plane_is_identity():
    u = unitary_of_frame(np.vstack([np.eye(3), np.zeros((3, 3))]))
    assert np.abs(u - np.eye(3)).max() < 1e-14


def test_vertical_line_is_i():
    assert np.abs(unitary_of_frame(np.array([[0.0], [1.0]])) - 1j).max() < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_unitary_output(seed, n):
    rng = np.random.default_rng(seed)
    u = unitary_of_frame(random_lagrangian_frame(rng, n))
    assert np.abs(u.conj().T @ u - np.eye(n)).max() < 1e-10


def test_unitary_with_general_triple(rng):
    t = build_compatible_j(standard_symplectic(2), Metric(random_spd(rng, 4)))
    u = unitary_of_frame(random_lagrangian_frame(rng, 2), t)
    assert np.abs(u.conj().T @ u - np.eye(2)).max() < 1e-10


def test_non_lagrangian_rejected():
    with pytest.raises(NotLagrangian):
        unitary_of_frame(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))


def test_rank_deficient_rejected():
    with pytest.raises(DegenerateFrame):
        unitary_of_frame(np.array([[1.0, 2.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]))


def test_det_squared_identity():
    assert det_squared(np.eye(2)) == 1


def test_det_squared_eighth_turn():
    assert abs(det_squared(np.array([[np.exp(1j * np.pi / 4)]])) - 1j) < 1e-15


def test_det_squared_orthogonal_invariance(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        u, _ = np.linalg.qr(z)
        o, _ = np.linalg.qr(rng.standard_normal((n, n)))
        assert abs(det_squared(u @ o) - det_squared(u)) < 1e-12


def test_plane_phase_is_basis_independent(rng):
    f = random_lagrangian_frame(rng, 3)
    change = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    assert plane_distance(f, f @ change) < 1e-9
    assert abs(frame_phases([f])[0] - frame_phases([f @ change])[0]) < 1e-10


def test_constant_loop_degree_zero():
    r = loop_degree(np.ones(65))
    assert r.degree == 0 and r.residual < 1e-12


@pytest.mark.parametrize("k", range(-3, 4))
def test_winding_loops(k):
    r = loop_degree(winding(k))
    assert r.degree == k and r.residual < 1e-10


def test_det_squared_of_weighted_rotation():
    m = np.array([2, -1])
    z = [det_squared(np.diag(np.exp(2j * np.pi * m * t))) for t in np.linspace(0, 1, 129)]
    assert loop_degree(z).degree == 2


def test_undersampled_guard():
    with pytest.raises(UndersampledLoop):
        loop_degree(winding(3, 8))


def test_ambiguous_residual():
    z = np.exp(2j * np.pi * np.linspace(0, 0.5, 33))
    with pytest.raises(AmbiguousDegree):
        loop_degree(z)


def test_open_loop_rejected():
    t = np.linspace(0, 1, 17)
    with pytest.raises(OpenLoop):
        SampledLoop(t, np.exp(1j * t), "phase")


def test_too_few_samples_rejected():
    with pytest.raises(ValueError):
        winding(1, 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_concatenation_additive(a, b):
    assert loop_degree(concatenate(winding(a), winding(b))).degree == a + b


@settings(max_examples=40, deadline=None)
@given(st.integers(-4, 4), st.floats(0, 0.6), st.floats(0, 1))
def test_refinement_stable(k, amp, shift):
    def fn(t):
        return np.exp(2j * np.pi * (k * t + amp * np.sin(2 * np.pi * (t + shift)) - amp * np.sin(2 * np.pi * shift)))
    coarse = loop_degree(SampledLoop.from_function(fn, 64)).degree
    fine = loop_degree(SampledLoop.from_function(fn, 128)).degree
    assert coarse == fine == k


def test_constant_plane_loop_index_zero(rng):
    f = random_lagrangian_frame(rng, 2)
    loop = SampledLoop.from_function(lambda t: f, 16, "frame")
    assert maslov_index(loop).degree == 0


def test_rotating_line_index_two():
    loop = orbit_frame_loop(LinearCircleAction((1,)), np.array([0.5, 0.0]))
    assert maslov_index(loop).degree == 2


def test_section_independence(rng):
    loop = orbit_frame_loop(LinearCircleAction((1,)), np.array([0.5, -0.2]))
    degrees = [maslov_index(loop, section_tau=random_exact_form(2, rng)).degree for _ in range(5)]
    assert degrees == [2] * 5


def test_non_closed_section_shifts_raw_value():
    # the Liouville form is not closed, so the raw value moves by the enclosed area
    loop = orbit_frame_loop(LinearCircleAction((1,)), np.array([0.1, 0.0]), n_intervals=256)
    raw = maslov_index(loop, section_tau=liouville_form(1)).raw
    assert abs(raw - (2 - np.pi * 0.01)) < 1e-5


def test_large_non_closed_section_is_ambiguous():
    loop = orbit_frame_loop(LinearCircleAction((1,)), np.array([0.3, 0.0]), n_intervals=256)
    with pytest.raises(AmbiguousDegree):
        maslov_index(loop, section_tau=liouville_form(1))


def test_orientation_flag_negates():
    loop = orbit_frame_loop(LinearCircleAction((1, 1)), np.zeros(4))
    with use_conventions(orientation=-1):
        assert maslov_index(loop).degree == -4
    assert maslov_index(loop).degree == 4
