import csv
import json

import numpy as np
import pytest

from maslov import cli
from maslov.symplin import linear_rotation


def write_loop(path, frames, times=None, points=None):
    frames = np.asarray(frames)
    n = frames.shape[2]
    times = np.linspace(0, 1, len(frames)) if times is None else times
    data = {"n": n, "times": list(times),
            "frames": [f.T.ravel().tolist() for f in frames]}
    if points is not None:
        data["points"] = np.asarray(points).tolist()
    path.write_text(json.dumps(data))
    return path


def orbit_frames(weights, n_intervals):
    m = len(weights)
    f0 = np.vstack([np.eye(m), np.zeros((m, m))])
    return [linear_rotation(weights, t) @ f0 for t in np.linspace(0, 1, n_intervals + 1)]


def winding_frames(k, n_intervals):
    # a line in R^2 turning by k half-turns has det^2 winding k
    out = []
    for t in np.linspace(0, 1, n_intervals + 1):
        a = np.pi * k * t
        out.append(np.array([[np.cos(a)], [np.sin(a)]]))
    out[-1] = out[0] * (1 if k % 2 == 0 else -1)
    return out


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_index_winding_three(tmp_path, capsys):
    loop = write_loop(tmp_path / "w3.json", winding_frames(3, 64))
    code, out, _ = run(capsys, "index", loop)
    report = json.loads(out)
    assert code == 0 and report["outputs"]["degree"] == 3
    assert report["diagnostics"]["residual"] < 1e-10
    assert report["conventions"] == {"orientation": 1, "holonomy_sign": 1}
    assert report["schema_version"] == cli.SCHEMA_VERSION


def test_index_weighted_orbit(tmp_path, capsys):
    loop = write_loop(tmp_path / "orbit.json", orbit_frames((2, -1), 128))
    code, out, _ = run(capsys, "index", loop)
    assert code == 0 and json.loads(out)["outputs"]["degree"] == 2


def test_index_with_section_form(tmp_path, capsys):
    pts = [linear_rotation((1,), t) @ [0.4, 0.1] for t in np.linspace(0, 1, 65)]
    loop = write_loop(tmp_path / "o.json", orbit_frames((1,), 64), points=pts)
    spec = json.dumps({"bundle": "trivial", "tau": {"kind": "poly", "coeffs": [[0, 1.0, [1, 1]], [1, 0.5, [2, 0]]]}})
    code, out, _ = run(capsys, "index", loop, "--connection", spec)
    assert code == 0 and json.loads(out)["outputs"]["degree"] == 2


def test_index_undersampled(tmp_path, capsys):
    loop = write_loop(tmp_path / "coarse.json", winding_frames(3, 8))
    code, _, err = run(capsys, "index", loop)
    assert code == 3 and "hint" in err


def test_index_subsample(tmp_path, capsys):
    loop = write_loop(tmp_path / "w.json", winding_frames(2, 64))
    code, out, _ = run(capsys, "index", loop, "--samples", 16)
    assert code == 0 and json.loads(out)["diagnostics"]["samples"] == 17
    code, _, _ = run(capsys, "index", loop, "--samples", 7)
    assert code == 2


def test_index_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 1, "times": [0, 1]}))
    assert run(capsys, "index", bad)[0] == 2
    bad.write_text("not json")
    assert run(capsys, "index", bad)[0] == 2
    frames = winding_frames(1, 16)
    frames[-1] = np.array([[0.6], [0.8]])
    assert run(capsys, "index", write_loop(tmp_path / "open.json", frames))[0] == 2
    notlag = [np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]])] * 9
    assert run(capsys, "index", write_loop(tmp_path / "nl.json", notlag))[0] == 2
    assert run(capsys, "index", tmp_path / "missing.json")[0] == 2


def test_index_flip_orientation(tmp_path, capsys):
    loop = write_loop(tmp_path / "w.json", winding_frames(3, 64))
    code, out, _ = run(capsys, "index", loop, "--flip-orientation")
    report = json.loads(out)
    assert report["outputs"]["degree"] == -3 and report["conventions"]["orientation"] == -1


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_qbeta_origin_row(tmp_path, capsys):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([[0, 0, 0, 0], [0.5, 0.1, -0.3, 0.2]]))
    out = tmp_path / "q.csv"
    code, _, _ = run(capsys, "qbeta", "--action", '{"kind":"linear","weights":[1,1]}',
                     "--connection", '{"bundle":"trivial","tau":{"kind":"liouville"}}',
                     "--points", pts, "--out", out)
    rows = read_csv(out)
    assert code == 0
    assert float(rows[0]["q_value"]) == 4.0 and rows[0]["is_fixed"] == "true" and rows[0]["nearest_even"] == "4"
    assert rows[1]["is_fixed"] == "false" and rows[1]["nearest_even"] == ""
    assert rows[1]["x0"] == format(0.5, ".16e")


def test_qbeta_flat_grid_is_constant(tmp_path, capsys):
    grid = [[x, y] for x in np.linspace(-1, 1, 4) for y in np.linspace(-1, 1, 4)]
    pts = tmp_path / "grid.txt"
    pts.write_text("\n".join(f"{x} {y}" for x, y in grid))
    out = tmp_path / "q.csv"
    code, _, _ = run(capsys, "qbeta", "--action", '{"kind":"linear","weights":[3]}',
                     "--points", pts, "--out", out, "--jobs", 2)
    assert code == 0
    assert {float(r["q_value"]) for r in read_csv(out)} == {6.0}


def test_qbeta_parallel_matches_serial(tmp_path, capsys):
    pts = tmp_path / "p.json"
    pts.write_text(json.dumps([[0.6, 0.0, 0.8], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))
    args = ["qbeta", "--action", '{"kind":"sphere","axis":[0,0,1]}', "--connection", '{"bundle":"sphere"}',
            "--points", pts, "--out"]
    run(capsys, *args, tmp_path / "a.csv")
    run(capsys, *args, tmp_path / "b.csv", "--jobs", 3)
    a, b = (tmp_path / "a.csv").read_text(), (tmp_path / "b.csv").read_text()
    assert a == b
    rows = read_csv(tmp_path / "a.csv")
    assert [r["nearest_even"] for r in rows] == ["", "2", "-2"]


def test_qbeta_torus_columns(tmp_path, capsys):
    pts = tmp_path / "p.json"
    pts.write_text("[[0, 0, 0, 0]]")
    spec = json.dumps({"kind": "torus", "components": [{"kind": "linear", "weights": [1, 0]},
                                                       {"kind": "linear", "weights": [0, 1]}]})
    code, out, _ = run(capsys, "qbeta", "--action", spec, "--points", pts)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and rows[0]["q_value_1"] == rows[0]["q_value_2"] == format(2.0, ".16e")


def test_qbeta_empty_points(tmp_path, capsys):
    pts = tmp_path / "empty.txt"
    pts.write_text("")
    out = tmp_path / "q.csv"
    code, _, _ = run(capsys, "qbeta", "--action", '{"kind":"linear","weights":[1]}', "--points", pts, "--out", out)
    assert code == 0 and read_csv(out) == []


def test_qbeta_bad_specs(tmp_path, capsys):
    pts = tmp_path / "p.json"
    pts.write_text("[[0, 0]]")
    assert run(capsys, "qbeta", "--action", '{"kind":"nope"}', "--points", pts)[0] == 2
    assert run(capsys, "qbeta", "--action", '{"kind":"linear","weights":[1,1]}', "--points", pts)[0] == 2
    assert run(capsys, "qbeta", "--action", '{"kind":"linear","weights":[1]}', "--connection",
               '{"bundle":"sphere"}', "--points", pts)[0] == 2


def test_sphere_demo(tmp_path, capsys):
    out = tmp_path / "demo.json"
    code, _, _ = run(capsys, "sphere-demo", "--axis", 0, 0, 1, "--out", out)
    report = json.loads(out.read_text())["outputs"]
    assert code == 0
    assert report["local_index"] == {"axis": 2, "antipode": -2}
    assert abs(abs(report["characteristic_number"]["value"]) - 2) < 1e-3
    assert report["transitivity_rank_histogram"] == {"3": 100}
    assert report["hamiltonian_fit"]["residual"] < 1e-8


def test_sphere_demo_zero_axis(capsys):
    assert run(capsys, "sphere-demo", "--axis", 0, 0, 0)[0] == 2


def test_verify_passes_and_is_deterministic(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MASLOV_SEED", "11")
    names = ["grassmann.refinement_stable", "actions.indices_even", "sphere.transitive"]
    flags = [x for n in names for x in ("--check", n)]
    code, first, _ = run(capsys, "verify", *flags)
    _, second, _ = run(capsys, "verify", *flags)
    assert code == 0 and first == second
    report = json.loads(first)
    assert report["inputs"]["seed"] == 11 and report["outputs"]["passed"]


def test_verify_catches_injected_fault(capsys):
    code, out, err = run(capsys, "verify", "--check", "actions.indices_even", "--inject-fault", "det-unsquared")
    assert code == 1 and "actions.indices_even" in err
    assert json.loads(out)["outputs"]["failed"] == ["actions.indices_even"]


def test_verify_unknown_check(capsys):
    assert run(capsys, "verify", "--check", "nope")[0] == 2


def test_bad_seed(capsys, monkeypatch):
    monkeypatch.setenv("MASLOV_SEED", "abc")
    assert run(capsys, "verify", "--check", "sphere.transitive")[0] == 2


def test_full_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0, json.loads(out)["outputs"]["failed"]
