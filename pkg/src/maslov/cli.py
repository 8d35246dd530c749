"""Command-line front end: ``maslov {index,qbeta,sphere-demo,verify}``.

Reports are JSON with sorted keys and no timing data, so identical inputs
and seeds give byte-identical output.  Exit codes: 0 success, 1 failed
verification, 2 bad input, 3 numerically ambiguous result.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, actions, bundle, conventions, grassmann, so3, sphere, verify
from .errors import AmbiguousDegree, MaslovError, UndersampledLoop
from .forms import liouville_form, polynomial_form, zero_form

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_AMBIGUOUS = 0, 1, 2, 3


class InputError(Exception):
    """Malformed file or spec; maps to exit code 2."""


def seed_from_env() -> int:
    raw = os.environ.get("MASLOV_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"MASLOV_SEED must be an integer, got {raw!r}") from exc


def _load_json_arg(text: str):
    """Inline JSON, or ``@path`` / a path to a JSON file."""
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    elif not text.lstrip().startswith(("{", "[")) and Path(text).exists():
        text = Path(text).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def parse_form(spec, dim: int):
    if spec is None:
        return zero_form(dim)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError("a form spec needs a 'kind'")
    kind = spec["kind"]
    if kind == "zero":
        return zero_form(dim)
    if kind == "liouville":
        if dim % 2:
            raise InputError("the Liouville form needs an even-dimensional base")
        return liouville_form(dim // 2)
    if kind == "poly":
        terms = []
        for term in spec.get("coeffs", []):
            try:
                comp, coef, powers = term
            except (TypeError, ValueError) as exc:
                raise InputError("poly terms are [component, coefficient, [powers...]]") from exc
            if not 0 <= int(comp) < dim or len(powers) != dim:
                raise InputError(f"poly term {term!r} does not fit a base of dimension {dim}")
            terms.append((int(comp), float(coef), [int(a) for a in powers]))
        return polynomial_form(terms, dim)
    raise InputError(f"unknown form kind {kind!r}")


def parse_connection(spec, dim: int | None = None):
    """Build a connection from ``{"bundle": ..., "tau": ..., "perturbation": ...}``."""
    if spec is None:
        spec = {"bundle": "trivial"}
    if not isinstance(spec, dict):
        raise InputError("connection spec must be a JSON object")
    kind = spec.get("bundle", "trivial")
    if kind == "trivial":
        if dim is None:
            raise InputError("trivial connection needs a base dimension")
        tau = parse_form(spec.get("tau"), dim)
        if spec.get("perturbation") is not None:
            tau = tau + parse_form(spec["perturbation"], dim)
        return bundle.TrivialConnection(tau)
    if kind == "sphere":
        pert = spec.get("perturbation")
        return bundle.SphereConnection(None if pert is None else parse_form(pert, 3))
    raise InputError(f"unknown bundle {kind!r}")


def parse_action(spec):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError("action spec needs a 'kind'")
    try:
        if spec["kind"] == "linear":
            return actions.LinearCircleAction(tuple(spec["weights"]))
        if spec["kind"] == "sphere":
            axis = np.asarray(spec["axis"], dtype=float)
            norm = np.linalg.norm(axis)
            if norm == 0:
                raise InputError("rotation axis must be nonzero")
            return actions.SphereRotation(tuple(axis / norm), int(spec.get("weight", 1)))
        if spec["kind"] == "torus":
            return actions.TorusAction(tuple(parse_action(c) for c in spec["components"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad action spec: {exc}") from exc
    raise InputError(f"unknown action kind {spec['kind']!r}")


def load_loop(path) -> grassmann.SampledLoop:
    """Read ``{n, times, frames, points?}``; frames are column-major ``2n x n``."""
    try:
        data = json.loads(Path(path).read_text())
        n = int(data["n"])
        times = np.asarray(data["times"], dtype=float)
        frames = np.asarray(data["frames"], dtype=float)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read loop file {path}: {exc}") from exc
    if frames.ndim != 2 or frames.shape[1] != 2 * n * n:
        raise InputError(f"each frame must hold {2 * n * n} numbers")
    frames = frames.reshape(len(frames), n, 2 * n).transpose(0, 2, 1)
    points = data.get("points")
    try:
        return grassmann.SampledLoop(times, frames, "frame", None if points is None else np.asarray(points, float))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def subsample(loop: grassmann.SampledLoop, n_intervals: int) -> grassmann.SampledLoop:
    """Keep every k-th sample so the loop has ``n_intervals`` intervals."""
    total = loop.n_intervals
    if n_intervals <= 0 or total % n_intervals:
        raise InputError(f"--samples {n_intervals} must divide the file's {total} intervals")
    step = total // n_intervals
    pts = None if loop.points is None else loop.points[::step]
    return grassmann.SampledLoop(loop.times[::step], loop.values[::step], loop.kind, pts)


def _report(command, inputs, outputs, diagnostics) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "conventions": conventions.get_conventions().as_dict(),
        "inputs": inputs,
        "outputs": outputs,
        "diagnostics": diagnostics,
    }


def _dump(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_index(args) -> int:
    loop = load_loop(args.loop_file)
    if args.samples:
        loop = subsample(loop, args.samples)
    n = loop.values.shape[2]
    spec = _load_json_arg(args.connection) if args.connection else None
    beta = parse_connection(spec, 2 * n)
    if beta.kind != "trivial":
        raise InputError("loops of Lagrangian planes live over R^2n; use a trivial connection")
    tau = beta.tau
    if loop.points is None:
        if spec is not None and spec.get("tau", {"kind": "zero"}).get("kind") != "zero":
            raise InputError("a section form needs 'points' in the loop file")
        tau = None
    result = grassmann.maslov_index(loop, section_tau=tau)
    if result.residual >= args.tolerance:
        raise AmbiguousDegree(f"residual {result.residual:.3e} exceeds tolerance {args.tolerance}")
    report = _report("index", {"loop_file": str(args.loop_file), "connection": spec, "samples": loop.n_intervals},
                     {"degree": result.degree, "raw": result.raw},
                     {"residual": result.residual, "tolerance": args.tolerance,
                      "samples": result.samples, "max_step": result.max_step})
    _emit(_dump(report), args.out)
    return EXIT_OK


def load_points(path, dim: int) -> np.ndarray:
    """JSON array of points, or a text file with one point per line."""
    text = Path(path).read_text().strip()
    if not text:
        return np.zeros((0, dim))
    try:
        if text.startswith("["):
            pts = np.asarray(json.loads(text), dtype=float)
        else:
            rows = [r.replace(",", " ").split() for r in text.splitlines() if r.strip() and not r.startswith("#")]
            pts = np.asarray(rows, dtype=float)
    except ValueError as exc:
        raise InputError(f"cannot parse points: {exc}") from exc
    pts = pts.reshape(-1, dim) if pts.size == 0 else pts
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise InputError(f"points must have {dim} coordinates")
    return pts


def _base_dim(action) -> int:
    first = action.components[0] if isinstance(action, actions.TorusAction) else action
    return 3 if isinstance(first, actions.SphereRotation) else first.dim


def _q_row(task):
    action_spec, connection_spec, point, samples, orientation = task
    with conventions.use_conventions(orientation=orientation):
        action = parse_action(action_spec)
        beta = parse_connection(connection_spec, _base_dim(action))
        comps = action.components if isinstance(action, actions.TorusAction) else (action,)
        results = [actions.q_beta(c, beta, np.asarray(point), n_intervals=samples) for c in comps]
    return [r.value for r in results], actions.is_fixed(action, point), [r.nearest_even for r in results]


def _fmt(x) -> str:
    return format(float(x), ".16e")


def cmd_qbeta(args) -> int:
    action_spec = _load_json_arg(args.action)
    connection_spec = _load_json_arg(args.connection) if args.connection else None
    action = parse_action(action_spec)
    dim = _base_dim(action)
    parse_connection(connection_spec, dim)
    pts = load_points(args.points, dim)
    if dim == 3 and len(pts):
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InputError("sphere points must be unit vectors")
        pts = pts / norms[:, None]
    rank = action.rank if isinstance(action, actions.TorusAction) else 1
    samples = args.samples or actions.ORBIT_SAMPLES
    tasks = [(action_spec, connection_spec, p.tolist(), samples, conventions.orientation()) for p in pts]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_q_row, tasks))
    else:
        rows = [_q_row(t) for t in tasks]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    suffix = [""] if rank == 1 else [f"_{k + 1}" for k in range(rank)]
    writer.writerow([f"x{i}" for i in range(dim)] + [f"q_value{s}" for s in suffix] + ["is_fixed"]
                    + [f"nearest_even{s}" for s in suffix])
    for p, (values, fixed, evens) in zip(pts, rows):
        writer.writerow([_fmt(c) for c in p] + [_fmt(v) for v in values] + [str(bool(fixed)).lower()]
                        + ["" if e is None else str(e) for e in evens])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _linear_fit(x, y):
    coef, *_ = np.linalg.lstsq(np.column_stack([x, np.ones_like(x)]), y, rcond=None)
    resid = float(np.abs(y - coef[0] * x - coef[1]).max())
    return float(coef[0]), float(coef[1]), resid


def sphere_report(axis, seed: int) -> dict:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    rng = np.random.default_rng(seed)
    rot = actions.SphereRotation(tuple(axis))
    r, spread = sphere.measure_curvature_ratio()
    char = bundle.characteristic_number(bundle.SphereConnection())
    clutch = sphere.clutching_degree()
    poles = {"plus": axis, "minus": -axis}
    indices = {k: actions.local_index(rot, p) for k, p in poles.items()}
    windings = {k: list(sphere.gamma_winding_pair(rot, p)) for k, p in poles.items()}
    q_values = {k: actions.q_beta(rot, bundle.SphereConnection(), p).value for k, p in poles.items()}
    ranks = [sphere.transitivity_rank(w) for w in so3.random_rotations(rng, 100)]
    pts = rng.standard_normal((100, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    h = np.array([sphere.hamiltonian_of_rotation(axis, p) for p in pts])
    c, offset, h_resid = _linear_fit(pts @ axis, h)
    psi = np.linspace(-2.5, 2.5, 11)
    phases = np.unwrap([np.angle(sphere.isotropy_phase(axis, so3.rotation(axis, s))) for s in psi])
    slope, icpt, phi_resid = _linear_fit(psi, phases)
    return {
        "curvature_ratio": {"r": r, "spread": spread},
        "characteristic_number": {"value": char, "clutching_degree": clutch,
                                  "residual": abs(char - clutch)},
        "local_index": {"axis": indices["plus"], "antipode": indices["minus"]},
        "q_beta": {"axis": q_values["plus"], "antipode": q_values["minus"]},
        "gamma_windings": {"axis": windings["plus"], "antipode": windings["minus"]},
        "transitivity_rank_histogram": {str(k): ranks.count(k) for k in sorted(set(ranks))},
        "hamiltonian_fit": {"c": c, "offset": offset, "residual": h_resid},
        "isotropy_fit": {"slope": slope, "intercept": icpt, "residual": phi_resid},
    }


def cmd_sphere_demo(args) -> int:
    axis = np.asarray(args.axis, dtype=float)
    if axis.shape != (3,) or not np.all(np.isfinite(axis)) or np.linalg.norm(axis) == 0:
        raise InputError("axis must be a nonzero 3-vector")
    seed = seed_from_env()
    outputs = sphere_report(axis, seed)
    report = _report("sphere-demo", {"axis": axis.tolist(), "seed": seed}, outputs,
                     {"tolerance": args.tolerance})
    _emit(_dump(report), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = seed_from_env()
    names = args.check or None
    if names:
        unknown = [n for n in names if n not in verify.CHECKS]
        if unknown:
            raise InputError(f"unknown checks: {', '.join(unknown)}")
    records = verify.run_checks(seed, names, args.inject_fault)
    failed = [r["name"] for r in records if not r["passed"]]
    report = _report("verify", {"seed": seed, "inject_fault": args.inject_fault},
                     {"passed": not failed, "failed": failed, "checks": records},
                     {"count": len(records)})
    _emit(_dump(report), args.out)
    if failed:
        print("failed invariants: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=int, default=None, help="loop / orbit sample count")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for point grids")
    common.add_argument("--tolerance", type=float, default=grassmann.MAX_RESIDUAL,
                        help="largest accepted distance of a degree from its integer")
    common.add_argument("--flip-orientation", action="store_true", help="negate the orientation convention")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="maslov", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="Maslov index of a loop of Lagrangian planes")
    p.add_argument("loop_file")
    p.add_argument("--connection", help="connection spec (JSON text or @file)")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("qbeta", parents=[common], help="Q_beta over a set of base points (CSV)")
    p.add_argument("--action", required=True, help="action spec (JSON text or @file)")
    p.add_argument("--connection", help="connection spec (JSON text or @file)")
    p.add_argument("--points", required=True, help="points file: JSON array or one point per line")
    p.set_defaults(func=cmd_qbeta)

    p = sub.add_parser("sphere-demo", parents=[common], help="report on the frame bundle of S^2")
    p.add_argument("--axis", type=float, nargs=3, default=[0.0, 0.0, 1.0])
    p.set_defaults(func=cmd_sphere_demo)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--check", action="append", help="run only this check (repeatable)")
    p.add_argument("--inject-fault", choices=sorted(verify.FAULTS), default=None,
                   help="deliberately break a component to confirm the suite catches it")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    if not 0 < args.tolerance <= grassmann.MAX_RESIDUAL:
        parser.error(f"--tolerance must lie in (0, {grassmann.MAX_RESIDUAL}]")
    try:
        with conventions.use_conventions(orientation=-1 if args.flip_orientation else 1):
            return args.func(args)
    except (UndersampledLoop, AmbiguousDegree) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, UndersampledLoop):
            print("hint: supply a loop file with more samples", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (InputError, MaslovError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
