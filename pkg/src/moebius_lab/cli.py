"""Command-line interface.

Commands: analyze, verify, sweep, energy, catalog, export.  Reports are
deterministic key-sorted JSON under the schema tag ``moebius-lab/1``; floats
are emitted with their shortest round-trip decimal (Python ``repr``), so
identical invocations are byte-identical.  Exit codes: 0 success, 1 verify
classifier disagreement, 2 usage / parse / grid errors, 3 math-domain
failures.
"""

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, frames, invariants, lifts, surfaces
from .config import DEFAULT
from .errors import MathDomainError, MoebiusLabError, UsageError

SCHEMA = "moebius-lab/1"


# -- serialization helpers ---------------------------------------------------


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    return obj


def emit_json(report: dict) -> str:
    return json.dumps(_jsonify(report), sort_keys=True, indent=2) + "\n"


def _write_file(path: str, content: str):
    # build first, write once: no partial files on error
    with open(path, "w") as handle:
        handle.write(content)


def _csv_string(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(float(row[c])) for c in columns])
    return buf.getvalue()


# -- argument plumbing --------------------------------------------------------


def _parse_point(text):
    try:
        u_str, v_str = text.split(",")
        return float(u_str), float(v_str)
    except ValueError as exc:
        raise UsageError(f"--at expects 'u,v', got {text!r}") from exc


def _parse_grid(text):
    try:
        w_str, h_str = text.lower().split("x")
        w, h = int(w_str), int(h_str)
    except ValueError as exc:
        raise UsageError(f"--grid expects 'WxH', got {text!r}") from exc
    return w, h


def _parse_sweep(text):
    key, _, rng = text.partition("=")
    try:
        start, stop, count = rng.split(":")
        return key.strip(), float(start), float(stop), int(count)
    except ValueError as exc:
        raise UsageError(f"--sweep expects 'key=start:stop:count', got {text!r}") from exc


def _tolerances(args):
    tol = DEFAULT
    if getattr(args, "tol", None) is not None:
        tol = tol.with_overrides(willmore=args.tol)
    return tol


def _common(parser, grid=True, point=False):
    parser.add_argument("--surface", required=True, help="chart spec, e.g. product-torus:a=0.8")
    parser.add_argument("--mu", default="constant", help="zero | constant | constant- | a+bi | meromorphic:c")
    parser.add_argument("--tol", type=float, default=None, help="override the Willmore classification tolerance")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
    parser.add_argument("--json", dest="json_path", default=None, help="also write the JSON report here")
    parser.add_argument("--csv", dest="csv_path", default=None, help="write the CSV table here")
    if grid:
        parser.add_argument("--grid", default="32x32", help="grid size WxH")
        parser.add_argument("--lambda", dest="lambda_count", type=int, default=16, help="unit-circle sample count")
    if point:
        parser.add_argument("--at", default="0.3,0.7", help="evaluation point u,v")


def _pmap(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- commands -----------------------------------------------------------------


def _analyze_report(args) -> dict:
    chart = surfaces.catalog_get(args.surface)
    u, v = _parse_point(args.at)
    tol = _tolerances(args)
    mu_spec = lifts.MuSpec.parse(args.mu)
    data = invariants.compute_invariants(chart, u, v, tol=tol)
    lift = lifts.build_lift(data, mu_spec, tol)
    flags = lifts.classify(data, lift, tol)
    structure = frames.structure_residuals(data)
    c20, c11 = invariants.gauss_map_conformality(data)
    return {
        "schema": SCHEMA,
        "command": "analyze",
        "version": __version__,
        "surface": args.surface,
        "point": {"u": u, "v": v},
        "mu": lift.mu_desc,
        "invariants": {
            "s": data.s.value,
            "kappa_norm2": data.kappa_norm2.value.real,
            "theta": lift.theta.value,
            "rho": lift.rho.value,
            "LL": lift.LL,
            "willmore_residual_norm": flags.diagnostics["willmore_residual_norm"],
            "energy_density": 4.0 * data.kappa_norm2.value.real,
            "conformal_factor": lift.conformal_factor,
        },
        "flags": {
            "willmore": flags.willmore,
            "s_willmore": flags.s_willmore,
            "isotropic": flags.isotropic,
            "s_isotropic": flags.s_isotropic,
            "conformal_lift": flags.conformal_lift,
            "umbilic": flags.umbilic,
            "dual_degenerate": flags.dual_degenerate,
        },
        "diagnostics": {
            "structure": structure,
            "parallel_defect": flags.diagnostics["parallel_defect"],
            "theta_wedge_delta": abs(lift.theta.value - lift.theta_wedge),
            "rho_wedge_delta": abs(lift.rho.value - lift.rho_wedge),
            "gauss_map_conformality": {"quadratic": abs(c20), "metric": c11.real},
        },
        "tolerances": tol.as_dict(),
    }


def cmd_analyze(args) -> int:
    report = _analyze_report(args)
    text = emit_json(report)
    sys.stdout.write(text)
    if args.json_path:
        _write_file(args.json_path, text)
    return 0


def _sweep_rows(args, tol):
    chart = surfaces.catalog_get(args.surface)
    width, height = _parse_grid(args.grid)
    if width < 5 or height < 5:
        raise UsageError(f"grid too small for verification: {width}x{height} (need >= 5x5)")
    mu_spec = lifts.MuSpec.parse(args.mu)
    field = frames.frame_field(chart, mu_spec, width, height, tol=tol)
    lams = frames.lambda_samples(args.lambda_count)

    def one(lam):
        au, av = frames.alpha_lambda(field.alpha_prime, lam)
        sup, amax = frames.flatness_residual(au, av, field.hu, field.hv, field.periodic)
        offset = 0 if field.periodic else 1
        return {
            "lambda_re": float(lam.real),
            "lambda_im": float(lam.imag),
            "u": float(field.us[amax[0] + offset]),
            "v": float(field.vs[amax[1] + offset]),
            "residual": sup,
        }

    rows = _pmap(one, list(lams), args.jobs)
    return field, rows


def cmd_verify(args) -> int:
    tol = _tolerances(args)
    chart = surfaces.catalog_get(args.surface)
    width, height = _parse_grid(args.grid)
    if width < 5 or height < 5:
        raise UsageError(f"grid too small for verification: {width}x{height} (need >= 5x5)")
    mu_spec = lifts.MuSpec.parse(args.mu)
    result = frames.verify_surface(
        chart, mu_spec, width, height, lambda_count=args.lambda_count, tol=tol
    )
    report = {
        "schema": SCHEMA,
        "command": "verify",
        "version": __version__,
        "surface": args.surface,
        "mu": mu_spec.describe(),
        "grid": {"width": width, "height": height},
        "lambda_count": args.lambda_count,
        "classifiers": {
            "willmore_by_residual": result.willmore_by_residual,
            "willmore_by_harmonicity": result.willmore_by_harmonicity,
            "willmore_by_flatness": result.willmore_by_flatness,
            "agree": result.classifiers_agree,
        },
        "sups": {
            "residual": result.residual_sup,
            "harmonicity": result.harmonicity_sup,
            "structure": result.structure_sup,
        },
        "flatness": {
            "floor": result.family.floor,
            "threshold": result.family.threshold,
            "table": result.family.rows,
        },
        "tolerances": tol.as_dict(),
    }
    text = emit_json(report)
    sys.stdout.write(text)
    if args.json_path:
        _write_file(args.json_path, text)
    if args.csv_path:
        _write_file(
            args.csv_path,
            _csv_string(result.family.rows, ["u", "v", "lambda_re", "lambda_im", "residual"]),
        )
    if not result.classifiers_agree:
        offending = [
            row for row in result.family.rows if row["residual"] > result.family.threshold
        ]
        sys.stderr.write(
            "classifier disagreement: "
            f"residual={result.willmore_by_residual} "
            f"harmonicity={result.willmore_by_harmonicity} "
            f"flatness={result.willmore_by_flatness}; offending lambda cells: "
            + json.dumps(_jsonify(offending))
            + "\n"
        )
        return 1
    return 0


def cmd_sweep(args) -> int:
    tol = _tolerances(args)
    field, rows = _sweep_rows(args, tol)
    report = {
        "schema": SCHEMA,
        "command": "sweep",
        "version": __version__,
        "surface": args.surface,
        "mu": field.mu_desc,
        "grid": args.grid,
        "table": rows,
        "tolerances": tol.as_dict(),
    }
    text = emit_json(report)
    sys.stdout.write(text)
    if args.json_path:
        _write_file(args.json_path, text)
    if args.csv_path:
        _write_file(args.csv_path, _csv_string(rows, ["u", "v", "lambda_re", "lambda_im", "residual"]))
    return 0


def cmd_energy(args) -> int:
    tol = _tolerances(args)
    width, height = _parse_grid(args.grid)
    if args.sweep:
        key, start, stop, count = _parse_sweep(args.sweep)
        base = args.surface.partition(":")[0]
        values = np.linspace(start, stop, count)

        def one(value):
            chart = surfaces.catalog_get(f"{base}:{key}={float(value)!r}")
            return {key: float(value), "energy": invariants.willmore_energy(chart, width, height, tol=tol)}

        rows = _pmap(one, list(values), args.jobs)
        energies = [row["energy"] for row in rows]
        best = int(np.argmin(energies))
        argmin = {key: rows[best][key], "energy": energies[best]}
        if 0 < best < len(rows) - 1:
            # parabola through the three points around the discrete minimum
            x = np.array([rows[best - 1][key], rows[best][key], rows[best + 1][key]])
            y = np.array(energies[best - 1 : best + 2])
            denom = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2])
            a_coef = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / denom
            b_coef = (
                x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2])
            ) / denom
            if a_coef > 0:
                argmin = {key: float(-b_coef / (2 * a_coef)), "energy": None}
        report = {
            "schema": SCHEMA,
            "command": "energy",
            "version": __version__,
            "surface": args.surface,
            "grid": args.grid,
            "sweep": args.sweep,
            "table": rows,
            "argmin": argmin,
        }
        csv_rows, csv_cols = rows, [key, "energy"]
    else:
        chart = surfaces.catalog_get(args.surface)
        energy = invariants.willmore_energy(chart, width, height, tol=tol)
        report = {
            "schema": SCHEMA,
            "command": "energy",
            "version": __version__,
            "surface": args.surface,
            "grid": args.grid,
            "energy": energy,
        }
        csv_rows, csv_cols = [{"energy": energy}], ["energy"]
    text = emit_json(report)
    sys.stdout.write(text)
    if args.json_path:
        _write_file(args.json_path, text)
    if args.csv_path:
        _write_file(args.csv_path, _csv_string(csv_rows, csv_cols))
    return 0


def cmd_catalog(args) -> int:
    entries = []
    for name in surfaces.catalog_names():
        chart = surfaces.catalog_get(name if name != "product-torus" else "product-torus:a=0.8")
        entries.append(
            {
                "name": name,
                "n": chart.n,
                "periodic": chart.periods is not None,
                "params": sorted(chart.params),
            }
        )
    report = {"schema": SCHEMA, "command": "catalog", "version": __version__, "surfaces": entries}
    text = emit_json(report)
    sys.stdout.write(text)
    if getattr(args, "json_path", None):
        _write_file(args.json_path, text)
    return 0


def cmd_export(args) -> int:
    tol = _tolerances(args)
    analysis = _analyze_report(args)
    field, rows = _sweep_rows(args, tol)
    width, height = _parse_grid(args.grid)
    chart = surfaces.catalog_get(args.surface)
    report = {
        "schema": SCHEMA,
        "command": "export",
        "version": __version__,
        "analysis": analysis,
        "lambda_table": rows,
        "energy": invariants.willmore_energy(chart, width, height, tol=tol),
        "tolerances": tol.as_dict(),
    }
    text = emit_json(report)
    sys.stdout.write(text)
    if args.json_path:
        _write_file(args.json_path, text)
    if args.csv_path:
        _write_file(args.csv_path, _csv_string(rows, ["u", "v", "lambda_re", "lambda_im", "residual"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moebius-lab",
        description="Moebius-invariant surface analysis and flat-family verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full invariant report at one point")
    _common(p, grid=False, point=True)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("verify", help="three-classifier equivalence suite on a grid")
    _common(p, grid=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("sweep", help="flatness residual per unit-circle sample")
    _common(p, grid=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("energy", help="Willmore energy by quadrature")
    _common(p, grid=True)
    p.add_argument("--sweep", default=None, help="parameter sweep key=start:stop:count")
    p.set_defaults(fn=cmd_energy)

    p = sub.add_parser("catalog", help="list available surface charts")
    p.add_argument("--json", dest="json_path", default=None)
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("export", help="write analysis + lambda sweep to JSON/CSV files")
    _common(p, grid=True, point=True)
    p.set_defaults(fn=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except MathDomainError as exc:
        sys.stderr.write(f"math-domain error: {exc}\n")
        return 3
    except MoebiusLabError as exc:  # safety net for library errors
        sys.stderr.write(f"error: {exc}\n")
        return 3


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
