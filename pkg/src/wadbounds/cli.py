"""Command-line front end: estimate / infer / simulate / oracle workflows.

All outputs are plain CSV and JSON, written deterministically (fixed float
repr, sorted JSON keys, no timestamps), so identical inputs give
byte-identical artifacts.

Exit codes: 0 success, 1 usage or configuration error, 2 data validation
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BandwidthRateWarning,
    DimensionMismatch,
    ParseError,
    RowIntervalViolation,
    SingularRenormalization,
    TooFewRows,
    WadboundsError,
)
from .estimator import EstimatorConfig, SetEstimate, estimate_set, prepare_tables
from .inference import BootstrapConfig, one_sided_confidence_set
from .kernels import build_kernel, required_order, verify_moments
from .model import IntervalSample, KernelSpec, make_direction_grid, validate_sample
from .simulation import risk_experiment, true_set_oracle

_DEFAULTS = {
    "h": 0.5,
    "htilde": None,  # defaults to h
    "kernel": "gaussian",
    "grid_m": 128,
    "renormalize": False,
    "b": 200,
    "alpha": 0.05,
    "multiplier": "std_normal",
    "seed": 0,
    # simulate-only keys
    "n_values": "250,500,1000",
    "c_values": "0.1,0.5,1.0",
    "h_values": "0.4,0.5,0.6,0.7,0.8",
    "replications": 500,
    "oracle_draws": 1_000_000,
    "e_max": 0.2,
    "jobs": 1,
    # oracle-only
    "c": 1.0,
}

_BOOL_KEYS = {"renormalize"}
_INT_KEYS = {"grid_m", "b", "seed", "replications", "oracle_draws", "jobs"}
_FLOAT_KEYS = {"h", "htilde", "alpha", "e_max", "c"}


def read_config_file(path: str) -> dict:
    """Flat `key = value` configuration, '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        if key not in _DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val.strip()
    return values


def _coerce(key: str, val):
    if val is None or not isinstance(val, str):
        return val
    if key in _BOOL_KEYS:
        return val.lower() in ("1", "true", "yes", "on")
    if key in _INT_KEYS:
        return int(val)
    if key in _FLOAT_KEYS:
        return float(val)
    return val


def resolve_settings(args) -> dict:
    settings = dict(_DEFAULTS)
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    settings = {k: _coerce(k, v) for k, v in settings.items()}
    if settings["htilde"] is None:
        settings["htilde"] = settings["h"]
    return settings


def ingest_csv(path: str) -> IntervalSample:
    """Read `y_lower,y_upper,z1,...,zL` rows into a validated sample."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(1, "empty file") from None
            header = [c.strip() for c in header]
            if header[:2] != ["y_lower", "y_upper"] or len(header) < 3:
                raise ParseError(1, "header must be y_lower,y_upper,z1,...")
            ell = len(header) - 2
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2 + ell:
                    raise ParseError(lineno, f"expected {2 + ell} fields, got {len(row)}")
                try:
                    vals = [float(v) for v in row]
                except ValueError:
                    raise ParseError(lineno, "non-numeric field") from None
                if vals[0] > vals[1]:
                    raise RowIntervalViolation(lineno)
                rows.append((vals[0], vals[1], vals[2:]))
    except OSError as exc:
        raise ParseError(0, str(exc)) from None
    return validate_sample(rows)


def _kernel_spec(settings, ell: int) -> KernelSpec:
    family = settings["kernel"]
    order = required_order(ell) if family == "higher_order_gaussian" else 2
    return KernelSpec(family, order, settings["h"], settings["htilde"])


def _write(path: Path, text: str):
    path.write_text(text)


def _fmt(x: float) -> str:
    return repr(float(x))


def _support_csv(est: SetEstimate) -> str:
    grid = est.raw_support.grid
    lines = []
    if grid.ell == 2:
        lines.append("angle," + ",".join(f"p{j + 1}" for j in range(grid.ell)) + ",raw_value,hull_value")
    else:
        lines.append(",".join(f"p{j + 1}" for j in range(grid.ell)) + ",raw_value,hull_value")
    for m, p in enumerate(grid.directions):
        cells = []
        if grid.ell == 2:
            cells.append(_fmt(np.arctan2(p[1], p[0])))
        cells.extend(_fmt(v) for v in p)
        cells.append(_fmt(est.raw_support.values[m]))
        cells.append(_fmt(est.hull.support.values[m]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _hull_csv(est: SetEstimate) -> str:
    ell = est.raw_support.grid.ell
    header = ",".join(f"theta{j + 1}" for j in range(ell))
    vertices = est.hull.vertices
    if vertices is None:
        # no ordered vertex list above the plane; emit the touching points
        vertices = np.unique(np.round(est.hull.extreme_points, 12), axis=0)
    lines = [header]
    for v in np.atleast_2d(vertices):
        lines.append(",".join(_fmt(x) for x in np.atleast_1d(v)))
    return "\n".join(lines) + "\n"


def _bounds_csv(est: SetEstimate) -> str:
    lines = ["coordinate,lower,upper"]
    for j in range(est.raw_support.grid.ell):
        lo, hi = est.coordinate_bounds(j)
        lines.append(f"{j + 1},{_fmt(lo)},{_fmt(hi)}")
    return "\n".join(lines) + "\n"


def _meta_json(settings, ell: int, rate_flags, extra=None) -> str:
    K = build_kernel(settings["kernel"], ell, required_order(ell) if settings["kernel"] == "higher_order_gaussian" else None)
    report = verify_moments(K)
    meta = {
        "version": __version__,
        "seed": settings["seed"],
        "kernel": {
            "family": settings["kernel"],
            "order": K.order,
            "h": settings["h"],
            "htilde": settings["htilde"],
        },
        "grid_M": settings["grid_m"],
        "rate_flags": list(rate_flags),
        "moment_report": {
            "integral": report.integral,
            "order": report.order,
            "passed": report.passed,
        },
    }
    if extra:
        meta.update(extra)
    return json.dumps(meta, sort_keys=True, indent=2) + "\n"


def _estimate_common(args, settings):
    sample = ingest_csv(args.input)
    grid = make_direction_grid(sample.ell, settings["grid_m"])
    spec = _kernel_spec(settings, sample.ell)
    config = EstimatorConfig(kernel=spec, grid=grid, renormalize=settings["renormalize"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BandwidthRateWarning)
        tables = prepare_tables(sample, config)
    est = estimate_set(sample, config, tables)
    return sample, config, tables, est


def run_estimate(args) -> int:
    settings = resolve_settings(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    sample, config, tables, est = _estimate_common(args, settings)
    _write(out / "support.csv", _support_csv(est))
    _write(out / "hull.csv", _hull_csv(est))
    _write(out / "bounds.csv", _bounds_csv(est))
    _write(out / "meta.json", _meta_json(settings, sample.ell, tables.rate_flags))
    return 0


def _confidence_csv(conf, grid) -> str:
    import io

    ell = grid.ell
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    pcols = [f"p{j + 1}" for j in range(ell)]
    writer.writerow(["record", "index", *pcols, "value", "lower", "upper"])
    blank_p = [""] * ell
    writer.writerow(["radius", "", *blank_p, _fmt(conf.expansion_radius), "", ""])
    for m, p in enumerate(grid.directions):
        writer.writerow(
            ["expanded_support", m, *[_fmt(v) for v in p], _fmt(conf.expanded_set.support.values[m]), "", ""]
        )
    for j, ((lo, hi), rj) in enumerate(zip(conf.coordinate_intervals, conf.coordinate_radii)):
        writer.writerow(["coordinate_interval", j + 1, *blank_p, "", _fmt(lo), _fmt(hi)])
        writer.writerow(["coordinate_radius", j + 1, *blank_p, _fmt(rj), "", ""])
    return buf.getvalue()


def run_infer(args) -> int:
    settings = resolve_settings(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    sample, config, tables, est = _estimate_common(args, settings)
    bconfig = BootstrapConfig(
        n_draws=settings["b"],
        multiplier_law=settings["multiplier"],
        alpha=settings["alpha"],
        seed=settings["seed"],
    )
    conf = one_sided_confidence_set(sample, config, bconfig, tables)
    _write(out / "support.csv", _support_csv(est))
    _write(out / "hull.csv", _hull_csv(est))
    _write(out / "bounds.csv", _bounds_csv(est))
    _write(out / "confidence.csv", _confidence_csv(conf, config.grid))
    _write(
        out / "meta.json",
        _meta_json(
            settings,
            sample.ell,
            tables.rate_flags,
            extra={"bootstrap": {"B": settings["b"], "alpha": settings["alpha"], "multiplier": settings["multiplier"]}},
        ),
    )
    return 0


def _parse_list(text, cast):
    return [cast(v) for v in str(text).split(",") if v.strip()]


def run_simulate(args) -> int:
    settings = resolve_settings(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    grid = make_direction_grid(2, settings["grid_m"])
    table = risk_experiment(
        n_values=_parse_list(settings["n_values"], int),
        c_values=_parse_list(settings["c_values"], float),
        h_values=_parse_list(settings["h_values"], float),
        replications=settings["replications"],
        grid=grid,
        kernel_family=settings["kernel"],
        seed=settings["seed"],
        oracle_draws=settings["oracle_draws"],
        e_max=settings["e_max"],
        n_jobs=settings["jobs"],
    )
    _write(out / "risk_table.csv", table.to_csv())
    _write(out / "risk_table.json", table.to_json() + "\n")
    return 0


def run_oracle(args) -> int:
    settings = resolve_settings(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    grid = make_direction_grid(2, settings["grid_m"])
    hull = true_set_oracle(
        settings["c"], grid, settings["oracle_draws"], seed=settings["seed"], e_max=settings["e_max"]
    )
    est = SetEstimate(hull.support, hull)
    _write(out / "support.csv", _support_csv(est))
    _write(out / "hull.csv", _hull_csv(est))
    _write(out / "bounds.csv", _bounds_csv(est))
    _write(out / "meta.json", _meta_json(settings, 2, []))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wadbounds",
        description="Identified sets of weighted average derivatives under interval censoring.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input):
        if needs_input:
            p.add_argument("input", help="CSV file with header y_lower,y_upper,z1,...")
        p.add_argument("-o", "--output", required=True, help="output directory")
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--h", type=float, dest="h")
        p.add_argument("--htilde", type=float, dest="htilde")
        p.add_argument("--kernel", choices=["gaussian", "higher_order_gaussian"])
        p.add_argument("--grid-m", type=int, dest="grid_m")
        p.add_argument("--seed", type=int, dest="seed")

    p_est = sub.add_parser("estimate", help="support function, hull, and coordinate bounds")
    common(p_est, True)
    p_est.add_argument("--renormalize", action="store_const", const=True, default=None)

    p_inf = sub.add_parser("infer", help="estimate plus bootstrap confidence sets")
    common(p_inf, True)
    p_inf.add_argument("--renormalize", action="store_const", const=True, default=None)
    p_inf.add_argument("--b", type=int, dest="b")
    p_inf.add_argument("--alpha", type=float, dest="alpha")
    p_inf.add_argument("--multiplier", choices=["std_normal", "rademacher"])

    p_sim = sub.add_parser("simulate", help="Hausdorff-risk Monte Carlo tables")
    common(p_sim, False)
    p_sim.add_argument("--n-values", dest="n_values")
    p_sim.add_argument("--c-values", dest="c_values")
    p_sim.add_argument("--h-values", dest="h_values")
    p_sim.add_argument("--replications", type=int, dest="replications")
    p_sim.add_argument("--oracle-draws", type=int, dest="oracle_draws")
    p_sim.add_argument("--e-max", type=float, dest="e_max")
    p_sim.add_argument("--jobs", type=int, dest="jobs")

    p_orc = sub.add_parser("oracle", help="population identified set of the simulation design")
    common(p_orc, False)
    p_orc.add_argument("--c", type=float, dest="c")
    p_orc.add_argument("--oracle-draws", type=int, dest="oracle_draws")
    p_orc.add_argument("--e-max", type=float, dest="e_max")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    handlers = {
        "estimate": run_estimate,
        "infer": run_infer,
        "simulate": run_simulate,
        "oracle": run_oracle,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, RowIntervalViolation, DimensionMismatch, TooFewRows) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SingularRenormalization as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, WadboundsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
