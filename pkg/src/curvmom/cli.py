"""Command-line interface: ``curvmom {catalog,inspect,verify,convergence}``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 numerical or
domain error, 3 input or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

import numpy as np

from curvmom import verify as V
from curvmom.autodiff import chart_point
from curvmom.catalog import chart_names, get_chart, list_charts, sample_points
from curvmom.chart_dsl import ChartDef, evaluate, parse, parse_chart
from curvmom.errors import (
    ChartError,
    DomainError,
    GridError,
    NotOrthogonalSlice,
    SingularChartPoint,
)
from curvmom.geometry import (
    log_volume_gradient,
    metric_from_jet,
    slice_from_jet,
    validate_gaussian_normal,
)

EXIT_PASS, EXIT_FAIL, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2, 3

CHECKS = ("hermiticity", "decomposition", "orthogonality", "curvature", "gn-metric", "all")
LINE_LADDER = (32, 64, 128)
SURFACE_LADDER = (64, 128, 256)
DEFAULT_FULL_GRID = 32


class InputError(Exception):
    """Bad command-line input; reported with exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    command: str
    chart_name: str | None = None
    chart_file: str | None = None
    params: dict = field(default_factory=dict)
    check: str | None = None
    normal: str | None = None
    coord: str | None = None
    at: str | None = None
    grid: str | None = None
    grids: str | None = None
    op: str | None = None
    fd_order: int = 4
    seed: int = 0
    hbar: float = 1.0
    fmt: str = "human"
    out: str | None = None
    timestamps: bool = False
    field_tol: float | None = None


def _parse_param(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise InputError(f"--param expects k=v, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), float(evaluate(parse(v, coords=(), params=()), {}))
    except (ChartError, DomainError) as exc:
        raise InputError(f"bad value for parameter {k!r}: {exc}") from exc


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fmt = "json" if getattr(ns, "json", False) else getattr(ns, "format", None) or "human"
    params = dict(_parse_param(p) for p in (getattr(ns, "param", None) or []))
    return RunConfig(
        command=ns.command,
        chart_name=getattr(ns, "chart", None),
        chart_file=getattr(ns, "file", None),
        params=params,
        check=getattr(ns, "check", None),
        normal=getattr(ns, "normal", None),
        coord=getattr(ns, "coord", None),
        at=getattr(ns, "at", None),
        grid=getattr(ns, "grid", None),
        grids=getattr(ns, "grids", None),
        op=getattr(ns, "op", None),
        fd_order=getattr(ns, "order", 4),
        seed=getattr(ns, "seed", 0),
        hbar=getattr(ns, "hbar", 1.0),
        fmt=fmt,
        out=getattr(ns, "out", None),
        timestamps=getattr(ns, "timestamps", False),
        field_tol=getattr(ns, "field_tol", None),
    )


def load_chart(cfg: RunConfig) -> ChartDef:
    if cfg.chart_file and cfg.chart_name:
        raise InputError("give either --chart or --file, not both")
    if cfg.chart_file:
        try:
            with open(cfg.chart_file, encoding="utf-8") as fh:
                source = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read chart file: {exc}") from exc
        chart = parse_chart(source)
    elif cfg.chart_name:
        if cfg.chart_name not in chart_names():
            raise InputError(f"unknown chart {cfg.chart_name!r}; known: {', '.join(chart_names())}")
        chart = get_chart(cfg.chart_name)
    else:
        raise InputError("a chart is required (--chart NAME or --file PATH)")
    if cfg.params:
        chart = chart.with_params(**cfg.params)
    return chart


def _check_coord(chart: ChartDef, name: str | None, flag: str) -> str | None:
    if name is not None and name not in chart.coord_names:
        raise InputError(f"{flag}: chart {chart.name!r} has no coordinate {name!r}")
    return name


def parse_bindings(chart: ChartDef, text: str | None) -> dict[str, float]:
    """``k=v,k=v`` with constant expressions (``pi/4``, ``R/2``) as values."""
    if not text:
        return {}
    out = {}
    pnames = tuple(chart.param_values)
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise InputError(f"--at expects k=v pairs, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        _check_coord(chart, k, "--at")
        try:
            out[k] = float(evaluate(parse(v, coords=(), params=pnames), chart.param_values))
        except (ChartError, DomainError) as exc:
            raise InputError(f"bad value for {k!r}: {exc}") from exc
    return out


def parse_grid(text: str | None) -> list[int] | None:
    if not text:
        return None
    try:
        sizes = [int(s) for s in text.lower().split("x")]
    except ValueError as exc:
        raise InputError(f"--grid expects AxBxC, got {text!r}") from exc
    if any(n < 8 for n in sizes):
        raise InputError("grid sizes must be >= 8")
    return sizes


def parse_grids(text: str | None) -> tuple[int, ...] | None:
    if not text:
        return None
    try:
        sizes = tuple(int(s) for s in text.split(","))
    except ValueError as exc:
        raise InputError(f"--grids expects n1,n2,..., got {text!r}") from exc
    if any(n < 8 for n in sizes):
        raise InputError("grid sizes must be >= 8")
    return sizes


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float, digits: int) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.{digits}g}"


def to_json(obj) -> str:
    """Key-sorted JSON with 17-significant-digit floats."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _fmt_float(x, 17) if math.isfinite(x) else json.dumps(_fmt_float(x, 17))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {to_json(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _human(x) -> str:
    if isinstance(x, (float, np.floating)):
        return _fmt_float(float(x), 15)
    if isinstance(x, (list, tuple, np.ndarray)):
        return "(" + ", ".join(_human(v) for v in x) + ")"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}={_human(v)}" for k, v in sorted(x.items())) + "}"
    if x is None:
        return "-"
    return str(x)


def report_dicts(reports: Sequence[V.VerificationReport], timestamps: bool) -> list[dict]:
    out = []
    for r in reports:
        d = r.as_dict()
        if timestamps:
            d["timestamp"] = datetime.now(timezone.utc).isoformat()
        out.append(d)
    return out


def render_reports(reports: Sequence[V.VerificationReport], cfg: RunConfig) -> str:
    dicts = report_dicts(reports, cfg.timestamps)
    if cfg.fmt == "json":
        return to_json(dicts[0] if len(dicts) == 1 else dicts) + "\n"
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "chart", "grid", "value", "convergence_order", "tolerance", "verdict"])
        for d in dicts:
            c = d["convergence_order"]
            for res in d["residuals"]:
                w.writerow([d["check"], d["chart"], res["grid"], _fmt_float(res["value"], 17),
                            "" if c is None else _fmt_float(c, 17), _fmt_float(d["tolerance"], 17),
                            d["verdict"]])
        return buf.getvalue()
    lines = []
    for d in dicts:
        cfg_txt = ", ".join(f"{k}={_human(v)}" for k, v in sorted(d["config"].items()))
        lines.append(f"[{d['verdict'].upper()}] {d['check']} on {d['chart']} ({cfg_txt})")
        for res in d["residuals"]:
            lines.append(f"    {res['grid']:<28} {_human(res['value'])}")
        if d["convergence_order"] is not None:
            lines.append(f"    convergence order          {_human(d['convergence_order'])}")
        lines.append(f"    tolerance                  {_human(d['tolerance'])}")
        if "timestamp" in d:
            lines.append(f"    timestamp                  {d['timestamp']}")
    return "\n".join(lines) + "\n"


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_catalog(cfg: RunConfig) -> int:
    entries = list_charts()
    if cfg.fmt == "json":
        text = to_json(entries) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "dimension", "coords", "params", "normal"])
        for e in entries:
            params = ";".join(f"{k}={_fmt_float(v, 17)}" for k, v in e["params"].items())
            w.writerow([e["name"], e["dimension"], ";".join(e["coords"]), params, e["normal"] or ""])
        text = buf.getvalue()
    else:
        rows = []
        for e in entries:
            params = " ".join(f"{k}={_human(v)}" for k, v in e["params"].items()) or "-"
            rows.append(f"{e['name']:<12} dim={e['dimension']} coords=({', '.join(e['coords'])}) "
                        f"params={params} normal={e['normal'] or '-'}")
        text = "\n".join(rows) + "\n"
    _emit(text, cfg)
    return EXIT_PASS


def inspect_point(chart: ChartDef, point: dict[str, float]) -> dict:
    """Pointwise geometry: metric, Lamé coefficients, canonical coefficients, slices."""
    missing = [c for c in chart.coord_names if c not in point]
    if missing:
        raise InputError(f"--at must bind every coordinate; missing {missing}")
    ej = chart_point(chart, point)
    md = metric_from_jet(ej)
    coeff = 0.5 * log_volume_gradient(chart, jet=ej)
    slices = {}
    for name in chart.coord_names:
        try:
            sg = slice_from_jet(chart, ej, name)
        except NotOrthogonalSlice as exc:
            slices[name] = {"error": str(exc)}
            continue
        gn = validate_gaussian_normal(chart, name, [point[c] for c in chart.coord_names])
        slices[name] = {
            "n": sg.n.tolist(),
            "M_sum": float(sg.M_sum),
            "M_avg": float(sg.M_avg),
            "M_vec": sg.M_vec.tolist(),
            "principal_curvatures": sg.principal_curvatures().tolist(),
            "gaussian_normal": gn.verdict,
        }
    return {
        "chart": chart.name,
        "point": {c: point[c] for c in chart.coord_names},
        "x": ej.x.tolist(),
        "metric": md.g.tolist(),
        "sqrt_g": float(md.sqrt_g),
        "lame": None if md.lame is None else md.lame.tolist(),
        "canonical_coefficients": {c: float(v) for c, v in zip(chart.coord_names, coeff)},
        "slices": slices,
    }


def cmd_inspect(cfg: RunConfig) -> int:
    chart = load_chart(cfg)
    info = inspect_point(chart, parse_bindings(chart, cfg.at))
    if cfg.fmt == "json":
        text = to_json(info) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "slice", "value"])
        for c, v in info["canonical_coefficients"].items():
            w.writerow([f"canonical_coefficient[{c}]", "", _fmt_float(v, 17)])
        if info["lame"] is not None:
            for c, v in zip(chart.coord_names, info["lame"]):
                w.writerow([f"lame[{c}]", "", _fmt_float(v, 17)])
        for s, d in info["slices"].items():
            for key in ("M_sum", "M_avg"):
                if key in d:
                    w.writerow([key, s, _fmt_float(d[key], 17)])
        text = buf.getvalue()
    else:
        pt = ", ".join(f"{k}={_human(v)}" for k, v in info["point"].items())
        lines = [f"chart {info['chart']} at ({pt})", f"  x      = {_human(info['x'])}",
                 f"  sqrt_g = {_human(info['sqrt_g'])}",
                 f"  lame   = {_human(info['lame']) if info['lame'] is not None else 'metric not diagonal'}"]
        lines.append("  canonical coefficients 1/2 d ln sqrt(g):")
        for c, v in info["canonical_coefficients"].items():
            lines.append(f"    {c:<8} {_human(v)}")
        for s, d in info["slices"].items():
            if "error" in d:
                lines.append(f"  slice {s}: {d['error']}")
                continue
            lines.append(f"  slice {s} ({d['gaussian_normal']}):")
            lines.append(f"    n      = {_human(d['n'])}")
            lines.append(f"    M_sum  = {_human(d['M_sum'])}")
            lines.append(f"    M_avg  = {_human(d['M_avg'])}")
            lines.append(f"    M_vec  = {_human(d['M_vec'])}")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg)
    return EXIT_PASS


def _orthogonal_normals(chart: ChartDef) -> list[str]:
    pts = sample_points(chart, 16, np.random.default_rng(0))
    ej = chart_point(chart, pts)
    out = []
    for name in chart.coord_names:
        try:
            slice_from_jet(chart, ej, name)
        except NotOrthogonalSlice:
            continue
        out.append(name)
    return out


def _designated_normal(chart: ChartDef, cfg: RunConfig) -> str:
    name = _check_coord(chart, cfg.normal, "--normal") or chart.normal
    if name is None:
        raise InputError(f"chart {chart.name!r} has no designated normal; pass --normal")
    return name


def _pinned(chart: ChartDef, normal: str, cfg: RunConfig) -> float | None:
    at = parse_bindings(chart, cfg.at)
    extra = set(at) - {normal}
    if extra:
        raise InputError(f"--at may only pin the normal coordinate {normal!r} here")
    return at.get(normal)


def run_checks(cfg: RunConfig, check: str) -> list[V.VerificationReport]:
    chart = load_chart(cfg)
    ladder = parse_grids(cfg.grids)
    grid = parse_grid(cfg.grid)
    common = dict(seed=cfg.seed, fd_order=cfg.fd_order, hbar=cfg.hbar)
    reports: list[V.VerificationReport] = []

    def hermiticity():
        lad = ladder or LINE_LADDER
        op = cfg.op
        coords = [cfg.coord] if cfg.coord else list(chart.coord_names)
        _check_coord(chart, cfg.coord, "--coord")
        if op in (None, "canonical"):
            for c in coords:
                reports.append(V.check_hermiticity(chart, "canonical", lad, coord=c, **common))
        if op in (None, "geometric") and not (op is None and cfg.coord):
            normal = _designated_normal(chart, cfg)
            reports.append(V.check_hermiticity(chart, "geometric", ladder or SURFACE_LADDER,
                                               normal=normal, at=_pinned(chart, normal, cfg), **common))
        if op == "full":
            reports.append(V.check_hermiticity(chart, "full", ladder or (16, 32, 64), **common))

    def decomposition(normals):
        if ladder:
            lad = ladder
        elif grid:
            if len(grid) != chart.dim:
                raise InputError(f"--grid needs {chart.dim} sizes for a full grid")
            lad = (tuple(grid),)
        else:
            lad = (DEFAULT_FULL_GRID,)
        for nm in normals:
            reports.append(V.check_decomposition(chart, nm, ladder=lad, field_tolerance=cfg.field_tol, **common))

    def orthogonality():
        normal = _designated_normal(chart, cfg)
        reports.append(V.check_orthogonality(chart, normal, at=_pinned(chart, normal, cfg),
                                             ladder=ladder or SURFACE_LADDER, **common))

    def curvature():
        if any(c == chart.name for c, _ in V.CLOSED_FORMS):
            reports.append(V.check_curvature_closed_forms(chart, seed=cfg.seed))
        reports.append(V.check_curvature_identities(chart, seed=cfg.seed))

    def gn_metric(normals):
        for nm in normals:
            reports.append(V.check_gaussian_normal(chart, nm, seed=cfg.seed))

    if check == "hermiticity":
        hermiticity()
    elif check == "decomposition":
        decomposition([_designated_normal(chart, cfg)])
    elif check == "orthogonality":
        orthogonality()
    elif check == "curvature":
        curvature()
    elif check == "gn-metric":
        gn_metric([_designated_normal(chart, cfg)])
    elif check == "all":
        normal = _designated_normal(chart, cfg)
        curvature()
        gn_metric([normal])
        decomposition(_orthogonal_normals(chart) if cfg.normal is None else [normal])
        orthogonality()
        hermiticity()
    else:
        raise InputError(f"unknown check {check!r}; choose from {', '.join(CHECKS)}")
    return reports


def cmd_verify(cfg: RunConfig) -> int:
    reports = run_checks(cfg, cfg.check)
    _emit(render_reports(reports, cfg), cfg)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def cmd_convergence(cfg: RunConfig) -> int:
    """Grid-ladder table: spacing, residual and segment slope per level."""
    if cfg.check not in ("hermiticity", "decomposition", "orthogonality"):
        raise InputError("convergence supports hermiticity, decomposition and orthogonality")
    if not cfg.grids and cfg.check == "decomposition":
        cfg.grids = "16,32,64"
    if cfg.check == "decomposition" and not cfg.normal:
        cfg.normal = load_chart(cfg).normal
    reports = run_checks(cfg, cfg.check)
    if cfg.fmt != "human":
        _emit(render_reports(reports, cfg), cfg)
    else:
        lines = []
        for r in reports:
            rows = [(g, v) for g, v in r.residuals if "x" in g and not g.startswith("consistency")]
            lines.append(f"{r.check} on {r.chart} ({r.params.get('op', r.params.get('normal'))}):")
            segs = [None] + list(r.details.get("segments", []))
            for (g, v), s in zip(rows, segs):
                lines.append(f"    {g:<28} {_human(v):<24} {_human(s) if s is not None else ''}")
            lines.append(f"    fitted order {_human(r.convergence_order)}  at_floor={r.details.get('at_floor')}  "
                         f"verdict={r.verdict}")
        _emit("\n".join(lines) + "\n", cfg)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="shorthand for --format json")
    p.add_argument("--format", choices=("human", "json", "csv"), default=None)
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")


def _add_chart(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chart", help="catalog chart name")
    p.add_argument("--file", help="chart definition file")
    p.add_argument("--param", action="append", metavar="K=V", help="override a chart parameter")
    p.add_argument("--normal", help="normal coordinate of the slicing")
    p.add_argument("--at", metavar="K=V,...", help="point or pinned coordinate values")


def _add_numeric(p: argparse.ArgumentParser) -> None:
    p.add_argument("--coord", help="coordinate for canonical-momentum checks")
    p.add_argument("--op", choices=("canonical", "geometric", "full"), help="operator for hermiticity")
    p.add_argument("--grid", metavar="AxBxC", help="full grid for single-grid checks")
    p.add_argument("--grids", metavar="N1,N2,...", help="ladder of node counts")
    p.add_argument("--order", type=int, choices=(2, 4), default=4, help="finite-difference order")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--field-tol", type=float, default=None,
                   help="gate decomposition on the exact-reference field residual")
    p.add_argument("--timestamps", action="store_true", help="include run timestamps in reports")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvmom", description="Curvilinear momentum operators and their checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("catalog", help="list built-in charts")
    _add_output(p)

    p = sub.add_parser("inspect", help="geometry at a point")
    _add_chart(p)
    _add_output(p)

    p = sub.add_parser("verify", help="run verification checks")
    p.add_argument("check", choices=CHECKS)
    _add_chart(p)
    _add_numeric(p)
    _add_output(p)

    p = sub.add_parser("convergence", help="convergence table over a grid ladder")
    p.add_argument("check", choices=("hermiticity", "decomposition", "orthogonality"))
    _add_chart(p)
    _add_numeric(p)
    _add_output(p)
    return parser


COMMANDS = {"catalog": cmd_catalog, "inspect": cmd_inspect, "verify": cmd_verify, "convergence": cmd_convergence}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (InputError, ChartError, GridError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularChartPoint, DomainError, NotOrthogonalSlice, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
