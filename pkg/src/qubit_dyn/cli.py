"""Command-line front end: ``qubit-dyn {simulate,timeline,sweep,verify,recipe}``.

Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import io
import itertools
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import _accel, analytics, timeline, verification
from .concurrence import x_c_tilde
from .config import RunConfig
from .errors import ConfigError, QubitDynError
from .propagators import propagate

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

SIMULATE_COLUMNS = ("t", "c_numeric", "c_tilde_numeric", "c_analytic", "rho11", "rho22",
                    "rho33", "rho44", "re_rho23", "im_rho23")
INTERVAL_COLUMNS = ("kind", "t_start", "t_end")
SUMMARY_COLUMNS = ("intervals", "revivals", "dark_fraction", "esd_time")
POINT_COLUMNS = ("model", "a", "chi", "v", "rate_a", "rate_b")


def fmt(x) -> str:
    """12 significant digits, lowercase scientific; empty for missing values."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.11e}"


def csv_line(values) -> str:
    return ",".join(fmt(v) for v in values) + "\n"


# ----------------------------------------------------------------- commands


def simulate_rows(cfg: RunConfig) -> list[tuple]:
    params = cfg.model_params()
    traj = propagate(cfg.initial_state(), params, cfg.integrator())
    ct = x_c_tilde(traj.states)
    ap = cfg.analytic_params()
    if ap is None:
        analytic = [None] * len(traj)
    else:
        analytic = np.maximum(analytics.c_tilde(ap, traj.times * cfg.rate_a), 0.0)
    s = traj.states
    return [(t, max(c, 0.0), c, ca, s[k, 0, 0].real, s[k, 1, 1].real, s[k, 2, 2].real,
             s[k, 3, 3].real, s[k, 1, 2].real, s[k, 1, 2].imag)
            for k, (t, c, ca) in enumerate(zip(traj.times, ct, analytic))]


def cmd_simulate(cfg: RunConfig, out) -> int:
    rows = simulate_rows(cfg)
    out.write(csv_line(SIMULATE_COLUMNS))
    for row in rows:
        out.write(csv_line(row))
    return EXIT_OK


def build_timeline(cfg: RunConfig) -> timeline.EntanglementTimeline:
    horizon = cfg.horizon if cfg.horizon is not None else cfg.t_end
    if horizon <= 0:
        raise ConfigError("timeline needs a positive horizon (or t_end)")
    params = cfg.model_params()
    ap = cfg.analytic_params()
    kind = cfg.evaluator
    if kind == "auto":
        kind = "analytic" if ap is not None else "numeric"
    if kind == "analytic":
        if ap is None:
            raise ConfigError("analytic evaluator needs equal, nonzero rates")
        scale = cfg.rate_a
        f = lambda t: analytics.c_tilde(ap, np.asarray(t) * scale)  # noqa: E731
    else:
        f = timeline.NumericEvaluator(cfg.initial_state(), params)
    rate = params.rate_unit
    grid_n = cfg.grid_n or timeline.default_grid_n(horizon * rate, cfg.v / rate)
    return timeline.extract_timeline(f, horizon, grid_n)


def timeline_summary(tl: timeline.EntanglementTimeline) -> list[str]:
    n_bright = sum(1 for iv in tl.intervals if iv.kind is timeline.Kind.BRIGHT)
    lines = [f"intervals: {len(tl.intervals)} (bright {n_bright}, "
             f"dark {len(tl.intervals) - n_bright}) over horizon {fmt(tl.horizon)}",
             f"revivals: {timeline.revival_count(tl)}",
             f"dark fraction: {fmt(timeline.dark_fraction(tl))}",
             "ESD: none" if tl.esd_time is None else f"ESD at t={fmt(tl.esd_time)}"]
    return lines


def cmd_timeline(cfg: RunConfig, out, summary_out) -> int:
    tl = build_timeline(cfg)
    prefix = "" if summary_out is not out else "# "
    for line in timeline_summary(tl):
        summary_out.write(prefix + line + "\n")
    out.write(csv_line(INTERVAL_COLUMNS))
    for iv in tl.intervals:
        out.write(csv_line((iv.kind.value, iv.t_start, iv.t_end)))
    return EXIT_OK


def worker_count(n_points: int) -> int:
    cap = os.environ.get("QUBIT_DYN_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = min(limit, max(int(cap), 1))
        except ValueError:
            raise ConfigError(f"QUBIT_DYN_THREADS must be an integer, got {cap!r}")
    return max(1, min(limit, n_points))


def expand_sweep(base: RunConfig, axes: dict[str, list]) -> list[RunConfig]:
    names = list(axes)
    points = []
    for combo in itertools.product(*(axes[n] for n in names)):
        points.append(RunConfig.from_mapping({**_as_mapping(base), **dict(zip(names, combo))}))
    return points


def _as_mapping(cfg: RunConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}


def _point_key(cfg: RunConfig) -> tuple:
    return (cfg.model, cfg.a, cfg.chi, cfg.v, cfg.rate_a, cfg.rate_b)


def _sweep_point(cfg: RunConfig, emit: str) -> list[tuple]:
    key = _point_key(cfg)
    if emit == "traces":
        return [key + row for row in simulate_rows(cfg)]
    tl = build_timeline(cfg)
    return [key + (len(tl.intervals), timeline.revival_count(tl),
                   timeline.dark_fraction(tl), tl.esd_time)]


def run_sweep(points: list[RunConfig], emit: str, out) -> int:
    header = POINT_COLUMNS + (SIMULATE_COLUMNS if emit == "traces" else SUMMARY_COLUMNS)
    out.write(csv_line(header))
    with concurrent.futures.ThreadPoolExecutor(worker_count(len(points))) as pool:
        # map() yields in submission order, so output is deterministic.
        for rows in pool.map(lambda c: _sweep_point(c, emit), points):
            for row in rows:
                out.write(csv_line(row))
    return EXIT_OK


def cmd_verify(level: str, out) -> int:
    checks = verification.run(level)
    for check in checks:
        out.write(check.line() + "\n")
    failed = [c for c in checks if not c.passed]
    out.write(f"{len(checks) - len(failed)}/{len(checks)} checks passed "
              f"(level={level}, backend={_accel.backend_name()})\n")
    return EXIT_VERIFY if failed else EXIT_OK


# ------------------------------------------------------------------ recipes


@dataclass(frozen=True)
class Recipe:
    description: str
    base: dict
    axes: dict


PI = math.pi
RECIPES = {
    "fig2a": Recipe("decay, a=0.4: v=0 shows ESD, v=5 bright/dark periods then ESD",
                    {"model": "decay", "a": 0.4, "t_end": 10.0, "dt": 0.002, "sample_every": 5},
                    {"chi": [0.0, PI / 2], "v": [0.0, 5.0]}),
    "fig2b": Recipe("decay, a=0.2: v=0 no ESD, v=5 bright/dark periods",
                    {"model": "decay", "a": 0.2, "t_end": 10.0, "dt": 0.002, "sample_every": 5},
                    {"chi": [0.0, PI / 2], "v": [0.0, 5.0]}),
    # The three decay rates are not given with the figure; these are chosen here.
    "fig3": Recipe("decay, a=0.2, chi=pi/2, v=5: three decay rates (absolute time)",
                   {"model": "decay", "a": 0.2, "chi": PI / 2, "v": 5.0, "t_end": 10.0,
                    "dt": 0.002, "sample_every": 5},
                   {"rate_a,rate_b": [(0.5, 0.5), (1.0, 1.0), (2.0, 2.0)]}),
    "fig4a": Recipe("dephasing, a=0.4: v/Gamma in {0, 4}",
                    {"model": "dephasing", "a": 0.4, "t_end": 5.0, "dt": 0.0025,
                     "sample_every": 4},
                    {"chi": [0.0, PI / 2], "v": [0.0, 4.0]}),
    "fig4b": Recipe("dephasing, a=0.4: v/Gamma in {0, 10}",
                    {"model": "dephasing", "a": 0.4, "t_end": 5.0, "dt": 0.001,
                     "sample_every": 10},
                    {"chi": [0.0, PI / 2], "v": [0.0, 10.0]}),
}


def recipe_points(name: str, overrides: dict | None = None) -> list[RunConfig]:
    try:
        recipe = RECIPES[name]
    except KeyError:
        raise ConfigError(f"unknown recipe {name!r}; choose from {', '.join(RECIPES)}")
    points = []
    names = list(recipe.axes)
    for combo in itertools.product(*(recipe.axes[n] for n in names)):
        values = {**recipe.base, **(overrides or {}), "command": "recipe"}
        for name_group, value in zip(names, combo):
            keys = name_group.split(",")
            values.update(zip(keys, value if len(keys) > 1 else (value,)))
        points.append(RunConfig.from_mapping(values))
    return points


# ---------------------------------------------------------------------- CLI


_FLAG_KEYS = [f.name for f in fields(RunConfig) if f.name != "command"]


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("-c", "--config", help="key = value config file (flags override it)")
    for key in _FLAG_KEYS:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubit-dyn",
        description="Entanglement dynamics of two coupled qubits with local baths.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_config_flags(sub.add_parser("simulate", help="concurrence and populations vs time"))
    _add_config_flags(sub.add_parser("timeline", help="bright/dark intervals and ESD time"))
    sw = sub.add_parser("sweep", help="Cartesian parameter sweep")
    _add_config_flags(sw)
    sw.add_argument("--vary", action="append", default=[], metavar="KEY=V1,V2,...",
                    help="sweep axis; repeat for a Cartesian product")
    sw.add_argument("--emit", choices=("summary", "traces"), default="summary")
    vf = sub.add_parser("verify", help="run the self-check suite")
    vf.add_argument("--level", choices=("quick", "full"), default="quick")
    rc = sub.add_parser("recipe", help="figure-reproduction data sets")
    rc.add_argument("name", help=", ".join(RECIPES))
    rc.add_argument("--method", default=None, choices=("rk4", "exp"))
    rc.add_argument("-o", "--output", default=None)
    return parser


def load_config(args) -> RunConfig:
    text = ""
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    overrides = {k: getattr(args, k) for k in _FLAG_KEYS}
    return RunConfig.from_text(text, **overrides).replace(command=args.command)


def parse_axes(specs: list[str]) -> dict[str, list]:
    axes = {}
    for spec in specs:
        if "=" not in spec:
            raise ConfigError(f"--vary expects KEY=V1,V2,..., got {spec!r}")
        key, values = spec.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _FLAG_KEYS:
            raise ConfigError(f"unknown sweep key {key!r}")
        items = [s.strip() for s in values.split(",") if s.strip()]
        if not items:
            raise ConfigError(f"--vary {key} has no values")
        axes[key] = items
    return axes


class _Output:
    """Stdout or a file opened on demand; files are written only on success."""

    def __init__(self, path):
        self.path = path
        self.buffer = io.StringIO() if path else sys.stdout

    def commit(self):
        if self.path:
            with open(self.path, "w", newline="") as fh:
                fh.write(self.buffer.getvalue())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.level, sys.stdout)
        if args.command == "recipe":
            overrides = {"method": args.method} if args.method else {}
            points = recipe_points(args.name, overrides)
            emit, out_path = "traces", args.output
        else:
            cfg = load_config(args)
            out_path = cfg.output
            if args.command == "sweep":
                points = expand_sweep(cfg, parse_axes(args.vary))
                emit = args.emit
            for c in (points if args.command == "sweep" else [cfg]):
                c.integrator()
    except QubitDynError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = _Output(out_path)
    try:
        if args.command == "simulate":
            code = cmd_simulate(cfg, out.buffer)
        elif args.command == "timeline":
            code = cmd_timeline(cfg, out.buffer, sys.stdout)
        else:
            code = run_sweep(points, emit, out.buffer)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QubitDynError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.commit()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
