"""Command-line driver for the certification and verification checks.

Usage:
    growthfx certify-bessel --alpha 0.5 --grid log:1e-6:1e4:2000 --out r.json
    growthfx verify-euclid --n 3 --p 2 --corpus gaussian,ball --out r.json --csv r.csv
    growthfx report-bundle --out-dir bundle/ --jobs 4

Exit status: 0 pass, 1 violations present, 2 configuration error (nothing
written), 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import SCHEMA_VERSION, __version__
from . import certify, euclid
from .errors import ConvergenceError
from .quad import GridSpec
from .specfun import OrderPair

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3
CSV_COLUMNS = ("x_or_mu", "t", "lhs", "rhs", "ratio")
DEFAULTS_ENV = "GROWTHFX_DEFAULTS"
BUNDLE_SCHEMA = "growthfx-bundle/1"


class ConfigError(ValueError):
    """Invalid command, parameter or override."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _grid(v) -> str:
    return str(GridSpec.parse(str(v)))


def _float_list(v) -> list:
    if isinstance(v, str):
        v = [s for s in v.split(",") if s.strip()]
    return [float(x) for x in v]


def _name_list(v) -> list:
    if isinstance(v, str):
        v = [s for s in v.split(",") if s.strip()]
    return [str(x).strip() for x in v]


# parameter types per command; unknown keys are configuration errors
PARAM_TYPES = {
    "certify-bessel": {"alpha": float, "grid": _grid, "tolerance": float},
    "certify-mehler": {"alpha": float, "grid": _grid, "tolerance": float},
    "certify-jacobi": {"alpha": float, "beta": float, "mu_grid": _grid, "t_grid": _grid,
                       "eta_frac": _float_list, "eta": _float_list, "tolerance": float},
    "certify-comparison": {"alpha": float, "beta": float, "t0": float, "mu_grid": _grid,
                           "t_grid": _grid, "eta_frac": _float_list, "eta": _float_list,
                           "slack": float},
    "certify-symspace": {"alpha": float, "beta": float, "eta0_frac": float, "eta0": float,
                         "eta_points": int, "mu_grid": _grid, "t_grid": _grid},
    "verify-euclid": {"n": int, "p": float, "corpus": _name_list, "t_grid": _grid, "slack": float},
    "verify-hyp": {"alpha": float, "beta": float, "p": float, "eta": float, "corpus": _name_list,
                   "t_grid": _grid, "mu_grid": _grid, "slack": float, "agree": float},
}
COMMANDS = tuple(PARAM_TYPES) + ("report-bundle",)


@dataclass
class RunConfig:
    """Resolved configuration of one check: defaults merged with overrides."""

    command: str
    params: dict
    output: dict = field(default_factory=dict)
    defaults_version: str = ""

    def to_dict(self) -> dict:
        return {"command": self.command, "params": self.params,
                "defaults_version": self.defaults_version, "schema_version": SCHEMA_VERSION}


def defaults_path() -> Path | None:
    env = os.environ.get(DEFAULTS_ENV)
    return Path(env) if env else None


def load_defaults(path: str | os.PathLike | None = None) -> dict:
    """Frozen default grids and parameters, or the file named by ``GROWTHFX_DEFAULTS``."""
    path = path or defaults_path()
    try:
        if path is None:
            text = resources.files("growthfx").joinpath("defaults.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read defaults: {exc}") from None
    if "commands" not in data or "version" not in data:
        raise ConfigError("defaults file needs 'version' and 'commands'")
    return data


def resolve(command: str, overrides: dict | None, defaults: dict) -> RunConfig:
    """Merge overrides into the defaults and validate every parameter."""
    if command not in PARAM_TYPES:
        raise ConfigError(f"unknown command {command!r}")
    types = PARAM_TYPES[command]
    merged = dict(defaults["commands"].get(command, {}))
    for k, v in (overrides or {}).items():
        if v is not None:
            merged[k] = v
    params = {}
    for k, v in merged.items():
        if k not in types:
            raise ConfigError(f"{command}: unknown parameter {k!r}")
        try:
            params[k] = types[k](v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{command}: bad value for {k}: {exc}") from None
    cfg = RunConfig(command, dict(sorted(params.items())), defaults_version=defaults["version"])
    _validate(cfg)
    return cfg


def _order(params: dict) -> OrderPair:
    return OrderPair(params["alpha"], params["beta"])


def _etas(params: dict, order: OrderPair) -> list:
    if "eta" in params:
        return params["eta"]
    return [f * order.rho for f in params.get("eta_frac", [0.0])]


def _eta0(params: dict, order: OrderPair) -> float:
    if "eta0" in params:
        return params["eta0"]
    return params["eta0_frac"] * order.rho


def _validate(cfg: RunConfig) -> None:
    p, c = cfg.params, cfg.command
    try:
        if "alpha" in p and not p["alpha"] > -0.5:
            raise ConfigError("alpha must exceed -1/2")
        if "beta" in p:
            order = _order(p)
            if c in ("certify-comparison", "certify-symspace"):
                order.require_classical_range()
            if c in ("certify-jacobi", "certify-comparison"):
                if any(abs(e) > order.rho * (1 + 1e-12) for e in _etas(p, order)):
                    raise ConfigError(f"|eta| must not exceed rho = {order.rho:g}")
            if c == "certify-symspace" and not 0 < _eta0(p, order) < order.rho:
                raise ConfigError(f"eta0 must lie in (0, rho) = (0, {order.rho:g})")
        if c == "certify-comparison":
            t = GridSpec.parse(p["t_grid"])
            if not p["t0"] > 0 or t.min <= 0 or t.max > p["t0"]:
                raise ConfigError("certify-comparison needs t0 > 0 and a t-grid in (0, t0]")
        if c in ("verify-euclid", "verify-hyp"):
            if not 1.0 <= p["p"] <= 2.0:
                raise ConfigError("p must lie in [1, 2]")
            if not p["corpus"]:
                raise ConfigError("empty corpus")
            setting = "euclid" if c == "verify-euclid" else "hyp"
            for name in p["corpus"]:
                certify.corpus_profile(name, setting)
        if c == "verify-euclid":
            euclid.Dimension(p["n"])
        if c == "verify-hyp" and p["p"] < 2.0:
            half = (2.0 / p["p"] - 1.0) * _order(p).rho
            if not abs(p["eta"]) < half:
                raise ConfigError(f"|eta| must be below (2/p - 1) rho = {half:g}")
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{c}: {exc}") from None


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def run_check(cfg: RunConfig) -> certify.CertReport:
    """Execute one resolved check and attach its configuration."""
    p, c = cfg.params, cfg.command
    if c == "certify-bessel":
        rep = certify.certify_bessel_two_sided(p["alpha"], p["grid"], tolerance=p["tolerance"])
    elif c == "certify-mehler":
        rep = certify.certify_mehler_identity(p["alpha"], p["grid"], tolerance=p["tolerance"])
    elif c == "certify-jacobi":
        order = _order(p)
        rep = certify.certify_jacobi_bullets(order, p["mu_grid"], _etas(p, order), p["t_grid"],
                                             tolerance=p["tolerance"])
    elif c == "certify-comparison":
        order = _order(p)
        rep = certify.certify_comparison(order, p["t0"], p["mu_grid"], _etas(p, order),
                                         p["t_grid"], slack=p["slack"])
    elif c == "certify-symspace":
        order = _order(p)
        rep = certify.certify_symspace_min(order, _eta0(p, order), p["mu_grid"], p["t_grid"],
                                           eta_points=p["eta_points"])
    elif c == "verify-euclid":
        corpus = [certify.corpus_profile(n, "euclid") for n in p["corpus"]]
        rep = certify.verify_growth_theorems(corpus, euclid.Dimension(p["n"]), p["p"], p["t_grid"],
                                             slack=p["slack"])
    elif c == "verify-hyp":
        corpus = [certify.corpus_profile(n, "hyp") for n in p["corpus"]]
        rep = certify.verify_growth_theorems(corpus, _order(p), p["p"], p["t_grid"], eta=p["eta"],
                                             mu_grid=p["mu_grid"], slack=p["slack"],
                                             agree=p["agree"])
    else:
        raise ConfigError(f"unknown command {c!r}")
    rep.config = cfg.to_dict()
    return rep


def _check_id(cfg: RunConfig) -> str:
    if cfg.command.startswith("verify-"):
        return f"{cfg.command}.p{cfg.params['p']:g}"
    return cfg.command


def _execute(cfg: RunConfig) -> tuple:
    # worker entry point; returns plain data so it pickles across processes
    try:
        rep = run_check(cfg)
    except ConvergenceError as exc:
        return "error", _check_id(cfg), {"error": str(exc), "estimate": exc.estimate}, []
    return ("pass" if rep.passed else "fail"), rep.check_id, rep.to_dict(), rep.points


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _json_default(obj):
    try:
        import numpy as np
    except ImportError:  # pragma: no cover
        raise TypeError(type(obj).__name__)
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(data: dict) -> str:
    """Canonical JSON text: fixed key order, two-space indent, no NaN literals."""
    return json.dumps(data, indent=2, allow_nan=False, default=_json_default) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(v) -> str:
    if v == "" or v is None:
        return ""
    return repr(float(v))


def _sort_key(row):
    x, t = row[0], row[1]
    return (0.0 if x == "" else float(x), 0.0 if t == "" else float(t))


def points_csv(points: list) -> str:
    """CSV with the fixed header, sorted by the primary sweep variable."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for row in sorted(points, key=_sort_key):
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def ratio_svg(points: list, title: str, width: int = 640, height: int = 400) -> str:
    """Envelope of the ratio (min and max over secondary variables) against
    the primary sweep variable, log-scaled when the variable is positive."""
    pad = 50
    env = {}
    for x, t, _, _, r in points:
        key = t if x == "" else x
        if key == "" or not math.isfinite(r):
            continue
        lo, hi = env.get(key, (r, r))
        env[key] = (min(lo, r), max(hi, r))
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<text x="{pad}" y="20" font-family="sans-serif" font-size="12">{title}</text>\n')
    if len(env) < 2:
        return head + "</svg>\n"
    xs = sorted(env)
    logx = xs[0] > 0
    fx = [math.log10(x) if logx else x for x in xs]
    ys = [v for x in xs for v in env[x]]
    y0, y1 = min(ys), max(ys)
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    x0, x1 = fx[0], fx[-1]

    def sx(u):
        return pad + (u - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    body = [f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
            f'fill="none" stroke="#888"/>']
    for idx, colour in ((0, "#1f77b4"), (1, "#d62728")):
        pts = " ".join(f"{sx(u):.2f},{sy(env[x][idx]):.2f}" for u, x in zip(fx, xs))
        body.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
    axis = "log10 " if logx else ""
    body.append(f'<text x="{pad}" y="{height - 15}" font-family="sans-serif" font-size="11">'
                f'{axis}[{xs[0]:.3g}, {xs[-1]:.3g}]; ratio in [{y0:.4g}, {y1:.4g}]</text>')
    return head + "\n".join(body) + "\n</svg>\n"


def write_outputs(report: dict, points: list, json_path=None, csv_path=None, svg_path=None) -> None:
    if json_path:
        atomic_write(json_path, dumps(report))
    if csv_path:
        atomic_write(csv_path, points_csv(points))
    if svg_path:
        atomic_write(svg_path, ratio_svg(points, report.get("check_id", "")))


def _status_code(status: str) -> int:
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "error": EXIT_CONVERGENCE}[status]


# ---------------------------------------------------------------------------
# bundle
# ---------------------------------------------------------------------------

def bundle_configs(entries: list, defaults: dict) -> list:
    """Resolve a list of ``{"command": ..., "params": {...}}`` entries."""
    if not entries:
        raise ConfigError("empty bundle configuration")
    cfgs = []
    for e in entries:
        if not isinstance(e, dict) or "command" not in e:
            raise ConfigError(f"bundle entry needs a 'command': {e!r}")
        if e["command"] == "report-bundle":
            raise ConfigError("bundles cannot nest")
        extra = set(e) - {"command", "params"}
        if extra:
            raise ConfigError(f"unknown bundle entry keys {sorted(extra)}")
        cfgs.append(resolve(e["command"], e.get("params"), defaults))
    ids = [_check_id(c) for c in cfgs]
    if len(set(ids)) != len(ids):
        raise ConfigError("bundle check ids must be unique")
    return sorted(cfgs, key=_check_id)


def report_bundle(cfgs: list, out_dir, jobs: int = 1) -> tuple:
    """Run every check, write per-check JSON/CSV/SVG and ``bundle.json``.

    Returns ``(exit_status, bundle_dict)``.  Checks are isolated: a failure
    or a convergence error in one is recorded without affecting the others.
    """
    if not cfgs:
        raise ConfigError("empty bundle configuration")
    start = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute, cfgs))
    else:
        results = [_execute(c) for c in cfgs]
    out_dir = Path(out_dir)
    summaries = []
    for cfg, (status, check_id, data, points) in zip(cfgs, results):
        entry = {"check_id": check_id, "status": status, "config": cfg.to_dict()}
        if status == "error":
            entry["error"] = data
            atomic_write(out_dir / f"{check_id}.json", dumps({"schema_version": SCHEMA_VERSION,
                                                              "check_id": check_id, **entry}))
        else:
            write_outputs(data, points, out_dir / f"{check_id}.json", out_dir / f"{check_id}.csv",
                          out_dir / f"{check_id}.svg")
            entry.update({"inf_ratio": data["inf_ratio"], "sup_ratio": data["sup_ratio"],
                          "violations": len(data["violations"]), "runtime_ms": data["runtime_ms"],
                          "files": [f"{check_id}.json", f"{check_id}.csv", f"{check_id}.svg"]})
        summaries.append(entry)
    statuses = [s["status"] for s in summaries]
    bundle = {
        "schema_version": BUNDLE_SCHEMA,
        "report_schema": SCHEMA_VERSION,
        "version": __version__,
        "checks": summaries,
        "pass": all(s == "pass" for s in statuses),
        "runtime_ms": int(round(1000 * (time.perf_counter() - start))),
    }
    atomic_write(out_dir / "bundle.json", dumps(bundle))
    if "error" in statuses:
        code = EXIT_CONVERGENCE
    elif "fail" in statuses:
        code = EXIT_FAIL
    else:
        code = EXIT_PASS
    return code, bundle


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_FLAG_HELP = {
    "alpha": "Jacobi or Bessel order alpha",
    "beta": "Jacobi order beta",
    "n": "Euclidean dimension",
    "p": "exponent p in [1, 2]",
    "t0": "upper end of the t-range",
    "eta": "imaginary part(s) of the spectral parameter",
    "eta_frac": "imaginary parts as fractions of rho (comma list)",
    "eta0": "strip half-width",
    "eta0_frac": "strip half-width as a fraction of rho",
    "eta_points": "number of eta values in the strip",
    "grid": "x-grid, e.g. log:1e-6:1e4:2000",
    "mu_grid": "mu-grid, e.g. log:1e-2:1e2:200",
    "t_grid": "t-grid, e.g. log:1e-2:10:25",
    "corpus": "comma-separated profile names, e.g. gaussian,ball",
    "tolerance": "absolute tolerance of the asserted bound",
    "slack": "slack for the asserted bounds",
    "agree": "relative agreement required of the two L2 routes",
}


def _flag_type(conv):
    # keep raw strings; resolve() applies the typed conversion
    return float if conv is float else int if conv is int else str


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="growthfx", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, types in PARAM_TYPES.items():
        sp = sub.add_parser(name, help=f"run {name}")
        for key, conv in types.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=_flag_type(conv),
                            default=None, help=_FLAG_HELP.get(key))
        sp.add_argument("--out", required=True, help="JSON report path")
        sp.add_argument("--csv", help="CSV point data path")
        sp.add_argument("--svg", help="SVG ratio plot path")
        sp.add_argument("--defaults", help=f"defaults file (overrides ${DEFAULTS_ENV})")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes (bundles only)")
    sb = sub.add_parser("report-bundle", help="run the full default suite")
    sb.add_argument("--out-dir", required=True, help="directory for bundle.json and per-check files")
    sb.add_argument("--config", help="JSON file with a list of {command, params} entries")
    sb.add_argument("--defaults", help=f"defaults file (overrides ${DEFAULTS_ENV})")
    sb.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _bundle_entries(path, defaults: dict) -> list:
    if path is None:
        return defaults.get("bundle", [])
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read bundle config: {exc}") from None
    if isinstance(data, dict):
        data = data.get("checks")
    if not isinstance(data, list):
        raise ConfigError("bundle config must be a list of checks")
    return data


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        defaults = load_defaults(args.defaults)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        if args.command == "report-bundle":
            cfgs = bundle_configs(_bundle_entries(args.config, defaults), defaults)
        else:
            overrides = {k: getattr(args, k) for k in PARAM_TYPES[args.command]}
            cfg = resolve(args.command, overrides, defaults)
    except ConfigError as exc:
        print(f"growthfx: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "report-bundle":
        code, bundle = report_bundle(cfgs, args.out_dir, jobs=args.jobs)
        for s in bundle["checks"]:
            print(f"{s['check_id']:<20} {s['status']}")
        return code

    cfg.output = {"json": args.out, "csv": args.csv, "svg": args.svg}
    status, check_id, data, points = _execute(cfg)
    if status == "error":
        print(f"growthfx: {check_id}: {data['error']}", file=sys.stderr)
        return EXIT_CONVERGENCE
    write_outputs(data, points, args.out, args.csv, args.svg)
    print(f"{check_id}: {status} (inf_ratio={data['inf_ratio']}, sup_ratio={data['sup_ratio']}, "
          f"violations={len(data['violations'])})")
    return _status_code(status)


if __name__ == "__main__":
    sys.exit(main())
