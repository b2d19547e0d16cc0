"""Command-line interface: spectra, measures and verification suites.

Exit codes: 0 success, 1 verification or solver failure, 2 usage/config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import DomainError, QSpecError
from .measures import build_measure
from .operator import auto_half_width, eig, exact_spectrum, truncate
from .polyrec import sym_asc_all
from .qcore import DEFAULT_TOL, QParams
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = dict(q=0.5, alpha=1.0, beta=0.25, tol=DEFAULT_TOL, half_width="auto", format="json",
                output="-", seed=0, levels=8, jobs=1, degree=-1, n_max=None, threshold=None)
FLOAT_KEYS = ("q", "alpha", "beta", "tol", "threshold")
INT_KEYS = ("seed", "levels", "jobs", "degree", "n_max")


class ConfigError(QSpecError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: QParams
    tol: float
    half_width: int
    output_format: str
    output_path: str
    seed: int
    levels: int
    jobs: int
    degree: int
    n_max: int | None
    threshold: float | None


def read_config_file(path: str) -> dict:
    """Plain key=value lines; '#' starts a comment; dashes in keys become underscores."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{i}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
        if key == "half_width":
            return "auto" if str(value) == "auto" else int(value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < QSPEC_TOL < config file < command-line flags."""
    merged = dict(DEFAULTS)
    if os.environ.get("QSPEC_TOL"):
        merged["tol"] = os.environ["QSPEC_TOL"]
    if args.config:
        merged.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    c = {k: _coerce(k, v) for k, v in merged.items()}
    if c["format"] not in ("json", "csv"):
        raise ConfigError("format must be json or csv")
    if not (c["tol"] > 0):
        raise ConfigError("tol must be positive")
    if c["levels"] < 1 or c["jobs"] < 1:
        raise ConfigError("levels and jobs must be >= 1")
    params = QParams(c["q"], c["alpha"], c["beta"])
    hw = auto_half_width(params, c["tol"]) if c["half_width"] == "auto" else c["half_width"]
    if hw < 1:
        raise ConfigError("half-width must be >= 1")
    return RunConfig(params, c["tol"], hw, c["format"], c["output"], c["seed"], c["levels"],
                     c["jobs"], c["degree"], c["n_max"], c["threshold"])


# ---------------------------------------------------------------------------
# output

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _flatten(row: dict) -> dict:
    """Split complex values into _re/_im columns and convert numpy scalars."""
    out = {}
    for k, v in row.items():
        if isinstance(v, (complex, np.complexfloating)):
            out[k + "_re"], out[k + "_im"] = float(v.real), float(v.imag)
        elif isinstance(v, (np.floating,)):
            out[k] = float(v)
        elif isinstance(v, (np.integer,)):
            out[k] = int(v)
        else:
            out[k] = v
    return out


def _json(value, indent=0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{inner}"{k}": {_json(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_json(v) for v in value) + "]"
        return "[\n" + ",\n".join(inner + _json(v, indent + 1) for v in value) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _fmt_float(float(value))
    s = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def render(cfg: RunConfig, rows: list, extra: dict | None = None) -> str:
    rows = [_flatten(r) for r in rows]
    if cfg.output_format == "csv":
        keys = []
        for r in rows:
            keys += [k for k in r if k not in keys]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([_fmt_float(v) if isinstance(v, float) else ("" if v is None else v)
                        for v in (r.get(k) for k in keys)])
        return buf.getvalue()
    p = cfg.params
    meta = dict(q=p.q, alpha=p.alpha, beta=p.beta, tol=cfg.tol, half_width=cfg.half_width,
                seed=cfg.seed, tool_version=__version__)
    doc = dict(meta=meta, data=rows)
    if extra:
        doc.update(extra)
    return _json(doc) + "\n"


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands

def cmd_spectrum(cfg: RunConfig) -> int:
    p = cfg.params
    vals = eig(truncate(p, cfg.half_width), vectors=False).eigenvalues
    pos_pred, neg_pred = exact_spectrum(p, cfg.levels)
    pos = np.sort(vals[vals > 0])[::-1]
    neg = np.sort(vals[vals < 0])
    rows = []
    for sign, pred, comp in (("+", pos_pred, pos), ("-", neg_pred, neg)):
        for n, lam in enumerate(pred):
            got = float(comp[n]) if n < comp.size else math.nan
            rows.append(dict(level=n, sign=sign, predicted=float(lam), computed=got,
                             deviation=abs(got - lam)))
    emit(cfg, render(cfg, rows))
    return EXIT_OK


def cmd_measure(cfg: RunConfig) -> int:
    p = cfg.params
    degree = max(cfg.degree, 0)
    mu = build_measure(p, cfg.tol, 2 * degree)
    rows = [dict(l=int(l), x=float(x), weight=float(w), mass=float(m))
            for l, x, w, m in zip(mu.ls, mu.support_x, mu.weights, mu.masses)]
    extra = {"total_mass": mu.total_mass, "mass_sum": float(np.sum(mu.masses))}
    if cfg.degree >= 0:
        G = mu.gram(sym_asc_all(cfg.degree, mu.support_x, p.beta, p.q))
        d = np.sqrt(np.diag(G))
        extra["gram"] = [[float(v) for v in row] for row in G]
        extra["gram_max_offdiag_scaled"] = float(np.max(np.abs(G / np.outer(d, d) - np.eye(d.size))))
    emit(cfg, render(cfg, rows, extra if cfg.output_format == "json" else None))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    results = run_suite(suite, cfg.params, cfg.tol, cfg.seed, cfg.jobs, n_max=cfg.n_max)
    rows, ok = [], True
    for rep, thr in results:
        if cfg.threshold is not None:
            thr = cfg.threshold
        passed = rep.rel_residual < thr
        ok &= passed
        row = rep.as_row()
        row.update(threshold=thr, passed=passed)
        rows.append(row)
    emit(cfg, render(cfg, rows))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--tol", type=float, help="series tolerance (env QSPEC_TOL)")
    common.add_argument("--half-width", dest="half_width", help="truncation N or 'auto'")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--output", help="output path, '-' for stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--levels", type=int, help="spectrum levels to report")
    common.add_argument("--jobs", type=int, help="worker processes for sampled suites")
    common.add_argument("--degree", type=int, help="measure: emit the Gram matrix of h_0..h_degree")
    common.add_argument("--n-max", dest="n_max", type=int, help="dual suite: eigenvalue levels summed")
    common.add_argument("--threshold", type=float, help="verify: override every suite threshold")
    common.add_argument("--config", help="key=value config file; flags take precedence")
    parser = argparse.ArgumentParser(prog="qspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues of the truncated operator")
    sub.add_parser("measure", parents=[common], help="discrete orthogonality measure")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = resolve_config(args)
    except (ConfigError, DomainError) as exc:
        print(f"qspec: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "measure":
            return cmd_measure(cfg)
        return cmd_verify(cfg, args.suite)
    except DomainError as exc:
        print(f"qspec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QSpecError, ArithmeticError) as exc:
        print(f"qspec: failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
