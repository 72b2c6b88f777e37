"""Command-line front end for the contracted-kernel toolbox.

One process per command, selected with --command: run the acceptance
suites with a machine-readable report, rebuild the radial-profile table
(CSV plus an optional PNG rendering next to it), tabulate contracted
kernels on log-spaced grids, fit radial samples against a power/log
basis, classify asymptotic smoothness from samples, and print the
order-versus-smoothness table.

All commands are deterministic given flags and seed; repeated runs
produce byte-identical output. Exit codes: 0 success, 1 verification
failure, 2 usage error, 3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .acceptance import report_payload, run_all
from .asymptotics import (ExpansionBasis, RadialSamples, classify_smoothness,
                          detect_log_term, feynman_table, fit_expansion)
from .contraction import (DiagonalKernelParams, InsufficientSamplesError,
                          contracted_coulomb_2d_closed,
                          contracted_coulomb_mollified, diag_kernel_closed,
                          log_singular_term, smooth_overlap_term)
from .kernels import KernelSpec
from .quadrature import QuadConfig
from .report import (FIG1_HEADER, FIG1_POINTS, FIG1_R_MAX, FIG1_R_MIN,
                     fig1_rows, figure_sibling_path, format_csv, format_value,
                     render_fig1_png)

COMMANDS = ("verify", "fig1", "contract", "fit", "classify", "table")
QUANTITIES = ("coulomb2d", "mollified", "diag-kernel", "log-singular",
              "smooth-overlap")

# kernel variants with a contracted closed form in scope; yukawa has none
_VARIANT_QUANTITY = {
    "coulomb": "coulomb2d",
    "gaussian_bump": "mollified",
    "k12_leading": "diag-kernel",
    "test_gaussian": "smooth-overlap",
}

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3

_DEFAULTS = {
    "command": None,
    "beta": 1000.0,
    "r_min": FIG1_R_MIN,
    "r_max": FIG1_R_MAX,
    "points": FIG1_POINTS,
    "seed": 20260822,
    "tol_rel": 1e-10,
    "tol_abs": 1e-12,
    "out": None,
    "format": None,         # resolved per command
    "include_slow": False,
    "c12": 1.0,
    "kernel": None,
    "quantity": None,
    "input": None,
    "no_figure": False,
}

_COERCE = {
    "command": str, "beta": float, "r_min": float, "r_max": float,
    "points": int, "seed": int, "tol_rel": float, "tol_abs": float,
    "out": str, "format": str, "include_slow": bool, "c12": float,
    "kernel": str, "quantity": str, "input": str, "no_figure": bool,
}


class UsageError(ValueError):
    """Bad flags, config file, or input data; maps to exit code 2."""


class ConvergenceError(RuntimeError):
    """A numeric routine missed its tolerance; maps to exit code 3."""


@dataclass(frozen=True)
class RunConfig:
    """Run parameters after flag > config file > default merging."""

    command: str
    tolerances: QuadConfig
    seed: int
    output_path: Optional[str]
    format: Optional[str]
    include_slow: bool
    beta: float
    r_min: float
    r_max: float
    points: int
    c12: float
    kernel: Optional[KernelSpec]
    quantity: Optional[str]
    input_path: Optional[str]
    no_figure: bool

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in (None, "csv", "json"):
            raise UsageError("format must be csv or json")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must fit in 64 unsigned bits")
        if self.quantity is not None and self.quantity not in QUANTITIES:
            raise UsageError(f"unknown quantity {self.quantity!r}")
        if self.output_path is not None:
            parent = os.path.dirname(os.path.abspath(self.output_path))
            if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
                raise UsageError(f"output path {self.output_path!r} is not writable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neardiag",
        description="Verification suites, radial tables, and asymptotic "
                    "fits for contracted Gaussian-pair kernels.")
    add = parser.add_argument
    add("--command", choices=COMMANDS, default=None,
        help="what to run (required here or in --config)")
    add("--beta", type=float, default=None, help="mollifier width parameter")
    add("--r-min", type=float, default=None, help="grid lower edge")
    add("--r-max", type=float, default=None, help="grid upper edge")
    add("--points", type=int, default=None, help="grid size")
    add("--seed", type=int, default=None, help="seed for the sampling checks")
    add("--tol-rel", type=float, default=None,
        help="quadrature relative tolerance for computational commands")
    add("--tol-abs", type=float, default=None,
        help="quadrature absolute tolerance for computational commands")
    add("--out", default=None,
        help="output file (default: stdout; fig1 defaults to fig1.csv)")
    add("--format", choices=("csv", "json"), default=None,
        help="output format where a command supports both")
    add("--include-slow", action="store_true", default=None,
        help="also run the sampling checks under verify")
    add("--c12", type=float, default=None,
        help="coefficient of the quartic-decay pair kernel")
    add("--kernel", default=None,
        help="kernel spec, inline JSON or a path to a JSON file")
    add("--quantity", choices=QUANTITIES, default=None,
        help="contracted quantity override for --command contract")
    add("--input", default=None, help="input CSV of r,value for fit/classify")
    add("--no-figure", action="store_true", default=None,
        help="suppress the PNG rendered next to the fig1 CSV")
    add("--config", default=None, help="JSON file of flag defaults")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise UsageError(f"config {path!r} must be a JSON object of flag defaults")
    unknown = sorted(set(payload) - set(_DEFAULTS))
    if unknown:
        raise UsageError(f"config {path!r} has unknown keys: {unknown}")
    out = {}
    for key, value in payload.items():
        want = _COERCE[key]
        if want is bool:
            if not isinstance(value, bool):
                raise UsageError(f"config key {key!r} must be true or false")
            out[key] = value
            continue
        try:
            out[key] = want(value)
        except (TypeError, ValueError):
            raise UsageError(f"config key {key!r}: cannot read {value!r}") from None
    return out


def _parse_kernel(text_or_path: str) -> KernelSpec:
    text = text_or_path
    if not text.lstrip().startswith("{"):
        try:
            with open(text_or_path) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read kernel spec {text_or_path!r}: {exc}") from exc
    try:
        return KernelSpec.from_json(text)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad kernel spec: {exc}") from exc


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    if args.config is not None:
        merged.update(_load_config_file(args.config))
    for key in _DEFAULTS:
        flag_value = getattr(args, key)
        if flag_value is not None:
            merged[key] = flag_value
    if merged["command"] is None:
        raise UsageError("no command given; pass --command {%s}" % ",".join(COMMANDS))
    try:
        tolerances = QuadConfig(rel_tol=float(merged["tol_rel"]),
                                abs_tol=float(merged["tol_abs"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    kernel = _parse_kernel(merged["kernel"]) if merged["kernel"] is not None else None
    return RunConfig(command=merged["command"], tolerances=tolerances,
                     seed=int(merged["seed"]), output_path=merged["out"],
                     format=merged["format"], include_slow=bool(merged["include_slow"]),
                     beta=float(merged["beta"]), r_min=float(merged["r_min"]),
                     r_max=float(merged["r_max"]), points=int(merged["points"]),
                     c12=float(merged["c12"]), kernel=kernel,
                     quantity=merged["quantity"], input_path=merged["input"],
                     no_figure=bool(merged["no_figure"]))


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit_text(cfg: RunConfig, text: str, path: Optional[str] = None) -> None:
    path = path if path is not None else cfg.output_path
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path!r}: {exc}") from exc


def cmd_verify(cfg: RunConfig) -> int:
    # Check thresholds and internal quadrature tolerances stay pinned to
    # the published criteria: loosening --tol-rel must never loosen what
    # "pass" means, so those flags are not forwarded here.
    results = run_all(include_slow=cfg.include_slow,
                      progress=lambda r: print(r.line(), file=sys.stderr, flush=True),
                      seed=cfg.seed)
    payload = report_payload(results)
    _emit_text(cfg, _json_text(payload))
    return EXIT_OK if payload["failed"] == 0 else EXIT_CHECK_FAILED


def _check_grid(cfg: RunConfig) -> None:
    if not 0 < cfg.r_min < cfg.r_max:
        raise UsageError("need 0 < r-min < r-max")
    if cfg.points < 2:
        raise UsageError("need at least 2 grid points")


def cmd_fig1(cfg: RunConfig) -> int:
    _check_grid(cfg)
    out = cfg.output_path if cfg.output_path is not None else "fig1.csv"
    rows = fig1_rows(c12=cfg.c12, cfg=cfg.tolerances, r_min=cfg.r_min,
                     r_max=cfg.r_max, points=cfg.points)
    for row in rows:
        # taylor columns are nan below their validity floor by contract;
        # every other column must be finite
        if any(not math.isfinite(v) for v in row[:5]):
            raise ConvergenceError(f"non-finite table value at r={row[0]!r}")
    _emit_text(cfg, format_csv(FIG1_HEADER, rows), path=out)
    if not cfg.no_figure:
        render_fig1_png(rows, figure_sibling_path(out))
    return EXIT_OK


def cmd_contract(cfg: RunConfig) -> int:
    quantity = cfg.quantity
    if quantity is None:
        if cfg.kernel is None:
            raise UsageError("contract needs --kernel or --quantity")
        variant = cfg.kernel.variant
        if variant not in _VARIANT_QUANTITY:
            raise UsageError(
                f"kernel variant {variant!r} has no contracted closed form here")
        quantity = _VARIANT_QUANTITY[variant]
    _check_grid(cfg)

    # the kernel being contracted carries its own parameters when given;
    # flags fill the gaps
    beta, c12, center = cfg.beta, cfg.c12, np.zeros(3)
    if cfg.kernel is not None:
        if cfg.kernel.beta is not None:
            beta = float(cfg.kernel.beta)
        if cfg.kernel.c12 is not None:
            c12 = float(cfg.kernel.c12)
        if cfg.kernel.center is not None:
            center = np.asarray(cfg.kernel.center, dtype=float)
    if quantity == "mollified" and not beta > 1:
        raise UsageError("mollified contraction needs beta > 1")
    if quantity == "diag-kernel" and not beta > 0:
        raise UsageError("diag-kernel needs beta > 0")
    if quantity == "smooth-overlap" and center.shape != (3,):
        raise UsageError("smooth-overlap needs a 3-component center")

    radii = np.geomspace(cfg.r_min, cfg.r_max, cfg.points)
    rows = []
    for x in radii:
        x = float(x)
        if quantity == "coulomb2d":
            value = contracted_coulomb_2d_closed(x)
        elif quantity == "mollified":
            res = contracted_coulomb_mollified(x, beta, cfg.tolerances)
            if not res.converged:
                raise ConvergenceError(f"mollified contraction stalled at d={x!r}")
            value = res.value
        elif quantity == "diag-kernel":
            res = diag_kernel_closed(
                DiagonalKernelParams(r=x, beta=beta, c12=c12), cfg.tolerances)
            if not res.converged:
                raise ConvergenceError(f"diag-kernel quadrature stalled at r={x!r}")
            value = res.value
        elif quantity == "log-singular":
            value = log_singular_term(x, c12)
        else:
            value = smooth_overlap_term(np.array([x, 0.0, 0.0]), center)
        rows.append((x, value))

    fmt = cfg.format if cfg.format is not None else "csv"
    if fmt == "csv":
        _emit_text(cfg, format_csv(("x", "value"), rows))
        return EXIT_OK
    payload = {"quantity": quantity,
               "grid": {"r_min": cfg.r_min, "r_max": cfg.r_max,
                        "points": cfg.points, "spacing": "log"},
               "rows": [[x, v] for x, v in rows]}
    if quantity in ("mollified", "diag-kernel"):
        payload["beta"] = beta
    if quantity in ("diag-kernel", "log-singular"):
        payload["c12"] = c12
    if quantity == "smooth-overlap":
        payload["center"] = list(center)
    _emit_text(cfg, _json_text(payload))
    return EXIT_OK


def _read_radial_csv(path: Optional[str]) -> RadialSamples:
    """Parse an r,value table; one optional header line, >= 8 data rows."""
    if path is None:
        raise UsageError("this command needs --input with a CSV of r,value rows")
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path!r}: {exc}") from exc
    triples = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        fields = text.split(",")
        if len(fields) != 2:
            raise UsageError(
                f"{path}:{lineno}: expected 'r,value', got {len(fields)} fields")
        try:
            r, v = float(fields[0]), float(fields[1])
        except ValueError:
            if lineno == 1:
                continue    # header row
            raise UsageError(f"{path}:{lineno}: not numeric: {raw!r}") from None
        triples.append((lineno, r, v))
    if len(triples) < 8:
        raise UsageError(f"{path}: need at least 8 data rows, found {len(triples)}")
    if triples[0][1] <= 0:
        raise UsageError(f"{path}:{triples[0][0]}: radii must be positive")
    for (_, r_prev, _), (lineno, r, _) in zip(triples, triples[1:]):
        if r <= r_prev:
            raise UsageError(f"{path}:{lineno}: radii must be strictly increasing")
    pts = tuple((r, v) for _, r, v in triples)
    return RadialSamples(points=pts, window=(pts[0][0], pts[-1][0]))


def cmd_fit(cfg: RunConfig) -> int:
    samples = _read_radial_csv(cfg.input_path)
    try:
        has_log, _ = detect_log_term(samples)
        terms = ((0.0, 1), (0.0, 0), (1.0, 0), (2.0, 0)) if has_log \
            else ((0.0, 0), (1.0, 0), (2.0, 0))
        basis = ExpansionBasis(terms=terms)
        fit = fit_expansion(samples, basis)
    except ValueError as exc:
        raise ConvergenceError(str(exc)) from exc
    payload = {"window": [samples.window[0], samples.window[1]],
               "basis": [[e, k] for e, k in basis.terms],
               "log_term_detected": has_log,
               "coefficients": list(fit.coefficients),
               "residual_rms": fit.residual_rms,
               "condition_number": fit.condition_number}
    fmt = cfg.format if cfg.format is not None else "json"
    if fmt == "json":
        _emit_text(cfg, _json_text(payload))
    else:
        rows = [(e, float(k), c) for (e, k), c in zip(basis.terms, fit.coefficients)]
        _emit_text(cfg, format_csv(("exponent", "log_power", "coefficient"), rows))
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    samples = _read_radial_csv(cfg.input_path)
    try:
        cls = classify_smoothness(samples)
    except ValueError as exc:
        raise ConvergenceError(str(exc)) from exc
    payload = {"window": [samples.window[0], samples.window[1]],
               "points": len(samples.points),
               "p": cls.p, "leading_exponent": cls.leading_exponent,
               "has_log": cls.has_log}
    fmt = cfg.format if cfg.format is not None else "json"
    if fmt == "json":
        _emit_text(cfg, _json_text(payload))
    else:
        rows = [(cls.p, cls.leading_exponent, 1.0 if cls.has_log else 0.0)]
        _emit_text(cfg, format_csv(("p", "leading_exponent", "has_log"), rows))
    return EXIT_OK


def cmd_table(cfg: RunConfig) -> int:
    entries = feynman_table()
    fmt = cfg.format if cfg.format is not None else "csv"
    if fmt == "csv":
        lines = ["order,variant,p"]
        lines.extend(f"{e.order},{e.variant},{format_value(e.p)}" for e in entries)
        _emit_text(cfg, "\n".join(lines) + "\n")
    else:
        payload = [{"order": e.order, "variant": e.variant, "p": e.p}
                   for e in entries]
        _emit_text(cfg, _json_text(payload))
    return EXIT_OK


_HANDLERS = {"verify": cmd_verify, "fig1": cmd_fig1, "contract": cmd_contract,
             "fit": cmd_fit, "classify": cmd_classify, "table": cmd_table}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse printed its own message (bad flag or --help)
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = resolve_config(args)
        return _HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, InsufficientSamplesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
