"""Deterministic report emission: delimited tables, JSON, and figures.

CSV output is the primary machine-readable artifact: 17 significant
digits, '.' decimal separator, ',' field separator, '\\n' line endings,
so repeated runs are byte-identical across platforms. The radial-profile
report can additionally render a log-log figure as a PNG file next to
the delimited output; the figure is a convenience view and never
replaces the CSV.
"""

from __future__ import annotations

import json
import math
import os
from typing import Iterable, Sequence

import numpy as np

from .contraction import (DiagonalKernelParams, diag_kernel_closed,
                          diag_kernel_limit_sharp, diag_kernel_taylor)
from .quadrature import DEFAULT_CONFIG, QuadConfig

FIG1_HEADER = ("r", "psi_beta1000", "psi_beta2000", "psi_beta3000",
               "psi_inf", "taylor1", "taylor2", "taylor3")
FIG1_BETAS = (1000.0, 2000.0, 3000.0)
FIG1_TAYLOR_BETA = 1000.0
FIG1_R_MIN = 0.05
FIG1_R_MAX = 1.5
FIG1_POINTS = 60


def format_value(x: float) -> str:
    """17-significant-digit decimal rendering; NaN prints as 'nan'."""
    return "%.17g" % x


def format_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path: str, header: Sequence[str],
              rows: Iterable[Sequence[float]]) -> None:
    text = format_csv(header, rows)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path!r}: {exc}") from exc


def write_json(path: str, payload) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write JSON to {path!r}: {exc}") from exc


def fig1_radii(r_min: float = FIG1_R_MIN, r_max: float = FIG1_R_MAX,
               points: int = FIG1_POINTS) -> np.ndarray:
    return np.geomspace(r_min, r_max, points)


def fig1_rows(c12: float = 1.0, cfg: QuadConfig = DEFAULT_CONFIG,
              r_min: float = FIG1_R_MIN, r_max: float = FIG1_R_MAX,
              points: int = FIG1_POINTS) -> list[tuple[float, ...]]:
    """Radial table of the diagonal kernel: finite widths, sharp limit,
    bracket-expansion approximants.

    Taylor columns are NaN below the expansion's validity radius
    3/sqrt(2 beta) instead of silently extrapolating.
    """
    rows = []
    taylor_floor = 3.0 / math.sqrt(2.0 * FIG1_TAYLOR_BETA)
    for r in fig1_radii(r_min, r_max, points):
        row = [float(r)]
        for beta in FIG1_BETAS:
            params = DiagonalKernelParams(r=float(r), beta=beta, c12=c12)
            row.append(diag_kernel_closed(params, cfg).value)
        row.append(diag_kernel_limit_sharp(float(r), c12))
        params_t = DiagonalKernelParams(r=float(r), beta=FIG1_TAYLOR_BETA, c12=c12)
        for order in (1, 2, 3):
            if r < taylor_floor:
                row.append(math.nan)
            else:
                row.append(diag_kernel_taylor(order, params_t, cfg).value)
        rows.append(tuple(row))
    return rows


def figure_sibling_path(csv_path: str) -> str:
    base, _ = os.path.splitext(csv_path)
    return base + ".png"


def render_fig1_png(rows: Sequence[Sequence[float]], png_path: str) -> None:
    """Log-log rendering of the radial table as a PNG next to the CSV."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.asarray(rows, dtype=float)
    r = data[:, 0]
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    styles = {
        "psi_beta1000": dict(color="tab:blue"),
        "psi_beta2000": dict(color="tab:orange"),
        "psi_beta3000": dict(color="tab:green"),
        "psi_inf": dict(color="black", linestyle="--"),
        "taylor1": dict(color="tab:red", linestyle=":"),
        "taylor2": dict(color="tab:purple", linestyle=":"),
        "taylor3": dict(color="tab:brown", linestyle=":"),
    }
    for j, name in enumerate(FIG1_HEADER[1:], start=1):
        col = data[:, j]
        mask = np.isfinite(col) & (col > 0)
        ax.plot(r[mask], col[mask], label=name, **styles[name])
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("r")
    ax.set_ylabel("kernel value")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    try:
        fig.savefig(png_path, dpi=150)
    except OSError as exc:
        raise OSError(f"cannot write figure to {png_path!r}: {exc}") from exc
    finally:
        plt.close(fig)
