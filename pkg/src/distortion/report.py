"""Report emission: deterministic CSV/JSON tables plus companion figures.

Reports never embed timestamps or environment noise: a fixed seed produces
byte-identical files.  Floats print through repr, which round-trips exactly.
Each tabular report gets a rendered figure next to it so runs can be eyeballed
without extra tooling.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return value


def write_csv(path, fieldnames, rows, header_meta=None) -> Path:
    """Rows of dicts -> CSV with '# key=value' provenance comments up top."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for key, value in (header_meta or {}).items():
            fh.write(f"# {key}={_format(value)}\n")
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format(row[k]) for k in fieldnames})
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    return path


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plan_figure(rows, path) -> Path:
    """Depths and length bounds per slot (log scale for the bounds)."""
    fig, ax = _new_axes("witness plan", "slot n", "letters")
    ns = [r["n"] for r in rows]
    ax.plot(ns, [r["k_bound"] for r in rows], "o-", label="length bound k_n")
    ax.plot(ns, [r["depth"] for r in rows], "s--", label="contraction depth")
    ax.plot(ns, [r["core_depth"] for r in rows], "d--", label="core depth")
    ax.set_yscale("log")
    ax.legend()
    return _save(fig, path)


def witness_figure(rows, tolerance, path) -> Path:
    """Sup verification error per emitted word against the tolerance line."""
    fig, ax = _new_axes("witness verification", "slot n", "sup error")
    ns = [r["n"] for r in rows]
    errs = [max(r["sup_err"], 1e-18) for r in rows]
    ax.semilogy(ns, errs, "o-", label="sup error")
    ax.axhline(tolerance, color="red", ls=":", label="tolerance")
    ax.legend()
    return _save(fig, path)


def demo_figure(rows, path) -> Path:
    """Certified length-per-power ratios shrinking along the schedule."""
    fig, ax = _new_axes("distortion ratios", "slot n", "ratio")
    ns = [r["n"] for r in rows]
    ratios = [max(r["ratio"], 1e-18) for r in rows]
    bounds = [r["k_n"] / r["p_n"] for r in rows]
    ax.semilogy(ns, ratios, "o-", label="reduced length / p_n")
    ax.semilogy(ns, bounds, "s--", label="k_n / p_n")
    ax.axhline(0.01, color="red", ls=":", label="0.01")
    ax.legend()
    return _save(fig, path)


def fragment_figure(report, path) -> Path:
    """Per-axis monotonicity margins and the partial-projection residuals."""
    fig, ax = _new_axes("foliation factors", "axis", "min slice slope")
    axes_idx = [m.axis for m in report.margins]
    ax.bar(axes_idx, [m.min_slope for m in report.margins], width=0.6)
    ax.axhline(0.0, color="black", lw=0.8)
    twin = ax.twinx()
    twin.semilogy(axes_idx, [max(e, 1e-18) for e in report.projection_errors],
                  "ro-", label="projection residual")
    twin.set_ylabel("projection residual")
    twin.legend(loc="upper right")
    return _save(fig, path)
