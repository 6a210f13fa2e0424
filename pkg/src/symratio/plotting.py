"""PNG figures for the CLI reports. Floats appear here only, for drawing."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .variation import SweepReport  # noqa: E402

# no timestamps or version strings, so reruns are byte-identical
_PNG_METADATA = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def plot_sweep(report: SweepReport, out_dir: Path, stem: str = "sweep") -> list[Path]:
    """``Delta(t)`` and ``g1/f1`` against ``t`` on a log axis; singular points are skipped."""
    rows = [r for r in report.rows if not r.singular]
    ts = [float(r.t) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ts, [float(r.delta) for r in rows], marker="o")
    ax.axvline(float(report.tail_start), color="grey", linestyle=":", linewidth=1)
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("g2/g1 - f2/f1")
    ax.set_title("gap along y = t * y0")
    delta = _save(fig, out_dir / f"{stem}_delta.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ts, [float(r.g1_over_f1) for r in rows], marker="s", color="tab:green")
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("g1/f1")
    ax.set_title("perturbed over unperturbed first determinant")
    ratio = _save(fig, out_dir / f"{stem}_ratio.png")
    return [delta, ratio]


def plot_component_sizes(sizes: Sequence[int], out_dir: Path, stem: str = "exchange") -> Path:
    """Bar chart of exchange-graph component sizes, largest first."""
    ordered = sorted(sizes, reverse=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(ordered)), ordered, color="tab:blue")
    ax.set_xlabel("component (by size)")
    ax.set_ylabel("vertices")
    ax.set_title(f"{len(ordered)} components")
    return _save(fig, out_dir / f"{stem}_components.png")
