"""Render coverage-experiment CSVs into static figures.

Three figure kinds, one per experiment CSV:

- fig3: coverage vs. satellite elevation, one curve per method column
        (pga / exhaustive / random / bound coverage);
- fig4: coverage vs. deployment ratio, one curve per (building density,
        method) pair;
- fig5: train and test coverage vs. the number of traversed satellite
        positions, test with standard-deviation error bars.

Input CSVs are never modified; output is deterministic for identical
input and spec (fixed style, no timestamps).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = {
    "fig3": ["elevation_deg", "pga_coverage", "exhaustive_coverage",
             "random_coverage", "bound_coverage"],
    "fig4": ["density", "gamma", "optimized_coverage", "random_coverage"],
    "fig5": ["k_train", "train_coverage", "test_coverage_mean",
             "test_coverage_std"],
}

X_LABELS = {
    "fig3": "satellite elevation (deg)",
    "fig4": "RIS deployment ratio",
    "fig5": "satellite positions traversed (K)",
}

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.35,
    "legend.fontsize": 9,
    "savefig.dpi": 120,
}


@dataclass
class PlotSpec:
    input_csv: str
    figure_kind: str  # fig3 | fig4 | fig5
    output_path: str
    title: str = ""
    ylabel: str = "NLoS user coverage"

    def __post_init__(self):
        if self.figure_kind not in REQUIRED_COLUMNS:
            raise ValueError(f"unknown figure kind '{self.figure_kind}'; "
                             f"expected one of {sorted(REQUIRED_COLUMNS)}")


@dataclass
class RenderResult:
    output_path: Path
    legend_labels: list = field(default_factory=list)
    n_rows: int = 0


def read_rows(path, kind):
    """Load and validate the CSV; raises on a missing column or empty data."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in REQUIRED_COLUMNS[kind]:
            if col not in header:
                raise ValueError(
                    f"{kind} input is missing column '{col}' "
                    f"(found: {', '.join(header) if header else 'nothing'})")
        rows = [{k: float(v) for k, v in r.items() if k} for r in reader]
    if not rows:
        raise ValueError(f"{kind} input {path} has a header but no data rows")
    return rows


def _render_fig3(ax, rows):
    rows = sorted(rows, key=lambda r: r["elevation_deg"])
    x = [r["elevation_deg"] for r in rows]
    labels = []
    for col, marker in (("pga_coverage", "o"), ("exhaustive_coverage", "s"),
                        ("random_coverage", "^"), ("bound_coverage", "d")):
        ax.plot(x, [r[col] for r in rows], marker=marker, label=col)
        labels.append(col)
    return labels


def _render_fig4(ax, rows):
    densities = sorted({r["density"] for r in rows})
    labels = []
    for d in densities:
        sub = sorted((r for r in rows if r["density"] == d),
                     key=lambda r: r["gamma"])
        x = [r["gamma"] for r in sub]
        for col, style in (("optimized_coverage", "-o"),
                           ("random_coverage", "--^")):
            label = f"{col}, density {d:g}/km2"
            ax.plot(x, [r[col] for r in sub], style, label=label)
            labels.append(label)
    return labels


def _render_fig5(ax, rows):
    rows = sorted(rows, key=lambda r: r["k_train"])
    x = [r["k_train"] for r in rows]
    ax.plot(x, [r["train_coverage"] for r in rows], "-o",
            label="train_coverage")
    ax.errorbar(x, [r["test_coverage_mean"] for r in rows],
                yerr=[r["test_coverage_std"] for r in rows],
                fmt="--s", capsize=3, label="test_coverage_mean")
    return ["train_coverage", "test_coverage_mean"]


_RENDERERS = {"fig3": _render_fig3, "fig4": _render_fig4, "fig5": _render_fig5}


def render(spec: PlotSpec) -> RenderResult:
    """Render one figure per the spec; returns the drawn legend labels."""
    rows = read_rows(spec.input_csv, spec.figure_kind)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        labels = _RENDERERS[spec.figure_kind](ax, rows)
        ax.set_xlabel(X_LABELS[spec.figure_kind])
        ax.set_ylabel(spec.ylabel)
        ax.set_ylim(-0.02, 1.02)
        if spec.title:
            ax.set_title(spec.title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out, metadata={"Software": "satris-plots"})
        plt.close(fig)
    return RenderResult(output_path=out, legend_labels=labels,
                        n_rows=len(rows))
