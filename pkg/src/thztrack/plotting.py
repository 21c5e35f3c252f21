"""Figures from a records CSV written by ``thztrack run``.

Run as ``thztrack-plot results/records.csv --out figures/``. Two figures are
produced, each with one panel per algorithm: seed-averaged deafness per
timeslot and probability of successful AoA estimation per timeslot, one bar
group per timeslot and one bar per base station.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metrics import Algorithm, mean_deafness, read_csv, success_probability  # noqa: E402

TITLES = {
    Algorithm.FCT: "FCT",
    Algorithm.NO_COOP: "Proposed, no cooperation",
    Algorithm.COOP: "Proposed, cooperation",
}

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": ":",
    "savefig.dpi": 200,
    "savefig.bbox": "tight",
}


def _panel_size(n_panels: int, width: float = 3.5):
    golden = (math.sqrt(5) - 1) / 2
    return width * n_panels, width * golden


def _bars(ax, table: dict, algorithm: Algorithm, ylabel: str, ylim):
    keys = [k for k in table if Algorithm(k[0]) is algorithm]
    bs_ids = sorted({k[1] for k in keys})
    slots = sorted({k[2] for k in keys})
    width = 0.8 / max(len(bs_ids), 1)
    for j, bs in enumerate(bs_ids):
        y = [table.get((algorithm, bs, t), np.nan) for t in slots]
        ax.bar(np.array(slots) + (j - (len(bs_ids) - 1) / 2) * width, y, width, label=f"BS {bs}")
    ax.set_title(TITLES[algorithm])
    ax.set_xlabel("timeslot")
    ax.set_ylabel(ylabel)
    ax.set_ylim(*ylim)
    ax.set_xticks(slots[::2] if len(slots) > 12 else slots)


def plot_records(records, out_dir, prefix: str = "") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    algorithms = [a for a in Algorithm if any(r.algorithm is a for r in records)]
    deaf = mean_deafness(records)
    prob = {k: 100 * v for k, v in success_probability(records).items()}
    written = []
    with plt.rc_context(STYLE):
        for name, table, label, ylim in (
            ("deafness", deaf, "mean deafness (%)", (0, 100)),
            ("success", prob, "P(successful AoA) (%)", (0, 105)),
        ):
            fig, axes = plt.subplots(1, len(algorithms), figsize=_panel_size(len(algorithms)),
                                     squeeze=False, sharey=True, layout="constrained")
            for ax, alg in zip(axes[0], algorithms):
                _bars(ax, table, alg, label, ylim)
            for ax in axes[0][1:]:
                ax.set_ylabel("")
            handles, labels = axes[0][0].get_legend_handles_labels()
            fig.legend(handles, labels, loc="outside lower center", ncols=len(labels))
            path = out_dir / f"{prefix}{name}_per_timeslot.png"
            fig.savefig(path)
            plt.close(fig)
            written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="thztrack-plot", description=__doc__.splitlines()[0])
    parser.add_argument("records", type=Path, help="records CSV from `thztrack run`")
    parser.add_argument("--out", type=Path, default=None, help="figure directory (default: next to the CSV)")
    args = parser.parse_args(argv)
    try:
        with open(args.records, newline="") as fh:
            records = read_csv(fh)
    except OSError as exc:
        print(f"error: cannot read {args.records}: {exc.strerror}", file=sys.stderr)
        return 1
    out = args.out or args.records.parent
    for path in plot_records(records, out, prefix=f"{args.records.stem}_"):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
