"""Figure rendering for sweep outputs.

Kept separate from the numerics so that the library has no hard
matplotlib import; the CLI's report path calls into here when asked to
render figures next to the delimited output.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({
    "font.size": 9,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "figure.figsize": (5.2, 3.4),
    "figure.dpi": 140,
    "savefig.bbox": "tight",
    "lines.linewidth": 1.6,
    "grid.alpha": 0.3,
})


def render_sweep(rows, param, out_dir, stem):
    """One PNG per metric: analytical curves per series, MC markers when
    trial columns are present. Returns the list of written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics = sorted({r["metric"] for r in rows if not r.get("error")})
    written = []
    for metric in metrics:
        sub = [r for r in rows if r["metric"] == metric and not r.get("error")]
        series = sorted({r["series"] for r in sub})
        fig, ax = plt.subplots()
        for name in series:
            pts = [(r["value"], r["analytical"], r.get("mc"), r.get("mc_halfwidth"))
                   for r in sub if r["series"] == name]
            pts.sort(key=lambda p: p[0])
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            line, = ax.plot(xs, ys, label=name)
            mc = [(x, m, hw) for x, _, m, hw in pts
                  if m is not None and not (isinstance(m, float) and math.isnan(m))]
            if mc:
                ax.errorbar([p[0] for p in mc], [p[1] for p in mc],
                            yerr=[p[2] or 0.0 for p in mc], fmt="*",
                            color=line.get_color(), markersize=7,
                            linestyle="none", capsize=2)
        ax.set_xlabel(param)
        ax.set_ylabel(metric)
        ax.grid(True)
        if len(series) > 1:
            ax.legend(ncol=2)
        path = out_dir / f"{stem}_{metric.replace('/', '_')}.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(str(path))
    return written
