"""Static SVG figures (box plots per sparsity level, parameter bar chart).

Written by hand so output bytes depend only on the data; every figure is
accompanied by a tidy CSV of exactly what was drawn.
"""
import csv
from xml.sax.saxutils import escape

import numpy as np

from .objectives import parameter_names

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50

FIGURES = (
    ("learning_rate", "gamma", "Estimated learning rate vs sparsity", "learning rate"),
    ("train_loss", "train_loss", "Training loss vs sparsity", "train loss"),
    ("test_loss", "test_loss", "Test loss vs sparsity", "test loss"),
    ("train_accuracy", "train_acc", "Training accuracy vs sparsity", "train accuracy"),
    ("test_accuracy", "test_acc", "Test accuracy vs sparsity", "test accuracy"),
)


def _n(x):
    return f"{x:.2f}"


def _ticks(lo, hi, count=5):
    if hi == lo:
        hi, lo = hi + 0.5, lo - 0.5
    return lo, hi, np.linspace(lo, hi, count)


class _Canvas:
    def __init__(self, title, ylabel, lo, hi):
        self.lo, self.hi, ticks = _ticks(lo, hi)
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
            f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" '
            f'transform="rotate(-90 16 {HEIGHT / 2})">{escape(ylabel)}</text>',
            f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{HEIGHT - BOTTOM}" stroke="black"/>',
            f'<line x1="{LEFT}" y1="{HEIGHT - BOTTOM}" x2="{WIDTH - RIGHT}" y2="{HEIGHT - BOTTOM}" stroke="black"/>',
        ]
        for t in ticks:
            y = self.y(t)
            self.parts.append(f'<line x1="{LEFT - 4}" y1="{_n(y)}" x2="{LEFT}" y2="{_n(y)}" stroke="black"/>')
            self.parts.append(f'<text x="{LEFT - 6}" y="{_n(y + 4)}" text-anchor="end">{t:.3g}</text>')

    def y(self, v):
        frac = (v - self.lo) / (self.hi - self.lo)
        return HEIGHT - BOTTOM - frac * (HEIGHT - TOP - BOTTOM)

    def slot(self, i, count):
        width = (WIDTH - LEFT - RIGHT) / count
        return LEFT + (i + 0.5) * width, width

    def xlabel(self, x, text, rotate=False):
        y = HEIGHT - BOTTOM + 16
        extra = f' transform="rotate(-45 {_n(x)} {y})"' if rotate else ""
        self.parts.append(f'<text x="{_n(x)}" y="{y}" text-anchor="middle"{extra}>{escape(text)}</text>')

    def add(self, element):
        self.parts.append(element)

    def render(self, xlabel):
        self.parts.append(f'<text x="{(LEFT + WIDTH - RIGHT) / 2}" y="{HEIGHT - 8}" '
                          f'text-anchor="middle">{escape(xlabel)}</text>')
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def box_plot_svg(title, ylabel, rows):
    """``rows``: dicts with keys s, min, q1, median, q3, max (one box each)."""
    finite = [v for r in rows for v in (r["min"], r["max"]) if np.isfinite(v)]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    c = _Canvas(title, ylabel, lo, hi)
    for i, r in enumerate(rows):
        x, w = c.slot(i, len(rows))
        c.xlabel(x, str(r["s"]))
        if not np.isfinite(r["median"]):
            continue
        half = w * 0.3
        c.add(f'<line x1="{_n(x)}" y1="{_n(c.y(r["min"]))}" x2="{_n(x)}" y2="{_n(c.y(r["max"]))}" stroke="black"/>')
        top, bottom = c.y(r["q3"]), c.y(r["q1"])
        c.add(f'<rect x="{_n(x - half)}" y="{_n(top)}" width="{_n(2 * half)}" '
              f'height="{_n(max(bottom - top, 0.5))}" fill="#9ecae1" stroke="black"/>')
        c.add(f'<line x1="{_n(x - half)}" y1="{_n(c.y(r["median"]))}" x2="{_n(x + half)}" '
              f'y2="{_n(c.y(r["median"]))}" stroke="#d62728" stroke-width="2"/>')
    return c.render("sparsity level s")


def bar_chart_svg(title, labels, values):
    lo, hi = min(0.0, min(values)), max(0.0, max(values))
    c = _Canvas(title, "value", lo, hi)
    zero = c.y(0.0)
    c.add(f'<line x1="{LEFT}" y1="{_n(zero)}" x2="{WIDTH - RIGHT}" y2="{_n(zero)}" stroke="#888"/>')
    for i, (label, v) in enumerate(zip(labels, values)):
        x, w = c.slot(i, len(values))
        top = min(zero, c.y(v))
        c.add(f'<rect x="{_n(x - w * 0.35)}" y="{_n(top)}" width="{_n(w * 0.7)}" '
              f'height="{_n(abs(c.y(v) - zero))}" fill="#3182bd"/>')
        c.xlabel(x, label)
    return c.render("parameter")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(v):
    return format(float(v), ".9g")


def emit_plots(records, out_dir, run_index=0):
    """Write the five per-sparsity box plots and one parameter bar chart.

    Only successful sparse records feed the box plots. The bar chart shows the
    ``run_index``-th successful sparse record (file order). Returns the paths
    written.
    """
    from .experiments import aggregate

    sparse = [r for r in records if r.kind == "sparse" and r.ok]
    if not sparse:
        raise ValueError("no successful sparse records to plot")
    summary = aggregate(sparse)
    written = []
    for stem, metric, title, ylabel in FIGURES:
        rows = [{"s": row["s"], **{k: row[f"{metric}_{k}"] for k in ("min", "q1", "median", "q3", "max")},
                 "n": row["n_runs"] - row["n_failed"]} for row in summary]
        svg = out_dir / f"{stem}.svg"
        svg.write_text(box_plot_svg(title, ylabel, rows))
        table = out_dir / f"{stem}.csv"
        _write_csv(table, ["s", "n", "min", "q1", "median", "q3", "max"],
                   [[r["s"], r["n"]] + [_fmt(r[k]) for k in ("min", "q1", "median", "q3", "max")] for r in rows])
        written += [svg, table]

    if not 0 <= run_index < len(sparse):
        raise ValueError(f"run index {run_index} out of range (0..{len(sparse) - 1})")
    run = sparse[run_index]
    names = parameter_names()
    title = (f"Trained parameters, s={run.s}, seeds data={run.data_seed} "
             f"init={run.init_seed} support={run.support_seed}")
    svg = out_dir / "parameters.svg"
    svg.write_text(bar_chart_svg(title, names, list(run.theta)))
    table = out_dir / "parameters.csv"
    _write_csv(table, ["index", "name", "value", "gradient"],
               [[i, n, _fmt(v), _fmt(g)] for i, (n, v, g) in enumerate(zip(names, run.theta, run.grad))])
    written += [svg, table]
    return written
