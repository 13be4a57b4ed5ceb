"""Learning-curve plots rendered as hand-assembled SVG text.

Runs are grouped by mode label; each group draws a mean polyline over
the seeds plus a translucent min-max band. No plotting library is
involved, so the output depends on nothing but this file.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from vtrl.errors import ContractError
from vtrl.harness.analysis import Curve, _run_label, load_metrics

WIDTH, HEIGHT = 720, 440
MARGIN_LEFT, MARGIN_RIGHT = 80, 24
MARGIN_TOP, MARGIN_BOTTOM = 28, 56

PALETTE = ("#1f6fb2", "#d95f02", "#2a9d4e", "#9467bd",
           "#c22f4f", "#7f7f0e", "#17becf", "#8c564b")


def _collect(run_dirs, metric_key: str) -> dict[str, list[Curve]]:
    groups: dict[str, list[Curve]] = {}
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        records = load_metrics(run_dir / "metrics.jsonl")
        try:
            curve = Curve.from_records(records, key=metric_key)
        except ContractError as exc:
            raise ContractError(
                f"run {run_dir} has no {metric_key!r} records") from exc
        groups.setdefault(_run_label(run_dir), []).append(curve)
    if not groups:
        raise ContractError("no runs to plot")
    return groups


def _band(curves: list[Curve]):
    """Common-grid (steps, mean, low, high) across one group's seeds."""
    common = curves[0].steps
    for c in curves[1:]:
        common = np.intersect1d(common, c.steps)
    if common.size == 0:
        raise ContractError("runs in one group share no evaluation steps")
    rows = []
    for c in curves:
        index = {int(s): v for s, v in zip(c.steps, c.values)}
        rows.append([index[int(s)] for s in common])
    stacked = np.asarray(rows)
    return common, stacked.mean(axis=0), stacked.min(axis=0), stacked.max(axis=0)


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    return np.linspace(lo, hi, n)


def _fmt(x: float) -> str:
    return f"{x:g}"


def plot_curves(run_dirs, metric_key: str, out_path) -> Path:
    """Write an SVG learning-curve figure and return its path."""
    groups = _collect(run_dirs, metric_key)
    bands = {label: _band(curves) for label, curves in sorted(groups.items())}

    all_steps = np.concatenate([b[0] for b in bands.values()])
    all_low = np.concatenate([b[2] for b in bands.values()])
    all_high = np.concatenate([b[3] for b in bands.values()])
    x_lo, x_hi = float(all_steps.min()), float(all_steps.max())
    y_lo, y_hi = float(all_low.min()), float(all_high.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]

    axis_y = MARGIN_TOP + plot_h
    parts.append(f'<line x1="{MARGIN_LEFT}" y1="{axis_y}" '
                 f'x2="{MARGIN_LEFT + plot_w}" y2="{axis_y}" '
                 f'stroke="#333333" stroke-width="1"/>')
    parts.append(f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" '
                 f'x2="{MARGIN_LEFT}" y2="{axis_y}" '
                 f'stroke="#333333" stroke-width="1"/>')

    for tick in _ticks(x_lo, x_hi):
        x = px(tick)
        parts.append(f'<line x1="{x:.2f}" y1="{axis_y}" x2="{x:.2f}" '
                     f'y2="{axis_y + 5}" stroke="#333333" stroke-width="1"/>')
        parts.append(f'<text x="{x:.2f}" y="{axis_y + 20}" font-size="12" '
                     f'text-anchor="middle" fill="#333333">'
                     f'{escape(_fmt(tick))}</text>')
    for tick in _ticks(y_lo, y_hi):
        y = py(tick)
        parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.2f}" '
                     f'x2="{MARGIN_LEFT}" y2="{y:.2f}" '
                     f'stroke="#333333" stroke-width="1"/>')
        parts.append(f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" '
                     f'font-size="12" text-anchor="end" fill="#333333">'
                     f'{escape(_fmt(tick))}</text>')

    parts.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" '
                 f'y="{HEIGHT - 14}" font-size="13" text-anchor="middle" '
                 f'fill="#333333">env_steps</text>')
    parts.append(f'<text x="18" y="{MARGIN_TOP + plot_h / 2:.2f}" '
                 f'font-size="13" text-anchor="middle" fill="#333333" '
                 f'transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2:.2f})">'
                 f'{escape(metric_key)}</text>')

    legend_y = MARGIN_TOP + 6
    for i, (label, (steps, mean, low, high)) in enumerate(bands.items()):
        color = PALETTE[i % len(PALETTE)]
        band_points = (
            [f"{px(s):.2f},{py(v):.2f}" for s, v in zip(steps, high)]
            + [f"{px(s):.2f},{py(v):.2f}" for s, v in zip(steps[::-1], low[::-1])]
        )
        parts.append(f'<polygon points="{" ".join(band_points)}" '
                     f'fill="{color}" fill-opacity="0.18" stroke="none"/>')
        mean_points = " ".join(
            f"{px(s):.2f},{py(v):.2f}" for s, v in zip(steps, mean))
        parts.append(f'<polyline points="{mean_points}" fill="none" '
                     f'stroke="{color}" stroke-width="2"/>')
        lx = MARGIN_LEFT + plot_w - 170
        ly = legend_y + 18 * i
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly + 4}" font-size="12" '
                     f'fill="#333333">{escape(label)}</text>')

    parts.append("</svg>")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(parts) + "\n")
    return out_path
