"""Learning-curve analysis: milestones, sample efficiency, summaries."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from vtrl.errors import ContractError, ParseError

log = logging.getLogger(__name__)


@dataclass
class Curve:
    """One run's evaluation series: env_steps paired with metric values."""

    steps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.steps = np.asarray(self.steps)
        self.values = np.asarray(self.values, dtype=float)
        if self.steps.shape != self.values.shape or self.steps.ndim != 1:
            raise ContractError(
                f"curve arrays must be equal-length vectors, got "
                f"{self.steps.shape} and {self.values.shape}")
        if self.steps.size == 0:
            raise ContractError("curve is empty")
        if np.any(np.diff(self.steps) < 0):
            raise ContractError("curve steps must be non-decreasing")

    @classmethod
    def from_records(cls, records, key: str = "episode_return") -> "Curve":
        rows = [(r["env_steps"], r[key]) for r in records if key in r]
        if not rows:
            raise ContractError(f"no records carry metric {key!r}")
        steps, values = zip(*rows)
        return cls(np.asarray(steps), np.asarray(values))


def _as_curve(obj) -> Curve:
    if isinstance(obj, Curve):
        return obj
    steps, values = obj
    return Curve(np.asarray(steps), np.asarray(values))


def load_metrics(path) -> list[dict]:
    """Read a metrics JSONL file, skipping terminal status records."""
    path = Path(path)
    records = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            if "status" in record:
                continue
            records.append(record)
    return records


def milestone_value(curve, milestone: int):
    """Metric value at the latest evaluation at or before the milestone.

    Returns None when the milestone precedes the first evaluation.
    """
    curve = _as_curve(curve)
    eligible = np.nonzero(curve.steps <= milestone)[0]
    if eligible.size == 0:
        return None
    return float(curve.values[eligible[-1]])


def sample_efficiency(reference_curve, baseline_curve, milestone_steps: int):
    """Steps the baseline needs to match the reference's milestone score.

    Scans the baseline in step order and returns the first env_steps
    whose value reaches the reference's score at the milestone, or the
    string "unreached" when no evaluation ever does.
    """
    reference = _as_curve(reference_curve)
    baseline = _as_curve(baseline_curve)
    if milestone_steps > reference.steps[-1]:
        raise ContractError(
            f"milestone {milestone_steps} lies beyond the reference "
            f"horizon {int(reference.steps[-1])}")
    score = milestone_value(reference, milestone_steps)
    if score is None:
        raise ContractError(
            f"milestone {milestone_steps} precedes the first reference "
            f"evaluation at {int(reference.steps[0])}")
    for step, value in zip(baseline.steps, baseline.values):
        if value >= score:
            return int(step)
    return "unreached"


@dataclass
class MilestoneStat:
    mean: float
    std: float | None
    count: int

    def render(self) -> str:
        if self.std is None:
            return f"{self.mean:.2f}"
        return f"{self.mean:.2f} ± {self.std:.2f}"


@dataclass
class CellSummary:
    """One experiment cell (mode label) aggregated across seeds."""

    label: str
    run_count: int
    milestones: dict


def _run_label(run_dir: Path) -> str:
    config_path = run_dir / "config.json"
    if config_path.is_file():
        data = json.loads(config_path.read_text())
        return (f"{data['algorithm']}-{data['representation']}"
                f"-{data['modalities']}")
    # plain metrics directories (e.g. synthetic fixtures) group by name
    # with any trailing seed suffix stripped
    name = run_dir.name
    stem, sep, tail = name.rpartition("-seed")
    if sep and tail.isdigit():
        return stem
    return name


def summarize_runs(run_dirs, milestones) -> list[CellSummary]:
    """Per-cell mean and population std of returns at each milestone."""
    milestones = [int(m) for m in milestones]
    cells: dict[str, list[Curve]] = {}
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        metrics_path = run_dir / "metrics.jsonl"
        if not metrics_path.is_file():
            log.warning("skipping %s: no metrics.jsonl", run_dir)
            continue
        records = load_metrics(metrics_path)
        try:
            curve = Curve.from_records(records)
        except ContractError:
            log.warning("skipping %s: no episode_return records", run_dir)
            continue
        cells.setdefault(_run_label(run_dir), []).append(curve)

    summaries = []
    for label in sorted(cells):
        curves = cells[label]
        stats = {}
        for milestone in milestones:
            values = [v for v in (milestone_value(c, milestone) for c in curves)
                      if v is not None]
            if not values:
                stats[milestone] = None
                continue
            std = float(np.std(values)) if len(values) >= 2 else None
            stats[milestone] = MilestoneStat(mean=float(np.mean(values)),
                                             std=std, count=len(values))
        summaries.append(CellSummary(label=label, run_count=len(curves),
                                     milestones=stats))
    return summaries


def render_summary_table(summaries, milestones) -> str:
    """Aligned text table, one row per cell, one column per milestone."""
    milestones = [int(m) for m in milestones]
    header = ["mode", "runs"] + [f"@{m}" for m in milestones]
    rows = [header]
    for cell in summaries:
        row = [cell.label, str(cell.run_count)]
        for m in milestones:
            stat = cell.milestones.get(m)
            row.append("absent" if stat is None else stat.render())
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(col.ljust(w) for col, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_summary_csv(summaries, milestones, path) -> None:
    """Long-format CSV: one row per (cell, milestone)."""
    milestones = [int(m) for m in milestones]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["mode", "milestone", "mean", "std", "runs"])
        for cell in summaries:
            for m in milestones:
                stat = cell.milestones.get(m)
                if stat is None:
                    writer.writerow([cell.label, m, "", "", 0])
                else:
                    writer.writerow([
                        cell.label, m, f"{stat.mean:.6f}",
                        "" if stat.std is None else f"{stat.std:.6f}",
                        stat.count,
                    ])
