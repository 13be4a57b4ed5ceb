"""Experiment orchestration: configs, runs, analysis, plots, presets."""

from vtrl.harness.analysis import (
    Curve,
    load_metrics,
    milestone_value,
    render_summary_table,
    sample_efficiency,
    summarize_runs,
    write_summary_csv,
)
from vtrl.harness.config import (
    RunConfig,
    config_from_dict,
    parse_config,
    serialize_config,
    write_config,
)
from vtrl.harness.plot import plot_curves
from vtrl.harness.presets import PRESET_NAMES, preset, run_preset
from vtrl.harness.run import (
    RunResult,
    evaluate_policy,
    measure_random_baseline,
    run_experiment,
)
from vtrl.harness.selfcheck import run_gradcheck, run_selfcheck

__all__ = [
    "Curve",
    "PRESET_NAMES",
    "RunConfig",
    "RunResult",
    "config_from_dict",
    "evaluate_policy",
    "load_metrics",
    "measure_random_baseline",
    "milestone_value",
    "parse_config",
    "plot_curves",
    "preset",
    "render_summary_table",
    "run_experiment",
    "run_gradcheck",
    "run_preset",
    "run_selfcheck",
    "sample_efficiency",
    "serialize_config",
    "summarize_runs",
    "write_config",
    "write_summary_csv",
]
