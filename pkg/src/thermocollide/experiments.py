"""Experiment runner: sweeps, CSV datasets, manifests, figures.

Each experiment produces one CSV per plotted series plus a JSON
manifest with the resolved config and per-point status.  CSVs are
byte-deterministic for a fixed config and seed: UTF-8, LF line endings,
'.' decimal separator, 17 significant digits.  Wall-clock information
lives in a separate timing file so the manifest stays reproducible.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .config import ExperimentConfig, apply_overrides, sweep_points
from .cycles import (
    EngineSpec,
    analytic_cycle,
    optimize_particle_dimension,
    simulate_cycle,
    simulate_many_cycles,
    single_ensemble_closed_form,
)
from .trajectories import (
    EnumerationCapError,
    carnot_condition_grid,
    enumerate_distribution,
    most_likely_trajectory_efficiency,
    sample_distribution,
)

MANIFEST_NAME = "manifest.json"
TIMING_NAME = "timing.json"


@dataclass(frozen=True)
class RunResult:
    output_dir: str
    csv_files: tuple[str, ...]
    figure_files: tuple[str, ...]
    n_points: int
    n_failed: int

    @property
    def all_failed(self) -> bool:
        return self.n_points > 0 and self.n_failed == self.n_points


def format_value(value) -> str:
    """CSV cell formatting: full round-trip precision for reals."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def write_csv(path: str, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(format_value(v) for v in row) + "\n")


def _run_guarded(item: tuple) -> tuple:
    name, task = item
    try:
        return ("ok", _WORKERS[name](task))
    except Exception as exc:  # recorded per point, scan continues
        return ("error", f"{type(exc).__name__}: {exc}")


def _pool_map(worker_name: str, tasks: list, jobs: int) -> list:
    """Evaluate tasks, preserving task order regardless of completion order."""
    items = [(worker_name, task) for task in tasks]
    if jobs <= 1 or len(items) <= 1:
        return [_run_guarded(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_guarded, items))


# --- per-point workers (top level for picklability) ---


def _point_fig2(task):
    engine, override = task
    spec = apply_overrides(engine, override)
    result = single_ensemble_closed_form(spec)
    return {
        "omega_1": spec.omega_hot_last,
        "d_S": spec.d_system,
        "work": result.work,
        "efficiency": result.efficiency,
    }


def _point_fig3(task):
    engine, override = task
    spec = apply_overrides(engine, override)
    sim = simulate_cycle(spec)
    return {
        "d_system": spec.d_system,
        "d_bath": spec.d_hot,
        "n_int": sim.n_int,
        "log_dim_total": sim.n_int * math.log(spec.d_hot),
        "work": sim.cycle_report.avg_work,
        "power": sim.cycle_report.avg_work / sim.n_int,
    }


def _point_fig4(task):
    engine, override, d_values = task
    spec = apply_overrides(engine, override)
    report = optimize_particle_dimension(spec, d_values)
    if report.best is None:
        raise RuntimeError("no particle dimension in the scan converged")
    scan_rows = [
        (
            spec.d_system,
            p.d_bath,
            p.n_int,
            p.log_dim_total,
            p.work,
            p.power,
            p.error or "",
        )
        for p in report.points
    ]
    best = report.best
    return {
        "d_system": spec.d_system,
        "d_bath_optimal": best.d_bath,
        "n_int": best.n_int,
        "log_dim_total": best.log_dim_total,
        "work": best.work,
        "power": best.power,
        "scan": scan_rows,
    }


def _point_fig5(task):
    engine, override, cycles = task
    spec = apply_overrides(engine, override)
    report = simulate_many_cycles(spec, cycles)
    rows = [
        (
            spec.d_hot,
            c + 1,
            report.cyclicity[c],
            report.work[c],
            report.integrated_work[c],
            report.efficiency[c],
        )
        for c in range(cycles)
    ]
    return {"d_bath": spec.d_hot, "rows": rows}


def _point_fig6_cell(task):
    engine, n, m, strict, grouping = task
    grid = carnot_condition_grid(
        engine, [n], [m], grouping=grouping, strict_positive_filter=strict
    )
    return {"n_hot": n, "n_cold": m, "match": grid.matches[0][0]}


def _point_fig7(task):
    engine, override = task
    spec = apply_overrides(engine, override)
    report = analytic_cycle(spec)
    return {
        "n_ensembles": spec.n_hot,
        "d_system": spec.d_system,
        "work": report.avg_work,
        "efficiency": report.efficiency,
        "carnot": report.carnot,
    }


def _point_custom(task):
    engine, override, simulate = task
    spec = apply_overrides(engine, override)
    report = analytic_cycle(spec)
    row = dict(override)
    row.update(
        {
            "avg_heat_hot": report.avg_heat_hot,
            "avg_heat_cold": report.avg_heat_cold,
            "work": report.avg_work,
            "efficiency": report.efficiency,
            "delta_entropy": report.delta_entropy,
            "divergence_hot": report.divergence_hot,
            "divergence_cold": report.divergence_cold,
            "carnot": report.carnot,
        }
    )
    if simulate:
        sim = simulate_cycle(spec)
        row["n_int"] = sim.n_int
        row["log_dim_hot"] = sim.log_dim_hot
        row["log_dim_cold"] = sim.log_dim_cold
    return row


_WORKERS = {
    "fig2": _point_fig2,
    "fig3": _point_fig3,
    "fig4": _point_fig4,
    "fig5": _point_fig5,
    "fig6_cell": _point_fig6_cell,
    "fig7": _point_fig7,
    "custom": _point_custom,
}


# --- experiment builders ---


def _default_sweep(config: ExperimentConfig) -> dict[str, tuple]:
    return {axis: values for axis, values in config.sweep}


def _fig2_datasets(config, jobs):
    sweep = _default_sweep(config)
    engine = config.engine
    if "omega_hot_last" in sweep:
        omegas = sweep["omega_hot_last"]
    else:
        top = (engine.beta_cold / engine.beta_hot) * engine.omega_cold_last
        omegas = tuple(
            float(v)
            for v in np.linspace(engine.omega_cold_last, 0.99 * top, 40)
        )
    d_values = sweep.get("d_system", (2, 5, 20))
    tasks, coords = [], []
    for d in d_values:
        for w in omegas:
            # analytic sweep: keep the bath particles matched to the system
            override = {
                "d_system": int(d),
                "d_hot": int(d),
                "d_cold": int(d),
                "omega_hot_last": float(w),
            }
            tasks.append((engine, override))
            coords.append(override)
    outcomes = _pool_map("fig2", tasks, jobs)
    datasets: dict[str, tuple[list[str], list[tuple]]] = {}
    header = ["omega_1", "d_S", "work", "efficiency"]
    for d in d_values:
        rows = [
            tuple(row[c] for c in header)
            for (status, row), coord in zip(outcomes, coords)
            if status == "ok" and coord["d_system"] == d
        ]
        datasets[f"fig2_single_ensemble__dS{d}.csv"] = (header, rows)
    return datasets, coords, outcomes


def _fig3_datasets(config, jobs):
    sweep = _default_sweep(config)
    d_system_values = sweep.get("d_system", (3, 5))
    d_bath_values = sweep.get("d_bath", tuple(range(2, 13)))
    tasks, coords = [], []
    for ds in d_system_values:
        for db in d_bath_values:
            override = {"d_system": int(ds), "d_hot": int(db), "d_cold": int(db)}
            tasks.append((config.engine, override))
            coords.append(override)
    outcomes = _pool_map("fig3", tasks, jobs)
    header = ["d_system", "d_bath", "n_int", "log_dim_total", "work", "power"]
    datasets = {}
    for ds in d_system_values:
        rows = [
            tuple(row[c] for c in header)
            for (status, row), coord in zip(outcomes, coords)
            if status == "ok" and coord["d_system"] == ds
        ]
        datasets[f"fig3_interaction_counts__dS{ds}.csv"] = (header, rows)
    return datasets, coords, outcomes


def _fig4_datasets(config, jobs):
    sweep = _default_sweep(config)
    d_system_values = sweep.get("d_system", (2, 3, 4, 5, 6))
    d_bath_values = sweep.get("d_bath", tuple(range(2, 13)))
    tasks = [
        (config.engine, {"d_system": int(ds)}, tuple(int(v) for v in d_bath_values))
        for ds in d_system_values
    ]
    coords = [{"d_system": int(ds)} for ds in d_system_values]
    outcomes = _pool_map("fig4", tasks, jobs)
    opt_header = ["d_system", "d_bath_optimal", "n_int", "log_dim_total", "work", "power"]
    opt_rows = [
        tuple(row[c] for c in opt_header)
        for status, row in outcomes
        if status == "ok"
    ]
    datasets = {"fig4_optimum_vs_system_dimension.csv": (opt_header, opt_rows)}
    scan_header = ["d_system", "d_bath", "n_int", "log_dim_total", "work", "power", "error"]
    for (status, row), coord in zip(outcomes, coords):
        if status == "ok":
            datasets[f"fig4_scan__dS{coord['d_system']}.csv"] = (scan_header, row["scan"])
    return datasets, coords, outcomes


def _fig5_datasets(config, jobs):
    sweep = _default_sweep(config)
    d_bath_values = sweep.get("d_bath", (5, 6, 8, 10))
    tasks = [
        (config.engine, {"d_hot": int(d), "d_cold": int(d)}, config.cycles)
        for d in d_bath_values
    ]
    coords = [{"d_bath": int(d)} for d in d_bath_values]
    outcomes = _pool_map("fig5", tasks, jobs)
    header = ["d_bath", "cycle", "cyclicity_distance", "work", "integrated_work", "efficiency"]
    datasets = {}
    for (status, row), coord in zip(outcomes, coords):
        if status == "ok":
            datasets[f"fig5_many_cycles__dbath{coord['d_bath']}.csv"] = (header, row["rows"])
    return datasets, coords, outcomes


def _fig6_datasets(config, jobs):
    engine = config.engine
    strict = (config.filter_mode or "strict_positive") == "strict_positive"
    grouping = config.grouping_mode or "rational"
    n_values = config.grid_n_values or tuple(range(1, 11))
    m_values = config.grid_m_values or tuple(range(1, 11))
    tasks = [
        (engine, int(n), int(m), strict, grouping) for n in n_values for m in m_values
    ]
    coords = [{"n_hot": int(n), "n_cold": int(m)} for n in n_values for m in m_values]
    outcomes = _pool_map("fig6_cell", tasks, jobs)
    grid_rows = []
    for (status, row), coord in zip(outcomes, coords):
        if status == "ok":
            match = row["match"]
            verdict = "skipped" if match is None else ("true" if match else "false")
            grid_rows.append((coord["n_hot"], coord["n_cold"], verdict))
    datasets = {
        "fig6_carnot_grid.csv": (
            ["n_hot", "n_cold", "modal_efficiency_is_carnot"],
            grid_rows,
        )
    }

    closed_rows = [
        (
            n,
            m,
            most_likely_trajectory_efficiency(
                replace(engine, n_hot=int(n), n_cold=int(m))
            ),
        )
        for n in n_values
        for m in m_values
    ]
    datasets["fig6_most_likely_trajectory_efficiency.csv"] = (
        ["n_hot", "n_cold", "eta_most_likely_trajectory"],
        closed_rows,
    )

    hist_error = None
    try:
        dist = enumerate_distribution(
            engine, strict_positive_filter=strict, grouping=grouping
        )
    except EnumerationCapError:
        dist = sample_distribution(
            engine, config.n_samples, config.seed, strict_positive_filter=strict
        )
    except Exception as exc:
        dist, hist_error = None, f"{type(exc).__name__}: {exc}"
    if dist is not None:
        datasets["fig6_efficiency_histogram.csv"] = (
            ["eta", "probability"],
            [(eta, p) for eta, p in dist.bins],
        )
    coords = coords + [{"histogram": f"N={engine.n_hot},M={engine.n_cold}"}]
    outcomes = outcomes + [
        ("ok", {}) if hist_error is None else ("error", hist_error)
    ]
    return datasets, coords, outcomes


def _fig7_datasets(config, jobs):
    sweep = _default_sweep(config)
    n_values = sweep.get("n_ensembles", (1, 2, 5, 10, 20, 50))
    d_values = sweep.get("d_system", (2, 3, 5, 10))
    tasks, coords = [], []
    for d in d_values:
        for n in n_values:
            override = {
                "d_system": int(d),
                "d_hot": int(d),
                "d_cold": int(d),
                "n_hot": int(n),
                "n_cold": int(n),
            }
            tasks.append((config.engine, override))
            coords.append(override)
    outcomes = _pool_map("fig7", tasks, jobs)
    header = ["n_ensembles", "d_system", "work", "efficiency", "carnot"]
    datasets = {}
    for d in d_values:
        rows = [
            tuple(row[c] for c in header)
            for (status, row), coord in zip(outcomes, coords)
            if status == "ok" and coord["d_system"] == d
        ]
        datasets[f"fig7_workeff_sweep__dS{d}.csv"] = (header, rows)
    return datasets, coords, outcomes


def _custom_datasets(config, jobs):
    points = sweep_points(config)
    if not points or points == [{}]:
        points = [{}]
    tasks = [(config.engine, override, config.simulate) for override in points]
    outcomes = _pool_map("custom", tasks, jobs)
    axis_names: list[str] = []
    for axis, _ in config.sweep:
        if axis == "n_ensembles":
            axis_names.extend(["n_hot", "n_cold"])
        elif axis == "d_bath":
            axis_names.extend(["d_hot", "d_cold"])
        else:
            axis_names.append(axis)
    value_names = [
        "avg_heat_hot",
        "avg_heat_cold",
        "work",
        "efficiency",
        "delta_entropy",
        "divergence_hot",
        "divergence_cold",
        "carnot",
    ]
    if config.simulate:
        value_names += ["n_int", "log_dim_hot", "log_dim_cold"]
    header = axis_names + value_names
    rows = [
        tuple(row.get(name) for name in header)
        for status, row in outcomes
        if status == "ok"
    ]
    return {"custom_sweep.csv": (header, rows)}, points, outcomes


_BUILDERS = {
    "fig2_single_ensemble": _fig2_datasets,
    "fig3_interaction_counts": _fig3_datasets,
    "fig4_dimension_optimum": _fig4_datasets,
    "fig5_many_cycles": _fig5_datasets,
    "fig6_stochastic_efficiency": _fig6_datasets,
    "fig7_workeff_sweep": _fig7_datasets,
    "custom_sweep": _custom_datasets,
}


def run_experiment(
    config: ExperimentConfig,
    output_dir: str | None = None,
    jobs: int | None = None,
    seed: int | None = None,
    render: bool = True,
) -> RunResult:
    """Execute one experiment config and write its output tree.

    Writes the CSV datasets, a deterministic manifest, a separate timing
    file, and (unless render is disabled) one PNG figure per experiment
    alongside the data.
    """
    if seed is not None:
        config = replace(config, seed=seed)
    out = output_dir or config.output_dir or config.experiment
    os.makedirs(out, exist_ok=True)
    n_jobs = jobs or config.jobs or os.cpu_count() or 1

    started = time.time()
    builder = _BUILDERS[config.experiment]
    datasets, coords, outcomes = builder(config, n_jobs)
    for name, (header, rows) in datasets.items():
        write_csv(os.path.join(out, name), header, rows)

    points = [
        {
            "index": i,
            "params": coord,
            "status": status,
            "error": payload if status == "error" else None,
        }
        for i, (coord, (status, payload)) in enumerate(zip(coords, outcomes))
    ]
    n_failed = sum(1 for p in points if p["status"] == "error")
    manifest = {
        "experiment": config.experiment,
        "version": __version__,
        "seed": config.seed,
        "config": {key: value for key, value in config.source},
        "resolved_engine": {
            "beta_hot": config.engine.beta_hot,
            "beta_cold": config.engine.beta_cold,
            "omega_hot_last": config.engine.omega_hot_last,
            "omega_cold_last": config.engine.omega_cold_last,
            "n_hot": config.engine.n_hot,
            "n_cold": config.engine.n_cold,
            "d_system": config.engine.d_system,
            "d_hot": config.engine.d_hot,
            "d_cold": config.engine.d_cold,
            "interaction": config.engine.interaction,
            "theta": config.engine.theta,
            "eps": config.engine.eps,
            "h_system_diag": list(config.engine.h_system_diag),
        },
        "files": sorted(datasets),
        "points": points,
        "n_points": len(points),
        "n_failed": n_failed,
    }
    with open(os.path.join(out, MANIFEST_NAME), "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    with open(os.path.join(out, TIMING_NAME), "w", encoding="utf-8") as handle:
        json.dump(
            {"started_unix": started, "wall_seconds": time.time() - started},
            handle,
            indent=2,
        )
        handle.write("\n")

    figures: tuple[str, ...] = ()
    if render and datasets:
        from .plotting import render_experiment

        figures = tuple(render_experiment(config.experiment, datasets, out))

    return RunResult(
        output_dir=out,
        csv_files=tuple(sorted(datasets)),
        figure_files=figures,
        n_points=len(points),
        n_failed=n_failed,
    )
