"""Render the experiment datasets to PNG figures.

Pure presentation: every function reads the already-written rows, so
the figures can always be regenerated from the CSVs alone.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _tidy(ax):
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    ax.grid(alpha=0.25, linewidth=0.6)


def _columns(dataset, *names):
    header, rows = dataset
    idx = [header.index(n) for n in names]
    return [np.array([row[i] for row in rows]) for i in idx]


def _series(datasets, prefix):
    for name in sorted(datasets):
        if name.startswith(prefix) and datasets[name][1]:
            yield name, datasets[name]


def _render_fig2(datasets, ax):
    for name, dataset in _series(datasets, "fig2_single_ensemble__dS"):
        eff, work, d = _columns(dataset, "efficiency", "work", "d_S")
        order = np.argsort(eff)
        ax.plot(eff[order], work[order], label=f"d_S = {int(d[0])}")
    ax.set_xlabel("efficiency")
    ax.set_ylabel("average work")
    ax.set_title("single-ensemble engine")
    ax.legend()


def _render_fig3(datasets, ax):
    for name, dataset in _series(datasets, "fig3_interaction_counts__dS"):
        if not dataset[1]:
            continue
        db, n_int, ds = _columns(dataset, "d_bath", "n_int", "d_system")
        ax.plot(db, n_int, marker="o", label=f"d_S = {int(ds[0])}")
    ax.set_xlabel("bath particle dimension")
    ax.set_ylabel("total interactions per cycle")
    ax.set_yscale("log")
    ax.set_title("pseudo-thermalization cost")
    ax.legend()


def _render_fig4(datasets, axes):
    dataset = datasets.get("fig4_optimum_vs_system_dimension.csv")
    if dataset is None or not dataset[1]:
        return
    ds, log_dim, d_opt, power = _columns(
        dataset, "d_system", "log_dim_total", "d_bath_optimal", "power"
    )
    ax0, ax1 = axes
    ax0.plot(ds, log_dim, marker="o", color="tab:blue", label="min log bath dim")
    ax0.set_ylabel("min log total bath dimension")
    twin = ax0.twinx()
    twin.plot(ds, d_opt, marker="s", color="tab:red", linestyle=":", label="optimal d")
    twin.set_ylabel("optimal particle dimension")
    ax0.set_xlabel("working substance dimension")
    ax1.plot(ds, power, marker="o", color="tab:green")
    ax1.set_xlabel("working substance dimension")
    ax1.set_ylabel("work per interaction")


def _render_fig5(datasets, axes):
    ax0, ax1 = axes
    for name, dataset in _series(datasets, "fig5_many_cycles__dbath"):
        cycle, dist, integ, eff, db = _columns(
            dataset, "cycle", "cyclicity_distance", "integrated_work", "efficiency", "d_bath"
        )
        label = f"d_bath = {int(db[0])}"
        ax0.plot(cycle, dist, label=label)
        ax1.plot(cycle, eff, label=label)
    ax0.set_xlabel("cycle")
    ax0.set_ylabel("cyclicity trace distance")
    ax0.set_yscale("log")
    ax0.legend(fontsize=8)
    ax1.set_xlabel("cycle")
    ax1.set_ylabel("per-cycle efficiency")


def _render_fig6(datasets, axes):
    ax0, ax1 = axes
    grid = datasets.get("fig6_carnot_grid.csv")
    if grid is not None and grid[1]:
        header, rows = grid
        n = np.array([r[0] for r in rows], dtype=float)
        m = np.array([r[1] for r in rows], dtype=float)
        verdict = [r[2] for r in rows]
        colors = ["tab:green" if v == "true" else ("0.8" if v == "skipped" else "tab:red") for v in verdict]
        ax0.scatter(n, m, c=colors, s=60, marker="s")
        ax0.set_xlabel("hot ensembles N")
        ax0.set_ylabel("cold ensembles M")
        ax0.set_title("modal efficiency = Carnot (green)")
    hist = datasets.get("fig6_efficiency_histogram.csv")
    if hist is not None and hist[1]:
        eta, prob = _columns(hist, "eta", "probability")
        ax1.vlines(eta, 0.0, prob, linewidth=1.2)
        ax1.set_xlabel("stochastic efficiency")
        ax1.set_ylabel("probability")
        ax1.set_yscale("log")


def _render_fig7(datasets, axes):
    ax0, ax1 = axes
    carnot = None
    for name, dataset in _series(datasets, "fig7_workeff_sweep__dS"):
        n, work, eff, ds, car = _columns(
            dataset, "n_ensembles", "work", "efficiency", "d_system", "carnot"
        )
        label = f"d_S = {int(ds[0])}"
        ax0.plot(n, work, marker="o", label=label)
        ax1.plot(n, eff, marker="o", label=label)
        carnot = car[0]
    if carnot is not None:
        ax1.axhline(carnot, color="k", linestyle="--", linewidth=0.8, label="Carnot")
    ax0.set_xlabel("ensembles N = M")
    ax0.set_ylabel("average work")
    ax0.set_xscale("log")
    ax1.set_xlabel("ensembles N = M")
    ax1.set_ylabel("efficiency")
    ax1.set_xscale("log")
    ax1.legend(fontsize=8)


def _render_custom(datasets, ax):
    dataset = datasets.get("custom_sweep.csv")
    if dataset is None or not dataset[1]:
        return
    header, rows = dataset
    x = np.arange(len(rows)) if len(header) == 0 else None
    # first sweep column on x when present, point index otherwise
    value_start = header.index("avg_heat_hot")
    if value_start > 0:
        x = np.array([row[0] for row in rows], dtype=float)
        ax.set_xlabel(header[0])
    else:
        x = np.arange(len(rows), dtype=float)
        ax.set_xlabel("point")
    work = np.array([row[header.index("work")] for row in rows])
    eff = np.array([row[header.index("efficiency")] for row in rows])
    ax.plot(x, work, marker="o", label="work")
    twin = ax.twinx()
    twin.plot(x, eff, marker="s", color="tab:red", linestyle=":", label="efficiency")
    twin.set_ylabel("efficiency")
    ax.set_ylabel("average work")


def render_experiment(experiment: str, datasets: dict, output_dir: str) -> list[str]:
    """Write one PNG per experiment next to its CSVs; returns the paths."""
    two_panel = {
        "fig4_dimension_optimum": _render_fig4,
        "fig5_many_cycles": _render_fig5,
        "fig6_stochastic_efficiency": _render_fig6,
        "fig7_workeff_sweep": _render_fig7,
    }
    single_panel = {
        "fig2_single_ensemble": _render_fig2,
        "fig3_interaction_counts": _render_fig3,
        "custom_sweep": _render_custom,
    }
    path = os.path.join(output_dir, f"{experiment}.png")
    if experiment in single_panel:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        single_panel[experiment](datasets, ax)
        _tidy(ax)
    elif experiment in two_panel:
        fig, axes = plt.subplots(1, 2, figsize=(10.0, 4.0))
        two_panel[experiment](datasets, axes)
        for ax in axes:
            _tidy(ax)
    else:
        return []
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
