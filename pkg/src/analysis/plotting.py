# src/analysis/plotting.py
"""SVG figures for experiment tables."""
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

from src.models.experiment import ExperimentTable

# Identical tables must give byte-identical SVGs
plt.rcParams["svg.hashsalt"] = "npd-experiments"
plt.rcParams["svg.fonttype"] = "none"
plt.rcParams["figure.figsize"] = (6.0, 4.0)

X_LABELS = {
    "sweep-recovery": "k",
    "sweep-bounded": "gamma",
    "sweep-gaussian": "alpha",
}


def plt_savefig(fig, save_path: str) -> None:
    fig.tight_layout()
    fig.savefig(save_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _phase_grid(rows: pd.DataFrame) -> tuple[pd.DataFrame, str]:
    """k x s grid of empirical BP success when present, otherwise of refined-bound holds."""
    empirical = rows[rows["method"] == "bp"]
    if not empirical.empty:
        values, label = empirical.assign(value=empirical["success_rate"]), "BP success rate"
    else:
        verdicts = rows[rows["method"] == "refined"]
        values, label = verdicts.assign(value=verdicts["holds"].astype(float)), "refined bound holds"
    grid = values.pivot_table(
        index="point_k", columns="point_s_or_gamma_or_alpha", values="value", aggfunc="mean"
    )
    return grid.sort_index(ascending=False), label


def plot_phase(table: ExperimentTable, ax) -> None:
    grid, label = _phase_grid(table.rows)
    sns.heatmap(grid, ax=ax, vmin=0.0, vmax=1.0, cmap="viridis", cbar_kws={"label": label})
    ax.set_xlabel("s")
    ax.set_ylabel("k")


def plot_sweep(table: ExperimentTable, ax) -> None:
    rows = table.rows
    x_column = "point_k" if table.name == "sweep-recovery" else "point_s_or_gamma_or_alpha"
    for method, group in rows.groupby("method", sort=True):
        group = group.sort_values(x_column)
        ax.plot(group[x_column].astype(float), group["success_rate"], marker="o", label=f"{method} success")
        ax.plot(group[x_column].astype(float), group["rmse"], linestyle="--", label=f"{method} RMSE")
    ax.set_xlabel(X_LABELS.get(table.name, "point"))
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="best", fontsize="small")


def save_table_svg(table: ExperimentTable, save_path: str) -> None:
    """Heatmap for phase transitions, success/RMSE curves for sweeps."""
    fig, ax = plt.subplots(1, 1)
    if table.rows.empty:
        ax.text(0.5, 0.5, "no rows", ha="center", va="center")
    elif table.name == "phase":
        plot_phase(table, ax)
    else:
        plot_sweep(table, ax)
    ax.set_title(f"{table.name} (seed {table.seed})")
    plt_savefig(fig, save_path)
