"""Experiment execution: result tables, file emission, sweeps, figure presets.

Every run produces rectangular numeric tables stamped with the fully
resolved configuration, the tool version, and a timestamp, so any emitted
file can be regenerated byte-for-byte by pinning the timestamp. Sweeps fan
out over a parameter grid with one worker per grid point and concatenate
the per-point tables with the sweep columns prepended; the aggregation
order is the grid order, so concurrency never changes the output.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .analysis import (
    autocorrelation_series,
    fringe_measure,
    fringe_predict,
    Regime,
    revival_detect,
    revival_predict,
    transfer_fidelity,
)
from .config import ConfigError, Experiment, ExperimentConfig, apply_sweep_point, parse_config
from .lattice import Topology
from .propagator import SpectralPropagator
from .wavepacket import PacketSpec, gaussian_packet, width_check

_EXTENSIONS = {"csv": "csv", "plotdata": "dat"}


@dataclass(frozen=True)
class ResultTable:
    """Numeric rows under named columns, with a provenance header."""

    columns: tuple[str, ...]
    rows: np.ndarray
    provenance: dict[str, str]

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValueError(
                f"rows of shape {rows.shape} do not match {len(self.columns)} columns"
            )
        object.__setattr__(self, "rows", rows)


def format_value(x: float) -> str:
    """Full-precision rendering: 17 significant digits round-trip exactly."""
    return f"{x:.17g}"


def emit(table: ResultTable, fmt: str, path: str | Path) -> Path:
    """Write one table as `csv` or whitespace-separated `plotdata`."""
    if fmt not in _EXTENSIONS:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    sep = "," if fmt == "csv" else " "
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for key, value in table.provenance.items():
                fh.write(f"# {key} = {value}\n")
            if fmt == "csv":
                fh.write(",".join(table.columns) + "\n")
            else:
                fh.write("# " + " ".join(table.columns) + "\n")
            for row in table.rows:
                fh.write(sep.join(format_value(x) for x in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_result_table(path: str | Path) -> tuple[tuple[str, ...], np.ndarray, dict[str, str]]:
    """Parse an emitted CSV back into (columns, rows, provenance)."""
    provenance: dict[str, str] = {}
    columns: tuple[str, ...] | None = None
    data: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                provenance[key.strip()] = value.strip()
            elif columns is None:
                columns = tuple(line.split(","))
            elif line:
                data.append([float(x) for x in line.split(",")])
    if columns is None:
        raise ValueError(f"{path} has no column header")
    rows = np.array(data, dtype=float) if data else np.empty((0, len(columns)))
    return columns, rows, provenance


def _time_grid(config: ExperimentConfig) -> np.ndarray:
    return np.linspace(0.0, config.t_max, config.n_samples)


def _initial_state(config: ExperimentConfig):
    weights = (config.spin_up, config.spin_down)
    total = math.sqrt(abs(weights[0]) ** 2 + abs(weights[1]) ** 2)
    if total == 0:
        raise ConfigError("spin weights cannot both be zero")
    weights = (weights[0] / total, weights[1] / total)
    spec = PacketSpec(
        alpha=config.alpha, center=config.center, k0=config.k0, spin_weights=weights
    )
    # Width-condition warnings are collected into the provenance header by
    # _regime_notes; suppress the duplicate Python warning here.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return gaussian_packet(config.lattice(), spec)


def _regime_notes(config: ExperimentConfig) -> list[str]:
    ok, margin = width_check(config.alpha, config.n_sites)
    notes = []
    if not ok:
        notes.append(
            f"width condition marginal: margin {margin:.2f} below strictness 10"
        )
    return notes


def _run_single(config: ExperimentConfig) -> tuple[tuple[str, ...], np.ndarray, list[str]]:
    """Compute one experiment's table: (columns, rows, regime notes)."""
    lattice = config.lattice()
    notes = _regime_notes(config)
    experiment = config.experiment

    if experiment is Experiment.EVOLVE:
        state = _initial_state(config)
        prop = SpectralPropagator.from_lattice(lattice)
        times = _time_grid(config)
        sites = np.arange(1, config.n_sites + 1, dtype=float)
        blocks = []
        for t in times:
            density = prop.evolve(state, t).site_density()
            blocks.append(np.column_stack([np.full_like(sites, t), sites, density]))
        return ("t", "site", "density"), np.vstack(blocks), notes

    if experiment is Experiment.AUTOCORR:
        state = _initial_state(config)
        prop = SpectralPropagator.from_lattice(lattice)
        series = autocorrelation_series(prop, state, _time_grid(config))
        return ("t", "A_abs"), np.column_stack([series.times, series.values]), notes

    if experiment is Experiment.FRINGE:
        state = _initial_state(config)
        prop = SpectralPropagator.from_lattice(lattice)
        delta_tau = config.t_max
        simulated = prop.evolve(state, delta_tau).site_density()
        profile = fringe_predict(
            config.alpha, config.k0, config.center, lattice, delta_tau
        )
        notes.extend(profile.warnings)
        measured = fringe_measure(simulated)
        if measured is None:
            notes.append("no significant fringe in simulated density")
            measured = math.nan
        n = config.n_sites
        rows = np.column_stack(
            [
                profile.sites.astype(float),
                simulated,
                profile.density,
                np.full(n, profile.wavevector),
                np.full(n, profile.phase0),
                np.full(n, profile.period),
                np.full(n, measured),
            ]
        )
        columns = (
            "site",
            "density_sim",
            "density_pred",
            "wavevector",
            "phase0",
            "period_pred",
            "period_measured",
        )
        return columns, rows, notes

    if experiment is Experiment.REVIVAL:
        state = _initial_state(config)
        prop = SpectralPropagator.from_lattice(lattice)
        series = autocorrelation_series(prop, state, _time_grid(config))
        peaks = revival_detect(series, threshold=config.threshold)
        pred_linear = revival_predict(lattice, Regime.LINEAR).time
        pred_quad = revival_predict(lattice, Regime.QUADRATIC).time
        centered = (
            lattice.topology is Topology.CHAIN
            and abs(config.center - 0.5 * (config.n_sites + 1)) < 1e-9
        )
        pred_parity = (
            revival_predict(lattice, Regime.QUADRATIC, centered=True).time
            if centered
            else math.nan
        )
        if not peaks:
            peaks = [(math.nan, math.nan)]
            notes.append(f"no peaks above threshold {config.threshold}")
        rows = np.array(
            [[t, v, pred_linear, pred_quad, pred_parity] for t, v in peaks]
        )
        columns = ("peak_t", "peak_value", "pred_linear", "pred_quadratic", "pred_parity")
        return columns, rows, notes

    if experiment is Experiment.QUBIT_TRANSFER:
        prop = SpectralPropagator.from_lattice(lattice)
        times = _time_grid(config)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fidelities = [
                transfer_fidelity(
                    (config.theta, config.phi_angle),
                    lattice,
                    config.alpha,
                    config.center,
                    config.target,
                    t,
                    prop,
                    k0=config.k0,
                )
                for t in times
            ]
        rows = np.column_stack(
            [
                np.full_like(times, config.theta),
                np.full_like(times, config.phi_angle),
                times,
                np.array(fidelities),
            ]
        )
        return ("theta", "phi_angle", "t", "fidelity"), rows, notes

    raise ConfigError(f"unhandled experiment {experiment}")


def _sweep_grid(config: ExperimentConfig) -> list[dict[str, Any]]:
    names = list(config.sweep.keys())
    return [
        dict(zip(names, combo))
        for combo in itertools.product(*(config.sweep[n] for n in names))
    ]


def _sweep_value(name: str, value: Any) -> float:
    if name == "topology":
        return float(list(Topology).index(Topology(value)))
    return float(value)


def build_table(config: ExperimentConfig) -> ResultTable:
    """Run the configured experiment (sweeping if a grid is set)."""
    timestamp = config.timestamp or datetime.now(timezone.utc).isoformat()
    provenance = {"fluxring": __version__, "timestamp": timestamp}
    provenance.update(config.provenance())

    if not config.sweep:
        columns, rows, notes = _run_single(config)
    else:
        grid = _sweep_grid(config)
        points = [apply_sweep_point(config, point) for point in grid]
        jobs = config.jobs if config.jobs > 0 else (os.cpu_count() or 1)
        if jobs > 1 and len(points) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_single, points))
        else:
            results = [_run_single(point) for point in points]
        sweep_names = list(config.sweep.keys())
        base_columns = results[0][0]
        blocks = []
        notes = []
        for point, (cols, rows, point_notes) in zip(grid, results):
            if cols != base_columns:
                raise ConfigError("sweep points produced inconsistent tables")
            prefix = np.tile(
                [_sweep_value(n, point[n]) for n in sweep_names], (rows.shape[0], 1)
            )
            blocks.append(np.hstack([prefix, rows]))
            for note in point_notes:
                tag = ", ".join(f"{n}={point[n]}" for n in sweep_names)
                notes.append(f"[{tag}] {note}")
        columns = tuple(sweep_names) + base_columns
        rows = np.vstack(blocks)
        if "topology" in sweep_names:
            order = ", ".join(f"{i}={t.value}" for i, t in enumerate(Topology))
            provenance["topology_index"] = order
    if notes:
        provenance["warnings"] = "; ".join(notes)
    return ResultTable(columns=columns, rows=rows, provenance=provenance)


def run_experiment(
    config: ExperimentConfig, name: str | None = None
) -> tuple[ResultTable, list[Path]]:
    """Build the table and write it in every requested format.

    Returns the table and the written paths. The output stem defaults to
    the experiment name.
    """
    table = build_table(config)
    stem = name or config.experiment.value.replace("-", "_")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        emit(table, fmt, out_dir / f"{stem}.{_EXTENSIONS[fmt]}")
        for fmt in config.formats
    ]
    return table, paths


# Parameter recipes for reproducing the reference plots. Time units are 1/J
# everywhere; heatmap figures get long-form (t, site, density) tables.
FIGURE_PRESETS: dict[str, dict[str, Any]] = {
    "2": {
        "experiment": "evolve", "n_sites": 100, "topology": "ring", "flux": 25.0,
        "alpha": 0.1, "k0": 0.0, "center": 50.0, "t_max": 100.0, "n_samples": 201,
    },
    "3a": {
        "experiment": "autocorr", "n_sites": 100, "topology": "ring", "alpha": 0.1,
        "center": 50.0, "t_max": 300.0, "n_samples": 3001,
        "sweep": {"flux": [20.0, 25.0, 33.0]},
    },
    "3b": {
        "experiment": "autocorr", "n_sites": 100, "topology": "ring", "alpha": 0.3,
        "center": 50.0, "t_max": 300.0, "n_samples": 3001,
        "sweep": {"flux": [20.0, 25.0, 33.0]},
    },
    "3c": {
        "experiment": "autocorr", "n_sites": 100, "topology": "chain", "alpha": 0.1,
        "center": 50.0, "t_max": 300.0, "n_samples": 3001,
        "sweep": {"k0": [2.0 * math.pi * 20.0 / 100.0, math.pi / 2, 2.0 * math.pi * 33.0 / 100.0]},
    },
    "3d": {
        "experiment": "autocorr", "n_sites": 100, "topology": "chain", "alpha": 0.3,
        "center": 50.0, "t_max": 300.0, "n_samples": 3001,
        "sweep": {"k0": [2.0 * math.pi * 20.0 / 100.0, math.pi / 2, 2.0 * math.pi * 33.0 / 100.0]},
    },
    "4a": {
        "experiment": "evolve", "n_sites": 100, "topology": "ring", "alpha": 0.3,
        "k0": 0.05 * math.pi, "center": 50.0, "t_max": 100.0, "n_samples": 201,
    },
    "4b": {
        "experiment": "fringe", "n_sites": 100, "topology": "ring", "alpha": 0.3,
        "k0": 0.05 * math.pi, "center": 50.0, "t_max": 90.0,
    },
    "4c": {
        "experiment": "evolve", "n_sites": 100, "topology": "ring", "alpha": 0.1,
        "k0": 0.0, "center": 50.5, "t_max": 1800.0, "n_samples": 361,
    },
    "4d": {
        "experiment": "autocorr", "n_sites": 100, "alpha": 0.1, "k0": 0.0,
        "center": 50.5, "t_max": 2000.0, "n_samples": 4001,
        "sweep": {"topology": ["ring", "chain"]},
    },
    "5b": {
        "experiment": "evolve", "n_sites": 100, "topology": "chain", "alpha": 0.1,
        "k0": math.pi / 2, "center": 50.0, "t_max": 202.0, "n_samples": 405,
    },
}


def reproduce_config(figure: str, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Resolve a figure preset, letting explicit overrides win."""
    if figure not in FIGURE_PRESETS:
        raise ConfigError(
            f"unknown figure {figure!r}; choose from {sorted(FIGURE_PRESETS)}"
        )
    merged = dict(FIGURE_PRESETS[figure])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        merged[key] = value
    return parse_config(None, merged)
