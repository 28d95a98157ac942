"""Experiment configuration: flat key-value files, flag overrides, defaults.

A config file is UTF-8 text with one ``key = value`` pair per line and ``#``
comments. Sweep grids use dotted keys, e.g. ``sweep.flux = 20, 25, 33``.
Command-line flags always override file values. The fully resolved
configuration is what gets stamped into every output file's provenance
header, so resolution is strict: unknown keys and type mismatches are
errors, never warnings.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

from .lattice import LatticeSpec, Topology

OUTPUT_DIR_ENV = "FLUXRING_OUT"


class ConfigError(Exception):
    """A configuration file or flag set that cannot be resolved."""


class Experiment(Enum):
    EVOLVE = "evolve"
    AUTOCORR = "autocorr"
    FRINGE = "fringe"
    REVIVAL = "revival"
    QUBIT_TRANSFER = "qubit-transfer"


_FORMATS = ("csv", "plotdata")

# key -> (python type, default); None default means "required" or "derived"
_SCHEMA: dict[str, tuple[type, Any]] = {
    "n_sites": (int, None),
    "topology": (str, "ring"),
    "hopping": (float, 1.0),
    "flux": (float, None),
    "flux_phase": (float, None),
    "alpha": (float, 0.1),
    "k0": (float, 0.0),
    "center": (float, None),
    "spin_up": (complex, 1.0 + 0j),
    "spin_down": (complex, 0.0 + 0j),
    "theta": (float, 0.0),
    "phi_angle": (float, 0.0),
    "target": (float, None),
    "t_max": (float, 100.0),
    "n_samples": (int, 201),
    "threshold": (float, 0.8),
    "experiment": (str, None),
    "out": (str, None),
    "format": (str, "csv"),
    "jobs": (int, 0),
    "timestamp": (str, None),
}

# numeric fields a sweep may range over, plus topology (string-valued)
SWEEPABLE = {
    "flux", "flux_phase", "alpha", "k0", "center", "hopping",
    "theta", "phi_angle", "target", "t_max", "topology", "n_sites",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment: lattice, packet, schedule, and outputs."""

    experiment: Experiment
    n_sites: int
    topology: Topology = Topology.RING
    hopping: float = 1.0
    flux: float = 0.0
    alpha: float = 0.1
    k0: float = 0.0
    center: float = 0.0
    spin_up: complex = 1.0 + 0j
    spin_down: complex = 0.0 + 0j
    theta: float = 0.0
    phi_angle: float = 0.0
    target: float | None = None
    t_max: float = 100.0
    n_samples: int = 201
    threshold: float = 0.8
    sweep: dict[str, list] = field(default_factory=dict)
    out_dir: str = "."
    formats: tuple[str, ...] = ("csv",)
    jobs: int = 0
    timestamp: str | None = None

    def lattice(self) -> LatticeSpec:
        return LatticeSpec(
            topology=self.topology,
            n_sites=self.n_sites,
            hopping=self.hopping,
            flux=self.flux,
        )

    def provenance(self) -> dict[str, str]:
        """The resolved configuration as flat strings for output headers."""
        items = {
            "experiment": self.experiment.value,
            "n_sites": str(self.n_sites),
            "topology": self.topology.value,
            "hopping": repr(self.hopping),
            "flux": repr(self.flux),
            "alpha": repr(self.alpha),
            "k0": repr(self.k0),
            "center": repr(self.center),
            "spin_up": repr(self.spin_up),
            "spin_down": repr(self.spin_down),
            "theta": repr(self.theta),
            "phi_angle": repr(self.phi_angle),
            "target": repr(self.target),
            "t_max": repr(self.t_max),
            "n_samples": str(self.n_samples),
            "threshold": repr(self.threshold),
        }
        for name, values in sorted(self.sweep.items()):
            items[f"sweep.{name}"] = ", ".join(repr(v) for v in values)
        return items


def _convert(key: str, text: str, kind: type):
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is complex:
            return complex(text.replace(" ", ""))
        return text
    except ValueError:
        raise ConfigError(
            f"key '{key}': expected {kind.__name__}, got {text!r}"
        ) from None


def read_config_file(path: str) -> dict[str, Any]:
    """Parse a flat key-value file into typed raw values (no defaults)."""
    raw: dict[str, Any] = {}
    sweep: dict[str, list] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            key, value = key.strip(), value.strip()
            if key.startswith("sweep."):
                name = key[len("sweep."):]
                if name not in SWEEPABLE:
                    raise ConfigError(f"unknown sweep parameter '{name}'")
                sweep[name] = _parse_sweep_values(name, value)
            elif key in _SCHEMA:
                raw[key] = _convert(key, value, _SCHEMA[key][0])
            else:
                raise ConfigError(f"unknown key '{key}' in {path}")
    if sweep:
        raw["sweep"] = sweep
    return raw


def _parse_sweep_values(name: str, text: str) -> list:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"sweep parameter '{name}' has no values")
    if name == "topology":
        return parts
    kind = _SCHEMA[name][0] if name in _SCHEMA else float
    return [_convert(f"sweep.{name}", p, kind) for p in parts]


def parse_config(
    path: str | None = None, overrides: dict[str, Any] | None = None
) -> ExperimentConfig:
    """Resolve file values, flag overrides, and defaults into a config.

    Overrides win over file values; defaults fill the rest. `n_sites` is
    required; `center` defaults to the lattice midpoint (N+1)/2. Flux may be
    given either directly or as the bond phase angle via `flux_phase`
    (flux = phase * N / (2 pi)), but not both.
    """
    merged: dict[str, Any] = {}
    if path is not None:
        merged.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "sweep":
            merged.setdefault("sweep", {}).update(value)
        elif key in _SCHEMA:
            merged[key] = value
        else:
            raise ConfigError(f"unknown key '{key}'")

    if "n_sites" not in merged:
        raise ConfigError("missing required key 'n_sites'")
    n_sites = merged["n_sites"]

    if merged.get("flux") is not None and merged.get("flux_phase") is not None:
        raise ConfigError("give either 'flux' or 'flux_phase', not both")
    flux = merged.get("flux")
    if merged.get("flux_phase") is not None:
        flux = merged["flux_phase"] * n_sites / (2.0 * math.pi)
    if flux is None:
        flux = 0.0

    topology_text = merged.get("topology", _SCHEMA["topology"][1])
    try:
        topology = Topology(topology_text)
    except ValueError:
        raise ConfigError(
            f"key 'topology': expected one of {[t.value for t in Topology]}, "
            f"got {topology_text!r}"
        ) from None

    experiment_text = merged.get("experiment")
    if experiment_text is None:
        raise ConfigError("no experiment selected (subcommand or 'experiment' key)")
    try:
        experiment = Experiment(experiment_text)
    except ValueError:
        raise ConfigError(
            f"key 'experiment': expected one of {[e.value for e in Experiment]}, "
            f"got {experiment_text!r}"
        ) from None

    formats = tuple(
        f.strip() for f in str(merged.get("format", "csv")).split(",") if f.strip()
    )
    for fmt in formats:
        if fmt not in _FORMATS:
            raise ConfigError(f"key 'format': expected subset of {_FORMATS}, got {fmt!r}")

    out_dir = merged.get("out") or os.environ.get(OUTPUT_DIR_ENV) or "."

    config = ExperimentConfig(
        experiment=experiment,
        n_sites=n_sites,
        topology=topology,
        hopping=merged.get("hopping", 1.0),
        flux=flux,
        alpha=merged.get("alpha", 0.1),
        k0=merged.get("k0", 0.0),
        center=merged.get("center", 0.5 * (n_sites + 1)),
        spin_up=merged.get("spin_up", 1.0 + 0j),
        spin_down=merged.get("spin_down", 0.0 + 0j),
        theta=merged.get("theta", 0.0),
        phi_angle=merged.get("phi_angle", 0.0),
        target=merged.get("target"),
        t_max=merged.get("t_max", 100.0),
        n_samples=merged.get("n_samples", 201),
        threshold=merged.get("threshold", 0.8),
        sweep=dict(merged.get("sweep", {})),
        out_dir=out_dir,
        formats=formats,
        jobs=merged.get("jobs", 0),
        timestamp=merged.get("timestamp"),
    )
    _validate(config)
    return config


def _validate(config: ExperimentConfig) -> None:
    if config.n_samples < 2:
        raise ConfigError(f"n_samples must be >= 2, got {config.n_samples}")
    if config.t_max <= 0:
        raise ConfigError(f"t_max must be positive, got {config.t_max}")
    for name in config.sweep:
        if name not in SWEEPABLE:
            raise ConfigError(f"unknown sweep parameter '{name}'")
    if config.experiment is Experiment.QUBIT_TRANSFER and config.target is None:
        raise ConfigError("qubit-transfer requires a 'target' site")
    try:
        config.lattice()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def apply_sweep_point(config: ExperimentConfig, point: dict[str, Any]) -> ExperimentConfig:
    """A copy of `config` with one sweep grid point substituted in."""
    updates: dict[str, Any] = {}
    for name, value in point.items():
        if name == "topology":
            updates["topology"] = Topology(value)
        elif name == "flux_phase":
            updates["flux"] = value * config.n_sites / (2.0 * math.pi)
        elif name == "n_sites":
            updates["n_sites"] = int(value)
        else:
            updates[name] = value
    return replace(config, sweep={}, **updates)
