"""Sweeps of probability or expectation queries over a grid of horizons T.

Each output row is one (T, property) cell. Probability sweeps run one
batch of traces per T, smallest T first, and flush its rows before moving
on. Expectation sweeps read every T off the same traces.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Optional

from .config import ConfigError, load_config
from .models import Model
from .smc import Z95, chernoff_sample_size, count_satisfying, expectation_sweep, normal_ci
from .units import DAY, parse_time

COLUMNS = ("T", "property", "estimate", "ci_low", "ci_high", "n", "seed")
DEFAULT_TIMES = tuple(d * DAY for d in (5, 10, 15, 20, 25, 30))

PRESETS = {
    "fig4": ("probability", tuple(f"F<=T failure_{i}" for i in range(1, 5))),
    "fig5": ("probability", tuple(f"!shutdown U<=T failure_{i}" for i in range(1, 5))),
    "fig6": ("expectation", ("reward_up", "reward_danger", "reward_shutdown")),
    "fig7": ("expectation", ("reboots_input", "reboots_output", "reboots_total")),
    "fig8": ("expectation", ("number_sensors", "number_actuators")),
}


@dataclass
class ExperimentSpec:
    """``properties`` are formulas using the constant ``T`` (probability
    sweeps) or observed variable names (expectation sweeps)."""

    kind: str
    properties: tuple
    times: tuple = DEFAULT_TIMES
    n: int = 3000
    seed: int = 0
    model: str = "controlsys"
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    model_config: dict = field(default_factory=dict)

    def problems(self) -> list:
        out = []
        if self.kind not in ("probability", "expectation"):
            out.append(f"kind must be probability or expectation, got {self.kind!r}")
        if not self.properties:
            out.append("no properties given")
        if not self.times:
            out.append("no sweep times given")
        if any(t <= 0 for t in self.times):
            out.append("sweep times must be positive")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            out.append("sweep times must be strictly increasing")
        if type(self.n) is not int or self.n < 1:
            out.append(f"runs must be a positive integer, got {self.n!r}")
        if (self.epsilon is None) != (self.delta is None):
            out.append("epsilon and delta must be given together")
        if self.epsilon is not None and self.kind != "probability":
            out.append("a Chernoff bound only applies to probability sweeps")
        return out

    @property
    def runs(self) -> int:
        if self.epsilon is not None:
            return chernoff_sample_size(self.epsilon, self.delta)
        return self.n


def preset(name: str, **overrides) -> ExperimentSpec:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    kind, props = PRESETS[name]
    return replace(ExperimentSpec(kind, props), **overrides)


def parse_times(text) -> tuple:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return (float(text),)
    try:
        return tuple(parse_time(x) for x in str(text).split(",") if x.strip())
    except ValueError as e:
        raise ConfigError(str(e)) from None


def load_spec(path) -> ExperimentSpec:
    """Read an experiment from a flat config file.

    Keys: ``preset`` or ``kind`` plus ``properties`` (``;``-separated),
    ``times`` (comma-separated, unit suffixes allowed), ``runs``, ``seed``,
    ``model``, ``epsilon``/``delta``; any ``model.<name>`` key is passed on
    to the model as a parameter.
    """
    cfg = load_config(path)
    model_cfg = {k[6:]: cfg.pop(k) for k in list(cfg) if k.startswith("model.")}
    kw = {"model_config": model_cfg}
    if "times" in cfg:
        kw["times"] = parse_times(cfg.pop("times"))
    for key, attr in (("runs", "n"), ("seed", "seed"), ("model", "model"),
                      ("epsilon", "epsilon"), ("delta", "delta")):
        if key in cfg:
            kw[attr] = cfg.pop(key)
    if "preset" in cfg:
        name = cfg.pop("preset")
        spec = preset(str(name), **kw)
    else:
        if "kind" not in cfg or "properties" not in cfg:
            raise ConfigError(f"{path}: needs either preset or kind and properties")
        props = tuple(p.strip() for p in str(cfg.pop("properties")).split(";") if p.strip())
        spec = ExperimentSpec(str(cfg.pop("kind")), props, **kw)
    if cfg:
        raise ConfigError(f"{path}: unknown keys {sorted(cfg)}")
    return spec


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def run_experiment(spec: ExperimentSpec, model: Model, fh, jobs: int = 1) -> int:
    """Write the CSV for ``spec`` to ``fh``; returns the number of data rows."""
    problems = spec.problems()
    if problems:
        raise ConfigError("; ".join(problems))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    fh.flush()
    n = spec.runs
    rows = 0
    if spec.kind == "probability":
        # parse everything up front so a bad property fails before any simulation
        cells = [[model.parse(p, {"T": T}) for p in spec.properties] for T in spec.times]
        for T, formulas in zip(spec.times, cells):
            counts = count_satisfying(model, formulas, n, spec.seed, jobs)
            for prop, k in zip(spec.properties, counts):
                p = k / n
                lo, hi = normal_ci(p, n)
                w.writerow([_fmt(T), prop, _fmt(p), _fmt(lo), _fmt(hi), n, spec.seed])
                rows += 1
            fh.flush()
    else:
        stats = expectation_sweep(model, spec.properties, spec.times, n, spec.seed, jobs)
        for T in spec.times:
            for v in spec.properties:
                mean, se = stats[(v, T)]
                w.writerow([_fmt(T), v, _fmt(mean), _fmt(mean - Z95 * se),
                            _fmt(mean + Z95 * se), n, spec.seed])
                rows += 1
            fh.flush()
    return rows
