"""Flat key/value experiment configs.

The config format is a plain text file of ``key = value`` lines with
typed fields and explicit units in the field names, chosen for
diff-friendliness in regression suites.  ``#`` starts a comment.  Sweep
axes are written as ``sweep.<field> = v1, v2, ...`` where ``<field>``
is an engine field, or one of the linked axes ``n_ensembles`` (sets
both ensemble counts) and ``d_bath`` (sets both particle dimensions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .cycles import EngineSpec, frequency_schedule

EXPERIMENTS = (
    "fig2_single_ensemble",
    "fig3_interaction_counts",
    "fig4_dimension_optimum",
    "fig5_many_cycles",
    "fig6_stochastic_efficiency",
    "fig7_workeff_sweep",
    "custom_sweep",
)

FILTER_MODES = ("nonzero_heat", "strict_positive")
GROUPING_MODES = ("rational", "float")

VIRTUAL_AXES = ("n_ensembles", "d_bath")

_ENGINE_FIELDS = {
    "beta_hot_inverse_energy": ("beta_hot", float),
    "beta_cold_inverse_energy": ("beta_cold", float),
    "omega_hot_last_energy": ("omega_hot_last", float),
    "omega_cold_last_energy": ("omega_cold_last", float),
    "n_hot": ("n_hot", int),
    "n_cold": ("n_cold", int),
    "d_system": ("d_system", int),
    "d_hot": ("d_hot", int),
    "d_cold": ("d_cold", int),
    "interaction": ("interaction", str),
    "theta_radians": ("theta", float),
    "eps": ("eps", float),
    "h_system_diag_energy": ("h_system_diag", "float_list"),
}

_RUN_FIELDS = {
    "experiment": str,
    "output_dir": str,
    "seed": int,
    "filter_mode": str,
    "grouping_mode": str,
    "cycles": int,
    "n_samples": int,
    "grid_n_values": "int_list",
    "grid_m_values": "int_list",
    "jobs": int,
    "simulate": bool,
}

_AXIS_TYPES = {
    "beta_hot": float,
    "beta_cold": float,
    "omega_hot_last": float,
    "omega_cold_last": float,
    "n_hot": int,
    "n_cold": int,
    "d_system": int,
    "d_hot": int,
    "d_cold": int,
    "theta": float,
    "eps": float,
    "interaction": str,
    "n_ensembles": int,
    "d_bath": int,
}

_ENGINE_DEFAULTS = dict(
    beta_hot=1e-2,
    beta_cold=1.0,
    omega_hot_last=10.0,
    omega_cold_last=1.0,
    n_hot=10,
    n_cold=10,
    d_system=2,
    d_hot=2,
    d_cold=2,
    interaction="jaynes_cummings",
    theta=math.pi / 2,
    eps=1e-9,
)


class ConfigError(ValueError):
    """Invalid experiment config, with the offending location attached."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"field {key!r}")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    engine: EngineSpec
    output_dir: str | None = None
    seed: int = 0
    sweep: tuple[tuple[str, tuple], ...] = ()
    filter_mode: str | None = None
    grouping_mode: str | None = None
    cycles: int = 100
    n_samples: int = 100_000
    grid_n_values: tuple[int, ...] | None = None
    grid_m_values: tuple[int, ...] | None = None
    jobs: int | None = None
    simulate: bool = False
    source: tuple[tuple[str, str], ...] = ()


def _coerce(raw: str, kind, line: int, key: str):
    raw = raw.strip()
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            if raw.lower() in ("true", "yes", "1"):
                return True
            if raw.lower() in ("false", "no", "0"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "int_list":
            return tuple(int(tok) for tok in raw.split(",") if tok.strip())
        if kind == "float_list":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(str(exc), line=line, key=key) from None


def _parse_lines(text: str) -> list[tuple[int, str, str]]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = line.split("=", 1)
        entries.append((lineno, key.strip(), value.strip()))
    return entries


def load_config(path: str) -> ExperimentConfig:
    """Parse and fully validate a config file."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    entries = _parse_lines(text)

    engine_kwargs = dict(_ENGINE_DEFAULTS)
    run_kwargs: dict = {}
    sweep: list[tuple[str, tuple]] = []
    seen: set[str] = set()
    for lineno, key, value in entries:
        if key in seen:
            raise ConfigError("duplicate field", line=lineno, key=key)
        seen.add(key)
        if key.startswith("sweep."):
            axis = key[len("sweep.") :]
            if axis not in _AXIS_TYPES:
                raise ConfigError(
                    f"unknown sweep axis; engine fields are "
                    f"{sorted(_AXIS_TYPES)}",
                    line=lineno,
                    key=key,
                )
            kind = _AXIS_TYPES[axis]
            if kind is str:
                values = tuple(tok.strip() for tok in value.split(",") if tok.strip())
            else:
                values = _coerce(value, "int_list" if kind is int else "float_list", lineno, key)
            if not values:
                raise ConfigError("sweep axis has an empty value list", line=lineno, key=key)
            sweep.append((axis, values))
        elif key in _ENGINE_FIELDS:
            target, kind = _ENGINE_FIELDS[key]
            engine_kwargs[target] = _coerce(value, kind, lineno, key)
        elif key in _RUN_FIELDS:
            run_kwargs[key] = _coerce(value, _RUN_FIELDS[key], lineno, key)
        else:
            raise ConfigError("unknown field", line=lineno, key=key)

    if "experiment" not in run_kwargs:
        raise ConfigError("missing required field 'experiment'")
    experiment = run_kwargs["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}",
            key="experiment",
        )
    for key, allowed in (("filter_mode", FILTER_MODES), ("grouping_mode", GROUPING_MODES)):
        if key in run_kwargs and run_kwargs[key] not in allowed:
            raise ConfigError(f"expected one of {allowed}", key=key)
    if engine_kwargs["interaction"] not in ("swap", "jaynes_cummings"):
        raise ConfigError(
            "expected 'swap' or 'jaynes_cummings'", key="interaction"
        )

    if experiment == "fig2_single_ensemble":
        engine_kwargs["n_hot"] = 1
        engine_kwargs["n_cold"] = 1
    try:
        engine = EngineSpec(**engine_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    for key in ("cycles", "n_samples"):
        if key in run_kwargs and run_kwargs[key] < 1:
            raise ConfigError("must be >= 1", key=key)
    if "jobs" in run_kwargs and run_kwargs["jobs"] < 1:
        raise ConfigError("must be >= 1", key="jobs")

    return ExperimentConfig(
        experiment=experiment,
        engine=engine,
        output_dir=run_kwargs.get("output_dir"),
        seed=run_kwargs.get("seed", 0),
        sweep=tuple(sweep),
        filter_mode=run_kwargs.get("filter_mode"),
        grouping_mode=run_kwargs.get("grouping_mode"),
        cycles=run_kwargs.get("cycles", 100),
        n_samples=run_kwargs.get("n_samples", 100_000),
        grid_n_values=run_kwargs.get("grid_n_values"),
        grid_m_values=run_kwargs.get("grid_m_values"),
        jobs=run_kwargs.get("jobs"),
        simulate=run_kwargs.get("simulate", False),
        source=tuple((k, v) for _, k, v in entries),
    )


def sweep_points(config: ExperimentConfig) -> list[dict]:
    """Cross product of the sweep axes, in config order.

    Each point is a dict of engine-field overrides; linked axes are
    expanded to the pair of real fields they control.
    """
    points: list[dict] = [{}]
    for axis, values in config.sweep:
        expanded = []
        for base in points:
            for value in values:
                override = dict(base)
                if axis == "n_ensembles":
                    override["n_hot"] = value
                    override["n_cold"] = value
                elif axis == "d_bath":
                    override["d_hot"] = value
                    override["d_cold"] = value
                else:
                    override[axis] = value
                expanded.append(override)
        points = expanded
    return points


def apply_overrides(engine: EngineSpec, override: dict) -> EngineSpec:
    if not override:
        return engine
    if "h_system_diag" not in override and (
        "d_system" in override or "omega_cold_last" in override
    ):
        default_h = tuple(
            engine.omega_cold_last * k for k in range(engine.d_system)
        )
        if engine.h_system_diag == default_h:
            # defaulted Hamiltonian: re-derive it for the new point
            override = dict(override, h_system_diag=None)
    return replace(engine, **override)


def describe_config(config: ExperimentConfig) -> list[str]:
    """Human-readable echo of the resolved config and derived quantities."""
    engine = config.engine
    sched = frequency_schedule(engine)
    lines = [
        f"experiment: {config.experiment}",
        f"interaction: {engine.interaction} (theta = {engine.theta:.12g})",
        f"dimensions: d_system={engine.d_system} d_hot={engine.d_hot} "
        f"d_cold={engine.d_cold}",
        f"ensembles: n_hot={engine.n_hot} n_cold={engine.n_cold}  eps={engine.eps:g}",
        f"carnot efficiency: {engine.carnot:.12g}",
        f"hot ramp: omega_0={sched.omega0:.12g} omega_1={sched.omega[0]:.12g} "
        f"... omega_N={sched.omega[-1]:.12g}",
        f"cold ramp: Omega_0={sched.Omega0:.12g} Omega_1={sched.Omega[0]:.12g} "
        f"... Omega_M={sched.Omega[-1]:.12g}",
    ]
    if config.sweep:
        for axis, values in config.sweep:
            lines.append(f"sweep {axis}: {len(values)} values {list(values)}")
        lines.append(f"sweep points: {len(sweep_points(config))}")
    lines.append(f"seed: {config.seed}")
    return lines
