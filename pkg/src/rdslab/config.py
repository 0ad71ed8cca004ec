"""Run configuration: strict TOML + flag parsing with named-key validation.

Unknown keys are fatal, every value is checked against its constraint
before any compute starts, and flags override file values.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    name: str
    type: type
    required: bool = False
    default: Any = None
    check: Optional[Callable[[Any], bool]] = None
    constraint: str = ""


def _pos(v) -> bool:
    return v > 0


def _nonneg(v) -> bool:
    return v >= 0


def _unit_interval_open(v) -> bool:
    return 0.0 <= v < 1.0


def _x0_ok(v) -> bool:
    return 0.0 <= v < 1.0


_CONVENTIONS = ("literal", "critical_normalized")


def _circle_fields(tau_required: bool = True) -> List[FieldSpec]:
    return [
        FieldSpec("tau", float, required=tau_required, check=lambda v: abs(v) < 1e6,
                  constraint="finite"),
        FieldSpec("eps", float, default=0.0, check=_unit_interval_open,
                  constraint="eps ∈ [0,1)"),
        FieldSpec("sigma", float, default=0.0, check=_nonneg, constraint="sigma ≥ 0"),
        FieldSpec("convention", str, default="literal",
                  check=lambda v: v in _CONVENTIONS,
                  constraint="one of " + "/".join(_CONVENTIONS)),
    ]


_QG_FIELDS = [
    FieldSpec("Lx", float, default=1.0, check=_pos, constraint="> 0"),
    FieldSpec("Ly", float, default=2.0, check=_pos, constraint="> 0"),
    FieldSpec("beta", float, default=20.0, check=_nonneg, constraint="≥ 0"),
    FieldSpec("lambda_R_inv2", float, default=0.0, check=_nonneg, constraint="≥ 0"),
    FieldSpec("nu", float, default=2e-3, check=_pos, constraint="> 0"),
    FieldSpec("mu", float, default=0.0, check=_nonneg, constraint="≥ 0"),
    FieldSpec("tau_w", float, default=0.5, check=_nonneg, constraint="≥ 0"),
    FieldSpec("nx", int, default=64, check=lambda v: v >= 16, constraint="≥ 16"),
    FieldSpec("ny", int, default=128, check=lambda v: v >= 16, constraint="≥ 16"),
    FieldSpec("dt", float, default=0.02, check=_pos, constraint="> 0"),
]

_ESTIMATOR_FIELDS = [
    FieldSpec("k", int, default=100_000, check=_pos, constraint="≥ 1"),
    FieldSpec("burn_in", int, default=1_000, check=_nonneg, constraint="≥ 0"),
    FieldSpec("q_max", int, default=50, check=_pos, constraint="≥ 1"),
    FieldSpec("tol", float, default=None, check=lambda v: v is None or v > 0,
              constraint="> 0"),
    FieldSpec("x0", float, default=0.17, check=_x0_ok, constraint="x0 ∈ [0,1)"),
]

COMMAND_SCHEMAS: Dict[str, List[FieldSpec]] = {
    "tongues": [
        FieldSpec("tau_lo", float, required=True),
        FieldSpec("tau_hi", float, required=True),
        FieldSpec("n_tau", int, required=True, check=lambda v: v >= 2, constraint="≥ 2"),
        FieldSpec("eps_lo", float, required=True, check=_unit_interval_open,
                  constraint="eps ∈ [0,1)"),
        FieldSpec("eps_hi", float, required=True, check=_unit_interval_open,
                  constraint="eps ∈ [0,1)"),
        FieldSpec("n_eps", int, required=True, check=_pos, constraint="≥ 1"),
        FieldSpec("sigma", float, default=0.0, check=_nonneg, constraint="sigma ≥ 0"),
        FieldSpec("convention", str, default="literal",
                  check=lambda v: v in _CONVENTIONS,
                  constraint="one of " + "/".join(_CONVENTIONS)),
        *_ESTIMATOR_FIELDS,
    ],
    "staircase": [
        FieldSpec("eps", float, required=True, check=_unit_interval_open,
                  constraint="eps ∈ [0,1)"),
        FieldSpec("sigma", float, default=0.0, check=_nonneg, constraint="sigma ≥ 0"),
        FieldSpec("convention", str, default="literal",
                  check=lambda v: v in _CONVENTIONS,
                  constraint="one of " + "/".join(_CONVENTIONS)),
        FieldSpec("tau_lo", float, default=0.0),
        FieldSpec("tau_hi", float, default=1.0),
        FieldSpec("n_samples", int, required=True, check=lambda v: v >= 2,
                  constraint="≥ 2"),
        FieldSpec("w_min", float, default=0.01, check=_pos, constraint="> 0"),
        *_ESTIMATOR_FIELDS,
    ],
    "pdf": [
        *_circle_fields(),
        FieldSpec("n", int, default=1_000_000, check=_pos, constraint="≥ 1"),
        FieldSpec("burn_in", int, default=5_000, check=_nonneg, constraint="≥ 0"),
        FieldSpec("bins", int, default=512, check=lambda v: v >= 8, constraint="≥ 8"),
        FieldSpec("x0", float, default=0.17, check=_x0_ok, constraint="x0 ∈ [0,1)"),
    ],
    "pullback": [
        *_circle_fields(),
        FieldSpec("T", int, default=4_000, check=_pos, constraint="≥ 1"),
        FieldSpec("m", int, default=32, check=lambda v: v >= 2, constraint="≥ 2"),
    ],
    "sync": [
        *_circle_fields(),
        FieldSpec("x0s", list, required=True,
                  check=lambda v: len(v) >= 2 and all(0.0 <= float(x) < 1.0 for x in v),
                  constraint="≥ 2 points, each in [0,1)"),
        FieldSpec("n", int, required=True, check=_pos, constraint="≥ 1"),
    ],
    "lyapunov": [
        *_circle_fields(),
        FieldSpec("n", int, default=1_000_000, check=_pos, constraint="≥ 1"),
        FieldSpec("burn_in", int, default=1_000, check=_nonneg, constraint="≥ 0"),
        FieldSpec("x0", float, default=0.17, check=_x0_ok, constraint="x0 ∈ [0,1)"),
    ],
    "classify": [
        *_circle_fields(),
        FieldSpec("pdf_n", int, default=1_000_000, check=_pos, constraint="≥ 1"),
        FieldSpec("bins", int, default=512, check=lambda v: v >= 8, constraint="≥ 8"),
        FieldSpec("mass_threshold", float, default=None,
                  check=lambda v: v is None or 0 < v < 1, constraint="∈ (0,1)"),
        FieldSpec("pullback_T", int, default=4_000, check=_pos, constraint="≥ 1"),
        FieldSpec("ensemble_m", int, default=32, check=lambda v: v >= 2, constraint="≥ 2"),
        FieldSpec("lyap_n", int, default=400_000, check=_pos, constraint="≥ 1"),
    ],
    "conjugacy": [
        FieldSpec("tau_a", float, required=True),
        FieldSpec("tau_b", float, required=True),
        FieldSpec("eps", float, default=0.0, check=_unit_interval_open,
                  constraint="eps ∈ [0,1)"),
        FieldSpec("sigma", float, required=True, check=_pos,
                  constraint="sigma > 0 (conjugacy classifies the noisy system)"),
        FieldSpec("convention", str, default="literal",
                  check=lambda v: v in _CONVENTIONS,
                  constraint="one of " + "/".join(_CONVENTIONS)),
        FieldSpec("pdf_n", int, default=1_000_000, check=_pos, constraint="≥ 1"),
        FieldSpec("bins", int, default=512, check=lambda v: v >= 8, constraint="≥ 8"),
        FieldSpec("pullback_T", int, default=4_000, check=_pos, constraint="≥ 1"),
        FieldSpec("ensemble_m", int, default=32, check=lambda v: v >= 2, constraint="≥ 2"),
        FieldSpec("lyap_n", int, default=400_000, check=_pos, constraint="≥ 1"),
    ],
    "qg-run": [
        *_QG_FIELDS,
        FieldSpec("t_max", float, required=True, check=_pos, constraint="> 0"),
        FieldSpec("window", float, required=True, check=_pos, constraint="> 0"),
        FieldSpec("sample_every", int, default=1, check=_pos, constraint="≥ 1"),
        FieldSpec("perturb_sign", int, default=0,
                  check=lambda v: v in (-1, 0, 1), constraint="-1, 0 or +1"),
    ],
    "qg-bif": [
        *_QG_FIELDS,
        FieldSpec("tau_w_values", list, required=True,
                  check=lambda v: len(v) >= 2 and all(float(b) > float(a) for a, b in zip(v, v[1:])),
                  constraint="sorted ascending, length ≥ 2"),
        FieldSpec("sign", str, default="both",
                  check=lambda v: v in ("plus", "minus", "both"),
                  constraint="plus, minus or both"),
        FieldSpec("t_max", float, default=1500.0, check=_pos, constraint="> 0"),
        FieldSpec("window", float, default=40.0, check=_pos, constraint="> 0"),
        FieldSpec("asym_threshold", float, default=1e-4, check=_pos, constraint="> 0"),
    ],
}

COMMANDS = tuple(COMMAND_SCHEMAS)

_TOP_LEVEL_KEYS = {"command", "seed", "workers", "out_dir", "params"}


@dataclass
class RunConfig:
    command: str
    params: Dict[str, Any]
    seed: int
    out_dir: Path
    workers: int

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": {k: (str(v) if isinstance(v, Path) else v)
                       for k, v in self.params.items()},
            "seed": self.seed,
            "workers": self.workers,
        }


def _coerce(spec: FieldSpec, value: Any) -> Any:
    if value is None:
        return None
    if spec.type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{spec.name}: expected a number, got {value!r}")
        return float(value)
    if spec.type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{spec.name}: expected an integer, got {value!r}")
        return int(value)
    if spec.type is str:
        if not isinstance(value, str):
            raise ConfigError(f"{spec.name}: expected a string, got {value!r}")
        return value
    if spec.type is list:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{spec.name}: expected a list, got {value!r}")
        return [float(v) for v in value]
    raise ConfigError(f"{spec.name}: unsupported type")


def parse_config(
    command: str,
    config_file: Optional[Path] = None,
    flag_params: Optional[Dict[str, Any]] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    out_dir: Optional[Path] = None,
) -> RunConfig:
    """Merge file and flags (flags win), validate strictly, return RunConfig."""
    if command not in COMMAND_SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    schema = {f.name: f for f in COMMAND_SCHEMAS[command]}

    file_top: Dict[str, Any] = {}
    file_params: Dict[str, Any] = {}
    if config_file is not None:
        try:
            file_top = tomllib.loads(Path(config_file).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {config_file}")
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config file is not valid TOML: {exc}")
        unknown_top = set(file_top) - _TOP_LEVEL_KEYS
        if unknown_top:
            raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(unknown_top))}")
        if "command" in file_top and file_top["command"] != command:
            raise ConfigError(
                f"config file is for command {file_top['command']!r}, not {command!r}"
            )
        file_params = dict(file_top.get("params", {}))
        unknown = set(file_params) - set(schema)
        if unknown:
            raise ConfigError(
                f"unknown key(s) for {command}: {', '.join(sorted(unknown))}"
            )

    merged: Dict[str, Any] = dict(file_params)
    for key, val in (flag_params or {}).items():
        if val is None:
            continue
        if key not in schema:
            raise ConfigError(f"unknown key(s) for {command}: {key}")
        merged[key] = val

    params: Dict[str, Any] = {}
    for name, spec in schema.items():
        if name in merged:
            value = _coerce(spec, merged[name])
        elif spec.required:
            raise ConfigError(f"missing required key for {command}: {name}")
        else:
            value = spec.default
        if value is not None and spec.check is not None and not spec.check(value):
            raise ConfigError(f"{name}: out of range, constraint: {spec.constraint}")
        params[name] = value

    seed_val = seed if seed is not None else int(file_top.get("seed", 0))
    workers_val = workers if workers is not None else int(file_top.get("workers", 1))
    if workers_val < 1:
        raise ConfigError("workers: must be ≥ 1")
    out_val = Path(out_dir) if out_dir is not None else Path(file_top.get("out_dir", "out"))
    return RunConfig(
        command=command, params=params, seed=seed_val,
        out_dir=out_val, workers=workers_val,
    )
