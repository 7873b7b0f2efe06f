"""Run configuration: JSON parsing, validation and normalised serialisation."""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional

from .chain import ChainKind, ChainSpec
from .driving import AMP_KEYS, DrivingConfig
from .errors import ConfigError, SpecificationError
from .liouvillian import SolverMode


class Experiment(str, enum.Enum):
    STEADY_STATE = "STEADY_STATE"
    ONE_WAY_STREET = "ONE_WAY_STREET"
    SYMMETRY_AUDIT = "SYMMETRY_AUDIT"
    UNIQUENESS_AUDIT = "UNIQUENESS_AUDIT"
    ALL = "ALL"


CHAIN_KEYS = ("n", "kind", "alpha", "alphas", "deltas", "fields_z")
DRIVING_KEYS = ("case", "gamma", "f", "theta", *AMP_KEYS, "orientation")
SOLVER_KEYS = ("mode", "tol", "max_steps")
OUTPUT_KEYS = ("report", "profiles_csv")
TOP_KEYS = ("chain", "driving", "experiment", "solver", "output", "seed")


@dataclass(frozen=True)
class SolverConfig:
    mode: SolverMode = SolverMode.DENSE
    tol: float = 1e-10
    max_steps: int = 200_000


@dataclass(frozen=True)
class OutputConfig:
    report: Optional[str] = None
    profiles_csv: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    chain: ChainSpec
    driving: DrivingConfig
    experiment: Experiment = Experiment.STEADY_STATE
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: Optional[int] = None


def _line_of(text: Optional[str], key: str) -> Optional[int]:
    if not text:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key.rsplit(".", 1)[-1]), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _section(raw: dict, name: str, allowed, text, required: bool = True) -> dict:
    sub = raw.get(name)
    if sub is None:
        if required:
            raise ConfigError("missing section", key=name)
        return {}
    if not isinstance(sub, dict):
        raise ConfigError("expected an object", key=name, line=_line_of(text, name))
    for k in sub:
        if k not in allowed:
            raise ConfigError("unknown key", key=f"{name}.{k}", line=_line_of(text, k))
    return sub


def _number(value: Any, key: str, text, integer: bool = False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"expected {kind}, got {value!r}", key=key, line=_line_of(text, key))
    return value


def _numbers(value: Any, key: str, text) -> Optional[tuple[float, ...]]:
    if value is None:
        return None
    if not isinstance(value, list):
        raise ConfigError("expected a list of numbers", key=key, line=_line_of(text, key))
    return tuple(float(_number(v, key, text)) for v in value)


def config_from_dict(raw: Any, text: Optional[str] = None) -> RunConfig:
    """Validate a decoded JSON document. ``text`` is only used for line numbers."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object", line=1 if text else None)
    for k in raw:
        if k not in TOP_KEYS:
            raise ConfigError("unknown key", key=k, line=_line_of(text, k))

    ch = _section(raw, "chain", CHAIN_KEYS, text)
    if "n" not in ch:
        raise ConfigError("missing key", key="chain.n")
    try:
        chain = ChainSpec(
            n=_number(ch["n"], "chain.n", text, integer=True),
            kind=ch.get("kind", "XXZ"),
            alpha=None if ch.get("alpha") is None else float(_number(ch["alpha"], "chain.alpha", text)),
            alphas=_numbers(ch.get("alphas"), "chain.alphas", text),
            deltas=_numbers(ch.get("deltas"), "chain.deltas", text),
            fields_z=_numbers(ch.get("fields_z"), "chain.fields_z", text) or (),
        )
    except SpecificationError as exc:
        raise ConfigError(str(exc), key="chain", line=_line_of(text, "chain")) from None

    dr = _section(raw, "driving", DRIVING_KEYS, text)
    if "case" not in dr:
        raise ConfigError("missing key", key="driving.case")
    kwargs = {k: float(_number(v, f"driving.{k}", text)) for k, v in dr.items()
              if k not in ("case", "orientation")}
    try:
        driving = DrivingConfig(case=dr["case"], orientation=dr.get("orientation", "NORMAL"), **kwargs)
    except SpecificationError as exc:
        raise ConfigError(str(exc), key="driving", line=_line_of(text, "driving")) from None

    try:
        experiment = Experiment(raw.get("experiment", "STEADY_STATE"))
    except ValueError:
        raise ConfigError(f"unknown experiment {raw.get('experiment')!r}", key="experiment",
                          line=_line_of(text, "experiment")) from None

    so = _section(raw, "solver", SOLVER_KEYS, text, required=False)
    try:
        mode = SolverMode(so.get("mode", "DENSE"))
    except ValueError:
        raise ConfigError(f"unknown solver mode {so.get('mode')!r}", key="solver.mode",
                          line=_line_of(text, "mode")) from None
    tol = float(_number(so.get("tol", 1e-10), "solver.tol", text))
    max_steps = _number(so.get("max_steps", 200_000), "solver.max_steps", text, integer=True)
    if tol <= 0 or max_steps <= 0:
        raise ConfigError("tol and max_steps must be positive", key="solver")
    solver = SolverConfig(mode, tol, max_steps)

    out = _section(raw, "output", OUTPUT_KEYS, text, required=False)
    for k, v in out.items():
        if v is not None and not isinstance(v, str):
            raise ConfigError("expected a path string", key=f"output.{k}", line=_line_of(text, k))
    output = OutputConfig(out.get("report"), out.get("profiles_csv"))

    seed = raw.get("seed")
    if seed is not None:
        seed = _number(seed, "seed", text, integer=True)
    return RunConfig(chain, driving, experiment, solver, output, seed)


def parse_config(text: str) -> RunConfig:
    """Parse a JSON run configuration.

    Raises
    ------
    ConfigError
        On malformed JSON, unknown keys or invalid values; the message carries
        the offending key and line when they can be located.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return config_from_dict(raw, text)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(cfg: RunConfig) -> dict:
    """Normalised form: every key present, enums as strings, absent values as ``None``."""
    c, d = cfg.chain, cfg.driving
    xxz = c.kind is ChainKind.XXZ
    return {
        "chain": {
            "n": c.n,
            "kind": c.kind.value,
            "alpha": c.alpha if xxz else None,
            "alphas": None if xxz else list(c.alphas),
            "deltas": list(c.deltas) if xxz else None,
            "fields_z": list(c.fields_z),
        },
        "driving": {
            "case": d.case.value,
            "gamma": d.gamma,
            "f": d.f,
            "theta": d.theta,
            **{k: getattr(d, k) for k in AMP_KEYS},
            "orientation": d.orientation.value,
        },
        "experiment": cfg.experiment.value,
        "solver": {"mode": cfg.solver.mode.value, "tol": cfg.solver.tol,
                   "max_steps": cfg.solver.max_steps},
        "output": {"report": cfg.output.report, "profiles_csv": cfg.output.profiles_csv},
        "seed": cfg.seed,
    }


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"
