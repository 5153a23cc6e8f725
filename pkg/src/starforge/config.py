"""Flat key/value run configuration loaded from JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .architecture import CostModel
from .binder import BindingConfig


class ConfigError(ValueError):
    pass


EMIT_KINDS = ("json", "dot", "rtl", "csv")

_COST_KEYS = {
    "reg_slot_cost": "reg_slot",
    "fifo_slot_cost": "fifo_slot",
    "lifo_slot_cost": "lifo_slot",
    "control_cost": "control",
}
_BINDING_KEYS = {f.name for f in fields(BindingConfig)}
_RUN_KEYS = {"name", "out", "emit", "seed"}


@dataclass
class RunConfig:
    name: str = "default"
    binding: BindingConfig = field(default_factory=BindingConfig)
    cost: CostModel = field(default_factory=CostModel)
    out: str | None = None
    emit: tuple[str, ...] = ("json",)
    seed: int | None = None


def _check_type(key: str, value: Any, kind: type) -> None:
    ok = isinstance(value, kind) and not (kind is not bool and isinstance(value, bool))
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if not ok:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}")


def parse_emit(value: str | list[str]) -> tuple[str, ...]:
    items = value.split(",") if isinstance(value, str) else list(value)
    items = [i.strip() for i in items if i.strip()]
    bad = [i for i in items if i not in EMIT_KINDS]
    if bad:
        raise ConfigError(f"emit: unknown kind(s) {bad}; choose from {list(EMIT_KINDS)}")
    return tuple(k for k in EMIT_KINDS if k in items)


def config_from_dict(doc: dict[str, Any], name: str = "default") -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = sorted(set(doc) - _BINDING_KEYS - set(_COST_KEYS) - _RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    types = {f.name: f.type for f in fields(BindingConfig)}
    bkw = {}
    for key in _BINDING_KEYS & set(doc):
        kind = {"int": int, "float": float, "bool": bool, "str": str}[types[key]]
        _check_type(key, doc[key], kind)
        bkw[key] = doc[key]
    ckw = {}
    for key, attr in _COST_KEYS.items():
        if key in doc:
            _check_type(key, doc[key], float)
            ckw[attr] = float(doc[key])
    try:
        binding = BindingConfig(**bkw)
        cost = CostModel(**ckw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg = RunConfig(name=str(doc.get("name", name)), binding=binding, cost=cost)
    if "out" in doc:
        _check_type("out", doc["out"], str)
        cfg.out = doc["out"]
    if "emit" in doc:
        cfg.emit = parse_emit(doc["emit"])
    if "seed" in doc:
        _check_type("seed", doc["seed"], int)
        cfg.seed = doc["seed"]
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(doc, name=path.stem)
