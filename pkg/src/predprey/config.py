"""Run configuration: a flat key = value file with sections, chosen so
experiment configs diff cleanly. Canonical re-emission gives a stable
snapshot text whose hash identifies the run setup."""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
from dataclasses import dataclass

from .neat import NeatConfig
from .sensors import CameraModel
from .world import ArenaConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    arena: ArenaConfig = ArenaConfig()
    camera: CameraModel = CameraModel()
    neat: NeatConfig = NeatConfig()
    evaluations_per_individual: int = 5
    hof_window: int = 10
    master_seed: int = 1
    output_dir: str = "runs/run"

    def __post_init__(self):
        if self.evaluations_per_individual < 1:
            raise ConfigError("evaluations_per_individual must be >= 1")
        if self.hof_window < 1:
            raise ConfigError("hof_window must be >= 1")


_RUN_FIELDS = ("master_seed", "evaluations_per_individual", "hof_window",
               "output_dir")

_SECTIONS = {
    "run": None,          # scalar fields straight on RunConfig
    "arena": ArenaConfig,
    "camera": CameraModel,
    "neat": NeatConfig,
}


def _format_value(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _parse_value(raw: str, target_type, where: str):
    try:
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(
            f"{where}: cannot parse {raw!r} as {target_type.__name__}") from None


def canonical_text(cfg: RunConfig) -> str:
    """Stable snapshot text: fixed section and key order."""
    out = io.StringIO()
    out.write("[run]\n")
    for name in _RUN_FIELDS:
        out.write(f"{name} = {_format_value(getattr(cfg, name))}\n")
    for section, cls in _SECTIONS.items():
        if cls is None:
            continue
        out.write(f"\n[{section}]\n")
        obj = getattr(cfg, section)
        for f in dataclasses.fields(cls):
            out.write(f"{f.name} = {_format_value(getattr(obj, f.name))}\n")
    return out.getvalue()


def config_hash(cfg: RunConfig) -> str:
    """Hash of the result-relevant configuration. output_dir is excluded:
    it changes where a run lives, never what it computes."""
    normalized = dataclasses.replace(cfg, output_dir="")
    return hashlib.sha256(canonical_text(normalized).encode("utf-8")).hexdigest()


def parse_run_config(text: str) -> RunConfig:
    parser = configparser.RawConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    known = set(_SECTIONS)
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}]")

    kwargs = {}
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            if key not in _RUN_FIELDS:
                raise ConfigError(f"unknown key run.{key}")
            target = str if key == "output_dir" else int
            kwargs[key] = _parse_value(raw, target, f"run.{key}")

    for section, cls in _SECTIONS.items():
        if cls is None or not parser.has_section(section):
            continue
        by_name = {f.name: f for f in dataclasses.fields(cls)}
        section_kwargs = {}
        for key, raw in parser.items(section):
            if key not in by_name:
                raise ConfigError(f"unknown key {section}.{key}")
            target = by_name[key].type
            if isinstance(target, str):
                target = {"int": int, "float": float, "str": str}.get(target, float)
            section_kwargs[key] = _parse_value(raw, target, f"{section}.{key}")
        try:
            kwargs[section] = cls(**section_kwargs)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {exc}") from None

    try:
        return RunConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_run_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_run_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
