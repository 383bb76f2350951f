"""Layered application configuration.

Precedence, highest first: explicit overrides (CLI flags), environment
variables (``LAZYLINT_<SECTION>__<KEY>``), a JSON config file, built-in
defaults.  Unknown keys are rejected so typos fail loudly instead of being
silently ignored.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .feedback.fitness import FORBIDDEN_TERMS, FitnessConfig
from .feedback.evolve import GaConfig
from .gateway import GatewayConfig

ENV_PREFIX = "LAZYLINT_"

DEFAULTS: dict[str, dict[str, Any]] = {
    "gateway": {
        "backend": "replay",
        "base_url": "http://localhost:8080/v1",
        "model": "default",
        "temperature": 0.0,
        "max_tokens": 1024,
        "retries": 3,
        "backoff_s": 1.0,
        "timeout_s": 60.0,
        "replay_path": None,
        "replay_fallback": None,
        "cache_dir": None,
        "parallelism": 8,
    },
    "ga": {
        "population_size": 10,
        "n_parents": 5,
        "tau": 0.1,
        "n_generations": 3,
        "seed": 0,
        "n_max": 5,
        "ngram_n": 2,
        "forbidden_terms": list(FORBIDDEN_TERMS),
        "length_reward": "as-printed",
    },
    "paths": {
        "registry": None,
        "templates": None,
        "prompts_dir": None,
        "detector_dir": ".",
    },
    "service": {
        "port": 8723,
        "cors_origins": ["*"],
        "deadline_s": 120.0,
        "allow_generic_template": True,
    },
}


class ConfigError(ValueError):
    pass


@dataclass(slots=True)
class AppConfig:
    gateway: GatewayConfig
    ga: GaConfig
    registry_path: str | None
    templates_path: str | None
    prompts_dir: str | None
    detector_dir: str
    port: int
    cors_origins: list[str]
    deadline_s: float
    allow_generic_template: bool
    raw: dict = field(default_factory=dict)


def _merge_section(base: dict, extra: Mapping, source: str) -> None:
    for section, values in extra.items():
        if section not in base:
            raise ConfigError(f"{source}: unknown config section {section!r}")
        if not isinstance(values, Mapping):
            raise ConfigError(f"{source}: section {section!r} must be an object")
        for key, value in values.items():
            if key not in base[section]:
                raise ConfigError(f"{source}: unknown key {section}.{key}")
            base[section][key] = value


def _env_layer(env: Mapping[str, str]) -> dict:
    layer: dict[str, dict[str, Any]] = {}
    for name, raw in env.items():
        if not name.startswith(ENV_PREFIX) or "__" not in name:
            continue
        section, _, key = name[len(ENV_PREFIX):].partition("__")
        section = section.lower()
        key = key.lower()
        try:
            value: Any = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        layer.setdefault(section, {})[key] = value
    return layer


def load_config(path: str | Path | None = None,
                env: Mapping[str, str] | None = None,
                overrides: Mapping[str, Mapping[str, Any]] | None = None) -> AppConfig:
    merged = {section: dict(values) for section, values in DEFAULTS.items()}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, Mapping):
            raise ConfigError(f"config file {path} must hold a JSON object")
        _merge_section(merged, data, str(path))
    env_map = _env_layer(os.environ if env is None else env)
    _merge_section(merged, env_map, "environment")
    if overrides:
        _merge_section(merged, overrides, "flags")
    return _build(merged)


def _build(merged: dict) -> AppConfig:
    g = merged["gateway"]
    try:
        gateway = GatewayConfig(
            backend=str(g["backend"]),
            base_url=str(g["base_url"]),
            model=str(g["model"]),
            temperature=float(g["temperature"]),
            max_tokens=int(g["max_tokens"]),
            retries=int(g["retries"]),
            backoff_s=float(g["backoff_s"]),
            timeout_s=float(g["timeout_s"]),
            replay_path=g["replay_path"],
            replay_fallback=g["replay_fallback"],
            cache_dir=g["cache_dir"],
            parallelism=int(g["parallelism"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"gateway config: {exc}") from exc

    a = merged["ga"]
    try:
        ga = GaConfig(
            population_size=int(a["population_size"]),
            n_parents=int(a["n_parents"]),
            tau=float(a["tau"]),
            n_generations=int(a["n_generations"]),
            seed=int(a["seed"]),
            fitness=FitnessConfig(
                n_max=int(a["n_max"]),
                ngram_n=int(a["ngram_n"]),
                forbidden_terms=tuple(a["forbidden_terms"]),
                length_reward=str(a["length_reward"]),
            ),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"ga config: {exc}") from exc

    p = merged["paths"]
    s = merged["service"]
    try:
        return AppConfig(
            gateway=gateway,
            ga=ga,
            registry_path=p["registry"],
            templates_path=p["templates"],
            prompts_dir=p["prompts_dir"],
            detector_dir=str(p["detector_dir"]),
            port=int(s["port"]),
            cors_origins=list(s["cors_origins"]),
            deadline_s=float(s["deadline_s"]),
            allow_generic_template=bool(s["allow_generic_template"]),
            raw=merged,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"service config: {exc}") from exc
