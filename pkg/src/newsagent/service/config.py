"""Service configuration: JSON file plus NEWSAGENT_* environment overrides.

Relative paths in a config file are resolved against the file's
directory. Every configured path must exist at boot.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from newsagent.ingest import FeedSource

ENV_PREFIX = "NEWSAGENT_"


class ConfigError(Exception):
    """Configuration file missing, malformed, or pointing at absent paths."""


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    default_language: str = "en"
    languages: List[str] = field(default_factory=lambda: ["en", "de"])
    page_size: int = 3
    max_results: int = 30
    session_idle_timeout_s: int = 1800
    auto_create_sessions: bool = True
    debug_responses: bool = True
    min_confidence: float = 0.5
    related_entity_weight: int = 2
    related_tag_weight: int = 1
    default_rate: float = 1.0
    default_voice: Optional[str] = None
    ingest_on_start: bool = True
    scheduler_enabled: bool = False
    snapshot_path: Optional[str] = None
    gazetteer_path: Optional[str] = None
    query_templates_path: Optional[str] = None
    remote_linker_url: Optional[str] = None
    webapp_dir: Optional[str] = None
    # language -> path; unset languages use the packaged assets
    intent_config_paths: Dict[str, str] = field(default_factory=dict)
    response_template_paths: Dict[str, str] = field(default_factory=dict)
    sources: List[FeedSource] = field(default_factory=list)

    def validate(self):
        if self.page_size < 1:
            raise ConfigError("page_size must be >= 1")
        if self.default_language not in self.languages:
            raise ConfigError(
                f"default_language {self.default_language!r} not in languages {self.languages}"
            )
        must_exist = [self.gazetteer_path, self.query_templates_path, self.webapp_dir]
        must_exist += list(self.intent_config_paths.values())
        must_exist += list(self.response_template_paths.values())
        for path in must_exist:
            if path and not Path(path).exists():
                raise ConfigError(f"configured path does not exist: {path}")
        for source in self.sources:
            if source.kind == "file" and not Path(source.location).exists():
                raise ConfigError(f"feed file does not exist: {source.location}")


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, raw: str, current):
    if isinstance(current, bool):
        lowered = raw.strip().lower()
        if lowered in _BOOL_TRUE:
            return True
        if lowered in _BOOL_FALSE:
            return False
        raise ConfigError(f"{name}: cannot parse {raw!r} as a boolean")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


_ENV_FIELDS = (
    "host", "port", "default_language", "page_size", "max_results",
    "session_idle_timeout_s", "auto_create_sessions", "debug_responses",
    "min_confidence", "related_entity_weight", "related_tag_weight",
    "default_rate", "default_voice", "ingest_on_start", "scheduler_enabled",
    "snapshot_path", "gazetteer_path", "query_templates_path",
    "remote_linker_url", "webapp_dir",
)


def _apply_env(config: ServiceConfig, environ) -> ServiceConfig:
    for field_name in _ENV_FIELDS:
        env_name = ENV_PREFIX + field_name.upper()
        if env_name in environ:
            current = getattr(config, field_name)
            setattr(config, field_name, _coerce(field_name, environ[env_name], current))
    return config


def _resolve(base: Path, value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    path = Path(value)
    return str(path if path.is_absolute() else base / path)


def load_config(path=None, environ=None) -> ServiceConfig:
    """Build the runtime configuration from an optional JSON file."""
    environ = os.environ if environ is None else environ
    config = ServiceConfig()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        base = Path(path).resolve().parent
        path_keys = {"snapshot_path", "gazetteer_path", "query_templates_path", "webapp_dir"}
        for key, value in data.items():
            if key == "sources":
                config.sources = [
                    FeedSource(
                        id=s["id"],
                        kind=s.get("kind", "file"),
                        location=(
                            _resolve(base, s["location"])
                            if s.get("kind", "file") == "file"
                            else s["location"]
                        ),
                        interval_s=int(s.get("interval_s", 3600)),
                    )
                    for s in value
                ]
            elif key in ("intent_config_paths", "response_template_paths"):
                setattr(config, key, {lang: _resolve(base, p) for lang, p in value.items()})
            elif key in path_keys:
                setattr(config, key, _resolve(base, value))
            elif hasattr(config, key):
                setattr(config, key, value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
    _apply_env(config, environ)
    config.validate()
    return config
