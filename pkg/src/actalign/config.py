"""Run configuration: one snapshot object that is serialized verbatim into
every report, so any result can be reproduced from its own file."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .kernels import active_backend


@dataclass
class RunConfig:
    label: str = ""
    manifest: str = ""
    method: str = "actalign"
    scripts: str | None = None
    names: str | None = None
    calibration: str | None = None
    prompt_style: str = "context_rich"
    context_augmented: bool = False
    smoothing_window: int = 31
    renormalize: bool = True
    dtw_endpoint: str = "anchored_end"
    tie_break: tuple[str, str, str] = ("diagonal", "up", "left")
    seed: int = 0
    trials: int = 1
    workers: int = 1
    backend: str = ""

    def __post_init__(self) -> None:
        if not self.backend:
            self.backend = active_backend()
        if isinstance(self.tie_break, list):
            self.tie_break = tuple(self.tie_break)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["tie_break"] = list(self.tie_break)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config file {path}: top level must be an object")
        return cls.from_dict(doc)
