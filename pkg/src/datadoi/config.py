"""Deployment configuration: one JSON file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .workflow import QuestionWording

__all__ = ["ServiceConfig", "load_config", "ENV_PREFIX"]

ENV_PREFIX = "DATADOI_"


@dataclass(frozen=True)
class ServiceConfig:
    prefix: str = "10.17909"
    resolver_port: int = 8301
    ra_port: int = 8302
    workflow_port: int = 8303
    allowed_domains: tuple[str, ...] = ("stsci.edu",)
    question_wording: QuestionWording = QuestionWording.REVISED
    publisher: str = "MAST"
    data_dir: Path = field(default_factory=lambda: Path("data"))

    @property
    def resolver_base_url(self) -> str:
        return f"http://127.0.0.1:{self.resolver_port}"

    @property
    def ra_base_url(self) -> str:
        return f"http://127.0.0.1:{self.ra_port}"

    @property
    def journal_path(self) -> Path:
        return self.data_dir / "registry.journal"

    @property
    def session_log_path(self) -> Path:
        return self.data_dir / "sessions.log"

    @property
    def observations_path(self) -> Path:
        return self.data_dir / "observations.psv"

    @property
    def products_path(self) -> Path:
        return self.data_dir / "fixed_products.psv"


def _from_mapping(base: ServiceConfig, values: dict) -> ServiceConfig:
    updates = {}
    if "prefix" in values:
        updates["prefix"] = str(values["prefix"])
    for key in ("resolver_port", "ra_port", "workflow_port"):
        if key in values:
            updates[key] = int(values[key])
    if "allowed_domains" in values:
        domains = values["allowed_domains"]
        if isinstance(domains, str):
            domains = [d.strip() for d in domains.split(",") if d.strip()]
        updates["allowed_domains"] = tuple(domains)
    if "question_wording" in values:
        updates["question_wording"] = QuestionWording(str(values["question_wording"]))
    if "publisher" in values:
        updates["publisher"] = str(values["publisher"])
    if "data_dir" in values:
        updates["data_dir"] = Path(values["data_dir"])
    return replace(base, **updates)


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Resolve configuration: defaults, then the JSON file, then env vars."""
    config = ServiceConfig()
    if path is not None:
        with open(path, "r", encoding="utf-8") as handle:
            config = _from_mapping(config, json.load(handle))
    env = env if env is not None else dict(os.environ)
    overrides = {
        key[len(ENV_PREFIX) :].lower(): value
        for key, value in env.items()
        if key.startswith(ENV_PREFIX)
    }
    return _from_mapping(config, overrides)
