"""Workbench configuration: one JSON file plus environment-variable overrides.

The service and the CLI read the same file. Flat keys override via
``DEBIASWB_<KEY>`` (e.g. ``DEBIASWB_PORT``); model parameters via
``DEBIASWB_MODEL_<KEY>`` (e.g. ``DEBIASWB_MODEL_N_TREES``).
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .gbdt import GBDTParams
from .session import SessionConfig

ENV_PREFIX = "DEBIASWB_"


@dataclass
class AppConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "./debiaswb-data"
    session_id: str = "default"
    api_token: str | None = None
    frontend_dir: str | None = None
    # session bootstrap (optional): ingest this dataset at startup
    dataset_csv: str | None = None
    dataset_schema: str | None = None
    session: SessionConfig = field(default_factory=SessionConfig)

    def to_dict(self) -> dict:
        return {
            "host": self.host,
            "port": self.port,
            "data_dir": self.data_dir,
            "session_id": self.session_id,
            "api_token": self.api_token,
            "frontend_dir": self.frontend_dir,
            "dataset_csv": self.dataset_csv,
            "dataset_schema": self.dataset_schema,
            "session": self.session.to_dict(),
        }


def _coerce(value: str, like) -> object:
    if isinstance(like, bool):
        return value.lower() in ("1", "true", "yes", "on")
    if isinstance(like, int) and not isinstance(like, bool):
        return int(value)
    if isinstance(like, float):
        return float(value)
    return value


def load_config(path: str | Path | None = None, env: dict | None = None) -> AppConfig:
    env = os.environ if env is None else env
    raw: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text())
    cfg = AppConfig()

    session_raw = dict(raw.pop("session", {}))
    for key, value in raw.items():
        if hasattr(cfg, key) and key != "session":
            setattr(cfg, key, value)

    defaults = AppConfig()
    for key in ("host", "port", "data_dir", "session_id", "api_token",
                "frontend_dir", "dataset_csv", "dataset_schema"):
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            setattr(cfg, key, _coerce(env[env_key], getattr(defaults, key) or ""))

    session_defaults = SessionConfig().to_dict()
    for key, default in session_defaults.items():
        if key == "model_params":
            continue
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            ref = default if default is not None else 0
            session_raw[key] = _coerce(env[env_key], ref)

    model_raw = dict(session_raw.get("model_params", {}))
    for key, default in GBDTParams().to_dict().items():
        env_key = ENV_PREFIX + "MODEL_" + key.upper()
        if env_key in env:
            model_raw[key] = _coerce(env[env_key], default)
    if model_raw:
        session_raw["model_params"] = model_raw

    cfg.session = SessionConfig.from_dict(session_raw)
    return cfg
