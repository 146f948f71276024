"""Service configuration: JSON file with environment overrides.

Environment variables win over the file; both are optional. Recognized:
CLICKPASS_LISTEN (host:port), CLICKPASS_DATA_DIR, CLICKPASS_SESSION_TTL,
CLICKPASS_VIEWPORT_SIDE, CLICKPASS_SCRYPT_LOG2N, CLICKPASS_SEED_DEMO.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "./clickpass-data"
    session_ttl: float = 600.0
    viewport_side: int = 75
    scrypt_log2_n: int = 14
    max_tolerance: int = 50
    seed_demo_images: int = 0  # >0: synthesize a starter portfolio on boot
    frontend_dir: str | None = None  # serve the built browser UI from here

    def validate(self) -> None:
        if self.session_ttl <= 0:
            raise ConfigError("session_ttl must be positive")
        if self.viewport_side < 1:
            raise ConfigError("viewport_side must be >= 1")
        if not (1 <= self.scrypt_log2_n <= 22):
            raise ConfigError("scrypt_log2_n out of range")


def load_config(
    path: str | Path | None = None, env: dict[str, str] | None = None
) -> ServiceConfig:
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text())
        known = {f.name for f in fields(ServiceConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)

    listen = env.get("CLICKPASS_LISTEN")
    if listen:
        host, _, port = listen.rpartition(":")
        values["host"] = host or values.get("host", "127.0.0.1")
        values["port"] = int(port)
    if env.get("CLICKPASS_DATA_DIR"):
        values["data_dir"] = env["CLICKPASS_DATA_DIR"]
    if env.get("CLICKPASS_SESSION_TTL"):
        values["session_ttl"] = float(env["CLICKPASS_SESSION_TTL"])
    if env.get("CLICKPASS_VIEWPORT_SIDE"):
        values["viewport_side"] = int(env["CLICKPASS_VIEWPORT_SIDE"])
    if env.get("CLICKPASS_SCRYPT_LOG2N"):
        values["scrypt_log2_n"] = int(env["CLICKPASS_SCRYPT_LOG2N"])
    if env.get("CLICKPASS_SEED_DEMO"):
        values["seed_demo_images"] = int(env["CLICKPASS_SEED_DEMO"])
    if env.get("CLICKPASS_FRONTEND_DIR"):
        values["frontend_dir"] = env["CLICKPASS_FRONTEND_DIR"]

    config = ServiceConfig(**values)
    config.validate()
    return config
