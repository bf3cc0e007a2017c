"""Server configuration: ``key = value`` lines plus environment overrides."""

from __future__ import annotations

import os
from pathlib import Path

ENV_OVERRIDES = {
    "QTRACE_LISTEN": "listen",
    "QTRACE_STORE": "store",
    "QTRACE_TOKENS": "users_file",
}

DEFAULTS = {
    "listen": "127.0.0.1:8787",
    "store": "./qtrace-store",
}


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path | None = None, environ: dict | None = None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    values = dict(DEFAULTS)
    if path is not None:
        values.update(parse_config_text(Path(path).read_text("utf-8")))
    for env_key, cfg_key in ENV_OVERRIDES.items():
        if environ.get(env_key):
            values[cfg_key] = environ[env_key]
    return values
