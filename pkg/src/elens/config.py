"""Service configuration: config file with environment overrides.

Config file (JSON): {"listen": "127.0.0.1:8910", "data_dir": "...",
"token_file": "..."}. Environment variables ELENS_LISTEN, ELENS_DATA_DIR
and ELENS_TOKEN_FILE override the file.

The token file maps bearer tokens to users and their stakeholder role:
{"<token>": {"user": "ada", "role": "AiSupplier"}}. Roles, not identity,
gate every operation; anonymous requests act as visitors.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ElensError
from .vocab import StakeholderRole


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8910
    data_dir: Path = Path("elens-data")
    token_file: Path | None = None


@dataclass(frozen=True)
class Identity:
    user: str
    role: StakeholderRole


@dataclass
class TokenTable:
    tokens: dict[str, Identity] = field(default_factory=dict)

    @classmethod
    def load(cls, path: Path | None) -> "TokenTable":
        if path is None or not Path(path).exists():
            return cls()
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        tokens = {}
        for token, entry in raw.items():
            try:
                role = StakeholderRole(entry["role"])
            except (KeyError, ValueError) as exc:
                raise ElensError(f"bad token entry for {entry!r}: {exc}") from None
            tokens[token] = Identity(user=entry.get("user", "unknown"), role=role)
        return cls(tokens)

    def identify(self, token: str | None) -> Identity:
        if token is None:
            return Identity(user="anonymous", role=StakeholderRole.VISITOR)
        identity = self.tokens.get(token)
        if identity is None:
            return Identity(user="anonymous", role=StakeholderRole.VISITOR)
        return identity


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    config = ServiceConfig()
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        listen = raw.get("listen")
        if listen:
            config.host, config.port = _split_listen(listen)
        if raw.get("data_dir"):
            config.data_dir = Path(raw["data_dir"])
        if raw.get("token_file"):
            config.token_file = Path(raw["token_file"])
    if env.get("ELENS_LISTEN"):
        config.host, config.port = _split_listen(env["ELENS_LISTEN"])
    if env.get("ELENS_DATA_DIR"):
        config.data_dir = Path(env["ELENS_DATA_DIR"])
    if env.get("ELENS_TOKEN_FILE"):
        config.token_file = Path(env["ELENS_TOKEN_FILE"])
    return config


def _split_listen(listen: str) -> tuple[str, int]:
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise ElensError(f"listen address must be host:port, got {listen!r}")
    return host, int(port)
