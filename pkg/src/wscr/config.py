"""key=value configuration files for the broker service."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError


@dataclass(frozen=True)
class BrokerConfig:
    port: int = 8080
    snapshot_path: Optional[str] = None
    ontology_path: Optional[str] = None
    tau: float = 0.5
    beta: float = 0.2
    journal_path: Optional[str] = None
    feedback_path: Optional[str] = None
    host: str = "127.0.0.1"


_KNOWN = {"port", "snapshot_path", "ontology_path", "tau", "beta",
          "journal_path", "feedback_path", "host"}


def parse_config(text: str) -> BrokerConfig:
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, "expected key=value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN:
            raise ConfigError(key, "unknown configuration key")
        values[key] = value

    cfg = BrokerConfig()
    try:
        port = int(values.get("port", cfg.port))
    except ValueError:
        raise ConfigError("port", f"not an integer: {values['port']!r}") from None
    if not (0 < port < 65536):
        raise ConfigError("port", f"out of range: {port}")
    try:
        tau = float(values.get("tau", cfg.tau))
    except ValueError:
        raise ConfigError("tau", f"not a decimal: {values['tau']!r}") from None
    if not (0.0 < tau <= 1.0):
        raise ConfigError("tau", f"must be in (0, 1]: {tau}")
    try:
        beta = float(values.get("beta", cfg.beta))
    except ValueError:
        raise ConfigError("beta", f"not a decimal: {values['beta']!r}") from None
    if not (0.0 <= beta <= 1.0):
        raise ConfigError("beta", f"must be in [0, 1]: {beta}")

    return BrokerConfig(
        port=port,
        snapshot_path=values.get("snapshot_path"),
        ontology_path=values.get("ontology_path"),
        tau=tau,
        beta=beta,
        journal_path=values.get("journal_path"),
        feedback_path=values.get("feedback_path"),
        host=values.get("host", cfg.host),
    )


def load_config(path: str) -> BrokerConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
