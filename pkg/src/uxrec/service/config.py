"""Service configuration: a JSON file with env-var overrides.

Any leaf of the config can be overridden with UXREC_<SECTION>_<KEY>
(sections and keys upper-cased, e.g. UXREC_SERVER_PORT=9000,
UXREC_SESSIONS_DIR=/tmp/s). Values are parsed as JSON when possible so
numbers and booleans survive the round trip.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

DEFAULTS = {
    "corpus": {"papers": "papers.json", "metrics": "metrics.json",
               "incidents": "incidents.json"},
    "edge_weights": {"citation_multiplier": 2.0, "shared_metric_base": 1.0},
    "embedding": {"provider": "fallback", "dim": 256},
    "llm": {"kind": "mock", "script": "mock_script.json", "temperature": 0.7,
            "max_retries": 2},
    "risk": {"threshold": 0.5, "top_k": 3},
    "server": {"host": "127.0.0.1", "port": 8000},
    "sessions": {"dir": "sessions"},
    "cart_scope": "corpus",
    "max_inflight_llm": 4,
    "prompt_dir": None,
}


@dataclass
class AppConfig:
    corpus: dict
    edge_weights: dict
    embedding: dict
    llm: dict
    risk: dict
    server: dict
    sessions: dict
    cart_scope: str = "corpus"
    max_inflight_llm: int = 4
    prompt_dir: str | None = None
    base_dir: Path = field(default_factory=Path.cwd)

    def path(self, value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _parse_env_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _apply_env(cfg: dict, environ) -> dict:
    for name, raw in environ.items():
        if not name.startswith("UXREC_"):
            continue
        rest = name[len("UXREC_"):].lower()
        section, _, key = rest.partition("_")
        if section in cfg and isinstance(cfg[section], dict) and key:
            cfg[section][key] = _parse_env_value(raw)
        elif rest in cfg:
            cfg[rest] = _parse_env_value(raw)
    return cfg


def load_config(path: str | Path | None = None, environ=None) -> AppConfig:
    environ = os.environ if environ is None else environ
    cfg = json.loads(json.dumps(DEFAULTS))  # deep copy
    base_dir = Path.cwd()
    if path is not None:
        path = Path(path)
        cfg = _merge(cfg, json.loads(path.read_text(encoding="utf-8")))
        base_dir = path.parent.resolve()
    cfg = _apply_env(cfg, environ)
    if cfg.get("cart_scope") not in ("corpus", "recommendation"):
        raise ValueError(f"cart_scope must be 'corpus' or 'recommendation', "
                         f"got {cfg.get('cart_scope')!r}")
    return AppConfig(
        corpus=cfg["corpus"],
        edge_weights=cfg["edge_weights"],
        embedding=cfg["embedding"],
        llm=cfg["llm"],
        risk=cfg["risk"],
        server=cfg["server"],
        sessions=cfg["sessions"],
        cart_scope=cfg["cart_scope"],
        max_inflight_llm=int(cfg["max_inflight_llm"]),
        prompt_dir=cfg.get("prompt_dir"),
        base_dir=base_dir,
    )
