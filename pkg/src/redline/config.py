"""Service configuration: flat key=value file plus environment overrides.

Recognized keys:

    listen              host:port to bind (default 127.0.0.1:8765)
    store               store directory path
    embeddings          word-vector text file
    lm_model            trained language-model file
    lm_corpus           plain-text corpus to train an LM from at startup
    lm_order, lm_alpha  training parameters for lm_corpus (default 3, 1.0)
    classifier_model    trained classifier file
    classifier_corpus   "label<TAB>text" corpus to train from at startup
    classifier_beta     smoothing for classifier_corpus (default 1.0)
    providers           comma-separated feedback provider names
    recommend_k         default recommendation list size (default 10)

Environment variables REDLINE_LISTEN and REDLINE_STORE override the file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError


@dataclass
class ApiConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8765
    store_dir: str = "data"
    embeddings_path: str | None = None
    lm_model_path: str | None = None
    lm_corpus_path: str | None = None
    lm_order: int = 3
    lm_alpha: float = 1.0
    classifier_model_path: str | None = None
    classifier_corpus_path: str | None = None
    classifier_beta: float = 1.0
    providers: tuple[str, ...] = ("ed",)
    recommend_k: int = 10


def parse_listen(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep:
        raise FormatError(f"listen must be host:port, got {value!r}")
    try:
        return host, int(port)
    except ValueError:
        raise FormatError(f"bad listen port in {value!r}") from None


def load_config(path: str | Path) -> ApiConfig:
    """Parse a key=value config file; '#' starts a comment line."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"line {line_no}: expected 'key = value', got {raw!r}")
        values[key.strip()] = value.strip()
    return config_from_mapping(values)


def config_from_mapping(values: dict[str, str]) -> ApiConfig:
    cfg = ApiConfig()
    listen = os.environ.get("REDLINE_LISTEN", values.get("listen"))
    if listen:
        cfg.listen_host, cfg.listen_port = parse_listen(listen)
    store = os.environ.get("REDLINE_STORE", values.get("store"))
    if store:
        cfg.store_dir = store
    cfg.embeddings_path = values.get("embeddings") or None
    cfg.lm_model_path = values.get("lm_model") or None
    cfg.lm_corpus_path = values.get("lm_corpus") or None
    cfg.classifier_model_path = values.get("classifier_model") or None
    cfg.classifier_corpus_path = values.get("classifier_corpus") or None
    try:
        if "lm_order" in values:
            cfg.lm_order = int(values["lm_order"])
        if "lm_alpha" in values:
            cfg.lm_alpha = float(values["lm_alpha"])
        if "classifier_beta" in values:
            cfg.classifier_beta = float(values["classifier_beta"])
        if "recommend_k" in values:
            cfg.recommend_k = int(values["recommend_k"])
    except ValueError as exc:
        raise FormatError(f"bad numeric config value: {exc}") from None
    if "providers" in values:
        cfg.providers = tuple(
            name.strip() for name in values["providers"].split(",") if name.strip()
        )
    return cfg
