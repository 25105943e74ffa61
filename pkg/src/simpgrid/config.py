"""Runtime configuration.

Everything the server needs to talk to external services lives here; tests
construct configs directly and inject mock transports instead of reading the
environment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ChatConfig:
    """Connection settings for an OpenAI-compatible chat completions API."""

    base_url: str = "https://api.together.xyz/v1"
    api_key: str = ""
    temperature: float = 0.3
    max_tokens: int = 2048
    timeout_ms: int = 60000
    max_retries: int = 1
    retry_backoff_ms: int = 500


@dataclass(frozen=True)
class EmbeddingConfig:
    """Connection settings for the sentence-embedding endpoint. An empty
    endpoint_url disables tier 1 and the cascade starts at TF-IDF."""

    endpoint_url: str = ""
    model: str = "BAAI/bge-small-en-v1.5"
    api_key: str = ""
    timeout_ms: int = 30000


@dataclass(frozen=True)
class AppConfig:
    data_dir: str = "data"
    chat: ChatConfig = field(default_factory=ChatConfig)
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    max_concurrency: int = 16
    cors_origin: str = "http://localhost:5173"
    static_dir: str = ""


def config_from_env() -> AppConfig:
    """Build a config from SIMPGRID_* variables, falling back to defaults."""
    env = os.environ
    chat = ChatConfig(
        base_url=env.get("SIMPGRID_CHAT_BASE_URL", ChatConfig.base_url),
        api_key=env.get("SIMPGRID_CHAT_API_KEY", ""),
        timeout_ms=int(env.get("SIMPGRID_CHAT_TIMEOUT_MS", ChatConfig.timeout_ms)),
        max_retries=int(env.get("SIMPGRID_CHAT_MAX_RETRIES", ChatConfig.max_retries)),
    )
    embedding = EmbeddingConfig(
        endpoint_url=env.get("SIMPGRID_EMBEDDING_URL", ""),
        model=env.get("SIMPGRID_EMBEDDING_MODEL", EmbeddingConfig.model),
        api_key=env.get("SIMPGRID_EMBEDDING_API_KEY", env.get("SIMPGRID_CHAT_API_KEY", "")),
    )
    return AppConfig(
        data_dir=env.get("SIMPGRID_DATA_DIR", "data"),
        chat=chat,
        embedding=embedding,
        max_concurrency=int(env.get("SIMPGRID_MAX_CONCURRENCY", 16)),
        cors_origin=env.get("SIMPGRID_CORS_ORIGIN", AppConfig.cors_origin),
        static_dir=env.get("SIMPGRID_STATIC_DIR", ""),
    )
