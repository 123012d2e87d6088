"""Service layer: engine orchestration, REST app, and outbound adapters."""

from .adapters import (
    BadModelResponseError,
    HttpSearchProvider,
    MockSearchProvider,
    ModelClient,
    ModelError,
    ModelTimeoutError,
    SearchError,
    SearchProvider,
    SearchResult,
    SearchUnavailableError,
)
from .app import create_app, create_app_from_env
from .engine import EngineConfig, PublishedView, TriageEngine

__all__ = [
    "BadModelResponseError",
    "HttpSearchProvider",
    "MockSearchProvider",
    "ModelClient",
    "ModelError",
    "ModelTimeoutError",
    "SearchError",
    "SearchProvider",
    "SearchResult",
    "SearchUnavailableError",
    "create_app",
    "create_app_from_env",
    "EngineConfig",
    "PublishedView",
    "TriageEngine",
]
