"""Outbound adapters: the model inference endpoint and image search.

The inference contract is a single POST {endpoint}/predict with the raw
instance bytes and its media type, answering {"label": str, "confidence"?:
number}. Search providers are pluggable; the bundled mock provider serves
seeded results so the full workflow runs without credentials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol
from urllib.parse import urlparse

import httpx

from ..corpus import ModelOutput

__all__ = [
    "ModelClientError",
    "ModelTimeoutError",
    "ModelError",
    "BadModelResponseError",
    "SearchError",
    "SearchUnavailableError",
    "SearchResult",
    "SearchProvider",
    "ModelClient",
    "MockSearchProvider",
    "HttpSearchProvider",
]


class ModelClientError(RuntimeError):
    pass


class ModelTimeoutError(ModelClientError):
    pass


class ModelError(ModelClientError):
    pass


class BadModelResponseError(ModelClientError):
    pass


class SearchError(RuntimeError):
    pass


class SearchUnavailableError(SearchError):
    pass


@dataclass(frozen=True)
class SearchResult:
    provider_id: str
    remote_url: str
    attribution: str
    license: str

    def __post_init__(self) -> None:
        parsed = urlparse(self.remote_url)
        if not (parsed.scheme and parsed.netloc):
            raise SearchError(f"malformed result url: {self.remote_url!r}")

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "remote_url": self.remote_url,
            "attribution": self.attribution,
            "license": self.license,
        }


class SearchProvider(Protocol):
    def search(self, query: str, limit: int) -> list[SearchResult]: ...

    def fetch(self, remote_url: str) -> tuple[bytes, str]: ...


class ModelClient:
    """HTTP client for the external inference endpoint."""

    def __init__(self, endpoint: str, timeout: float = 30.0, client: Optional[httpx.Client] = None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._client = client or httpx.Client()

    def predict(self, data: bytes, media_type: str) -> ModelOutput:
        try:
            response = self._client.post(
                f"{self.endpoint}/predict",
                content=data,
                headers={"Content-Type": media_type},
                timeout=self.timeout,
            )
        except httpx.TimeoutException:
            raise ModelTimeoutError("model timeout") from None
        except httpx.HTTPError as exc:
            raise ModelError(f"model error: {exc}") from exc
        if response.status_code != 200:
            raise ModelError(f"model error: {response.status_code}")
        try:
            payload = response.json()
        except ValueError:
            raise BadModelResponseError("bad model response") from None
        label = payload.get("label") if isinstance(payload, dict) else None
        confidence = payload.get("confidence") if isinstance(payload, dict) else None
        if not isinstance(label, str) or not label:
            raise BadModelResponseError("bad model response")
        if confidence is not None and not isinstance(confidence, (int, float)):
            raise BadModelResponseError("bad model response")
        try:
            return ModelOutput(label_or_caption=label, confidence=None if confidence is None else float(confidence))
        except ValueError:
            raise BadModelResponseError("bad model response") from None

    def close(self) -> None:
        self._client.close()


@dataclass
class MockSearchProvider:
    """In-tree provider for tests and offline demos: returns its seeded
    results in order and serves their payloads from memory."""

    results: list[SearchResult] = field(default_factory=list)
    payloads: dict[str, tuple[bytes, str]] = field(default_factory=dict)
    unavailable: bool = False

    def search(self, query: str, limit: int) -> list[SearchResult]:
        if self.unavailable:
            raise SearchUnavailableError("search provider unavailable")
        return self.results[:limit]

    def fetch(self, remote_url: str) -> tuple[bytes, str]:
        if self.unavailable:
            raise SearchUnavailableError("search provider unavailable")
        try:
            return self.payloads[remote_url]
        except KeyError:
            raise SearchError(f"unknown result url: {remote_url!r}") from None


class HttpSearchProvider:
    """Adapter for a real image-search service configured by base URL and
    key. Expects GET {base}/search?q=...&limit=... returning a JSON list of
    {id, url, attribution, license} objects."""

    def __init__(self, base_url: str, api_key: str = "", client: Optional[httpx.Client] = None, timeout: float = 15.0):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout
        self._client = client or httpx.Client()

    def search(self, query: str, limit: int) -> list[SearchResult]:
        params = {"q": query, "limit": str(limit)}
        if self.api_key:
            params["api_key"] = self.api_key
        try:
            response = self._client.get(f"{self.base_url}/search", params=params, timeout=self.timeout)
            response.raise_for_status()
            rows = response.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise SearchUnavailableError("search provider unavailable") from exc
        results = []
        for row in rows[:limit]:
            results.append(
                SearchResult(
                    provider_id=str(row.get("id", "")),
                    remote_url=row["url"],
                    attribution=row.get("attribution", ""),
                    license=row.get("license", ""),
                )
            )
        return results

    def fetch(self, remote_url: str) -> tuple[bytes, str]:
        try:
            response = self._client.get(remote_url, timeout=self.timeout)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise SearchUnavailableError("search provider unavailable") from exc
        media_type = response.headers.get("content-type", "application/octet-stream").split(";")[0].strip()
        return response.content, media_type

    def close(self) -> None:
        self._client.close()
