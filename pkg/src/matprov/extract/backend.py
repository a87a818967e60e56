"""Chat-completion backends: an HTTP client and a transcript replay mock."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol

import httpx

log = logging.getLogger(__name__)

API_KEY_ENV = "MATPROV_API_KEY"
RETRYABLE_STATUS = {408, 409, 429, 500, 502, 503, 504}


class BackendError(RuntimeError):
    pass


@dataclass(frozen=True)
class BackendRequest:
    model: str
    messages: tuple[tuple[str, str], ...]
    temperature: float | None = None

    @classmethod
    def user(cls, model: str, prompt: str, temperature: float | None = None) -> "BackendRequest":
        return cls(model, (("user", prompt),), temperature)

    def to_json(self) -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": self.model,
            "messages": [{"role": r, "content": c} for r, c in self.messages],
        }
        # some reasoning models reject an explicit temperature
        if self.temperature is not None:
            body["temperature"] = self.temperature
        return body


@dataclass(frozen=True)
class BackendResponse:
    content: str
    usage: dict[str, Any] | None = None


class ChatBackend(Protocol):
    def complete(self, request: BackendRequest) -> BackendResponse: ...


def request_hash(request: BackendRequest) -> str:
    blob = json.dumps(request.to_json(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class HttpBackend:
    """POSTs chat-completions JSON bodies to ``url``.

    Transport failures and retryable HTTP statuses are retried with
    exponential backoff (``backoff * 2**attempt`` seconds) up to ``retries``
    extra times, then surface as :class:`BackendError`.
    """

    def __init__(self, url: str, api_key: str | None = None, retries: int = 3,
                 backoff: float = 0.5, timeout: float = 120.0,
                 client: httpx.Client | None = None):
        self.url = url
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.retries = retries
        self.backoff = backoff
        self.client = client or httpx.Client(timeout=timeout)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def complete(self, request: BackendRequest) -> BackendResponse:
        last = ""
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.client.post(self.url, json=request.to_json(), headers=self._headers())
            except httpx.TransportError as exc:
                last = f"transport error: {exc}"
                log.warning("attempt %d: %s", attempt + 1, last)
                continue
            if resp.status_code in RETRYABLE_STATUS:
                last = f"HTTP {resp.status_code}"
                log.warning("attempt %d: %s", attempt + 1, last)
                continue
            if resp.status_code >= 400:
                raise BackendError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                data = resp.json()
                content = data["choices"][0]["message"]["content"] or ""
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise BackendError(f"unexpected response body: {exc}") from None
            return BackendResponse(content, data.get("usage"))
        raise BackendError(f"giving up after {self.retries + 1} attempts ({last})")

    def close(self) -> None:
        self.client.close()


@dataclass
class Transcript:
    """Canned responses keyed by :func:`request_hash`.

    A value may be a string, or a list of strings served in turn to repeated
    identical requests (the last one repeats). ``{"error": "..."}`` in place
    of a string makes the call fail with :class:`BackendError`.
    """

    responses: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict) or not isinstance(data.get("responses"), dict):
            raise ValueError(f"{path}: transcript needs a 'responses' object")
        return cls(data["responses"])

    def add(self, request: BackendRequest, *contents: str) -> str:
        key = request_hash(request)
        self.responses[key] = contents[0] if len(contents) == 1 else list(contents)
        return key

    def dump(self) -> str:
        return json.dumps({"responses": self.responses}, indent=2, sort_keys=True,
                          ensure_ascii=False) + "\n"


class ReplayBackend:
    """Serves responses from a :class:`Transcript`; safe for concurrent use."""

    def __init__(self, transcript: Transcript):
        self.transcript = transcript
        self.calls: list[tuple[str, BackendRequest, str]] = []
        self._served: dict[str, int] = defaultdict(int)
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayBackend":
        return cls(Transcript.load(path))

    def complete(self, request: BackendRequest) -> BackendResponse:
        key = request_hash(request)
        with self._lock:
            if key not in self.transcript.responses:
                raise BackendError(f"no canned response for request {key[:12]}")
            entry = self.transcript.responses[key]
            if isinstance(entry, list):
                entry = entry[min(self._served[key], len(entry) - 1)]
            self._served[key] += 1
            if isinstance(entry, dict):
                raise BackendError(str(entry.get("error", "canned failure")))
            self.calls.append((key, request, entry))
        return BackendResponse(entry)
