"""Chat-completion HTTP judge with bounded concurrency and retries."""

from __future__ import annotations

import logging
import os
import threading
import time
from typing import Callable

import httpx

from .base import JudgeError, JudgeRequest, JudgeResponse, ParseError, TransportError, Usage, parse_structured, with_meta
from .prompts import SCHEMAS, render

logger = logging.getLogger(__name__)

API_KEY_ENV = "FAITHAUDIT_API_KEY"
BASE_URL_ENV = "FAITHAUDIT_BASE_URL"
DEFAULT_BASE_URL = "https://api.openai.com/v1"


def api_key_from_env() -> str | None:
    return os.environ.get(API_KEY_ENV) or os.environ.get("OPENAI_API_KEY")


class RemoteJudge:
    """Sends one chat-completion call per request.

    Decoding temperature and seed come from the request and are sent as-is.
    Transport failures and unparseable replies are retried ``max_retries``
    times with exponential backoff before a :class:`JudgeError` is raised.
    At most ``max_concurrency`` calls are in flight across all threads.
    """

    def __init__(
        self,
        model: str,
        api_key: str | None = None,
        base_url: str | None = None,
        max_concurrency: int = 8,
        max_retries: int = 3,
        backoff: float = 1.0,
        timeout: float = 120.0,
        structured_output: bool = True,
        client: httpx.Client | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        self.model = model
        self.api_key = api_key if api_key is not None else api_key_from_env()
        if not self.api_key:
            raise JudgeError(f"no API key; set {API_KEY_ENV}")
        self.base_url = (base_url or os.environ.get(BASE_URL_ENV) or DEFAULT_BASE_URL).rstrip("/")
        self.max_retries = max_retries
        self.backoff = backoff
        self.structured_output = structured_output
        self._client = client or httpx.Client(timeout=timeout)
        self._slots = threading.BoundedSemaphore(max_concurrency)
        self._sleep = sleep

    def __deepcopy__(self, memo):
        # an HTTP connection pool is a shared resource; estimator clones reuse it
        return self

    @property
    def identity(self) -> str:
        return f"remote:{self.model}"

    def body(self, request: JudgeRequest) -> dict:
        body = {
            "model": self.model,
            "messages": render(request),
            "temperature": request.decoding.temperature,
            "seed": request.decoding.seed,
        }
        if self.structured_output:
            body["response_format"] = {
                "type": "json_schema",
                "json_schema": {
                    "name": f"{request.role.value.lower()}_result",
                    "strict": True,
                    "schema": SCHEMAS[request.role],
                },
            }
        return body

    def _post(self, body: dict) -> dict:
        try:
            with self._slots:
                resp = self._client.post(
                    f"{self.base_url}/chat/completions",
                    json=body,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                )
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise JudgeError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        return resp.json()

    def submit(self, request: JudgeRequest) -> JudgeResponse:
        body = self.body(request)
        last: JudgeError | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                data = self._post(body)
                raw = data["choices"][0]["message"]["content"] or ""
                response = parse_structured(raw, request.role)
            except (TransportError, ParseError) as exc:
                logger.warning("judge call %s failed (attempt %d): %s", request.request_id, attempt + 1, exc)
                last = exc
                continue
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                last = ParseError(f"malformed completion envelope: {exc}")
                continue
            u = data.get("usage") or {}
            usage = Usage(int(u.get("prompt_tokens", 0)), int(u.get("completion_tokens", 0)))
            return with_meta(response, usage, request.request_id)
        raise JudgeError(f"giving up on {request.request_id} after {self.max_retries + 1} attempts: {last}") from last
