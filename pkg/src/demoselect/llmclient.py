"""Client for OpenAI-compatible chat-completions endpoints.

One prompt goes out as a single user message; the first choice's text
comes back. HTTP 429 and 5xx responses are retried up to 3 times with
exponential backoff (1s, 2s, 4s); other failures are fatal immediately.
Model output is mapped to a known category with a conservative parse:
exact match of the trimmed first line first, then earliest substring
occurrence with the longest category winning ties. Anything else becomes
the UNPARSED sentinel, which scoring treats as wrong for every class.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import httpx

from .errors import LlmError

UNPARSED = "UNPARSED"
API_KEY_ENV = "DEMOSELECT_API_KEY"

_MAX_RETRIES = 3
_TRIM_CHARS = " \t\r\n.,;:!?\"'`()[]"


@dataclass
class LlmConfig:
    base_url: str
    model: str
    temperature: float = 0.1
    max_tokens: int = 16
    timeout: float = 30.0
    api_key: str | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.api_key is None:
            self.api_key = os.environ.get(API_KEY_ENV) or None


@dataclass
class Prediction:
    raw: str
    label: str  # member of the offered categories, or UNPARSED
    latency_ms: float = 0.0


def _extract_text(payload: dict) -> str:
    try:
        choice = payload["choices"][0]
    except (KeyError, IndexError, TypeError):
        raise LlmError(f"malformed response: no choices in {payload!r}") from None
    message = choice.get("message")
    if isinstance(message, dict) and isinstance(message.get("content"), str):
        return message["content"]
    if isinstance(choice.get("text"), str):  # completion-style servers
        return choice["text"]
    raise LlmError(f"malformed response: no text content in {choice!r}")


def complete(
    cfg: LlmConfig,
    prompt: str,
    client: httpx.Client | None = None,
    backoff: float = 1.0,
) -> str:
    """Send one prompt and return the first choice's text."""
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    body = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    }
    headers = {}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"

    own_client = client is None
    if own_client:
        client = httpx.Client(timeout=cfg.timeout)
    try:
        last_status = None
        for attempt in range(_MAX_RETRIES + 1):
            try:
                resp = client.post(url, json=body, headers=headers, timeout=cfg.timeout)
            except httpx.TimeoutException as exc:
                raise LlmError(f"request timed out after {cfg.timeout}s: {exc}") from exc
            except httpx.HTTPError as exc:
                raise LlmError(f"connection to {url} failed: {exc}") from exc

            last_status = resp.status_code
            if resp.status_code == 200:
                try:
                    payload = resp.json()
                except ValueError as exc:
                    raise LlmError(f"response is not JSON: {exc}") from exc
                return _extract_text(payload)
            if resp.status_code in (401, 403):
                raise LlmError(
                    f"authentication failed (HTTP {resp.status_code}); "
                    f"set the {API_KEY_ENV} environment variable",
                    status=resp.status_code,
                )
            retryable = resp.status_code == 429 or resp.status_code >= 500
            if not retryable:
                raise LlmError(
                    f"HTTP {resp.status_code}: {resp.text[:200]}", status=resp.status_code
                )
            if attempt < _MAX_RETRIES:
                time.sleep(backoff * (2**attempt))
        raise LlmError(
            f"HTTP {last_status} persisted after {_MAX_RETRIES} retries",
            retryable=True,
            status=last_status,
        )
    finally:
        if own_client:
            client.close()


def parse_label(raw: str, categories: Sequence[str]) -> str:
    """Map raw model output to one of `categories`, or UNPARSED."""
    if not categories:
        raise ValueError("categories must be nonempty")
    lines = raw.strip().splitlines()
    first_line = lines[0].strip(_TRIM_CHARS).lower() if lines else ""
    for cat in categories:
        if first_line and first_line == cat.lower():
            return cat

    raw_lower = raw.lower()
    best: tuple[int, int, str] | None = None  # (position, -len, category)
    for cat in categories:
        pos = raw_lower.find(cat.lower())
        if pos < 0:
            continue
        key = (pos, -len(cat), cat)
        if best is None or key < best:
            best = key
    return best[2] if best else UNPARSED


def classify_prompts(
    cfg: LlmConfig,
    prompts: Sequence[str],
    categories: Sequence[str],
    concurrency: int = 4,
    backoff: float = 1.0,
) -> list[Prediction]:
    """Classify many prompts with at most `concurrency` requests in flight.

    Results are ordered by prompt index regardless of completion order.
    """

    def one(prompt: str, client: httpx.Client) -> Prediction:
        start = time.perf_counter()
        raw = complete(cfg, prompt, client=client, backoff=backoff)
        latency = (time.perf_counter() - start) * 1000.0
        return Prediction(raw=raw, label=parse_label(raw, categories), latency_ms=latency)

    with httpx.Client(timeout=cfg.timeout) as client:
        with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
            futures = [pool.submit(one, p, client) for p in prompts]
            return [f.result() for f in futures]
