"""Scripted mock of an OpenAI-compatible chat-completions server.

Runs a threaded stdlib HTTP server on an ephemeral port and answers
POST .../chat/completions from a responder callable. Responders receive
the prompt text and the parsed request body and return either a plain
string (served as the assistant message) or a MockReply for full control
over status codes and bodies. Used by the integration tests and by the
benchmark determinism checks; also handy for dry-running the CLI without
a real model endpoint.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Sequence


@dataclass
class MockReply:
    status: int = 200
    text: str = ""  # assistant message content for 200s
    body: dict | None = None  # overrides the default JSON body when set


Responder = Callable[[str, dict], "MockReply | str"]


def constant(text: str) -> Responder:
    return lambda prompt, request: text


def sequence(replies: Sequence["MockReply | str"]) -> Responder:
    """Serve scripted replies in order; the last one repeats forever."""
    state = {"i": 0}
    lock = threading.Lock()

    def respond(prompt: str, request: dict):
        with lock:
            i = min(state["i"], len(replies) - 1)
            state["i"] += 1
        return replies[i]

    return respond


_DEMO_LINE = re.compile(r"^\d+\. input: given (.*), class: (.*)\.$")
_QUERY_LINE = re.compile(r"^input: given (.*), class:$")


def parse_prompt(prompt: str) -> tuple[list[tuple[str, str]], str | None]:
    """Extract (feature clause, label) demo pairs and the query clause."""
    demos: list[tuple[str, str]] = []
    query = None
    for line in prompt.splitlines():
        m = _DEMO_LINE.match(line)
        if m:
            demos.append((m.group(1), m.group(2)))
            continue
        m = _QUERY_LINE.match(line)
        if m:
            query = m.group(1)
    return demos, query


def nearest_demo_responder() -> Responder:
    """Answer with the label of the demo clause closest to the query clause.

    Closeness is longest common prefix length, ties to the earliest demo;
    deterministic in the prompt bytes, so repeated runs agree exactly.
    """

    def common_prefix(a: str, b: str) -> int:
        n = 0
        for x, y in zip(a, b):
            if x != y:
                break
            n += 1
        return n

    def respond(prompt: str, request: dict) -> str:
        demos, query = parse_prompt(prompt)
        if not demos or query is None:
            return "unknown"
        best = max(range(len(demos)), key=lambda i: (common_prefix(demos[i][0], query), -i))
        return demos[best][1]

    return respond


class _Handler(BaseHTTPRequestHandler):
    server_version = "MockLLM/0.1"

    def do_POST(self):  # noqa: N802 - http.server API
        server: MockLlmServer = self.server.mock  # type: ignore[attr-defined]
        if not self.path.rstrip("/").endswith("/chat/completions"):
            self._send(404, {"error": {"message": f"no route {self.path}"}})
            return
        if server.require_key is not None:
            auth = self.headers.get("Authorization", "")
            if auth != f"Bearer {server.require_key}":
                self._send(401, {"error": {"message": "bad or missing API key"}})
                return

        length = int(self.headers.get("Content-Length", "0"))
        try:
            request = json.loads(self.rfile.read(length) or b"{}")
            prompt = request["messages"][0]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            self._send(400, {"error": {"message": "malformed request body"}})
            return

        with server.stats_lock:
            server.in_flight += 1
            server.max_in_flight = max(server.max_in_flight, server.in_flight)
            server.prompts.append(prompt)
        try:
            reply = server.responder(prompt, request)
        finally:
            with server.stats_lock:
                server.in_flight -= 1

        if isinstance(reply, str):
            reply = MockReply(text=reply)
        if reply.body is not None:
            self._send(reply.status, reply.body)
        elif reply.status == 200:
            self._send(
                200,
                {
                    "id": "mock-0",
                    "object": "chat.completion",
                    "model": request.get("model", "mock"),
                    "choices": [
                        {
                            "index": 0,
                            "message": {"role": "assistant", "content": reply.text},
                            "finish_reason": "stop",
                        }
                    ],
                },
            )
        else:
            self._send(reply.status, {"error": {"message": f"scripted status {reply.status}"}})

    def _send(self, status: int, body: dict):
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, fmt, *args):  # silence per-request stderr noise
        pass


class MockLlmServer:
    """Threaded mock server; use as a context manager or start()/stop()."""

    def __init__(self, responder: Responder, require_key: str | None = None):
        self.responder = responder
        self.require_key = require_key
        self.prompts: list[str] = []
        self.in_flight = 0
        self.max_in_flight = 0
        self.stats_lock = threading.Lock()
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/v1"

    def start(self) -> "MockLlmServer":
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        self._httpd.mock = self  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "MockLlmServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
