"""Deterministic replay model backend: scripted outputs keyed by (dialogue, turn, task).

A replay script is a UTF-8 JSON map `"<dialogue_id>:<turn>:<task>" -> output
text` with 0-based turn indices. The same format carries stored model
prediction files into the evaluation harness, so a prediction file and a
replay backend are interchangeable.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .codec import linearize_state
from .model import Corpus

ON_MISSING_POLICIES = ("error", "empty")


class ReplayKeyError(KeyError):
    pass


def script_key(dialogue_id: str, turn_index: int, task: str) -> str:
    return f"{dialogue_id}:{turn_index}:{task}"


@dataclass
class ReplayScript:
    outputs: dict[str, str]
    on_missing: str = "error"

    def __post_init__(self):
        if self.on_missing not in ON_MISSING_POLICIES:
            raise ValueError(f"on_missing must be one of {ON_MISSING_POLICIES}")

    @classmethod
    def from_file(cls, path, on_missing: str = "error") -> "ReplayScript":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")), on_missing)

    @classmethod
    def from_corpus(cls, corpus: Corpus, on_missing: str = "error") -> "ReplayScript":
        """Gold identity script: DST keys carry linearized gold states, RG keys gold delex text."""
        outputs = {}
        for dialogue in corpus:
            for t, turn in enumerate(dialogue.turns):
                outputs[script_key(dialogue.id, t, "dst")] = linearize_state(turn.gold_state)
                outputs[script_key(dialogue.id, t, "rg")] = turn.gold_delex.text
        return cls(outputs, on_missing)

    def to_file(self, path) -> None:
        Path(path).write_text(json.dumps(self.outputs, ensure_ascii=False, indent=1), encoding="utf-8")

    def lookup(self, dialogue_id: str, turn_index: int, task: str) -> str:
        key = script_key(dialogue_id, turn_index, task)
        if key in self.outputs:
            return self.outputs[key]
        if self.on_missing == "empty":
            return ""
        raise ReplayKeyError(f"no scripted output for {key!r}")

    def keys(self) -> set[str]:
        return set(self.outputs)


def replay_lookup(script: ReplayScript, dialogue_id: str, turn_index: int, task: str) -> str:
    return script.lookup(dialogue_id, turn_index, task)


@dataclass
class _RequestRecord:
    dialogue_id: str
    turn_index: int
    task: str
    payload: dict
    session_id: str | None = None


@dataclass
class ReplayServer:
    """A stateless model server answering `POST /v1/infer` from a script.

    Each instance tags responses with its `instance_id` and keeps a
    thread-safe request log so tests can assert routing behaviour.
    """

    script: ReplayScript
    instance_id: str = "replay-0"
    host: str = "127.0.0.1"
    port: int = 0
    request_log: list = field(default_factory=list)
    _server: ThreadingHTTPServer | None = None
    _thread: threading.Thread | None = None
    _log_lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def url(self) -> str:
        if self._server is None:
            raise RuntimeError("server not started")
        return f"http://{self._server.server_address[0]}:{self._server.server_address[1]}"

    def start(self) -> "ReplayServer":
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output clean
                pass

            def _send(self, status: int, body: dict):
                data = json.dumps(body, ensure_ascii=False).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                if self.path == "/healthz":
                    self._send(200, {"status": "ok", "instance": outer.instance_id})
                else:
                    self._send(404, {"error": "not found"})

            def do_POST(self):
                if self.path != "/v1/infer":
                    self._send(404, {"error": "not found"})
                    return
                try:
                    length = int(self.headers.get("Content-Length", "0"))
                    body = json.loads(self.rfile.read(length).decode("utf-8"))
                    task = body["task"]
                    payload = body.get("payload", {})
                    dialogue_id = payload.get("dialogue_id", "")
                    turn_index = int(payload.get("turn_index", 0))
                except (KeyError, ValueError, json.JSONDecodeError) as exc:
                    self._send(400, {"error": f"malformed request: {exc}"})
                    return
                with outer._log_lock:
                    outer.request_log.append(
                        _RequestRecord(
                            dialogue_id=dialogue_id,
                            turn_index=turn_index,
                            task=task,
                            payload=payload,
                            session_id=body.get("session_id"),
                        )
                    )
                try:
                    output = outer.script.lookup(dialogue_id, turn_index, task)
                except ReplayKeyError as exc:
                    self._send(404, {"error": str(exc)})
                    return
                self._send(
                    200,
                    {
                        "output": output,
                        "request_id": body.get("request_id", ""),
                        "instance": outer.instance_id,
                    },
                )

        self._server = ThreadingHTTPServer((self.host, self.port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
