"""Remote stepping service: newline-delimited JSON over stdio or TCP.

One request maps to exactly one response, strictly ordered per connection,
and each connection owns an independent episode context. Newline-delimited
JSON was chosen over binary framing for debuggability and trivial
cross-language clients; throughput is adequate for desk-scale training. The
full message catalogue lives in docs/protocol.md.
"""

from __future__ import annotations

import json
import os
import socket
import socketserver
import sys
import threading
from typing import Optional

from .episode import EpisodeState, reset, step
from .grid import N_ACTIONS
from .levels import UnknownLevel
from .text import TEXT_MODES
from .grid import COLOR_NAMES

DEFAULT_PORT = int(os.environ.get("DYNAGRID_PORT", "7766"))


class ProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _error(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def observation_bundle(obs) -> dict:
    return {
        "grid": obs.grid_flat(),
        "descriptions": list(obs.descriptions),
        "instruction": obs.instruction,
    }


class Session:
    """Per-connection episode context."""

    def __init__(self) -> None:
        self.ep: Optional[EpisodeState] = None

    def handle_line(self, line: str) -> tuple[dict, bool]:
        """Returns (response, close_connection)."""
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            return _error("bad_request", f"not valid JSON: {exc}"), False
        if not isinstance(msg, dict) or len(msg) != 1:
            return _error("bad_request", "message must be a single-key object"), False
        kind, body = next(iter(msg.items()))
        try:
            if kind == "reset":
                return self._reset(body), False
            if kind == "step":
                return self._step(body), False
            if kind == "close":
                return {"ok": True}, True
            return _error("bad_request", f"unknown request {kind!r}"), False
        except ProtocolError as exc:
            return _error(exc.code, exc.message), False

    def _reset(self, body) -> dict:
        if not isinstance(body, dict):
            raise ProtocolError("bad_request", "reset body must be an object")
        try:
            level = body["level"]
            mode = body["mode"]
            seed = body["seed"]
        except (KeyError, TypeError):
            raise ProtocolError("bad_request", "reset requires level, mode, seed") from None
        text_mode = body.get("text", "descriptive")
        if text_mode not in TEXT_MODES:
            raise ProtocolError("bad_request", f"unknown text mode {text_mode!r}")
        if mode not in ("train", "test"):
            raise ProtocolError("bad_request", f"mode must be train or test, got {mode!r}")
        if not isinstance(seed, int):
            raise ProtocolError("bad_request", "seed must be an integer")
        try:
            obs, self.ep = reset(level, mode, seed, text_mode=text_mode)
        except UnknownLevel as exc:
            raise ProtocolError("bad_request", str(exc)) from None
        dyn = self.ep.instance.dynamics
        return {
            "observation": observation_bundle(obs),
            "dynamics": {COLOR_NAMES[c]: p.value for c, p in sorted(dyn.mapping.items())},
        }

    def _step(self, body) -> dict:
        if not isinstance(body, dict) or not isinstance(body.get("action"), int):
            raise ProtocolError("bad_request", "step requires an integer action")
        action = body["action"]
        if not 0 <= action < N_ACTIONS:
            raise ProtocolError("bad_request", f"action id {action} out of range 0..6")
        if self.ep is None or self.ep.terminated:
            raise ProtocolError("no_episode", "no live episode; send reset first")
        result = step(self.ep, action)
        return {
            "observation": observation_bundle(result.observation),
            "reward": result.reward,
            "done": result.done,
            "info": result.info,
        }


def _pump(session: Session, rfile, wfile) -> None:
    for raw in rfile:
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if not line.strip():
            continue
        response, close = session.handle_line(line)
        payload = json.dumps(response, sort_keys=True, separators=(",", ":")) + "\n"
        wfile.write(payload.encode("utf-8") if isinstance(raw, bytes) else payload)
        wfile.flush()
        if close:
            return


def serve_stdio(stdin=None, stdout=None) -> None:
    """Single-connection service over standard streams; returns on close/EOF."""
    rfile = stdin if stdin is not None else sys.stdin
    wfile = stdout if stdout is not None else sys.stdout
    _pump(Session(), rfile, wfile)


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        _pump(Session(), self.rfile, self.wfile)


class EnvServer(socketserver.ThreadingTCPServer):
    """TCP service; each connection runs its own session on its own thread."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        super().__init__((host, port), _Handler)

    @property
    def port(self) -> int:
        return self.server_address[1]

    def serve_in_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


class EnvClient:
    """Minimal TCP client for tests, demos, and out-of-process agents."""

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        self._sock = socket.create_connection((host, port))
        self._rfile = self._sock.makefile("r", encoding="utf-8")

    def request(self, message: dict) -> dict:
        payload = json.dumps(message, sort_keys=True, separators=(",", ":")) + "\n"
        self._sock.sendall(payload.encode("utf-8"))
        line = self._rfile.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line)

    def reset(self, level: str, mode: str, seed: int, text: str = "descriptive") -> dict:
        return self.request({"reset": {"level": level, "mode": mode, "seed": seed, "text": text}})

    def step(self, action: int) -> dict:
        return self.request({"step": {"action": action}})

    def close(self) -> None:
        try:
            self.request({"close": {}})
        except (ConnectionError, OSError):
            pass
        self._rfile.close()
        self._sock.close()

    def __enter__(self) -> "EnvClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
