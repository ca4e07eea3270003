"""Protocol clients for the engine's stepping service.

This package never imports the engine: episodes are driven exclusively
through the newline-delimited JSON protocol (docs/protocol.md in the engine
repo), either over a stdio subprocess or TCP.
"""

from __future__ import annotations

import json
import shutil
import socket
import subprocess
import sys
from dataclasses import dataclass

import numpy as np

VIEW_SHAPE = (7, 7, 3)
N_ACTIONS = 7


class ProtocolError(RuntimeError):
    pass


@dataclass
class WireObservation:
    grid: np.ndarray  # (7, 7, 3) uint8
    descriptions: list[str]
    instruction: str


def _parse_observation(bundle: dict) -> WireObservation:
    grid = np.asarray(bundle["grid"], dtype=np.uint8).reshape(VIEW_SHAPE)
    return WireObservation(
        grid=grid,
        descriptions=list(bundle["descriptions"]),
        instruction=bundle["instruction"],
    )


def _check(response: dict) -> dict:
    if "error" in response:
        err = response["error"]
        raise ProtocolError(f"{err.get('code')}: {err.get('message')}")
    return response


def default_server_command() -> list[str]:
    """Prefer the installed `dynagrid` entry point; fall back to the module."""
    if shutil.which("dynagrid"):
        return ["dynagrid", "serve", "--transport", "stdio"]
    return [sys.executable, "-m", "dynagrid.cli", "serve", "--transport", "stdio"]


class StdioEnvClient:
    """One engine subprocess per client; the subprocess owns one episode context."""

    def __init__(self, command: list[str] | None = None):
        self._proc = subprocess.Popen(
            command or default_server_command(),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def request(self, message: dict) -> dict:
        self._proc.stdin.write(json.dumps(message) + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise ProtocolError("engine subprocess closed the stream")
        return _check(json.loads(line))

    def reset(self, level: str, mode: str, seed: int, text: str = "descriptive"):
        resp = self.request(
            {"reset": {"level": level, "mode": mode, "seed": seed, "text": text}}
        )
        return _parse_observation(resp["observation"]), resp["dynamics"]

    def step(self, action: int):
        resp = self.request({"step": {"action": int(action)}})
        return _parse_observation(resp["observation"]), resp["reward"], resp["done"], resp["info"]

    def close(self) -> None:
        try:
            self.request({"close": {}})
        except (ProtocolError, BrokenPipeError, OSError):
            pass
        self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class TcpEnvClient:
    """Same surface over a TCP connection to a running `dynagrid serve --transport tcp`."""

    def __init__(self, host: str = "127.0.0.1", port: int = 7766):
        self._sock = socket.create_connection((host, port))
        self._rfile = self._sock.makefile("r", encoding="utf-8")

    def request(self, message: dict) -> dict:
        self._sock.sendall((json.dumps(message) + "\n").encode("utf-8"))
        line = self._rfile.readline()
        if not line:
            raise ProtocolError("server closed the connection")
        return _check(json.loads(line))

    reset = StdioEnvClient.reset
    step = StdioEnvClient.step

    def close(self) -> None:
        try:
            self.request({"close": {}})
        except (ProtocolError, OSError):
            pass
        self._rfile.close()
        self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class VecEnv:
    """N independent episode contexts with automatic resets.

    Env i runs the seed arithmetic progression base_seed + i, + n, + 2n, ...
    so runs are reproducible and seeds never collide across envs.
    """

    def __init__(self, n_envs: int, level: str, mode: str, base_seed: int,
                 text: str = "descriptive", command: list[str] | None = None):
        self.n_envs = n_envs
        self.level = level
        self.mode = mode
        self.text = text
        self._next_seed = [base_seed + i for i in range(n_envs)]
        self._clients = [StdioEnvClient(command) for _ in range(n_envs)]
        self.episode_returns = [0.0] * n_envs
        self.episode_steps = [0] * n_envs

    def _reset_one(self, i: int) -> WireObservation:
        obs, _ = self._clients[i].reset(self.level, self.mode, self._next_seed[i], self.text)
        self._next_seed[i] += self.n_envs
        self.episode_returns[i] = 0.0
        self.episode_steps[i] = 0
        return obs

    def reset(self) -> list[WireObservation]:
        return [self._reset_one(i) for i in range(self.n_envs)]

    def step(self, actions) -> tuple[list[WireObservation], np.ndarray, np.ndarray, list[dict]]:
        """Step every env; finished episodes are reset and report their stats.

        The observation returned for a finished env is the *next* episode's
        initial observation; `infos[i]["episode"]` carries the finished
        episode's return, length, and outcome.
        """
        observations, rewards, dones, infos = [], [], [], []
        for i, action in enumerate(actions):
            obs, reward, done, info = self._clients[i].step(int(action))
            self.episode_returns[i] += reward
            self.episode_steps[i] += 1
            out: dict = {}
            if done:
                out["episode"] = {
                    "return": self.episode_returns[i],
                    "steps": self.episode_steps[i],
                    "outcome": info["outcome"],
                }
                obs = self._reset_one(i)
            observations.append(obs)
            rewards.append(reward)
            dones.append(done)
            infos.append(out)
        return observations, np.asarray(rewards, dtype=np.float32), np.asarray(dones), infos

    def close(self) -> None:
        for client in self._clients:
            client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
