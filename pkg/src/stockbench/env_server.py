"""JSON-lines episode server.

One request per line on stdin, one response per line on stdout. Only flat
numeric arrays and plain JSON objects cross the boundary, so any host
language can drive episodes through a subprocess. Rewards travel both as
floats and as exact micro-unit integers.

Requests:
    {"id": 1, "op": "manifest"}
    {"id": 2, "op": "make", "task": <name|specfile>, "split": "test", "seed": 0}
    {"id": 3, "op": "reset", "env": <handle>}
    {"id": 4, "op": "step", "env": <handle>, "actions": [..M*N ints..]}
    {"id": 5, "op": "close", "env": <handle>}

Responses mirror the id: {"id": n, "ok": true, "result": ...} or
{"id": n, "ok": false, "error": "..."} with the underlying message verbatim.
"""

from __future__ import annotations

import json
import sys

import numpy as np

from . import __version__
from .episode import feature_names, reset, step_episode
from .tasks import registry_hash
from .types import ConfigError

PROTOCOL_VERSION = 1


class _Sessions:
    def __init__(self):
        self._next = 1
        self._envs: dict[int, tuple] = {}

    def make(self, task: str, split: str, seed) -> dict:
        handle, obs = reset(task, split, seed=None if seed is None else int(seed))
        env_id = self._next
        self._next += 1
        self._envs[env_id] = (handle, obs, (task, split, seed))
        task_obj = handle.task
        return {
            "env": env_id,
            "agents": handle.agents,
            "warehouses": task_obj.m,
            "skus": task_obj.n,
            "episode_steps": handle.stop - handle.state.t,
            "observation_features": list(feature_names()),
            "action_space": {
                "multipliers": [float(mmul) for mmul in task_obj.action_multipliers],
                "window": task_obj.action_window,
            },
        }

    def _get(self, env_id) -> tuple:
        try:
            return self._envs[int(env_id)]
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"unknown env handle {env_id!r}") from None

    def reset(self, env_id) -> dict:
        handle, obs, origin = self._get(env_id)
        if handle.steps_taken:
            handle, obs = reset(origin[0], origin[1],
                                seed=None if origin[2] is None else int(origin[2]))
            self._envs[int(env_id)] = (handle, obs, origin)
        return {"observations": obs.reshape(-1).tolist(),
                "shape": [handle.agents, obs.shape[1]]}

    def step(self, env_id, actions) -> dict:
        handle, _, origin = self._get(env_id)
        actions = np.asarray(actions, dtype=np.int64)
        obs, rewards, done, info = step_episode(handle, actions)
        self._envs[int(env_id)] = (handle, obs, origin)
        return {
            "observations": obs.reshape(-1).tolist(),
            "shape": [handle.agents, obs.shape[1]],
            "rewards": rewards.tolist(),
            "rewards_micros": [int(x) for x in info["rewards_micros"]],
            "done": bool(done),
            "info": {"t": info["t"], "step_profit_micros": info["step_profit_micros"]},
        }

    def close(self, env_id) -> dict:
        self._envs.pop(int(env_id), None)
        return {"closed": True}


def manifest() -> dict:
    return {
        "engine_version": __version__,
        "protocol": PROTOCOL_VERSION,
        "task_registry_hash": registry_hash(),
        "observation_features": list(feature_names()),
    }


def handle_request(sessions: _Sessions, request: dict) -> dict:
    op = request.get("op")
    if op == "manifest":
        return manifest()
    if op == "make":
        return sessions.make(request["task"], request.get("split", "test"),
                             request.get("seed"))
    if op == "reset":
        return sessions.reset(request.get("env"))
    if op == "step":
        return sessions.step(request.get("env"), request.get("actions"))
    if op == "close":
        return sessions.close(request.get("env"))
    raise ConfigError(f"unknown op {op!r}")


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    sessions = _Sessions()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        rid = None
        try:
            request = json.loads(line)
            rid = request.get("id")
            result = handle_request(sessions, request)
            response = {"id": rid, "ok": True, "result": result}
        except Exception as exc:  # errors cross the boundary verbatim
            response = {"id": rid, "ok": False, "error": str(exc)}
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


if __name__ == "__main__":
    serve()
