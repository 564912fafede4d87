"""Drive the JSON-lines episode server as a subprocess and check parity with
the in-process harness, element exact."""

import json
import subprocess
import sys

import numpy as np
import pytest

from stockbench.env_server import handle_request, _Sessions, manifest
from stockbench.harness import run
from stockbench.tasks import TaskSpec, spec_to_file


@pytest.fixture()
def spec_file(tmp_path):
    spec = TaskSpec(name="server-fixture", echelons=1, sku_count=4, horizon=160, warmup=16)
    path = tmp_path / "task.json"
    spec_to_file(spec, path)
    return path


class ServerProc:
    def __init__(self):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "stockbench.env_server"],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
        self._id = 0

    def call(self, op, **kw):
        self._id += 1
        request = {"id": self._id, "op": op, **kw}
        self.proc.stdin.write(json.dumps(request) + "\n")
        self.proc.stdin.flush()
        response = json.loads(self.proc.stdout.readline())
        assert response["id"] == self._id
        return response

    def close(self):
        self.proc.stdin.close()
        self.proc.wait(timeout=10)


def test_manifest_reports_version_and_hash():
    m = manifest()
    assert m["protocol"] == 1
    assert len(m["task_registry_hash"]) == 64
    assert "in_stock" in m["observation_features"]


def test_make_reports_agent_count_for_registry_task():
    sessions = _Sessions()
    result = handle_request(sessions, {"op": "make", "task": "sku200.single_store.standard",
                                       "split": "test", "seed": 0})
    assert result["agents"] == 200
    assert result["warehouses"] == 1 and result["skus"] == 200


def test_unknown_task_error_names_nearest():
    sessions = _Sessions()
    with pytest.raises(Exception, match="nearest"):
        handle_request(sessions, {"op": "make", "task": "sku200.single_store.standar"})


def test_subprocess_parity_with_native_run(spec_file, tmp_path):
    rng = np.random.default_rng(5)
    task_spec = str(spec_file)
    steps = 160 - 128  # test split of the fixture horizon
    actions = rng.integers(0, 6, size=(steps, 4))
    np.save(tmp_path / "acts.npy", actions)

    native = run(task_spec, f"external:{tmp_path / 'acts.npy'}", split="test",
                 collect_streams=True)

    server = ServerProc()
    try:
        made = server.call("make", task=task_spec, split="test", seed=None)
        assert made["ok"], made
        env = made["result"]["env"]
        first = server.call("reset", env=env)["result"]
        obs_stream = [first["observations"]]
        rewards_stream = []
        done = False
        t = 0
        while not done:
            reply = server.call("step", env=env, actions=[int(a) for a in actions[t]])
            assert reply["ok"], reply
            r = reply["result"]
            obs_stream.append(r["observations"])
            rewards_stream.append(r["rewards_micros"])
            done = r["done"]
            t += 1
        server.call("close", env=env)
    finally:
        server.close()

    assert t == native.steps
    for got, want in zip(rewards_stream, native.streams["rewards_micros"]):
        assert got == want
    for got, want in zip(obs_stream, native.streams["observations"]):
        flat = [x for row in want for x in row]
        assert got == flat


def test_step_error_for_bad_shape(spec_file):
    sessions = _Sessions()
    made = handle_request(sessions, {"op": "make", "task": str(spec_file), "split": "test"})
    with pytest.raises(Exception, match="actions"):
        handle_request(sessions, {"op": "step", "env": made["env"], "actions": [0, 1]})
