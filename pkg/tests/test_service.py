"""Wire protocol: shapes, error handling, session isolation, and round-trips."""

import json
import subprocess
import sys
import threading

import pytest

from dynagrid.episode import reset, step
from dynagrid.grid import OBSERVATION_LEN
from dynagrid.policies import RandomPolicy
from dynagrid.service import EnvClient, EnvServer, Session


@pytest.fixture(scope="module")
def server():
    srv = EnvServer(port=0)
    srv.serve_in_background()
    yield srv
    srv.shutdown()
    srv.server_close()


class TestSession:
    def test_reset_bundle_shape(self):
        session = Session()
        resp, close = session.handle_line(
            json.dumps({"reset": {"level": "GoToRedBall-v1", "mode": "train", "seed": 123}})
        )
        assert not close
        obs = resp["observation"]
        assert len(obs["grid"]) == OBSERVATION_LEN
        assert isinstance(obs["descriptions"], list) and obs["instruction"]
        assert set(resp["dynamics"]) == {"green", "blue"}

    def test_step_before_reset(self):
        resp, _ = Session().handle_line(json.dumps({"step": {"action": 2}}))
        assert resp["error"]["code"] == "no_episode"

    def test_step_fields(self):
        session = Session()
        session.handle_line(
            json.dumps({"reset": {"level": "GoToRedBall-v1", "mode": "train", "seed": 1}})
        )
        resp, _ = session.handle_line(json.dumps({"step": {"action": 2}}))
        assert set(resp) == {"observation", "reward", "done", "info"}
        assert set(resp["info"]) == {"time", "steps", "outcome"}

    def test_malformed_json_keeps_session_alive(self):
        session = Session()
        resp, close = session.handle_line("{nope")
        assert resp["error"]["code"] == "bad_request" and not close
        resp, _ = session.handle_line(
            json.dumps({"reset": {"level": "GoToRedBall-v1", "mode": "train", "seed": 2}})
        )
        assert "observation" in resp

    def test_bad_action_id(self):
        session = Session()
        session.handle_line(
            json.dumps({"reset": {"level": "GoToRedBall-v1", "mode": "train", "seed": 1}})
        )
        resp, _ = session.handle_line(json.dumps({"step": {"action": 9}}))
        assert resp["error"]["code"] == "bad_request"

    def test_unknown_level_and_mode(self):
        session = Session()
        resp, _ = session.handle_line(
            json.dumps({"reset": {"level": "Nope", "mode": "train", "seed": 1}})
        )
        assert resp["error"]["code"] == "bad_request"
        resp, _ = session.handle_line(
            json.dumps({"reset": {"level": "GoToRedBall-v1", "mode": "dev", "seed": 1}})
        )
        assert resp["error"]["code"] == "bad_request"

    def test_unknown_request_kind(self):
        resp, _ = Session().handle_line(json.dumps({"poke": {}}))
        assert resp["error"]["code"] == "bad_request"

    def test_close(self):
        resp, close = Session().handle_line(json.dumps({"close": {}}))
        assert resp == {"ok": True} and close


class TestTCP:
    def test_round_trip_matches_in_process(self, server):
        policy = RandomPolicy(31)
        with EnvClient(port=server.port) as client:
            for seed in range(40):
                wire = client.reset("GoToRedBall-v2", "test", seed)
                obs, ep = reset("GoToRedBall-v2", "test", seed)
                policy.begin_episode(ep)
                assert wire["observation"]["grid"] == obs.grid_flat()
                assert wire["observation"]["descriptions"] == obs.descriptions
                for _ in range(5):
                    if ep.terminated:
                        break
                    action = policy.act(ep)
                    wire_step = client.step(action)
                    local = step(ep, action)
                    assert wire_step["observation"]["grid"] == local.observation.grid_flat()
                    assert wire_step["reward"] == local.reward
                    assert wire_step["done"] == local.done
                    if wire_step["done"]:
                        break

    def test_concurrent_sessions_do_not_interleave(self, server):
        errors = []

        def drive(seed):
            try:
                with EnvClient(port=server.port) as client:
                    client.reset("GoToRedBall-v1", "train", seed)
                    _, ep = reset("GoToRedBall-v1", "train", seed)
                    for _ in range(30):
                        if ep.terminated:
                            break
                        wire = client.step(2)
                        local = step(ep, 2)
                        if wire["observation"]["grid"] != local.observation.grid_flat():
                            errors.append(f"seed {seed} diverged")
                            return
                        if wire["done"]:
                            break
            except Exception as exc:  # surface thread failures to the test
                errors.append(repr(exc))

        threads = [threading.Thread(target=drive, args=(seed,)) for seed in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []


class TestStdio:
    def test_subprocess_round_trip(self):
        requests = "\n".join(
            [
                json.dumps({"reset": {"level": "GoToRedBall-v1", "mode": "train", "seed": 4}}),
                json.dumps({"step": {"action": 2}}),
                json.dumps({"close": {}}),
            ]
        )
        proc = subprocess.run(
            [sys.executable, "-m", "dynagrid.cli", "serve", "--transport", "stdio"],
            input=requests + "\n",
            capture_output=True,
            text=True,
            timeout=60,
        )
        lines = [json.loads(l) for l in proc.stdout.splitlines() if l.strip()]
        assert len(lines) == 3
        assert len(lines[0]["observation"]["grid"]) == OBSERVATION_LEN
        assert "reward" in lines[1]
        assert lines[2] == {"ok": True}
        assert proc.returncode == 0
