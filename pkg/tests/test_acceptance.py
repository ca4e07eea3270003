"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with `pytest -v -s tests/test_acceptance.py` to see one line per
criterion. Stated runtime budgets are asserted alongside the behavior.
"""

import json
import math
import subprocess
import sys
import time

import pytest

from conftest import brute_force_min_halves, execute_plan, terminal_reward
from dynagrid.dynamics import Outcome, TileProperty
from dynagrid.episode import reset, step
from dynagrid.evaluation import EvalStats, evaluate
from dynagrid.grid import DIR_EAST, FORWARD, LEFT, OBSERVATION_LEN, RIGHT
from dynagrid.levels import get_level, sample_instance
from dynagrid.planner import plan_greedy_ignorant, plan_optimal
from dynagrid.policies import OptimalPolicy, RandomPolicy
from dynagrid.scenarios import grounding_witness, property_room
from dynagrid.service import EnvClient, EnvServer
from test_planner import BRUTE_LEVELS


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, *rest):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            print(f"PASS: {self.name} ({elapsed:.2f}s, budget {self.seconds:g}s)")
            assert elapsed < self.seconds, f"{self.name} exceeded runtime budget"
        else:
            print(f"FAIL: {self.name} ({elapsed:.2f}s)")
        return False


def test_dynamics_semantics_suite():
    with Budget("dynamics semantics: six golden episodes", 1.0):
        # trap: entering ends the episode with zero reward
        inst = property_room(TileProperty.TRAP, [(2, 1)], agent=(1, 1, DIR_EAST))
        ep = execute_plan(inst, [FORWARD], idle_to_timeout=False)
        assert ep.outcome is Outcome.TRAP and ep.rewards == [0.0]

        # slippery: any action taken on the tile advances time by exactly 0.5
        inst = property_room(TileProperty.SLIPPERY, [(1, 1)], agent=(1, 1, DIR_EAST))
        ep = execute_plan(inst, [LEFT], idle_to_timeout=False)
        assert ep.time == 0.5

        # flipLeftRight: turn outcomes swap while standing on the tile
        inst = property_room(TileProperty.FLIP_LEFT_RIGHT, [(1, 1)], agent=(1, 1, DIR_EAST))
        ep = execute_plan(inst, [LEFT], idle_to_timeout=False)
        assert ep.grid.agent.dir == (DIR_EAST + 1) % 4
        inst = property_room(TileProperty.FLIP_LEFT_RIGHT, [(1, 1)], agent=(1, 1, DIR_EAST))
        ep = execute_plan(inst, [RIGHT], idle_to_timeout=False)
        assert ep.grid.agent.dir == (DIR_EAST - 1) % 4

        # flipUpDown: attempting forward moves one cell backward
        inst = property_room(TileProperty.FLIP_UP_DOWN, [(3, 1)], agent=(3, 1, DIR_EAST))
        ep = execute_plan(inst, [FORWARD], idle_to_timeout=False)
        assert (ep.grid.agent.x, ep.grid.agent.y) == (2, 1)

        # sticky: released on exactly the 3rd action after entry, never earlier
        inst = property_room(TileProperty.STICKY, [(2, 1)], agent=(1, 1, DIR_EAST))
        positions = []
        from dynagrid.episode import start_episode

        _, ep = start_episode(inst)
        for a in [FORWARD, FORWARD, FORWARD, FORWARD]:
            step(ep, a, compute_observation=False)
            positions.append((ep.grid.agent.x, ep.grid.agent.y))
        assert positions == [(2, 1), (2, 1), (2, 1), (3, 1)]

        # magic: displaced one cell grid-south on the 2nd consecutive timestep
        inst = property_room(TileProperty.MAGIC, [(3, 1)], agent=(3, 1, DIR_EAST))
        _, ep = start_episode(inst)
        step(ep, LEFT, compute_observation=False)
        assert (ep.grid.agent.x, ep.grid.agent.y) == (3, 1)
        step(ep, LEFT, compute_observation=False)
        assert (ep.grid.agent.x, ep.grid.agent.y) == (3, 2)


def test_partition_soundness_and_completeness():
    with Budget("partition: 10k train sound, 1k test complete", 30.0):
        spec = get_level("GoToRedBall-v1")
        for seed in range(10_000):
            mapping = sample_instance(spec, "train", seed).dynamics.mapping
            assert not (set(mapping.items()) & spec.held_out), seed
        pairs = set()
        for seed in range(1_000):
            mapping = sample_instance(spec, "test", seed).dynamics.mapping
            pairs.update(mapping.items())
        full = {(c, p) for c in spec.colors for p in spec.allowed_properties}
        assert pairs == full and len(full) == 6


def test_determinism_across_processes(tmp_path):
    with Budget("determinism: byte-identical traces, two processes, 100 seeds", 10.0):
        outs = []
        for run in range(2):
            path = tmp_path / f"run{run}.jsonl"
            proc = subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "dynagrid.cli",
                    "rollout",
                    "--level",
                    "GoToRedBall-v2",
                    "--mode",
                    "test",
                    "--policy",
                    "optimal",
                    "--n",
                    "100",
                    "--seed",
                    "0",
                    "--trace-out",
                    str(path),
                    "--json",
                ],
                capture_output=True,
                timeout=300,
            )
            assert proc.returncode == 0, proc.stderr
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
        assert len(outs[0].splitlines()) == 100


def test_oracle_optimality_against_brute_force():
    with Budget("oracle optimality: 200 instances, 6x6, exact match", 300.0):
        count = 0
        for level in BRUTE_LEVELS:
            for seed in range(100):
                inst = sample_instance(level, "test", seed)
                plan, total = plan_optimal(inst)
                halves = int(total * 2)
                ep = execute_plan(inst, plan, idle_to_timeout=False)
                assert ep.outcome is Outcome.SUCCESS and ep.time == pytest.approx(total)
                assert brute_force_min_halves(inst, cap_halves=halves + 1) == halves, (
                    level.name,
                    seed,
                )
                count += 1
        assert count == 200


def test_grounding_matters():
    with Budget("grounding-matters: witness family + dominance", 300.0):
        strictly_lower = 0
        for variant in range(50):
            plans = {}
            for swap in (False, True):
                inst = grounding_witness(variant, swap)
                plan, _ = plan_optimal(inst)
                plans[swap] = plan
                ep_opt = execute_plan(inst, plan, idle_to_timeout=True)
                ep_greedy = execute_plan(
                    inst, plan_greedy_ignorant(inst), idle_to_timeout=True
                )
                assert ep_opt.outcome is Outcome.SUCCESS
                r_opt, r_greedy = terminal_reward(ep_opt), terminal_reward(ep_greedy)
                assert r_opt >= r_greedy
                if r_greedy < r_opt:
                    strictly_lower += 1
            # swapping the color-property mapping changes the optimal behavior
            assert plans[False] != plans[True], variant
        assert strictly_lower >= 95  # out of 100 witness instances

        # dominance on ordinary generated instances as well
        for name in ("GoToRedBall-v1", "GoToRedBall-v2"):
            for seed in range(50):
                inst = sample_instance(get_level(name), "test", seed)
                r_opt = terminal_reward(
                    execute_plan(inst, plan_optimal(inst)[0], idle_to_timeout=True)
                )
                r_greedy = terminal_reward(
                    execute_plan(inst, plan_greedy_ignorant(inst), idle_to_timeout=True)
                )
                assert r_opt >= r_greedy, (name, seed)


def test_evaluation_protocol():
    with Budget("evaluation protocol: n=1000 reporting and s.e. formula", 300.0):
        hand = EvalStats.from_episodes([1, 0, 1, 0], [1, 0, 1, 0], [2, 2, 2, 2])
        assert abs(hand.r_se - math.sqrt(1.0 / 3.0) / 2.0) < 1e-12
        assert abs(hand.succ_se - math.sqrt(1.0 / 3.0) / 2.0) < 1e-12

        stats = evaluate(OptimalPolicy(), "GoToRedBall-v1", "test", 1000, base_seed=0)
        assert stats.n == 1000
        assert stats.succ_mean == 1.0
        for field in ("succ_mean", "succ_se", "r_mean", "r_se", "nepi_mean", "nepi_se"):
            value = getattr(stats, field)
            assert isinstance(value, float) and value >= 0.0
        d = stats.to_dict()
        assert set(d) == {"n", "level", "mode", "succ", "r_avg", "n_epi"}
        assert all(len(d[k]) == 2 for k in ("succ", "r_avg", "n_epi"))


def test_protocol_round_trip():
    with Budget("protocol round-trip: 1000 episodes byte-equal", 300.0):
        import random as _random

        rng = _random.Random(7)
        server = EnvServer(port=0)
        server.serve_in_background()
        levels = ["GoToRedBall-v1", "GoToRedBall-v2", "GoToObj-Partial"]
        try:
            with EnvClient(port=server.port) as client:
                for episode in range(1000):
                    level = levels[episode % len(levels)]
                    seed = episode
                    wire = client.reset(level, "test", seed)
                    obs, ep = reset(level, "test", seed)
                    assert wire["observation"]["grid"] == obs.grid_flat()
                    assert wire["observation"]["descriptions"] == obs.descriptions
                    assert wire["observation"]["instruction"] == obs.instruction
                    for _ in range(3):
                        if ep.terminated:
                            break
                        action = rng.randrange(7)
                        ws = client.step(action)
                        local = step(ep, action)
                        assert ws["observation"]["grid"] == local.observation.grid_flat()
                        assert ws["done"] == local.done
                        if ws["done"]:
                            break
        finally:
            server.shutdown()
            server.server_close()
