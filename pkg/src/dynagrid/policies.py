"""Scripted policies used for verification and as evaluation floors/ceilings."""

from __future__ import annotations

import random

from .episode import EpisodeState
from .grid import DONE, N_ACTIONS
from .levels import derive_seed
from .planner import plan_greedy_ignorant, plan_optimal


class Policy:
    """Per-episode stateful controller.

    Scripted policies are verification instruments and read the privileged
    episode state; learned agents instead talk to the engine over the wire.
    """

    name = "policy"
    needs_observation = False

    def begin_episode(self, ep: EpisodeState) -> None:
        pass

    def act(self, ep: EpisodeState) -> int:
        raise NotImplementedError


class OptimalPolicy(Policy):
    """Replays the dynamics-aware minimum-time plan."""

    name = "optimal"

    def __init__(self) -> None:
        self._plan: list[int] = []
        self._idx = 0

    def begin_episode(self, ep: EpisodeState) -> None:
        self._plan, _ = plan_optimal(ep.instance)
        self._idx = 0

    def act(self, ep: EpisodeState) -> int:
        if self._idx >= len(self._plan):
            raise RuntimeError("optimal plan exhausted without termination")
        action = self._plan[self._idx]
        self._idx += 1
        return action


class GreedyIgnorantPolicy(Policy):
    """Replays the dynamics-blind shortest plan; idles if it runs dry.

    On tiles that suppress or redirect movement the fixed plan desyncs from
    reality, after which the policy pads with no-ops until the episode times
    out. That wasted time is the modeled failure mode.
    """

    name = "greedy"

    def __init__(self) -> None:
        self._plan: list[int] = []
        self._idx = 0

    def begin_episode(self, ep: EpisodeState) -> None:
        self._plan = plan_greedy_ignorant(ep.instance)
        self._idx = 0

    def act(self, ep: EpisodeState) -> int:
        if self._idx >= len(self._plan):
            return DONE
        action = self._plan[self._idx]
        self._idx += 1
        return action


class RandomPolicy(Policy):
    """Uniform over the seven actions; a fresh substream per episode."""

    name = "random"

    def __init__(self, rng_seed: int) -> None:
        self.rng_seed = rng_seed
        self._rng = random.Random(rng_seed)

    def begin_episode(self, ep: EpisodeState) -> None:
        self._rng = random.Random(
            derive_seed(self.rng_seed, ep.instance.level.name, ep.instance.mode, ep.instance.seed)
        )

    def act(self, ep: EpisodeState) -> int:
        return self._rng.randrange(N_ACTIONS)


def random_policy(rng_seed: int) -> RandomPolicy:
    return RandomPolicy(rng_seed)


POLICY_FACTORIES = {
    "optimal": lambda seed: OptimalPolicy(),
    "greedy": lambda seed: GreedyIgnorantPolicy(),
    "random": random_policy,
}


def make_policy(name: str, seed: int = 0) -> Policy:
    try:
        factory = POLICY_FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}") from None
    return factory(seed)
