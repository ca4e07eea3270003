"""Episode lifecycle: reset/step loop, fractional time, rewards, and traces.

Time advances by 1.0 per action, or 0.5 when the action is taken while
standing on a slippery tile. Success pays 1 - 0.9 * T / T_max on the
fractional time counter (so slippery shortcuts strictly increase reward);
trap and timeout pay zero. Timeout is judged on fractional time, keeping the
slippery bonus consistent; this is the single place that rule lives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .dynamics import DynamicsMap, Outcome, resolve_action
from .grid import GridState, observe
from .levels import EnvInstance, LevelSpec, get_level, mission_satisfied, sample_instance
from .text import DescriptionSet, episode_descriptions, instruction, text_seed_for

REWARD_DECAY = 0.9


class SteppingTerminatedEpisode(RuntimeError):
    pass


@dataclass
class Observation:
    """What an agent sees: symbolic view plus the episode's texts."""

    grid: np.ndarray  # (7, 7, 3) uint8
    descriptions: list[str]
    instruction: str

    def grid_flat(self) -> list[int]:
        return self.grid.reshape(-1).tolist()


@dataclass
class EpisodeState:
    instance: EnvInstance
    grid: GridState
    descriptions: DescriptionSet
    instruction_text: str
    text_mode: str = "descriptive"
    time: float = 0.0
    steps: int = 0
    terminated: bool = False
    outcome: Outcome = Outcome.NONE
    actions: list[int] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)

    @property
    def max_steps(self) -> int:
        return self.instance.level.max_steps

    def observation(self) -> Observation:
        return Observation(
            grid=observe(self.grid),
            descriptions=list(self.descriptions.sentences),
            instruction=self.instruction_text,
        )


@dataclass
class StepResult:
    observation: Optional[Observation]
    reward: float
    done: bool
    info: dict


def reset(
    level: Union[LevelSpec, str],
    mode: str,
    seed: int,
    text_mode: str = "descriptive",
) -> tuple[Observation, EpisodeState]:
    """Sample a fresh instance and return its initial observation."""
    spec = get_level(level) if isinstance(level, str) else level
    instance = sample_instance(spec, mode, seed)
    return start_episode(instance, text_mode=text_mode)


def start_episode(
    instance: EnvInstance, text_mode: str = "descriptive"
) -> tuple[Observation, EpisodeState]:
    """Begin an episode on an already-generated (possibly hand-built) instance."""
    tseed = text_seed_for(instance.level.name, instance.mode, instance.seed)
    descriptions = episode_descriptions(
        instance.dynamics,
        partial=instance.level.partial_text,
        text_mode=text_mode,
        rng_seed=tseed,
    )
    ep = EpisodeState(
        instance=instance,
        grid=instance.grid.copy(),
        descriptions=descriptions,
        instruction_text=instruction(instance.mission),
        text_mode=text_mode,
    )
    return ep.observation(), ep


def step(ep: EpisodeState, action: int, compute_observation: bool = True) -> StepResult:
    """Advance one action; trap/success/timeout precedence in that order
    (a lethal move can never complete a mission)."""
    if ep.terminated:
        raise SteppingTerminatedEpisode("episode is over; reset to continue")

    transition = resolve_action(ep.grid, action, ep.instance.dynamics)
    ep.grid = transition.next_state
    ep.time += transition.time_delta
    ep.steps += 1
    ep.actions.append(int(action))

    reward = 0.0
    if transition.terminated:
        ep.terminated = True
        ep.outcome = Outcome.TRAP
    elif mission_satisfied(ep.instance, ep.grid):
        ep.terminated = True
        ep.outcome = Outcome.SUCCESS
        reward = 1.0 - REWARD_DECAY * ep.time / ep.max_steps
    elif ep.time >= ep.max_steps:
        ep.terminated = True
        ep.outcome = Outcome.TIMEOUT
    ep.rewards.append(reward)

    obs = ep.observation() if compute_observation else None
    return StepResult(
        observation=obs,
        reward=reward,
        done=ep.terminated,
        info={"time": ep.time, "steps": ep.steps, "outcome": ep.outcome.value},
    )


@dataclass(frozen=True)
class EpisodeTrace:
    """Self-contained record of one episode; replayable via reset + step."""

    seed: int
    level: str
    mode: str
    actions: tuple[int, ...]
    rewards: tuple[float, ...]
    outcome: str
    time: float
    steps: int

    def to_json_line(self) -> str:
        payload = {
            "seed": self.seed,
            "level": self.level,
            "mode": self.mode,
            "actions": list(self.actions),
            "rewards": list(self.rewards),
            "outcome": self.outcome,
            "time": self.time,
            "steps": self.steps,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_line(cls, line: str) -> "EpisodeTrace":
        d = json.loads(line)
        return cls(
            seed=d["seed"],
            level=d["level"],
            mode=d["mode"],
            actions=tuple(d["actions"]),
            rewards=tuple(d["rewards"]),
            outcome=d["outcome"],
            time=d["time"],
            steps=d["steps"],
        )


def record_trace(ep: EpisodeState) -> EpisodeTrace:
    return EpisodeTrace(
        seed=ep.instance.seed,
        level=ep.instance.level.name,
        mode=ep.instance.mode,
        actions=tuple(ep.actions),
        rewards=tuple(ep.rewards),
        outcome=ep.outcome.value,
        time=ep.time,
        steps=ep.steps,
    )


def replay(trace: EpisodeTrace) -> EpisodeState:
    """Re-run a trace through reset + step and return the final episode state."""
    _, ep = reset(trace.level, trace.mode, trace.seed)
    for action in trace.actions:
        step(ep, action, compute_observation=False)
    return ep


def write_traces(path, traces) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in traces:
            fh.write(t.to_json_line() + "\n")


def read_traces(path) -> list[EpisodeTrace]:
    with open(path, encoding="utf-8") as fh:
        return [EpisodeTrace.from_json_line(line) for line in fh if line.strip()]
