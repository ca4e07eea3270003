"""Training configuration."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass


@dataclass
class TrainConfig:
    level: str = "GoToRedBall-Mini"
    mode: str = "train"
    arch: str = "image"
    text: str = "none"  # none | descriptive | instructive | all | lorem | random | shuffled
    total_frames: int = 200_000
    n_envs: int = 8
    n_steps: int = 256  # rollout length per env between updates
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip: float = 0.2
    epochs: int = 4
    minibatch_size: int = 512
    lr: float = 7e-4
    adv_std_floor: float = 0.05  # see the normalization note in ppo.train
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    seed: int = 0
    eval_every_frames: int = 20_000
    eval_episodes: int = 50
    eval_seed: int = 1_000_000
    out_dir: str = "runs/run"

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.total_frames < self.n_envs * self.n_steps:
            raise ValueError("total_frames smaller than one rollout")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TrainConfig":
        return cls(**json.loads(text))
