"""PPO training over the wire protocol, with periodic protocol-style evaluation.

The learner is single-threaded; experience comes from a vector of engine
subprocesses stepped synchronously. Evaluation mirrors the engine's own
protocol: n episodes on consecutive seeds, reporting success rate, average
terminal reward, and average step count with standard errors.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from pathlib import Path

import numpy as np
import torch

from .agent import ActorCritic, sentences_for
from .client import StdioEnvClient, VecEnv, WireObservation
from .configs import TrainConfig


class NaNLossError(RuntimeError):
    pass


def probe_k_sentences(level: str, mode: str, text: str, text_mode_for_model: str) -> int:
    """One throwaway reset tells us how many text inputs the model will see."""
    with StdioEnvClient() as client:
        obs, _ = client.reset(level, mode, seed=0, text=text)
    return len(sentences_for(obs, text_mode_for_model))


def server_text_mode(model_text_mode: str) -> str:
    """Map the model's text mode to the reset request's text field."""
    if model_text_mode in ("lorem", "random", "shuffled"):
        return model_text_mode
    return "descriptive"


def _mean_se(values):
    n = len(values)
    mean = statistics.fmean(values) if n else 0.0
    if n < 2:
        return mean, 0.0
    return mean, statistics.stdev(values) / math.sqrt(n)


def evaluate_remote(model: ActorCritic, level: str, mode: str, n_episodes: int,
                    base_seed: int, deterministic: bool = False) -> dict:
    """Protocol-style evaluation: seeds base..base+n-1, stochastic policy."""
    successes, rewards, steps_taken = [], [], []
    text = server_text_mode(model.text_mode)
    with StdioEnvClient() as client:
        for i in range(n_episodes):
            obs, _ = client.reset(level, mode, base_seed + i, text=text)
            terminal_reward, steps, outcome = 0.0, 0, "timeout"
            done = False
            while not done:
                actions, _, _ = model.act([obs], sample=not deterministic)
                obs, reward, done, info = client.step(int(actions[0]))
                terminal_reward = reward
                steps += 1
                outcome = info["outcome"]
            successes.append(1.0 if outcome == "success" else 0.0)
            rewards.append(terminal_reward)
            steps_taken.append(float(steps))
    succ, succ_se = _mean_se(successes)
    r, r_se = _mean_se(rewards)
    nepi, nepi_se = _mean_se(steps_taken)
    return {
        "n": n_episodes,
        "succ": [succ, succ_se],
        "r_avg": [r, r_se],
        "n_epi": [nepi, nepi_se],
    }


class RolloutBuffer:
    def __init__(self, n_steps: int, n_envs: int):
        self.n_steps = n_steps
        self.n_envs = n_envs
        self.views = []
        self.tokens = []
        self.actions = torch.zeros(n_steps, n_envs, dtype=torch.long)
        self.log_probs = torch.zeros(n_steps, n_envs)
        self.values = torch.zeros(n_steps, n_envs)
        self.rewards = torch.zeros(n_steps, n_envs)
        self.dones = torch.zeros(n_steps, n_envs)

    def add(self, t, views, tokens, actions, log_probs, values, rewards, dones):
        self.views.append(views)
        self.tokens.append(tokens)
        self.actions[t] = actions
        self.log_probs[t] = log_probs
        self.values[t] = values
        self.rewards[t] = torch.from_numpy(rewards)
        self.dones[t] = torch.from_numpy(dones.astype(np.float32))

    def compute_returns(self, last_values: torch.Tensor, gamma: float, lam: float):
        advantages = torch.zeros_like(self.rewards)
        gae = torch.zeros(self.n_envs)
        for t in reversed(range(self.n_steps)):
            next_values = last_values if t == self.n_steps - 1 else self.values[t + 1]
            not_done = 1.0 - self.dones[t]
            delta = self.rewards[t] + gamma * next_values * not_done - self.values[t]
            gae = delta + gamma * lam * not_done * gae
            advantages[t] = gae
        returns = advantages + self.values
        return advantages, returns

    def flatten(self):
        views = torch.cat(self.views, dim=0)
        tokens = torch.cat(self.tokens, dim=0) if self.tokens[0] is not None else None
        return views, tokens


def train(config: TrainConfig, log_line=print) -> dict:
    """Run PPO to completion; returns the final evaluation record.

    Writes `curve.jsonl` (one evaluation record per line), `config.json`, and
    `checkpoint.pt` under config.out_dir.
    """
    torch.manual_seed(config.seed)
    np.random.seed(config.seed)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(config.to_json())
    curve_path = out_dir / "curve.jsonl"
    curve_path.write_text("")

    text = server_text_mode(config.text)
    k = probe_k_sentences(config.level, config.mode, text, config.text)
    model = ActorCritic(config.arch, config.text, k)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)

    frames = 0
    updates = 0
    next_eval = 0
    last_logged = {}
    start = time.time()
    recent_outcomes: list[str] = []

    with VecEnv(config.n_envs, config.level, config.mode, config.seed, text=text) as envs:
        observations = envs.reset()
        while frames < config.total_frames:
            buffer = RolloutBuffer(config.n_steps, config.n_envs)
            for t in range(config.n_steps):
                views, tokens = model.encode_batch(observations)
                with torch.no_grad():
                    logits, values = model(views, tokens)
                    dist = torch.distributions.Categorical(logits=logits)
                    actions = dist.sample()
                    log_probs = dist.log_prob(actions)
                observations, rewards, dones, infos = envs.step(actions.tolist())
                buffer.add(t, views, tokens, actions, log_probs, values, rewards, dones)
                frames += config.n_envs
                for info in infos:
                    if "episode" in info:
                        recent_outcomes.append(info["episode"]["outcome"])
            recent_outcomes = recent_outcomes[-200:]

            with torch.no_grad():
                views, tokens = model.encode_batch(observations)
                _, last_values = model(views, tokens)
            advantages, returns = buffer.compute_returns(
                last_values, config.gamma, config.gae_lambda
            )

            flat_views, flat_tokens = buffer.flatten()
            flat_actions = buffer.actions.reshape(-1)
            flat_log_probs = buffer.log_probs.reshape(-1)
            # normalize advantages with a floored std: rewards are sparse, and
            # an unfloored denominator amplifies value noise into unit-scale
            # updates on batches that contain no success at all
            flat_adv = advantages.reshape(-1)
            flat_returns = returns.reshape(-1)
            flat_adv = (flat_adv - flat_adv.mean()) / max(
                float(flat_adv.std()), config.adv_std_floor
            )

            batch = flat_actions.shape[0]
            for _ in range(config.epochs):
                order = torch.randperm(batch)
                for lo in range(0, batch, config.minibatch_size):
                    idx = order[lo : lo + config.minibatch_size]
                    logits, values = model(
                        flat_views[idx],
                        flat_tokens[idx] if flat_tokens is not None else None,
                    )
                    dist = torch.distributions.Categorical(logits=logits)
                    log_probs = dist.log_prob(flat_actions[idx])
                    ratio = torch.exp(log_probs - flat_log_probs[idx])
                    surr1 = ratio * flat_adv[idx]
                    surr2 = torch.clamp(ratio, 1 - config.clip, 1 + config.clip) * flat_adv[idx]
                    policy_loss = -torch.min(surr1, surr2).mean()
                    value_loss = (values - flat_returns[idx]).pow(2).mean()
                    entropy = dist.entropy().mean()
                    loss = (
                        policy_loss
                        + config.value_coef * value_loss
                        - config.entropy_coef * entropy
                    )
                    if not torch.isfinite(loss):
                        raise NaNLossError(
                            f"non-finite loss at frame {frames}: "
                            f"policy={policy_loss.item()} value={value_loss.item()} "
                            f"entropy={entropy.item()}"
                        )
                    optimizer.zero_grad()
                    loss.backward()
                    torch.nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
                    optimizer.step()
            updates += 1
            last_logged = {
                "loss": float(loss.item()),
                "policy_loss": float(policy_loss.item()),
                "value_loss": float(value_loss.item()),
                "entropy": float(entropy.item()),
            }

            if frames >= next_eval or frames >= config.total_frames:
                stats = evaluate_remote(
                    model, config.level, config.mode, config.eval_episodes, config.eval_seed
                )
                record = {
                    "frames": frames,
                    "updates": updates,
                    "elapsed_s": round(time.time() - start, 1),
                    **stats,
                    **last_logged,
                }
                with curve_path.open("a") as fh:
                    fh.write(json.dumps(record, sort_keys=True) + "\n")
                rolling = (
                    sum(o == "success" for o in recent_outcomes) / len(recent_outcomes)
                    if recent_outcomes
                    else 0.0
                )
                log_line(
                    f"frames={frames} eval_succ={stats['succ'][0]:.2f} "
                    f"train_succ~{rolling:.2f} loss={last_logged['loss']:.4f}"
                )
                next_eval = frames + config.eval_every_frames

    torch.save(
        {
            "model": model.state_dict(),
            "vocab": model.vocab.token_to_id,
            "config": config.to_json(),
            "k": k,
        },
        out_dir / "checkpoint.pt",
    )
    return record


def load_checkpoint(path) -> tuple[ActorCritic, TrainConfig]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = TrainConfig.from_json(payload["config"])
    model = ActorCritic(config.arch, config.text, payload["k"])
    model.load_state_dict(payload["model"])
    model.vocab.token_to_id = payload["vocab"]
    model.eval()
    return model, config
