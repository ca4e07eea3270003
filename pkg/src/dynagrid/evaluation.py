"""Batched policy evaluation: success rate, average reward, and episode length.

Each metric is reported as sample mean plus standard error (sample standard
deviation with the n-1 denominator, divided by sqrt(n)) over n episodes run on
consecutive seeds. Aggregation is order-independent, so episodes may be run
concurrently by callers that want to.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .dynamics import Outcome
from .episode import EpisodeState, EpisodeTrace, record_trace, reset, step
from .levels import LevelSpec, get_level
from .policies import Policy


class MismatchedMetrics(ValueError):
    pass


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = statistics.fmean(values)
    if n < 2:
        return mean, 0.0
    return mean, statistics.stdev(values) / math.sqrt(n)


@dataclass(frozen=True)
class EvalStats:
    n: int
    succ_mean: float
    succ_se: float
    r_mean: float
    r_se: float
    nepi_mean: float
    nepi_se: float
    level: str = ""
    mode: str = ""

    @classmethod
    def from_episodes(
        cls,
        successes: Sequence[float],
        rewards: Sequence[float],
        steps: Sequence[float],
        level: str = "",
        mode: str = "",
    ) -> "EvalStats":
        if not (len(successes) == len(rewards) == len(steps)):
            raise MismatchedMetrics("per-episode metric lists differ in length")
        sm, sse = _mean_se(successes)
        rm, rse = _mean_se(rewards)
        nm, nse = _mean_se(steps)
        return cls(
            n=len(successes),
            succ_mean=sm,
            succ_se=sse,
            r_mean=rm,
            r_se=rse,
            nepi_mean=nm,
            nepi_se=nse,
            level=level,
            mode=mode,
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "level": self.level,
            "mode": self.mode,
            "succ": [self.succ_mean, self.succ_se],
            "r_avg": [self.r_mean, self.r_se],
            "n_epi": [self.nepi_mean, self.nepi_se],
        }


def run_episode(
    policy: Policy,
    level: Union[LevelSpec, str],
    mode: str,
    seed: int,
    text_mode: str = "descriptive",
) -> EpisodeState:
    _, ep = reset(level, mode, seed, text_mode=text_mode)
    policy.begin_episode(ep)
    while not ep.terminated:
        action = policy.act(ep)
        step(ep, action, compute_observation=policy.needs_observation)
    return ep


def evaluate(
    policy: Policy,
    level: Union[LevelSpec, str],
    mode: str,
    n_episodes: int,
    base_seed: int,
    text_mode: str = "descriptive",
    collect_traces: bool = False,
) -> Union[EvalStats, tuple[EvalStats, list[EpisodeTrace]]]:
    """Run episodes on seeds base_seed .. base_seed + n - 1 and aggregate."""
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    spec = get_level(level) if isinstance(level, str) else level
    successes: list[float] = []
    rewards: list[float] = []
    steps_taken: list[float] = []
    traces: list[EpisodeTrace] = []
    for i in range(n_episodes):
        ep = run_episode(policy, spec, mode, base_seed + i, text_mode=text_mode)
        successes.append(1.0 if ep.outcome is Outcome.SUCCESS else 0.0)
        rewards.append(ep.rewards[-1] if ep.rewards else 0.0)
        steps_taken.append(float(ep.steps))
        if collect_traces:
            traces.append(record_trace(ep))
    stats = EvalStats.from_episodes(successes, rewards, steps_taken, level=spec.name, mode=mode)
    if collect_traces:
        return stats, traces
    return stats


# columns: (header, mean attr, se attr, higher-is-better)
_COLUMNS = (
    ("Succ", "succ_mean", "succ_se", True),
    ("R_avg", "r_mean", "r_se", True),
    ("N_epi", "nepi_mean", "nepi_se", False),
)


@dataclass(frozen=True)
class Comparison:
    labels: tuple[str, ...]
    stats: tuple[EvalStats, ...]
    # per column header: (best row index, second-best row index or None)
    ranking: dict

    def to_records(self) -> list[dict]:
        records = []
        for i, (label, st) in enumerate(zip(self.labels, self.stats)):
            rec = dict(st.to_dict())
            rec["label"] = label
            rec["best_in"] = sorted(c for c, (b, _) in self.ranking.items() if b == i)
            rec["second_in"] = sorted(c for c, (_, s) in self.ranking.items() if s == i)
            records.append(rec)
        return records

    def to_text(self) -> str:
        header = f"{'policy':<12} {'n':>5}"
        for name, *_ in _COLUMNS:
            header += f"  {name + ' (mean±se)':>22}"
        lines = [header, "-" * len(header)]
        for i, (label, st) in enumerate(zip(self.labels, self.stats)):
            row = f"{label:<12} {st.n:>5}"
            for name, mean_attr, se_attr, _ in _COLUMNS:
                cell = f"{getattr(st, mean_attr):.3f}±{getattr(st, se_attr):.3f}"
                best, second = self.ranking[name]
                if best == i:
                    cell += "*"
                elif second == i:
                    cell += "^"
                row += f"  {cell:>22}"
            lines.append(row)
        lines.append("(* best, ^ second best; N_epi: lower is better)")
        return "\n".join(lines)


def compare(stats: Sequence[EvalStats], labels: Sequence[str]) -> Comparison:
    """Rank evaluations column by column, flagging best and second best."""
    if len(stats) < 2:
        raise MismatchedMetrics("compare needs at least two evaluations")
    if len(stats) != len(labels):
        raise MismatchedMetrics("one label per stats entry required")
    if len({st.n for st in stats}) != 1:
        raise MismatchedMetrics("evaluations disagree on episode count")
    if len({st.level for st in stats}) != 1:
        raise MismatchedMetrics("evaluations disagree on level")

    ranking: dict[str, tuple[int, Optional[int]]] = {}
    for name, mean_attr, _, higher_better in _COLUMNS:
        order = sorted(
            range(len(stats)),
            key=lambda i: getattr(stats[i], mean_attr),
            reverse=higher_better,
        )
        ranking[name] = (order[0], order[1] if len(order) > 1 else None)
    return Comparison(labels=tuple(labels), stats=tuple(stats), ranking=ranking)
