"""Scripted planners: a dynamics-aware optimal planner and a dynamics-blind one.

The optimal planner runs uniform-cost search with the engine's own transition
function as successor, so flips, sticky gating, magic displacement, slippery
costs, and traps are all modeled exactly. Costs are kept in integer
half-time-units (slippery actions cost 1, everything else 2) so priorities
compare exactly, and ties between equal-cost plans break lexicographically by
action id sequence, making plans deterministic.

Search states are keyed by (pose, sticky counter, magic counter, carrying);
both counters saturate at 2 because the dynamics only ever test "at least 2
prior actions" and "at least 1 prior turn". Objects other than a PutNext
mission's moved object never relocate: pickup is only expanded for that
object and a drop is only expanded when it completes the mission, which never
sacrifices optimality (carrying does not impede movement, so intermediate
drops only waste time).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace

from .dynamics import DynamicsMap, Outcome, TileProperty, resolve_action
from .grid import DONE, FORWARD, LEFT, PICKUP, DROP, RIGHT, GridState
from .levels import EnvInstance, PUT_NEXT_LOCAL, mission_satisfied

COUNTER_CAP = 2


class Unsolvable(RuntimeError):
    pass


@dataclass(frozen=True)
class PlanNode:
    """Search-space key; the full GridState rides alongside, uncompared."""

    x: int
    y: int
    dir: int
    sticky_count: int
    magic_count: int
    carrying: bool


def _node_key(state: GridState) -> PlanNode:
    return PlanNode(
        x=state.agent.x,
        y=state.agent.y,
        dir=state.agent.dir,
        sticky_count=min(state.actions_on_tile, COUNTER_CAP),
        magic_count=min(state.consec_on_tile, COUNTER_CAP),
        carrying=state.carrying is not None,
    )


def _candidate_actions(instance: EnvInstance, state: GridState) -> list[int]:
    actions = [LEFT, RIGHT, FORWARD]
    if instance.mission.family == PUT_NEXT_LOCAL:
        if state.carrying is None:
            fx, fy = state.agent.front()
            if state.in_bounds(fx, fy) and state.object_at(fx, fy) == instance.mission.move:
                actions.append(PICKUP)
        else:
            actions.append(DROP)
    return actions


def _search(instance: EnvInstance, dynamics: DynamicsMap) -> tuple[list[int], float]:
    start = instance.grid.copy()
    horizon_halves = instance.level.max_steps * 2

    settled: set[PlanNode] = set()
    best: dict[PlanNode, int] = {_node_key(start): 0}
    heap: list[tuple[int, tuple[int, ...], GridState]] = [(0, (), start)]
    while heap:
        cost, actions, state = heapq.heappop(heap)
        if actions and mission_satisfied(instance, state):
            # first goal popped is minimal-cost and lexicographically least
            return list(actions), cost / 2.0
        key = _node_key(state)
        if key in settled:
            continue
        settled.add(key)
        if cost >= horizon_halves:
            continue  # the episode would have timed out here
        for action in _candidate_actions(instance, state):
            transition = resolve_action(state, action, dynamics)
            if transition.terminated:
                continue  # trap: dead end
            nxt = transition.next_state
            ncost = cost + (1 if transition.time_delta == 0.5 else 2)
            if mission_satisfied(instance, nxt):
                # goal states bypass key pruning: after a PutNext drop the
                # grid differs from same-key states seen before the pickup
                heapq.heappush(heap, (ncost, actions + (action,), nxt))
                continue
            if action == DROP:
                continue  # only the mission-completing drop is explored
            nkey = _node_key(nxt)
            if nkey in settled:
                continue
            # equal-cost paths must still enter the heap: pop order resolves
            # cost ties lexicographically on the action sequence
            if ncost <= best.get(nkey, ncost):
                best[nkey] = ncost
                heapq.heappush(heap, (ncost, actions + (action,), nxt))
    raise Unsolvable(f"no plan found for {instance.level.name} seed={instance.seed}")


def plan_optimal(instance: EnvInstance) -> tuple[list[int], float]:
    """Minimum-fractional-time action sequence completing the mission."""
    return _search(instance, instance.dynamics)


def neutralized(dynamics: DynamicsMap) -> DynamicsMap:
    """The same tile layout with every color behaving as a normal floor."""
    return DynamicsMap(
        mapping={c: TileProperty.NORMAL for c in dynamics.mapping},
        tile_colors=dict(dynamics.tile_colors),
        held_out=dynamics.held_out,
    )


def plan_greedy_ignorant(instance: EnvInstance) -> list[int]:
    """Shortest plan pretending every colored tile is normal.

    Executed through the real engine this plan may walk into traps or drift
    off course; that failure mode is the point.
    """
    actions, _ = _search(instance, neutralized(instance.dynamics))
    return actions
