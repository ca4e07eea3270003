"""Shared test helpers: plan execution and independent oracles.

The oracles here deliberately avoid the library's search/visibility code
paths: the visibility oracle is a fixpoint computation instead of the sweep,
and the plan oracle is exhaustive enumeration with sound cost pruning instead
of Dijkstra.
"""

from __future__ import annotations

import numpy as np

from dynagrid.dynamics import resolve_action
from dynagrid.episode import start_episode, step
from dynagrid.grid import DONE, TYPE_WALL, VIEW_SIZE
from dynagrid.levels import mission_satisfied


def execute_plan(instance, actions, text_mode="descriptive", idle_to_timeout=True):
    """Run an action list through the engine; optionally idle until timeout."""
    _, ep = start_episode(instance, text_mode=text_mode)
    for a in actions:
        if ep.terminated:
            break
        step(ep, a, compute_observation=False)
    while idle_to_timeout and not ep.terminated:
        step(ep, DONE, compute_observation=False)
    return ep


def terminal_reward(ep) -> float:
    return ep.rewards[-1] if ep.rewards else 0.0


def visibility_fixpoint(blocked: np.ndarray) -> np.ndarray:
    """Independent visibility oracle on the 7x7 local window.

    Iterates the propagation relation to a fixpoint: a visible see-through
    cell lights both horizontal neighbors, the cell straight ahead, and both
    forward diagonals ("ahead" is up, toward row 0; the agent sits at the
    bottom-center). Walls become visible but never propagate.
    """
    n = VIEW_SIZE
    visible = np.zeros((n, n), dtype=bool)
    visible[n - 1, n // 2] = True
    changed = True
    while changed:
        changed = False
        for r in range(n):
            for c in range(n):
                if not visible[r, c] or blocked[r, c]:
                    continue
                targets = [(r, c - 1), (r, c + 1), (r - 1, c - 1), (r - 1, c), (r - 1, c + 1)]
                for tr, tc in targets:
                    if 0 <= tr < n and 0 <= tc < n and not visible[tr, tc]:
                        visible[tr, tc] = True
                        changed = True
    return visible


def brute_force_min_halves(instance, cap_halves: int, actions=(0, 1, 2)):
    """Cheapest successful action sequence with cost < cap, in half time units.

    Exhaustive depth-first enumeration over the action alphabet; branches are
    abandoned only when their accumulated cost already reaches the best known
    bound (sound, costs are positive), when they die on a trap, or when they
    succeed. Returns None when nothing beats the cap. Pickup/drop/toggle/done
    are excluded: for GoTo missions they can only add cost.
    """
    best = [cap_halves]
    dyn = instance.dynamics

    def rec(state, cost):
        for action in actions:
            tr = resolve_action(state, action, dyn)
            c2 = cost + (1 if tr.time_delta == 0.5 else 2)
            if c2 >= best[0]:
                continue
            if tr.terminated:
                continue
            if mission_satisfied(instance, tr.next_state):
                best[0] = c2
                continue
            rec(tr.next_state, c2)

    rec(instance.grid.copy(), 0)
    return best[0] if best[0] < cap_halves else None


def reference_minigrid_move(width, height, walls, pose, action):
    """Hand-written plain transition on an all-normal grid: (x, y, dir) -> same.

    0 turns left, 1 turns right, 2 steps ahead unless a wall or the border
    blocks; everything else holds still.
    """
    x, y, d = pose
    if action == 0:
        return (x, y, (d - 1) % 4)
    if action == 1:
        return (x, y, (d + 1) % 4)
    if action == 2:
        dx, dy = ((1, 0), (0, 1), (-1, 0), (0, -1))[d]
        nx, ny = x + dx, y + dy
        if 0 < nx < width - 1 and 0 < ny < height - 1 and (nx, ny) not in walls:
            return (nx, ny, d)
        return (x, y, d)
    return (x, y, d)
