"""Dynamic tile semantics and the composed single-step transition function.

Six properties can be attached to colored floor tiles, one property per color
per episode. The composition order inside :func:`resolve_action` is fixed:
action remapping (flips) -> sticky gating -> collision -> trap -> magic ->
time cost. Flips remap the action, trap is a predicate on the arrival cell,
and magic is an end-of-step displacement, so this order is the only one in
which the properties do not interfere with each other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .grid import (
    DIR_SOUTH,
    DIR_VECTORS,
    DONE,
    DROP,
    FORWARD,
    LEFT,
    PICKUP,
    RIGHT,
    TOGGLE,
    TYPE_EMPTY,
    AgentPose,
    GridState,
    ObjDesc,
    geometric_move,
)


class TileProperty(str, enum.Enum):
    """Tile behaviors; the string values are the wire serialization."""

    TRAP = "trap"
    SLIPPERY = "slippery"
    FLIP_LEFT_RIGHT = "flipLeftRight"
    FLIP_UP_DOWN = "flipUpDown"
    STICKY = "sticky"
    MAGIC = "magic"
    NORMAL = "normal"


DYNAMIC_PROPERTIES = (
    TileProperty.TRAP,
    TileProperty.SLIPPERY,
    TileProperty.FLIP_LEFT_RIGHT,
    TileProperty.FLIP_UP_DOWN,
    TileProperty.STICKY,
    TileProperty.MAGIC,
)

PROPERTY_BY_NAME = {p.value: p for p in TileProperty}

# a sticky tile releases the agent on the 3rd action after entry
STICKY_ACTIONS_TO_LEAVE = 3
# a magic tile displaces on the 2nd consecutive timestep spent on it
MAGIC_TRIGGER_TURNS = 2


class Outcome(str, enum.Enum):
    NONE = "none"
    TRAP = "trap"
    SUCCESS = "success"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class DynamicsMap:
    """The episode's color-to-property mapping and tile color layout.

    ``mapping`` is the many-to-one map from color id to property, ``tile_colors``
    maps grid locations to the color id of the dynamic tile there (absent keys
    mean no dynamic tile), and ``held_out`` is the level's set of
    (color id, property) pairs excluded from training episodes.
    """

    mapping: dict[int, TileProperty]
    tile_colors: dict[tuple[int, int], int]
    held_out: frozenset[tuple[int, TileProperty]] = frozenset()

    def color_at(self, x: int, y: int) -> Optional[int]:
        return self.tile_colors.get((x, y))

    def property_at(self, x: int, y: int) -> TileProperty:
        color = self.tile_colors.get((x, y))
        if color is None:
            return TileProperty.NORMAL
        return self.mapping[color]

    def placed_colors(self) -> list[int]:
        return sorted(set(self.tile_colors.values()))

    def to_dict(self) -> dict:
        return {
            "mapping": {str(c): p.value for c, p in sorted(self.mapping.items())},
            "tiles": [[x, y, c] for (x, y), c in sorted(self.tile_colors.items())],
            "held_out": sorted([c, p.value] for c, p in self.held_out),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DynamicsMap":
        return cls(
            mapping={int(c): PROPERTY_BY_NAME[p] for c, p in d["mapping"].items()},
            tile_colors={(x, y): c for x, y, c in d["tiles"]},
            held_out=frozenset((c, PROPERTY_BY_NAME[p]) for c, p in d["held_out"]),
        )


@dataclass
class Transition:
    """Result of one primitive action."""

    next_state: GridState
    time_delta: float
    terminated: bool
    reason: Outcome = Outcome.NONE


def _walkable(state: GridState, x: int, y: int) -> bool:
    return state.is_walkable(x, y)


def resolve_action(state: GridState, action: int, dynamics: DynamicsMap) -> Transition:
    """Apply one action to the world, honoring the tile under the agent.

    Deterministic and pure: the input state is never mutated. Termination here
    only ever means a trap; success and timeout are judged by the episode
    layer.
    """
    if not 0 <= action <= 6:
        raise ValueError(f"action id {action} out of range")

    pose = state.agent
    start_prop = dynamics.property_at(pose.x, pose.y)

    a = action
    if start_prop is TileProperty.FLIP_LEFT_RIGHT:
        if a == LEFT:
            a = RIGHT
        elif a == RIGHT:
            a = LEFT

    nxt = state.copy()

    if a == LEFT:
        nxt.agent = AgentPose(pose.x, pose.y, (pose.dir - 1) % 4)
    elif a == RIGHT:
        nxt.agent = AgentPose(pose.x, pose.y, (pose.dir + 1) % 4)
    elif a == FORWARD:
        direction = "backward" if start_prop is TileProperty.FLIP_UP_DOWN else "forward"
        candidate = geometric_move(pose, direction)
        sticky_held = (
            start_prop is TileProperty.STICKY
            and state.actions_on_tile < STICKY_ACTIONS_TO_LEAVE - 1
        )
        if not sticky_held and _walkable(state, candidate.x, candidate.y):
            nxt.agent = candidate
    elif a == PICKUP:
        fx, fy = pose.front()
        obj = state.object_at(fx, fy) if state.in_bounds(fx, fy) else None
        if obj is not None and state.carrying is None:
            nxt.carrying = obj
            nxt.set_cell(fx, fy, TYPE_EMPTY)
    elif a == DROP:
        fx, fy = pose.front()
        if (
            state.carrying is not None
            and state.in_bounds(fx, fy)
            and state.cell(fx, fy)[0] == TYPE_EMPTY
        ):
            nxt.set_object(fx, fy, state.carrying)
            nxt.carrying = None
    # TOGGLE and DONE are no-ops in the scoped levels

    terminated = False
    reason = Outcome.NONE
    arrival = dynamics.property_at(nxt.agent.x, nxt.agent.y)
    if arrival is TileProperty.TRAP:
        terminated = True
        reason = Outcome.TRAP

    moved = (nxt.agent.x, nxt.agent.y) != (pose.x, pose.y)
    if not terminated and not moved and arrival is TileProperty.MAGIC:
        if state.consec_on_tile + 1 >= MAGIC_TRIGGER_TURNS:
            dx, dy = DIR_VECTORS[DIR_SOUTH]
            sx, sy = nxt.agent.x + dx, nxt.agent.y + dy
            if _walkable(nxt, sx, sy):
                nxt.agent = AgentPose(sx, sy, nxt.agent.dir)
                moved = True
                if dynamics.property_at(sx, sy) is TileProperty.TRAP:
                    terminated = True
                    reason = Outcome.TRAP

    if moved:
        nxt.actions_on_tile = 0
        nxt.consec_on_tile = 0
    else:
        nxt.actions_on_tile = state.actions_on_tile + 1
        nxt.consec_on_tile = state.consec_on_tile + 1

    time_delta = 0.5 if start_prop is TileProperty.SLIPPERY else 1.0
    return Transition(next_state=nxt, time_delta=time_delta, terminated=terminated, reason=reason)
