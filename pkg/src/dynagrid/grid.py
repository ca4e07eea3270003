"""World representation: cell encodings, agent geometry, and the agent-relative view.

Coordinates are (x, y) with x growing east (rightward) and y growing south
(downward); (0, 0) is the top-left corner. Heading ids use the same axes:
0=east, 1=south, 2=west, 3=north. Cell, color, and action ids are wire
protocol constants and must not be renumbered.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

# cell type ids
TYPE_UNSEEN = 0
TYPE_EMPTY = 1
TYPE_WALL = 2
TYPE_FLOOR = 3
TYPE_KEY = 5
TYPE_BALL = 6
TYPE_BOX = 7
TYPE_AGENT = 10

OBJECT_TYPES = (TYPE_KEY, TYPE_BALL, TYPE_BOX)
OBJECT_TYPE_NAMES = {TYPE_KEY: "key", TYPE_BALL: "ball", TYPE_BOX: "box"}
OBJECT_TYPE_IDS = {name: tid for tid, name in OBJECT_TYPE_NAMES.items()}

# color ids
COLOR_NAMES = ("red", "green", "blue", "purple", "yellow", "grey", "orange")
COLOR_IDS = {name: i for i, name in enumerate(COLOR_NAMES)}
RED, GREEN, BLUE, PURPLE, YELLOW, GREY, ORANGE = range(7)

# headings
DIR_EAST, DIR_SOUTH, DIR_WEST, DIR_NORTH = 0, 1, 2, 3
DIR_VECTORS = ((1, 0), (0, 1), (-1, 0), (0, -1))
DIR_NAMES = ("east", "south", "west", "north")

# action ids
LEFT, RIGHT, FORWARD, PICKUP, DROP, TOGGLE, DONE = range(7)
ACTION_NAMES = ("left", "right", "forward", "pickup", "drop", "toggle", "done")
N_ACTIONS = 7

VIEW_SIZE = 7
OBSERVATION_LEN = VIEW_SIZE * VIEW_SIZE * 3


class ObjDesc(NamedTuple):
    """A carryable object: (type id, color id)."""

    type_id: int
    color_id: int

    def phrase(self) -> str:
        return f"{COLOR_NAMES[self.color_id]} {OBJECT_TYPE_NAMES[self.type_id]}"


@dataclass(frozen=True)
class AgentPose:
    x: int
    y: int
    dir: int

    def forward_vec(self) -> tuple[int, int]:
        return DIR_VECTORS[self.dir]

    def front(self) -> tuple[int, int]:
        dx, dy = DIR_VECTORS[self.dir]
        return self.x + dx, self.y + dy


def geometric_move(pose: AgentPose, direction: str) -> AgentPose:
    """Displace one cell along (forward) or against (backward) the heading.

    No collision or bounds checking; the candidate may be invalid and is
    validated by the caller.
    """
    dx, dy = DIR_VECTORS[pose.dir]
    if direction == "forward":
        return replace(pose, x=pose.x + dx, y=pose.y + dy)
    if direction == "backward":
        return replace(pose, x=pose.x - dx, y=pose.y - dy)
    raise ValueError(f"unknown direction {direction!r}")


@dataclass
class GridState:
    """Full world state.

    ``cells`` is a (height, width, 3) uint8 array of (type, color, state)
    triples holding the static contents; the agent lives in ``agent`` and is
    not written into ``cells``. ``actions_on_tile`` counts actions taken since
    the agent entered its current cell and ``consec_on_tile`` counts completed
    timesteps that began and ended on it; both reset to zero whenever the
    agent's (x, y) changes.
    """

    width: int
    height: int
    cells: np.ndarray
    agent: AgentPose
    carrying: Optional[ObjDesc] = None
    actions_on_tile: int = 0
    consec_on_tile: int = 0

    @classmethod
    def empty_room(cls, width: int, height: int, agent: AgentPose) -> "GridState":
        """A walled rectangle with an empty interior."""
        cells = np.zeros((height, width, 3), dtype=np.uint8)
        cells[:, :, 0] = TYPE_EMPTY
        cells[0, :, 0] = TYPE_WALL
        cells[-1, :, 0] = TYPE_WALL
        cells[:, 0, 0] = TYPE_WALL
        cells[:, -1, 0] = TYPE_WALL
        cells[cells[:, :, 0] == TYPE_WALL, 1] = GREY
        return cls(width=width, height=height, cells=cells, agent=agent)

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def cell(self, x: int, y: int) -> tuple[int, int, int]:
        t, c, s = self.cells[y, x]
        return int(t), int(c), int(s)

    def set_cell(self, x: int, y: int, type_id: int, color_id: int = 0, state_id: int = 0) -> None:
        self.cells[y, x] = (type_id, color_id, state_id)

    def set_floor(self, x: int, y: int, color_id: int) -> None:
        self.set_cell(x, y, TYPE_FLOOR, color_id)

    def set_object(self, x: int, y: int, obj: ObjDesc) -> None:
        self.set_cell(x, y, obj.type_id, obj.color_id)

    def is_walkable(self, x: int, y: int) -> bool:
        """Cells the agent may occupy: empty cells and floor tiles."""
        if not self.in_bounds(x, y):
            return False
        t = int(self.cells[y, x, 0])
        return t in (TYPE_EMPTY, TYPE_FLOOR)

    def object_at(self, x: int, y: int) -> Optional[ObjDesc]:
        t, c, _ = self.cell(x, y)
        if t in OBJECT_TYPES:
            return ObjDesc(t, c)
        return None

    def find_object(self, desc: ObjDesc) -> Optional[tuple[int, int]]:
        """Location of the first cell holding an object with this descriptor."""
        match = (self.cells[:, :, 0] == desc.type_id) & (self.cells[:, :, 1] == desc.color_id)
        ys, xs = np.nonzero(match)
        if len(xs) == 0:
            return None
        return int(xs[0]), int(ys[0])

    def copy(self) -> "GridState":
        return GridState(
            width=self.width,
            height=self.height,
            cells=self.cells.copy(),
            agent=self.agent,
            carrying=self.carrying,
            actions_on_tile=self.actions_on_tile,
            consec_on_tile=self.consec_on_tile,
        )

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "cells": self.cells.reshape(-1).tolist(),
            "agent": [self.agent.x, self.agent.y, self.agent.dir],
            "carrying": list(self.carrying) if self.carrying else None,
            "timers": [self.actions_on_tile, self.consec_on_tile],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridState":
        w, h = d["width"], d["height"]
        cells = np.asarray(d["cells"], dtype=np.uint8).reshape(h, w, 3)
        carrying = ObjDesc(*d["carrying"]) if d["carrying"] else None
        ax, ay, adir = d["agent"]
        timers = d.get("timers", [0, 0])
        return cls(
            width=w,
            height=h,
            cells=cells,
            agent=AgentPose(ax, ay, adir),
            carrying=carrying,
            actions_on_tile=timers[0],
            consec_on_tile=timers[1],
        )


def validate_state(state: GridState) -> None:
    """Raise ValueError when a structural invariant is broken."""
    h, w = state.cells.shape[:2]
    if (w, h) != (state.width, state.height):
        raise ValueError("cells array does not match declared size")
    border = np.concatenate(
        [state.cells[0, :, 0], state.cells[-1, :, 0], state.cells[:, 0, 0], state.cells[:, -1, 0]]
    )
    if not np.all(border == TYPE_WALL):
        raise ValueError("outer boundary must be wall")
    if not state.is_walkable(state.agent.x, state.agent.y):
        raise ValueError("agent must stand on a walkable cell")
    if state.agent.dir not in (0, 1, 2, 3):
        raise ValueError("agent heading out of range")


def _blocks_sight(local: np.ndarray, row: int, col: int) -> bool:
    # out-of-bounds cells were filled as walls by the caller
    return int(local[row, col, 0]) == TYPE_WALL


def _visibility_mask(local: np.ndarray) -> np.ndarray:
    """Shadow-casting visibility over the rotated local window.

    Visibility floods away from the agent cell (bottom-center): a visible,
    see-through cell lights its horizontal neighbor along the sweep plus the
    straight and diagonal cells one row further ahead. Walls are visible but
    never see-through.
    """
    n = VIEW_SIZE
    mask = np.zeros((n, n), dtype=bool)
    mask[n - 1, n // 2] = True
    for row in range(n - 1, -1, -1):
        for col in range(0, n - 1):
            if not mask[row, col] or _blocks_sight(local, row, col):
                continue
            mask[row, col + 1] = True
            if row > 0:
                mask[row - 1, col + 1] = True
                mask[row - 1, col] = True
        for col in range(n - 1, 0, -1):
            if not mask[row, col] or _blocks_sight(local, row, col):
                continue
            mask[row, col - 1] = True
            if row > 0:
                mask[row - 1, col - 1] = True
                mask[row - 1, col] = True
    return mask


def observe(state: GridState) -> np.ndarray:
    """Agent-relative 7x7x3 symbolic view.

    The window extends VIEW_SIZE-1 cells ahead of the agent and floor(VIEW_SIZE/2)
    to each side, rotated so the agent sits on the bottom-center cell facing
    "up". Cells outside the grid or hidden behind walls encode TYPE_UNSEEN.
    The agent's own cell shows the carried object, or empty when not carrying.
    """
    n = VIEW_SIZE
    half = n // 2
    fx, fy = DIR_VECTORS[state.agent.dir]
    rx, ry = DIR_VECTORS[(state.agent.dir + 1) % 4]
    ax, ay = state.agent.x, state.agent.y

    local = np.zeros((n, n, 3), dtype=np.uint8)
    inside = np.zeros((n, n), dtype=bool)
    for row in range(n):
        fwd = n - 1 - row
        for col in range(n):
            side = col - half
            x = ax + fwd * fx + side * rx
            y = ay + fwd * fy + side * ry
            if state.in_bounds(x, y):
                local[row, col] = state.cells[y, x]
                inside[row, col] = True
            else:
                # opaque for the flood; encoded as unseen below
                local[row, col] = (TYPE_WALL, GREY, 0)

    mask = _visibility_mask(local) & inside
    out = np.zeros((n, n, 3), dtype=np.uint8)
    out[mask] = local[mask]
    agent_cell = (n - 1, half)
    if state.carrying is not None:
        out[agent_cell] = (state.carrying.type_id, state.carrying.color_id, 0)
    else:
        out[agent_cell] = (TYPE_EMPTY, 0, 0)
    return out
