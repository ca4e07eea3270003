"""ASCII rendering of world states and trajectory overlays."""

from __future__ import annotations

from typing import Iterable, Optional

from .dynamics import DynamicsMap, TileProperty
from .episode import EpisodeTrace, reset, step
from .grid import (
    COLOR_NAMES,
    GridState,
    TYPE_BALL,
    TYPE_BOX,
    TYPE_EMPTY,
    TYPE_FLOOR,
    TYPE_KEY,
    TYPE_WALL,
)

PROPERTY_GLYPHS = {
    TileProperty.TRAP: "t",
    TileProperty.SLIPPERY: "s",
    TileProperty.FLIP_LEFT_RIGHT: "f",
    TileProperty.FLIP_UP_DOWN: "u",
    TileProperty.STICKY: "k",
    TileProperty.MAGIC: "m",
    TileProperty.NORMAL: ".",
}

OBJECT_GLYPHS = {TYPE_KEY: "K", TYPE_BALL: "B", TYPE_BOX: "X"}
AGENT_GLYPHS = ">v<^"  # east, south, west, north


def _base_glyph(state: GridState, dynamics: Optional[DynamicsMap], x: int, y: int) -> str:
    t, c, _ = state.cell(x, y)
    if t == TYPE_WALL:
        return "#"
    if t in OBJECT_GLYPHS:
        return OBJECT_GLYPHS[t]
    if t == TYPE_FLOOR:
        if dynamics is not None:
            return PROPERTY_GLYPHS[dynamics.property_at(x, y)]
        return COLOR_NAMES[c][0]
    return "."


def ascii_grid(
    state: GridState,
    dynamics: Optional[DynamicsMap] = None,
    visited: Optional[Iterable[tuple[int, int]]] = None,
) -> str:
    """Render the grid; visited cells are starred (tiles keep their letter,
    uppercased, so a path over slippery tiles stays recognizable)."""
    visited = set(visited or ())
    rows = []
    for y in range(state.height):
        row = []
        for x in range(state.width):
            glyph = _base_glyph(state, dynamics, x, y)
            if (x, y) == (state.agent.x, state.agent.y):
                glyph = AGENT_GLYPHS[state.agent.dir]
            elif (x, y) in visited:
                glyph = glyph.upper() if glyph.isalpha() else "*"
            row.append(glyph)
        rows.append("".join(row))
    return "\n".join(rows)


def legend(dynamics: DynamicsMap) -> str:
    parts = [
        f"{PROPERTY_GLYPHS[prop]}={COLOR_NAMES[color]} {prop.value}"
        for color, prop in sorted(dynamics.mapping.items())
    ]
    return "tiles: " + ", ".join(parts) if parts else "tiles: none"


def render_trace(trace: EpisodeTrace) -> str:
    """Replay a trace and overlay the visited cells on the starting layout."""
    _, ep = reset(trace.level, trace.mode, trace.seed)
    start = ep.grid.copy()
    visited = [(ep.grid.agent.x, ep.grid.agent.y)]
    for action in trace.actions:
        step(ep, action, compute_observation=False)
        visited.append((ep.grid.agent.x, ep.grid.agent.y))
    lines = [
        f"level={trace.level} mode={trace.mode} seed={trace.seed}",
        f"outcome={trace.outcome} time={trace.time} steps={trace.steps}",
        legend(ep.instance.dynamics),
        "",
        ascii_grid(start, ep.instance.dynamics, visited=visited),
        "",
        "visited cells are uppercase/starred; agent shown at its start pose",
    ]
    return "\n".join(lines)
