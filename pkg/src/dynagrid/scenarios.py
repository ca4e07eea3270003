"""Hand-built instances: golden single-property rooms and the grounding witness.

The witness family keeps geometry fixed and swaps the color-to-property
mapping: a short corridor crossing tiles of both colors, a middle detour
crossing only the second color, and a long detour crossing only the first.
Whichever color is the trap, the dynamics-blind shortest path dies on the
short corridor, while the informed plan picks the one surviving detour, which
changes with the mapping. Descriptions therefore carry decision-relevant
information.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .dynamics import DynamicsMap, TileProperty
from .grid import (
    BLUE,
    DIR_EAST,
    GREEN,
    RED,
    TYPE_BALL,
    TYPE_WALL,
    AgentPose,
    GridState,
    ObjDesc,
)
from .levels import GO_TO_RED_BALL, EnvInstance, LevelSpec, Mission

RED_BALL = ObjDesc(TYPE_BALL, RED)


def _scenario_level(name: str, size: int, props: Sequence[TileProperty], colors) -> LevelSpec:
    return LevelSpec(
        name=name,
        grid_size=size,
        n_tile_types=len(colors),
        allowed_properties=tuple(props),
        colors=tuple(colors),
        held_out=frozenset(),
        distractors=False,
        tile_density=0.0,
        partial_text=False,
        mission_family=GO_TO_RED_BALL,
        max_steps=4 * size * size,
    )


def property_room(
    prop: TileProperty,
    tiles: Sequence[tuple[int, int]],
    agent: tuple[int, int, int] = (1, 1, DIR_EAST),
    ball: tuple[int, int] = (6, 6),
    size: int = 8,
    color: int = GREEN,
) -> EnvInstance:
    """An open room with one property bound to one color; agent may start on a tile."""
    grid = GridState.empty_room(size, size, AgentPose(*agent))
    grid.set_object(ball[0], ball[1], RED_BALL)
    tile_colors = {}
    for x, y in tiles:
        grid.set_floor(x, y, color)
        tile_colors[(x, y)] = color
    dynamics = DynamicsMap(mapping={color: prop}, tile_colors=tile_colors)
    level = _scenario_level(f"scenario-{prop.value}", size, [prop], [color])
    return EnvInstance(
        grid=grid,
        dynamics=dynamics,
        mission=Mission(family=GO_TO_RED_BALL, target=RED_BALL),
        level=level,
        seed=0,
        mode="test",
    )


WITNESS_WIDTH = 9
WITNESS_HEIGHT = 7
_WITNESS_LEVEL = LevelSpec(
    name="witness",
    grid_size=WITNESS_WIDTH,
    n_tile_types=2,
    allowed_properties=(TileProperty.TRAP, TileProperty.SLIPPERY),
    colors=(GREEN, BLUE),
    held_out=frozenset(),
    distractors=False,
    tile_density=0.0,
    partial_text=False,
    mission_family=GO_TO_RED_BALL,
    max_steps=256,
)

# tile x-positions per corridor, enumerated deterministically per variant
_WITNESS_XS = [
    (xa, xb, xc, xd)
    for xa in range(2, 7)
    for xb in range(xa + 1, 7)
    for xc in range(2, 7)
    for xd in range(2, 7)
]


def n_witness_variants() -> int:
    return len(_WITNESS_XS)


def grounding_witness(variant: int, swap: bool) -> EnvInstance:
    """Fixed-geometry witness instance; ``swap`` exchanges the two properties.

    Layout (9 wide, 7 tall; # wall, letters colored tiles, @ agent, * ball):

        #########
        #@.AB..*#   short corridor: one tile of each color
        #.#####.#
        #..B....#   middle detour: second color only
        #.#####.#
        #..A....#   long detour: first color only
        #########
    """
    xa, xb, xc, xd = _WITNESS_XS[variant % len(_WITNESS_XS)]
    grid = GridState.empty_room(WITNESS_WIDTH, WITNESS_HEIGHT, AgentPose(1, 1, DIR_EAST))
    for x in range(2, WITNESS_WIDTH - 2):
        grid.set_cell(x, 2, TYPE_WALL, color_id=5)
        grid.set_cell(x, 4, TYPE_WALL, color_id=5)
    grid.set_object(WITNESS_WIDTH - 2, 1, RED_BALL)

    tile_colors = {
        (xa, 1): GREEN,
        (xb, 1): BLUE,
        (xc, 3): BLUE,
        (xd, 5): GREEN,
    }
    for (x, y), c in tile_colors.items():
        grid.set_floor(x, y, c)
    if swap:
        mapping = {GREEN: TileProperty.SLIPPERY, BLUE: TileProperty.TRAP}
    else:
        mapping = {GREEN: TileProperty.TRAP, BLUE: TileProperty.SLIPPERY}
    dynamics = DynamicsMap(mapping=mapping, tile_colors=tile_colors)
    return EnvInstance(
        grid=grid,
        dynamics=dynamics,
        mission=Mission(family=GO_TO_RED_BALL, target=RED_BALL),
        level=_WITNESS_LEVEL,
        seed=variant,
        mode="test",
    )


def straight_corridor(length: int = 2) -> EnvInstance:
    """A single-file corridor: exactly ``length`` forward moves leave the ball in front."""
    size = length + 4
    grid = GridState.empty_room(size, 3, AgentPose(1, 1, DIR_EAST))
    grid.set_object(2 + length, 1, RED_BALL)
    level = _scenario_level("scenario-corridor", size, [TileProperty.TRAP], [GREEN])
    return EnvInstance(
        grid=grid,
        dynamics=DynamicsMap(mapping={GREEN: TileProperty.TRAP}, tile_colors={}),
        mission=Mission(family=GO_TO_RED_BALL, target=RED_BALL),
        level=level,
        seed=0,
        mode="test",
    )
