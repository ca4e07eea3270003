"""Level registry, procedural instance generation, and the train/test partition.

A level fixes the grid size, the color set C, the allowed property set P, and
the held-out pairs H excluded during training. Each episode draws a fresh
many-to-one color-to-property mapping (restricted to C x P \\ H in train mode,
unrestricted in test mode), scatters colored tiles, places mission objects,
and re-samples until a dynamics-aware plan can complete the mission without
entering a trap.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Optional

from .dynamics import DYNAMIC_PROPERTIES, DynamicsMap, PROPERTY_BY_NAME, TileProperty
from .grid import (
    BLUE,
    COLOR_IDS,
    COLOR_NAMES,
    GREEN,
    GREY,
    ORANGE,
    RED,
    TYPE_BALL,
    TYPE_BOX,
    TYPE_EMPTY,
    TYPE_KEY,
    AgentPose,
    GridState,
    ObjDesc,
)

GO_TO_RED_BALL = "GoToRedBall"
GO_TO_OBJ = "GoToObj"
PUT_NEXT_LOCAL = "PutNextLocal"
MISSION_FAMILIES = (GO_TO_RED_BALL, GO_TO_OBJ, PUT_NEXT_LOCAL)

# object palette: the standard six; orange is reserved for floor tiles here
OBJECT_COLORS = (RED, GREEN, BLUE, COLOR_IDS["purple"], COLOR_IDS["yellow"], GREY)
OBJECT_TYPES_FOR_MISSIONS = (TYPE_KEY, TYPE_BALL, TYPE_BOX)

MAX_SAMPLE_ATTEMPTS = 100
N_DISTRACTORS = 2


class InvalidLevel(ValueError):
    """The level definition itself is unusable (e.g. H starves a color)."""


class UnsatisfiableLevel(RuntimeError):
    """Bounded resampling failed to produce a solvable instance."""


class UnknownLevel(LookupError):
    pass


@dataclass(frozen=True)
class Mission:
    family: str
    target: Optional[ObjDesc] = None  # GoTo families
    move: Optional[ObjDesc] = None  # PutNext: object to relocate
    anchor: Optional[ObjDesc] = None  # PutNext: object to sit next to

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "target": list(self.target) if self.target else None,
            "move": list(self.move) if self.move else None,
            "anchor": list(self.anchor) if self.anchor else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Mission":
        unpack = lambda v: ObjDesc(*v) if v else None
        return cls(
            family=d["family"],
            target=unpack(d.get("target")),
            move=unpack(d.get("move")),
            anchor=unpack(d.get("anchor")),
        )


@dataclass(frozen=True)
class LevelSpec:
    """Static level definition; instances of a level differ per (mode, seed)."""

    name: str
    grid_size: int
    n_tile_types: int
    allowed_properties: tuple[TileProperty, ...]
    colors: tuple[int, ...]
    held_out: frozenset[tuple[int, TileProperty]]
    distractors: bool
    tile_density: float
    partial_text: bool
    mission_family: str
    max_steps: int
    # GoTo families only: resample until the agent spawns at least this far
    # (Manhattan) from the target
    min_start_distance: int = 0

    def __post_init__(self):
        if self.mission_family not in MISSION_FAMILIES:
            raise InvalidLevel(f"unknown mission family {self.mission_family!r}")
        if self.n_tile_types > len(self.colors):
            raise InvalidLevel("more simultaneous tile types than colors")
        for c in self.colors:
            if not self.train_options(c):
                raise InvalidLevel(
                    f"held-out set leaves color {COLOR_NAMES[c]!r} with no training property"
                )

    def train_options(self, color: int) -> list[TileProperty]:
        return [p for p in self.allowed_properties if (color, p) not in self.held_out]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "grid_size": self.grid_size,
            "n_tile_types": self.n_tile_types,
            "allowed_properties": [p.value for p in self.allowed_properties],
            "colors": [COLOR_NAMES[c] for c in self.colors],
            "held_out": sorted([COLOR_NAMES[c], p.value] for c, p in self.held_out),
            "distractors": self.distractors,
            "tile_density": self.tile_density,
            "partial_text": self.partial_text,
            "mission_family": self.mission_family,
            "max_steps": self.max_steps,
            "min_start_distance": self.min_start_distance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LevelSpec":
        return cls(
            name=d["name"],
            grid_size=d["grid_size"],
            n_tile_types=d["n_tile_types"],
            allowed_properties=tuple(PROPERTY_BY_NAME[p] for p in d["allowed_properties"]),
            colors=tuple(COLOR_IDS[c] for c in d["colors"]),
            held_out=frozenset((COLOR_IDS[c], PROPERTY_BY_NAME[p]) for c, p in d["held_out"]),
            distractors=d["distractors"],
            tile_density=d["tile_density"],
            partial_text=d["partial_text"],
            mission_family=d["mission_family"],
            max_steps=d["max_steps"],
            min_start_distance=d.get("min_start_distance", 0),
        )


@dataclass
class EnvInstance:
    """One generated episode start: initial grid, dynamics, and mission."""

    grid: GridState
    dynamics: DynamicsMap
    mission: Mission
    level: LevelSpec
    seed: int
    mode: str

    def to_dict(self) -> dict:
        return {
            "level": self.level.to_dict(),
            "mode": self.mode,
            "seed": self.seed,
            "grid": self.grid.to_dict(),
            "dynamics": self.dynamics.to_dict(),
            "mission": self.mission.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnvInstance":
        return cls(
            grid=GridState.from_dict(d["grid"]),
            dynamics=DynamicsMap.from_dict(d["dynamics"]),
            mission=Mission.from_dict(d["mission"]),
            level=LevelSpec.from_dict(d["level"]),
            seed=d["seed"],
            mode=d["mode"],
        )


def _level_table() -> list[LevelSpec]:
    ho = lambda pairs: frozenset((c, PROPERTY_BY_NAME[p]) for c, p in pairs)
    six = DYNAMIC_PROPERTIES
    v2_held = ho(
        [
            (GREEN, "trap"),
            (GREEN, "flipUpDown"),
            (BLUE, "sticky"),
            (BLUE, "magic"),
            (ORANGE, "slippery"),
            (ORANGE, "flipLeftRight"),
        ]
    )
    return [
        LevelSpec(
            name="GoToRedBall-v1",
            grid_size=8,
            n_tile_types=2,
            allowed_properties=(TileProperty.TRAP, TileProperty.SLIPPERY, TileProperty.STICKY),
            colors=(GREEN, BLUE),
            held_out=ho([(GREEN, "trap"), (BLUE, "slippery")]),
            distractors=False,
            tile_density=0.3,
            partial_text=False,
            mission_family=GO_TO_RED_BALL,
            max_steps=256,
        ),
        LevelSpec(
            name="GoToRedBall-v2",
            grid_size=8,
            n_tile_types=3,
            allowed_properties=six,
            colors=(GREEN, BLUE, ORANGE),
            held_out=v2_held,
            distractors=False,
            tile_density=0.3,
            partial_text=False,
            mission_family=GO_TO_RED_BALL,
            max_steps=256,
        ),
        LevelSpec(
            name="PutNextLocal",
            grid_size=8,
            n_tile_types=2,
            allowed_properties=(
                TileProperty.TRAP,
                TileProperty.SLIPPERY,
                TileProperty.FLIP_LEFT_RIGHT,
            ),
            colors=(GREEN, BLUE),
            held_out=ho([(GREEN, "trap"), (BLUE, "slippery")]),
            distractors=True,
            tile_density=0.3,
            partial_text=False,
            mission_family=PUT_NEXT_LOCAL,
            max_steps=512,
        ),
        LevelSpec(
            name="GoToObj",
            grid_size=8,
            n_tile_types=3,
            allowed_properties=six,
            colors=(GREEN, BLUE, ORANGE),
            held_out=v2_held,
            distractors=True,
            tile_density=0.3,
            partial_text=False,
            mission_family=GO_TO_OBJ,
            max_steps=256,
        ),
        LevelSpec(
            name="GoToObj-Partial",
            grid_size=8,
            n_tile_types=3,
            allowed_properties=(
                TileProperty.SLIPPERY,
                TileProperty.FLIP_LEFT_RIGHT,
                TileProperty.FLIP_UP_DOWN,
                TileProperty.STICKY,
                TileProperty.MAGIC,
            ),
            colors=(GREEN, BLUE, ORANGE),
            held_out=ho([(GREEN, "sticky"), (BLUE, "slippery"), (ORANGE, "flipUpDown")]),
            distractors=True,
            tile_density=0.3,
            partial_text=True,
            mission_family=GO_TO_OBJ,
            max_steps=256,
        ),
    ]


# small single-property level (6x6 playable area inside the wall ring) for
# desk-scale training runs; resolvable by name but intentionally not part of
# the benchmark registry
_AUX_LEVELS = [
    LevelSpec(
        name="GoToRedBall-Mini",
        grid_size=8,
        n_tile_types=1,
        allowed_properties=(TileProperty.TRAP,),
        colors=(GREEN,),
        held_out=frozenset(),
        distractors=False,
        tile_density=0.3,
        partial_text=False,
        mission_family=GO_TO_RED_BALL,
        max_steps=64,
        min_start_distance=4,
    ),
]

_BUILTIN = {spec.name: spec for spec in _level_table()}
_REGISTRY = dict(_BUILTIN)
_REGISTRY.update({spec.name: spec for spec in _AUX_LEVELS})


def builtin_levels() -> list[LevelSpec]:
    """The benchmark levels, in canonical order."""
    return list(_BUILTIN.values())


def get_level(name: str) -> LevelSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownLevel(f"unknown level {name!r}") from None


def levels_to_json_dicts(levels: list[LevelSpec]) -> list[dict]:
    return [spec.to_dict() for spec in levels]


def derive_seed(*parts) -> int:
    """Stable 64-bit sub-seed from mixed string/int parts."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _neighbors4(x: int, y: int):
    yield x + 1, y
    yield x - 1, y
    yield x, y + 1
    yield x, y - 1


def reachable_cells(
    state: GridState, dynamics: DynamicsMap, start: tuple[int, int]
) -> set[tuple[int, int]]:
    """Cells reachable by trap-free walking; objects and walls block.

    Flips, sticky, and magic never make a cell unreachable (they can always be
    out-waited or counter-steered), so trap-avoiding cell reachability is
    exactly mission reachability.
    """
    if not state.is_walkable(*start):
        return set()
    seen = {start}
    frontier = [start]
    while frontier:
        x, y = frontier.pop()
        for nx, ny in _neighbors4(x, y):
            if (nx, ny) in seen or not state.is_walkable(nx, ny):
                continue
            if dynamics.property_at(nx, ny) is TileProperty.TRAP:
                continue
            seen.add((nx, ny))
            frontier.append((nx, ny))
    return seen


def mission_satisfied(instance: EnvInstance, state: GridState) -> bool:
    """Goal predicate evaluated on the current world state."""
    m = instance.mission
    if m.family in (GO_TO_RED_BALL, GO_TO_OBJ):
        fx, fy = state.agent.front()
        if not state.in_bounds(fx, fy):
            return False
        return state.object_at(fx, fy) == m.target
    if m.family == PUT_NEXT_LOCAL:
        pos_a = state.find_object(m.move)
        pos_b = state.find_object(m.anchor)
        if pos_a is None or pos_b is None:
            return False
        return abs(pos_a[0] - pos_b[0]) + abs(pos_a[1] - pos_b[1]) == 1
    raise InvalidLevel(f"unknown mission family {m.family!r}")


def _instance_solvable(instance: EnvInstance) -> bool:
    """Trap-free reachability check for the mission; see reachable_cells."""
    state, dyn, m = instance.grid, instance.dynamics, instance.mission
    start = (state.agent.x, state.agent.y)
    if dyn.property_at(*start) is TileProperty.TRAP:
        return False
    reach = reachable_cells(state, dyn, start)
    if m.family in (GO_TO_RED_BALL, GO_TO_OBJ):
        tpos = state.find_object(m.target)
        return tpos is not None and any(n in reach for n in _neighbors4(*tpos))
    # PutNext: reach the moved object, then (with it in hand) reach a cell from
    # which it can be dropped onto a plain empty cell adjacent to the anchor
    pos_a = state.find_object(m.move)
    pos_b = state.find_object(m.anchor)
    if pos_a is None or pos_b is None:
        return False
    if not any(n in reach for n in _neighbors4(*pos_a)):
        return False
    lifted = state.copy()
    lifted.set_cell(pos_a[0], pos_a[1], TYPE_EMPTY)
    reach2 = reachable_cells(lifted, dyn, start)
    for nx, ny in _neighbors4(*pos_b):
        if not lifted.in_bounds(nx, ny) or lifted.cell(nx, ny)[0] != TYPE_EMPTY:
            continue
        if any(m2 in reach2 for m2 in _neighbors4(nx, ny)):
            return True
    return False


def _place_on_free_cell(rng: random.Random, free: list[tuple[int, int]]) -> tuple[int, int]:
    cell = free[rng.randrange(len(free))]
    free.remove(cell)
    return cell


def _sample_mission(rng: random.Random, level: LevelSpec) -> tuple[Mission, list[ObjDesc]]:
    """Draw the mission and the full object list (mission objects first)."""
    if level.mission_family == GO_TO_RED_BALL:
        target = ObjDesc(TYPE_BALL, RED)
        objs = [target]
        mission = Mission(family=GO_TO_RED_BALL, target=target)
    elif level.mission_family == GO_TO_OBJ:
        target = ObjDesc(
            rng.choice(OBJECT_TYPES_FOR_MISSIONS), rng.choice(OBJECT_COLORS)
        )
        objs = [target]
        mission = Mission(family=GO_TO_OBJ, target=target)
    else:
        move = ObjDesc(rng.choice(OBJECT_TYPES_FOR_MISSIONS), rng.choice(OBJECT_COLORS))
        while True:
            anchor = ObjDesc(
                rng.choice(OBJECT_TYPES_FOR_MISSIONS), rng.choice(OBJECT_COLORS)
            )
            if anchor != move:
                break
        objs = [move, anchor]
        mission = Mission(family=PUT_NEXT_LOCAL, move=move, anchor=anchor)

    if level.distractors:
        reserved = set(objs)
        while len(objs) < len(reserved) + N_DISTRACTORS:
            d = ObjDesc(rng.choice(OBJECT_TYPES_FOR_MISSIONS), rng.choice(OBJECT_COLORS))
            if d not in reserved:
                objs.append(d)
    return mission, objs


def _build_attempt(level: LevelSpec, mode: str, rng: random.Random) -> Optional[EnvInstance]:
    size = level.grid_size
    placed_colors = sorted(rng.sample(list(level.colors), level.n_tile_types))
    mapping: dict[int, TileProperty] = {}
    for c in placed_colors:
        options = level.train_options(c) if mode == "train" else list(level.allowed_properties)
        mapping[c] = options[rng.randrange(len(options))]

    mission, objs = _sample_mission(rng, level)

    grid = GridState.empty_room(size, size, AgentPose(1, 1, 0))
    free = [(x, y) for y in range(1, size - 1) for x in range(1, size - 1)]

    positions: dict[int, tuple[int, int]] = {}
    for i, obj in enumerate(objs):
        if not free:
            return None
        pos = _place_on_free_cell(rng, free)
        positions[i] = pos
        grid.set_object(pos[0], pos[1], obj)

    if level.mission_family == PUT_NEXT_LOCAL:
        # the moved object must not already sit next to the anchor
        (ax, ay), (bx, by) = positions[0], positions[1]
        if abs(ax - bx) + abs(ay - by) == 1:
            return None

    if not free:
        return None
    agent_cell = _place_on_free_cell(rng, free)
    agent_dir = rng.randrange(4)
    grid.agent = AgentPose(agent_cell[0], agent_cell[1], agent_dir)

    if level.min_start_distance and level.mission_family in (GO_TO_RED_BALL, GO_TO_OBJ):
        tx, ty = positions[0]
        if abs(agent_cell[0] - tx) + abs(agent_cell[1] - ty) < level.min_start_distance:
            return None

    n_tiles = max(len(placed_colors), int(round(level.tile_density * len(free))))
    n_tiles = min(n_tiles, len(free))
    if n_tiles < len(placed_colors):
        return None
    tile_cells = rng.sample(free, n_tiles)
    tile_colors: dict[tuple[int, int], int] = {}
    for i, cell in enumerate(tile_cells):
        color = placed_colors[i] if i < len(placed_colors) else rng.choice(placed_colors)
        tile_colors[cell] = color
        grid.set_floor(cell[0], cell[1], color)

    dynamics = DynamicsMap(
        mapping=mapping, tile_colors=tile_colors, held_out=level.held_out
    )
    instance = EnvInstance(
        grid=grid, dynamics=dynamics, mission=mission, level=level, seed=0, mode=mode
    )
    if mission_satisfied(instance, grid):
        return None
    if not _instance_solvable(instance):
        return None
    return instance


def sample_instance(level: LevelSpec, mode: str, seed: int) -> EnvInstance:
    """Deterministically generate a solvable episode start for (level, mode, seed)."""
    if mode not in ("train", "test"):
        raise ValueError(f"mode must be 'train' or 'test', got {mode!r}")
    for c in level.colors:
        if mode == "train" and not level.train_options(c):
            raise InvalidLevel(f"held-out set starves color {COLOR_NAMES[c]!r}")
    rng = random.Random(derive_seed(level.name, mode, seed))
    for _ in range(MAX_SAMPLE_ATTEMPTS):
        instance = _build_attempt(level, mode, rng)
        if instance is not None:
            instance.seed = seed
            return instance
    raise UnsatisfiableLevel(
        f"no solvable instance for {level.name} ({mode}, seed={seed}) "
        f"after {MAX_SAMPLE_ATTEMPTS} attempts"
    )
