"""Dynamics-aware planning: exactness, tie-breaking, and the blind baseline."""

import pytest

from conftest import brute_force_min_halves, execute_plan, terminal_reward
from dynagrid.dynamics import DynamicsMap, Outcome, TileProperty
from dynagrid.grid import BLUE, DIR_EAST, FORWARD, GREEN, AgentPose, GridState, TYPE_WALL
from dynagrid.levels import GO_TO_RED_BALL, LevelSpec, sample_instance
from dynagrid.planner import Unsolvable, plan_greedy_ignorant, plan_optimal
from dynagrid.scenarios import RED_BALL, grounding_witness, property_room, straight_corridor


def small_level(name, props, n_types=2, density=0.25, size=6):
    return LevelSpec(
        name=name,
        grid_size=size,
        n_tile_types=n_types,
        allowed_properties=tuple(props),
        colors=(GREEN, BLUE)[:n_types],
        held_out=frozenset(),
        distractors=False,
        tile_density=density,
        partial_text=False,
        mission_family=GO_TO_RED_BALL,
        max_steps=4 * size * size,
    )


BRUTE_LEVELS = [
    small_level("brute-trap-slippery", (TileProperty.TRAP, TileProperty.SLIPPERY)),
    small_level("brute-sticky-flip", (TileProperty.STICKY, TileProperty.FLIP_UP_DOWN)),
]


class TestPlanOptimal:
    def test_straight_corridor(self):
        plan, total = plan_optimal(straight_corridor(length=2))
        assert plan == [FORWARD, FORWARD]
        assert total == 2.0

    def test_prefers_slippery_route_of_equal_length(self):
        # two symmetric routes around a wall; only one is paved slippery
        grid = GridState.empty_room(7, 7, AgentPose(1, 3, DIR_EAST))
        for x in (2, 3, 4):
            grid.set_cell(x, 3, TYPE_WALL, color_id=5)
        grid.set_object(5, 3, RED_BALL)
        tiles = {(2, 2): GREEN, (3, 2): GREEN, (4, 2): GREEN}
        for (x, y), c in tiles.items():
            grid.set_floor(x, y, c)
        inst = property_room(TileProperty.SLIPPERY, [])
        inst.grid = grid
        inst.dynamics = DynamicsMap(
            mapping={GREEN: TileProperty.SLIPPERY}, tile_colors=tiles
        )
        plan, total = plan_optimal(inst)
        visited = set()
        ep = execute_plan(inst, plan, idle_to_timeout=False)
        assert ep.outcome is Outcome.SUCCESS
        # cost matches the exhaustive minimum; the slippery top route wins
        cheapest = brute_force_min_halves(inst, cap_halves=int(total * 2) + 1)
        assert cheapest == int(total * 2)
        assert total < 7.0  # the all-normal route would cost 7 actions

    def test_trap_only_route_is_unsolvable(self):
        # single-file corridor fully blocked by a trap tile
        inst = straight_corridor(length=3)
        inst.grid.set_floor(3, 1, GREEN)
        inst.dynamics = DynamicsMap(
            mapping={GREEN: TileProperty.TRAP}, tile_colors={(3, 1): GREEN}
        )
        with pytest.raises(Unsolvable):
            plan_optimal(inst)

    def test_deterministic_and_lexicographic(self):
        for seed in range(10):
            inst = sample_instance(BRUTE_LEVELS[0], "test", seed)
            a, ta = plan_optimal(inst)
            b, tb = plan_optimal(inst)
            assert a == b and ta == tb

    @pytest.mark.parametrize("level", BRUTE_LEVELS, ids=lambda s: s.name)
    def test_exact_against_brute_force(self, level):
        for seed in range(12):
            inst = sample_instance(level, "test", seed)
            plan, total = plan_optimal(inst)
            halves = int(total * 2)
            ep = execute_plan(inst, plan, idle_to_timeout=False)
            assert ep.outcome is Outcome.SUCCESS
            assert ep.time == pytest.approx(total)
            # nothing cheaper exists, and something at exactly this cost does
            assert brute_force_min_halves(inst, cap_halves=halves + 1) == halves

    def test_putnext_plans_succeed(self):
        from dynagrid.levels import get_level

        for seed in range(8):
            inst = sample_instance(get_level("PutNextLocal"), "test", seed)
            plan, total = plan_optimal(inst)
            assert 3 in plan and 4 in plan  # pickup and drop both used
            ep = execute_plan(inst, plan, idle_to_timeout=False)
            assert ep.outcome is Outcome.SUCCESS


class TestGreedyIgnorant:
    def test_matches_optimal_on_all_normal_map(self):
        inst = straight_corridor(length=4)
        assert plan_greedy_ignorant(inst) == plan_optimal(inst)[0]

    def test_walks_into_traps_by_construction(self):
        inst = grounding_witness(0, swap=False)
        ep = execute_plan(inst, plan_greedy_ignorant(inst), idle_to_timeout=True)
        assert ep.outcome is Outcome.TRAP
        assert terminal_reward(ep) == 0.0

    def test_never_beats_optimal(self):
        for seed in range(30):
            inst = sample_instance(BRUTE_LEVELS[0], "test", seed)
            opt = execute_plan(inst, plan_optimal(inst)[0], idle_to_timeout=True)
            greedy = execute_plan(inst, plan_greedy_ignorant(inst), idle_to_timeout=True)
            assert terminal_reward(opt) >= terminal_reward(greedy)
