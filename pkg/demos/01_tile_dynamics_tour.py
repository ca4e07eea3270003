"""Tour of the six dynamic tile properties, one scripted episode each.

Run: python3 demos/01_tile_dynamics_tour.py
"""

from dynagrid import TileProperty, start_episode, step
from dynagrid.grid import DIR_EAST, FORWARD, LEFT
from dynagrid.render import ascii_grid, legend
from dynagrid.scenarios import property_room


def show(title, inst, actions):
    print(f"=== {title} ===")
    print(legend(inst.dynamics))
    _, ep = start_episode(inst)
    print(ascii_grid(ep.grid, inst.dynamics))
    for a in actions:
        if ep.terminated:
            break
        res = step(ep, a)
        print(
            f"  action={a} -> pos=({ep.grid.agent.x},{ep.grid.agent.y}) "
            f"time={ep.time:g} outcome={ep.outcome.value}"
        )
    print(ascii_grid(ep.grid, inst.dynamics))
    print()


# trap: stepping on it ends the episode with zero reward
show(
    "trap: entering ends the episode",
    property_room(TileProperty.TRAP, [(3, 1)], agent=(1, 1, DIR_EAST)),
    [FORWARD, FORWARD],
)

# slippery: actions taken while standing on the tile cost half a time unit
show(
    "slippery: half-cost steps",
    property_room(TileProperty.SLIPPERY, [(2, 1), (3, 1)], agent=(1, 1, DIR_EAST)),
    [FORWARD, FORWARD, FORWARD],
)

# flipLeftRight: left and right swap while on the tile
show(
    "flipLeftRight: watch the heading after 'left'",
    property_room(TileProperty.FLIP_LEFT_RIGHT, [(1, 1)], agent=(1, 1, DIR_EAST)),
    [LEFT],
)

# flipUpDown: forward walks backward
show(
    "flipUpDown: forward moves the agent backward",
    property_room(TileProperty.FLIP_UP_DOWN, [(3, 1)], agent=(3, 1, DIR_EAST)),
    [FORWARD],
)

# sticky: three actions needed to get off
show(
    "sticky: released on the third action",
    property_room(TileProperty.STICKY, [(2, 1)], agent=(1, 1, DIR_EAST)),
    [FORWARD, FORWARD, FORWARD, FORWARD],
)

# magic: idling two consecutive timesteps pushes the agent south
show(
    "magic: two idle turns push the agent one cell south",
    property_room(TileProperty.MAGIC, [(3, 1)], agent=(3, 1, DIR_EAST)),
    [LEFT, LEFT],
)
