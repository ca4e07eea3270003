"""Built-in levels, per-episode dynamics, and the train/test partition.

Run: python3 demos/02_levels_and_partitions.py
"""

import collections

from dynagrid import builtin_levels, sample_instance, start_episode
from dynagrid.grid import COLOR_NAMES
from dynagrid.render import ascii_grid, legend

print("=== the five benchmark levels ===")
for spec in builtin_levels():
    held = ", ".join(f"{COLOR_NAMES[c]}-{p.value}" for c, p in sorted(spec.held_out))
    print(f"{spec.name:<18} mission={spec.mission_family:<14} held-out: {held or 'none'}")
print()

spec = builtin_levels()[0]  # GoToRedBall-v1
print(f"=== one {spec.name} training episode ===")
inst = sample_instance(spec, "train", seed=7)
obs, ep = start_episode(inst)
print(ascii_grid(ep.grid, inst.dynamics))
print(legend(inst.dynamics))
print(f"instruction: {obs.instruction}")
for sentence in obs.descriptions:
    print(f"  {sentence}")
print()

print("=== the partition at work: 400 episodes per mode ===")
held_out_names = {(COLOR_NAMES[c], p.value) for c, p in spec.held_out}
for mode in ("train", "test"):
    counts = collections.Counter()
    for seed in range(400):
        mapping = sample_instance(spec, mode, seed).dynamics.mapping
        counts.update((COLOR_NAMES[c], p.value) for c, p in mapping.items())
    print(f"{mode}: color-property pairs observed")
    for (color, prop), n in sorted(counts.items()):
        flag = " <- held out in training" if (color, prop) in held_out_names else ""
        print(f"  {color:>6} -> {prop:<10} x{n}{flag}")
print()
print("held-out pairs appear only in test mode: the agent must ground the")
print("description words to handle those pairings, not memorize color behavior.")
