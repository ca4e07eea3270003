"""Driving episodes over the wire, exactly as an out-of-process agent would.

Spawns the stdio service as a subprocess and exchanges newline-delimited JSON
with it; no in-process imports of the engine are used for stepping.

Run: python3 demos/05_remote_stepping.py
"""

import json
import subprocess
import sys


class WireEnv:
    def __init__(self):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "dynagrid.cli", "serve", "--transport", "stdio"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
        )

    def request(self, message):
        self.proc.stdin.write(json.dumps(message) + "\n")
        self.proc.stdin.flush()
        return json.loads(self.proc.stdout.readline())

    def close(self):
        self.request({"close": {}})
        self.proc.wait(timeout=10)


env = WireEnv()
resp = env.request({"reset": {"level": "GoToRedBall-v1", "mode": "test", "seed": 11}})
obs = resp["observation"]
print("instruction: ", obs["instruction"])
print("descriptions:", obs["descriptions"])
print("true mapping:", resp["dynamics"])
print("grid payload:", len(obs["grid"]), "integers (7x7x3, row-major)")

total_reward, steps = 0.0, 0
done = False
while not done and steps < 30:
    # a lazy agent: spin in place, then lunge forward, repeat
    action = 1 if steps % 3 == 0 else 2
    resp = env.request({"step": {"action": action}})
    done = resp["done"]
    total_reward += resp["reward"]
    steps += 1
    print(f"step {steps:>2}: action={action} reward={resp['reward']:.3f} "
          f"time={resp['info']['time']:g} outcome={resp['info']['outcome']}")

env.close()
print(f"\nepisode over after {steps} wire steps, total reward {total_reward:.3f}")
