"""The evaluation protocol: Succ / R_avg / N_epi with standard errors.

Compares the three scripted policies on one level, 200 episodes each,
then prints the ranked table (best starred, second-best caretted).

Run: python3 demos/04_evaluation_protocol.py
"""

from dynagrid import compare, evaluate
from dynagrid.policies import GreedyIgnorantPolicy, OptimalPolicy, RandomPolicy

LEVEL, MODE, N, BASE_SEED = "GoToRedBall-v1", "test", 200, 0

stats = []
names = []
for policy in (OptimalPolicy(), GreedyIgnorantPolicy(), RandomPolicy(0)):
    print(f"evaluating {policy.name} on {LEVEL} ({MODE}), {N} episodes ...")
    stats.append(evaluate(policy, LEVEL, MODE, N, BASE_SEED))
    names.append(policy.name)

print()
print(compare(stats, names).to_text())
print()
print("optimal is the ceiling (it reads the true dynamics); greedy shows what")
print("ignoring the descriptions costs; random is the floor.")
