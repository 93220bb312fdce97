"""From a cheating score to a ciphertext distinguisher.

A prover that beats the classical ceiling at the encrypted game can be
rewound through its second responses to estimate its own best reachable
score; that estimate behaves differently on real ciphertexts than on
uniform noise.  The key-leak prover makes the effect visible end to end.

Run: python demos/distinguishing_attack.py
"""

import numpy as np

from poqlab import (BlindProver, Rng, TrapdoorLeakProver, attack_plan,
                    best_score, decode_error, desk_params,
                    experiment_e_campaign)

print("=== the decoder behind the rewinding ===")
x = np.array([1, 0, 1, 1], dtype=np.int64)
pairs = [(np.array([1, 1, 0, 1]), np.array([0, 1, 0, 0])),
         (np.array([0, 0, 1, 1]), np.array([1, 0, 0, 1])),
         (np.array([1, 0, 1, 1]), np.array([0, 0, 1, 0]))]
rows = np.array([x & y for y, _ in pairs])
targets = np.array([0 if int((x * (y + 2 * b)).sum()) % 4 in (0, 1) else 1
                    for y, b in pairs])
print("decode instance rows (x AND y):")
print(rows)
print("targets:", targets, " minimum flips:", decode_error(rows, targets))
print("best reachable average score:", best_score(x, pairs))

print("\n=== the two arms, measured ===")
params = desk_params(d=6)
leak = experiment_e_campaign(TrapdoorLeakProver(params), params, 600,
                             Rng(99), alpha=64)
print(f"key-leak prover:  E[r|real] = {leak.mean_r_real:+.3f}, "
      f"E[r|uniform] = {leak.mean_r_uniform:+.3f}, "
      f"advantage = {leak.advantage:.3f} +- {leak.stderr:.3f}")
blind = experiment_e_campaign(BlindProver(params), params, 600,
                              Rng(100), alpha=64)
print(f"blind prover:     E[r|real] = {blind.mean_r_real:+.3f}, "
      f"E[r|uniform] = {blind.mean_r_uniform:+.3f}, "
      f"advantage = {blind.advantage:.3f} +- {blind.stderr:.3f}")

print("\n=== the budget at cryptographic scale ===")
plan = attack_plan(d=40, epsilon=0.05, alpha=400_000)
print(f"classical score ceiling 2*(3/4)^10 = {plan.classical_ceiling:.6f}"
      f" < {plan.ceiling_4dp}")
print(f"sampling slack: natural-log {plan.slack_natural:.5f}, "
      f"base-2 {plan.slack_base2:.5f}")
print(f"recomputed threshold {plan.threshold:.4f}; published figure "
      f"{plan.published['threshold']} (addition slip in the published example)")
print(f"question weight cap {plan.weight_cap} "
      f"(tail probability {plan.weight_tail:.5f})")
print(f"decode work estimate: 2^{plan.decode_work_log2:.1f} bit operations")
