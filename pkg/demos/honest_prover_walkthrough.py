"""One narrated round of the encrypted game, then a short campaign.

The referee hides its question bits inside a lattice ciphertext; the honest
prover builds a claw state from the ciphertext, commits to a measurement of
it, and answers the second-round question by measuring the residual qubits.

Run: python demos/honest_prover_walkthrough.py
"""

import numpy as np

from poqlab import Rng, desk_params, encrypt, run_game_r
from poqlab.games import j_score
from poqlab.protocol import referee_first_assessment
from poqlab.quantum import honest_first_round, honest_second_round

params = desk_params()
print("desk parameters:", f"n={params.n} q={params.q} Q={params.Q} "
      f"m={params.m} tau={params.tau} sigma={params.sigma} d={params.d}")
bound_e, bound_f = params.event_bounds()
print(f"analytic event bounds: P(E) >= {bound_e:.4f}, P(F) >= {bound_f:.6f}")

rng = Rng(2024)

print("\n--- one round, narrated ---")
gen = rng.stream("demo-trial")
x = np.append(gen.integers(0, 2, size=params.d), 1).astype(np.uint8)
y = np.append(gen.integers(0, 2, size=params.d), 1).astype(np.uint8)
print("referee's hidden question x:", x, " second-round question y:", y)

record = encrypt(x[:params.d], params, gen)
print(f"ciphertext: A is {record.ciphertext.a.shape}, "
      f"v has {record.ciphertext.v.shape[0]} entries")

first = honest_first_round(record, params, rng.stream("demo-prover"))
print(f"prover commits w (length {len(first.w.values)}) and "
      f"{len(first.ells)} measurement bits")
print("both-preimages event:", first.event_e,
      " no-wraparound event:", first.event_f)
if not first.claw.degenerate:
    print("claw branches:", first.claw.branch0, first.claw.branch1,
          " phase:", first.claw.phase)
    print("branch XOR (should be x's data bits):",
          first.claw.branch0 ^ first.claw.branch1)

b = honest_second_round(first.claw, y, rng.stream("demo-prover2"))
a, _, _ = referee_first_assessment(first.w, first.ells, record, params,
                                   rng.stream("demo-referee"))
print("referee derives a =", a, "; prover answers b =", b)
print("score:", j_score(x, y, a, b))

print("\n--- 2000-trial campaign ---")
result = run_game_r("honest", params, 2000, rng)
print(f"mean score {result.stats.mean:.4f} "
      f"(ci95 [{result.stats.ci95_lo:.4f}, {result.stats.ci95_hi:.4f}])")
print(f"event rates: E {result.e_rate:.4f}, F {result.f_rate:.4f}")
print(f"score conditioned on both events: {result.conditional_mean:.4f} "
      f"(the claw-game value 1/sqrt(2) = {1 / np.sqrt(2):.4f})")
