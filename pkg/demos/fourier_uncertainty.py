"""Tour of the transform toolkit: the two support coefficients and the
uncertainty bounds they sharpen.

Run: python demos/fourier_uncertainty.py
"""

import numpy as np

from poqlab import (Group, GroupFunction, SubsetOfGroup, dft,
                    donoho_stark_check, eta_set, uncertainty_bound_check,
                    uncertainty_product, uniformity_nu)
from poqlab.fourier import linearity_eta, support_size

rng = np.random.default_rng(7)

print("=== the transform on Z_4 ===")
g = Group(4, 1)
delta = GroupFunction.from_dict(g, {(0,): 1.0})
print("delta_0 transforms to the constant:", np.round(dft(delta).values, 6))

print("\n=== support coefficients ===")
pair = SubsetOfGroup.from_elements(g, [(0,), (1,)])
print("eta({0,1}) =", eta_set(pair), " (3/4: two of the pair sums collide)")
coset = SubsetOfGroup.from_elements(g, [(1,), (3,)])
print("eta({1,3}) =", eta_set(coset), " (a coset of {0,2}: exactly 1)")
tilted = GroupFunction(g, np.array([2.0, 1.0, 0.0, 0.0]))
print("nu of weights (2,1,0,0) =", uniformity_nu(tilted),
      " (non-constant magnitudes cost uniformity)")

print("\n=== the product bound on Z_4^3 ===")
g3 = Group(4, 3)
worst = np.inf
for _ in range(2000):
    values = rng.normal(size=64) + 1j * rng.normal(size=64)
    values *= rng.random(64) < 0.2
    if not np.abs(values).any():
        continue
    f = GroupFunction(g3, values)
    assert donoho_stark_check(f)
    worst = min(worst, uncertainty_product(f))
print("smallest product |Supp f||Supp f^||G|^-1 nu eta over 2000 sparse "
      f"functions: {worst:.4f}  (never below 1)")

print("\n=== equality lives on cosets ===")
g2 = Group(4, 2)
sub = [(0, 0), (1, 2), (2, 0), (3, 2)]  # subgroup generated by (1, 2)
vals = np.zeros(16, dtype=complex)
for el in sub:
    vals[g2.encode(el)] = 0.5
f = GroupFunction(g2, vals)
lhs, rhs, _ = uncertainty_bound_check(f, dft(f))
print(f"subgroup indicator: bound lhs = {lhs:.6f}, rhs = {rhs:.6f},"
      f" support product = {support_size(f) * support_size(dft(f))} = |G|")

vals = np.zeros(16, dtype=complex)
for el in [(0, 0), (1, 1), (2, 3), (0, 2)]:   # no linear structure
    vals[g2.encode(el)] = 0.5
f = GroupFunction(g2, vals)
lhs, rhs, _ = uncertainty_bound_check(f, dft(f))
print(f"unstructured support: lhs = {lhs:.6f} < rhs = {rhs:.6f}"
      f"  (eta = {linearity_eta(f):.4f} pays for the slack)")
