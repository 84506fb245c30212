"""Which measurement wins as the prior of the W_k state changes."""
import math

from statefilter.filtering import (basis_problem, choose_strategy, regime_scan, regime_switches,
                                   wk_closed_forms, zeta1, zeta2)

n, k = 3, 2
rep = choose_strategy(basis_problem(n, k, 1 / 2 ** n))
print(f"equal priors, n={n} k={k}")
print(f"  S={rep.S:.6f}  |psi1_par|^2={rep.par_norm_sq:.4f}")
print(f"  Q1={rep.Q1:.6f}  Q2={rep.Q2:.6f}  Qpovm={rep.Qpovm:.6f} (sqrt(3)/8={math.sqrt(3) / 8:.6f})")
print(f"  chosen: {rep.chosen.value} at q1={rep.q1_opt:.6f}")

print(f"\nthresholds: zeta2={zeta2(n, k):.6f}  zeta1={zeta1(n, k):.6f}")
grid, labels = regime_scan(n, k, 10_000)
for x, a, b in regime_switches(grid, labels):
    print(f"  scan switches {a.value} -> {b.value} near eta1={x:.5f}")

print("\nclosed forms across priors:")
for eta1 in (0.05, 0.1, 0.125, 0.16, 0.3):
    cf = wk_closed_forms(n, k, eta1)
    print(f"  eta1={eta1:<6} Q1={cf.Q1:.4f} Q2={cf.Q2:.4f} "
          f"Qpovm={'n/a' if cf.Qpovm is None else f'{cf.Qpovm:.4f}'}")
