"""Average overlap of W_k with the balanced functions, three ways."""
from statefilter.balanced_ensemble import Sb_bruteforce, Sb_closed, Sb_weighted, summarize

for n, k in [(3, 2), (4, 2), (4, 3)]:
    eta1 = 1 / 2 ** n
    print(f"n={n} k={k}: brute={Sb_bruteforce(n, k, eta1):.12f} "
          f"weighted={Sb_weighted(n, k, eta1):.12f} closed={Sb_closed(n, k, eta1):.12f}")

print("\nper-m audit for n=3, k=2:")
print(summarize(3, 2, 1 / 8).audit_csv())
