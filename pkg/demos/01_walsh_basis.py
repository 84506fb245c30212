"""Walsh basis for the balanced subspace, and which rows see a W_k state."""
import numpy as np

from statefilter.boolean_functions import wk_state
from statefilter.walsh_basis import full_basis, indices, overlap_with_wk

n = 3
B = full_basis(n)
print("rows of the n=3 basis (scaled by sqrt(8)):")
for idx, row in zip(indices(n), B):
    print(f"  p={idx.p} j={idx.j}:", np.round(row * np.sqrt(2 ** n)).astype(int))

print("\nGram deviation from identity:", np.abs(B @ B.T - np.eye(2 ** n)).max())

# W_2 only touches levels p <= 2; every deeper row is exactly orthogonal
for k in (2, 3):
    ov = [overlap_with_wk(n, k, i) for i in indices(n)]
    print(f"\noverlaps of W_{k} with each row:", np.round(ov, 4))
    print("  reconstruction error:", np.abs(np.array(ov) @ B - wk_state(n, k)).max())
