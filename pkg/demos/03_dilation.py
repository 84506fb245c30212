"""Build the system-plus-ancilla unitary that realises the optimal POVM."""
import numpy as np

from statefilter.filtering import basis_problem, choose_strategy
from statefilter.povm_synthesis import (reduced_gram, synthesize_dilation, validate_dilation,
                                        worked_example_problem)
from statefilter.vectors import NotPSDError
from statefilter.walsh_basis import balanced_basis

problem = worked_example_problem()
for q1 in (0.75, 0.8, 1.0):
    d = synthesize_dilation(problem, q1)
    v = validate_dilation(d, problem)
    print(f"q1={q1}: passed={v.passed}  worst identity error={max(v.deviations.values()):.1e}")
    print("  reduced Gram eigenvalues:", np.round(np.linalg.eigvalsh(reduced_gram(problem, q1)), 4))

try:
    synthesize_dilation(problem, 0.5)
except NotPSDError as e:
    print(f"\nq1=0.5 is infeasible: smallest eigenvalue {e.min_eigenvalue:.3f}")

# a general balanced input fails with probability |<w|psi>|^2 / q1
p = basis_problem(3, 2, 1 / 8)
q1 = choose_strategy(p).q1_opt
d = synthesize_dilation(p, q1)
psi = np.random.default_rng(3).normal(size=7) @ balanced_basis(3)
psi /= np.linalg.norm(psi)
print(f"\nrandom balanced input: ancilla weight {d.apply(psi)[-1] ** 2:.6f} "
      f"vs law {np.dot(p.psi1, psi) ** 2 / q1:.6f}")
