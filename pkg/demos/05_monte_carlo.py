"""Run the optimal measurement a million times and compare with theory."""
import time

from statefilter.filtering import basis_problem, choose_strategy
from statefilter.povm_synthesis import synthesize_dilation
from statefilter.simulate import run_trials, summarize_vs_analytic

problem = basis_problem(3, 2, 1 / 8)
rep = choose_strategy(problem)
d = synthesize_dilation(problem, rep.q1_opt)

t0 = time.perf_counter()
s = run_trials(problem, d, 1_000_000, seed=42, workers=4)
print(f"{s.trials} trials in {time.perf_counter() - t0:.2f}s")
print(f"empirical failure {s.empirical_Q:.6f}, analytic {rep.Q:.6f}")
print(f"misidentifications: {s.misidentifications}")
cmp = summarize_vs_analytic(s, rep)
print(f"z = {cmp.z:.3f} (passed={cmp.passed})")
print("per-state failure:", [round(x, 4) for x in s.per_state_failure])
