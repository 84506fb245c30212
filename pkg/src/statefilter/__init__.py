"""Optimal unambiguous state filtering applied to telling balanced Boolean
functions apart from the biased family W_k."""
from .boolean_functions import (BooleanFunction, FunctionClass, Kind, classical_worst_case,
                                classify, encode, enumerate_balanced, make_wk,
                                worst_case_witness)
from .filtering import (FilterProblem, Strategy, StrategyReport, basis_problem,
                        choose_strategy, failure_probabilities, overlap_S, wk_closed_forms)
from .povm_synthesis import (DilationUnitary, failure_for_general_input, reduced_gram,
                             synthesize_dilation, validate_dilation)
from .simulate import SimulationSummary, run_trials, summarize_vs_analytic
from .vectors import NotPSDError, psd_factor
from .walsh_basis import BasisIndex, basis_vector, full_basis, overlap_with_wk

__version__ = "0.1.0"
