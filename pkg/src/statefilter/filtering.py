"""Optimal unambiguous filtering of one pure state against a set of others.

Three strategies compete:

* ``VN1`` projects onto the complement of psi_1; fails with ``eta_1 + S``.
* ``VN2`` splits psi_1 into components inside and orthogonal to the span of
  the others; fails with ``eta_1 P + S / P`` where ``P = ||psi_1^par||^2``.
* ``POVM`` fails with ``2 sqrt(eta_1 S)`` at ``q_1 = sqrt(S / eta_1)``, valid
  when ``eta_1 P^2 <= S <= eta_1``.

``S = sum_j eta_j <psi_1|psi_j>^2`` is the prior-weighted overlap.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import vectors
from .boolean_functions import _check_level, wk_state
from .walsh_basis import balanced_basis

PRIOR_TOL = 1e-12


class Strategy(str, enum.Enum):
    VN1 = "VN1"
    VN2 = "VN2"
    POVM = "POVM"
    TRIVIAL = "TRIVIAL"


@dataclass(frozen=True)
class FilterProblem:
    psi1: np.ndarray
    others: tuple[np.ndarray, ...]
    priors: tuple[float, ...]

    def __post_init__(self):
        psi1 = vectors.as_vector(self.psi1)
        others = tuple(vectors.as_vector(v) for v in self.others)
        priors = tuple(float(p) for p in self.priors)
        if len(priors) != len(others) + 1:
            raise ValueError(f"need {len(others) + 1} priors, got {len(priors)}")
        if any(p < 0 for p in priors) or abs(sum(priors) - 1.0) > PRIOR_TOL:
            raise ValueError("priors must be nonnegative and sum to 1")
        for v in (psi1,) + others:
            if v.shape != psi1.shape:
                raise vectors.DimensionError("all states must have the same dimension")
            if not vectors.is_normalized(v):
                raise ValueError("all states must be unit vectors")
        object.__setattr__(self, "psi1", psi1)
        object.__setattr__(self, "others", others)
        object.__setattr__(self, "priors", priors)

    @property
    def dim(self) -> int:
        return self.psi1.size

    @property
    def eta1(self) -> float:
        return self.priors[0]

    @property
    def states(self) -> list[np.ndarray]:
        return [self.psi1, *self.others]

    def overlaps(self) -> np.ndarray:
        """<psi_1|psi_j> for every j >= 2."""
        if not self.others:
            return np.zeros(0)
        return np.array(self.others) @ self.psi1

    def sets_independent(self, rank_tol: float = vectors.ORTHO_TOL) -> bool:
        """psi_1 lies outside the span of the others."""
        return parallel_norm_sq(self) < 1.0 - rank_tol


def basis_problem(n: int, k: int, eta1: float) -> FilterProblem:
    """w_k against the ``D - 1`` balanced basis vectors with equal priors."""
    _check_level(n, k)
    if not 0.0 <= eta1 <= 1.0:
        raise ValueError("eta1 must lie in [0, 1]")
    d = 2 ** n
    eta = (1.0 - eta1) / (d - 1)
    return FilterProblem(wk_state(n, k), tuple(balanced_basis(n)), (eta1,) + (eta,) * (d - 1))


def overlap_S(problem: FilterProblem) -> float:
    ov = problem.overlaps()
    return float(np.dot(problem.priors[1:], ov * ov))


def parallel_norm_sq(problem: FilterProblem) -> float:
    """Squared norm of psi_1 projected onto the span of the others."""
    if not problem.others:
        return 0.0
    span = vectors.orthonormal_span(problem.others)
    _, nsq = vectors.project_parallel(problem.psi1, span)
    return min(nsq, 1.0)


@dataclass(frozen=True)
class FailureProbabilities:
    Q1: float
    Q2: float
    Qpovm: Optional[float]
    q1_opt: float


def failure_probabilities(problem: FilterProblem) -> FailureProbabilities:
    S = overlap_S(problem)
    P = parallel_norm_sq(problem)
    return _failures(problem.eta1, S, P)


def _failures(eta1: float, S: float, P: float) -> FailureProbabilities:
    Q1 = eta1 + S
    # psi_1 orthogonal to the others' span: both sets are perfectly separable
    Q2 = 0.0 if P == 0.0 else eta1 * P + S / P
    if eta1 > 0.0 and eta1 * P * P <= S <= eta1:
        q1 = math.sqrt(S / eta1)
        return FailureProbabilities(Q1, Q2, 2.0 * math.sqrt(eta1 * S), q1)
    if eta1 == 0.0:
        q1 = 1.0
    else:
        q1 = min(max(math.sqrt(S / eta1), P), 1.0)
    return FailureProbabilities(Q1, Q2, None, q1)


@dataclass(frozen=True)
class StrategyReport:
    S: float
    par_norm_sq: float
    Q1: float
    Q2: float
    Qpovm: Optional[float]
    q1_opt: float
    chosen: Strategy
    Q: float
    eta1: float
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "S": self.S,
            "par_norm_sq": self.par_norm_sq,
            "Q1": self.Q1,
            "Q2": self.Q2,
            "Qpovm": self.Qpovm,
            "q1_opt": self.q1_opt,
            "chosen": self.chosen.value,
            "Q": self.Q,
            "eta1": self.eta1,
            "degenerate": self.degenerate,
        }


def choose_strategy(problem: FilterProblem) -> StrategyReport:
    return _report(problem.eta1, overlap_S(problem), parallel_norm_sq(problem))


def _report(eta1: float, S: float, P: float) -> StrategyReport:
    fp = _failures(eta1, S, P)
    if eta1 in (0.0, 1.0):
        # one of the sets is certain; answer it without measuring
        return StrategyReport(S, P, fp.Q1, fp.Q2, fp.Qpovm, fp.q1_opt,
                              Strategy.TRIVIAL, 0.0, eta1, degenerate=True)
    if P == 0.0:
        chosen, Q = Strategy.VN2, 0.0
    elif fp.Qpovm is not None:
        chosen, Q = Strategy.POVM, fp.Qpovm
    elif S > eta1:
        chosen, Q = Strategy.VN1, fp.Q1
    else:
        chosen, Q = Strategy.VN2, fp.Q2
    return StrategyReport(S, P, fp.Q1, fp.Q2, fp.Qpovm, fp.q1_opt, chosen, Q, eta1)


def failure_at(q1: float, eta1: float, S: float) -> float:
    """Average POVM failure ``eta_1 q_1 + S / q_1`` for a given q_1."""
    return eta1 * q1 + S / q1


# closed forms for w_k against the balanced basis -----------------------------

def f_k(k: int) -> float:
    return (2 ** k - 1) / 2 ** (2 * k - 2)


def zeta1(n: int, k: int) -> float:
    """Upper edge of the POVM window in eta_1; VN2 is optimal above it."""
    return 1.0 / (1.0 + (2 ** n - 1) * (2 ** k - 1) / 2 ** (2 * (k - 1)))


def zeta2(n: int, k: int) -> float:
    """Lower edge of the POVM window in eta_1; VN1 is optimal below it."""
    return (2 ** k - 1) / (2 ** (2 * (k - 1)) * (2 ** n - 1) + 2 ** k - 1)


@dataclass(frozen=True)
class WkClosedForms:
    n: int
    k: int
    eta1: float
    f_k: float
    par_norm_sq: float
    zeta1: float
    zeta2: float
    Q1: float
    Q2: float
    Qpovm: float
    in_window: bool = field(default=False)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def wk_closed_forms(n: int, k: int, eta1: float) -> WkClosedForms:
    _check_level(n, k)
    if not 0.0 <= eta1 <= 1.0:
        raise ValueError("eta1 must lie in [0, 1]")
    d = 2 ** n
    fk = f_k(k)
    z1, z2 = zeta1(n, k), zeta2(n, k)
    qpovm = math.sqrt(eta1 * (1 - eta1) * (2 ** k - 1) / (d - 1)) / 2 ** (k - 2)
    q1 = eta1 + (1 - eta1) * (2 ** k - 1) / (2 ** (2 * k - 2) * (d - 1))
    q2 = eta1 * (2 ** k - 1) / 2 ** (2 * k - 2) + (1 - eta1) / (d - 1)
    return WkClosedForms(n, k, eta1, fk, fk, z1, z2, q1, q2, qpovm, z2 <= eta1 <= z1)


def equal_prior_Qpovm(n: int, k: int) -> float:
    """POVM failure when every state, w_k included, has prior 1/2^n."""
    _check_level(n, k)
    return math.sqrt(2 ** k - 1) / 2 ** (n + k - 2)


def regime_scan(n: int, k: int, points: int = 10_000,
                lo: float = 0.0, hi: float = 1.0) -> tuple[np.ndarray, list[Strategy]]:
    """Brute-force regime map: evaluate all branches on an eta_1 grid and keep the smallest.

    Independent of :func:`choose_strategy`'s window logic; the POVM branch is
    admitted only when its optimal q_1 is feasible, ``P <= q_1 <= 1``.
    """
    _check_level(n, k)
    grid = np.linspace(lo, hi, points + 2)[1:-1]
    d = 2 ** n
    P = f_k(k)
    labels = []
    for eta1 in grid:
        S = (1 - eta1) / (d - 1) * P
        cands = {Strategy.VN1: eta1 + S, Strategy.VN2: eta1 * P + S / P}
        q1 = math.sqrt(S / eta1)
        if P <= q1 <= 1:
            cands[Strategy.POVM] = 2 * math.sqrt(eta1 * S)
        labels.append(min(cands, key=cands.get))
    return grid, labels


def regime_switches(grid: Sequence[float], labels: Sequence[Strategy]) -> list[tuple[float, Strategy, Strategy]]:
    """Midpoints where the winning strategy changes along the grid."""
    out = []
    for i in range(1, len(labels)):
        if labels[i] != labels[i - 1]:
            out.append((0.5 * (grid[i] + grid[i - 1]), labels[i - 1], labels[i]))
    return out
