"""Monte Carlo runs of the filtering measurement.

Detectors: one along psi'_1, an orthonormal completion of the rest of the
system space, and one on the failure ancilla. Trials are drawn in fixed-size
chunks, each with its own counter-based (Philox) stream keyed by
``(seed, chunk index)``, so results do not depend on the worker count.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import vectors
from .filtering import FilterProblem, StrategyReport
from .povm_synthesis import DilationUnitary, validate_dilation

CHUNK = 1 << 16
# Born probabilities below this are rounding noise of exact zeros
PROB_FLOOR = 1e-12


class InvalidDilationError(ValueError):
    pass


class Verdict(str, enum.Enum):
    IS_PSI1 = "IsPsi1"
    IS_OTHER = "IsOther"
    FAILURE = "Failure"


@dataclass(frozen=True)
class TrialOutcome:
    truth: int
    verdict: Verdict
    detector: int


@dataclass(frozen=True)
class DetectorFrame:
    rows: np.ndarray          # orthonormal rows in R^(D+1)
    verdicts: tuple[Verdict, ...]


def detector_frame(d: DilationUnitary, tol: float = 1e-12) -> DetectorFrame:
    dim = d.dim_system
    psi1_out = d.output_vectors[0]
    seeds = []
    verdicts = []
    if np.linalg.norm(psi1_out) > tol:
        seeds.append(psi1_out / np.linalg.norm(psi1_out))
        verdicts.append(Verdict.IS_PSI1)
    rest = vectors.orthonormal_complement(np.array(seeds) if seeds else [], np.eye(dim))
    system = np.vstack([np.array(seeds).reshape(len(seeds), dim), rest])
    verdicts += [Verdict.IS_OTHER] * len(rest)
    rows = np.zeros((dim + 1, dim + 1))
    rows[:dim, :dim] = system
    rows[dim, dim] = 1.0
    verdicts.append(Verdict.FAILURE)
    return DetectorFrame(rows, tuple(verdicts))


def outcome_probabilities(d: DilationUnitary, frame: DetectorFrame) -> np.ndarray:
    """Born probabilities per (given input state, detector)."""
    inputs = d.inputs[:d.n_given]
    amps = (inputs @ d.matrix[:, :d.dim_system].T) @ frame.rows.T
    probs = amps * amps
    probs[probs < PROB_FLOOR] = 0.0
    return probs / probs.sum(axis=1, keepdims=True)


def _cumulative(probs: np.ndarray) -> np.ndarray:
    cum = np.cumsum(probs, axis=1)
    for row, p in zip(cum, probs):
        last = np.flatnonzero(p)[-1]
        row[last:] = 1.0
    return cum


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _sample_chunk(seed: int, chunk: int, size: int, cum_priors: np.ndarray,
                  cum_probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rng = _chunk_rng(seed, chunk)
    u_state = rng.random(size)
    u_out = rng.random(size)
    states = np.searchsorted(cum_priors, u_state, side="right")
    detectors = np.empty(size, dtype=np.int64)
    for j in np.unique(states):
        sel = states == j
        detectors[sel] = np.searchsorted(cum_probs[j], u_out[sel], side="right")
    return states, detectors


def _tally(states: np.ndarray, detectors: np.ndarray, n_states: int, n_det: int) -> np.ndarray:
    flat = states * n_det + detectors
    return np.bincount(flat, minlength=n_states * n_det).reshape(n_states, n_det)


@dataclass(frozen=True)
class SimulationSummary:
    trials: int
    empirical_Q: float
    empirical_error_rate: float
    misidentifications: int
    per_state_failure: tuple[float, ...]
    per_state_trials: tuple[int, ...]
    detector_counts: tuple[int, ...]
    seed: int
    analytic_Q: float
    expected_failure: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "empirical_Q": self.empirical_Q,
            "analytic_Q": self.analytic_Q,
            "empirical_error_rate": self.empirical_error_rate,
            "misidentifications": self.misidentifications,
            "per_state_failure": list(self.per_state_failure),
            "per_state_trials": list(self.per_state_trials),
            "expected_failure": list(self.expected_failure),
            "detector_counts": list(self.detector_counts),
        }

    def tallies_csv(self) -> str:
        lines = ["detector,count"]
        lines += [f"{i},{c}" for i, c in enumerate(self.detector_counts)]
        return "\n".join(lines) + "\n"


def _prepare(problem: FilterProblem, d: DilationUnitary, check: bool):
    if check:
        val = validate_dilation(d, problem)
        if not val.passed:
            raise InvalidDilationError(f"dilation fails validation: {val.deviations}")
    frame = detector_frame(d)
    probs = outcome_probabilities(d, frame)
    cum_priors = np.cumsum(problem.priors)
    cum_priors[-1] = 1.0
    return frame, probs, cum_priors


def run_trials(problem: FilterProblem, d: DilationUnitary, trials: int, seed: int,
               workers: int = 1, check: bool = True) -> SimulationSummary:
    """Sample ``trials`` preparations and detector clicks; aggregate the statistics."""
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    frame, probs, cum_priors = _prepare(problem, d, check)
    cum_probs = _cumulative(probs)
    n_states, n_det = probs.shape

    sizes = [min(CHUNK, trials - c * CHUNK) for c in range(-(-trials // CHUNK))]

    def work(c: int) -> np.ndarray:
        states, dets = _sample_chunk(seed, c, sizes[c], cum_priors, cum_probs)
        return _tally(states, dets, n_states, n_det)

    counts = np.zeros((n_states, n_det), dtype=np.int64)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            for part in pool.map(work, range(len(sizes))):
                counts += part
    else:
        for c in range(len(sizes)):
            counts += work(c)
    return _summarize(counts, frame, problem, d, trials, seed)


def _summarize(counts, frame, problem, d, trials, seed) -> SimulationSummary:
    verdicts = np.array([v.value for v in frame.verdicts])
    fail = counts[:, verdicts == Verdict.FAILURE.value].sum(axis=1)
    said_psi1 = counts[:, verdicts == Verdict.IS_PSI1.value].sum(axis=1)
    said_other = counts[:, verdicts == Verdict.IS_OTHER.value].sum(axis=1)
    wrong = int(said_other[0] + said_psi1[1:].sum())
    per_trials = counts.sum(axis=1)
    per_fail = tuple(float(f / t) if t else float("nan") for f, t in zip(fail, per_trials))
    q = d.q[:d.n_given]
    analytic = float(np.dot(problem.priors, q))
    return SimulationSummary(
        trials=trials,
        empirical_Q=float(fail.sum() / trials) if trials else float("nan"),
        empirical_error_rate=float(wrong / trials) if trials else float("nan"),
        misidentifications=wrong,
        per_state_failure=per_fail,
        per_state_trials=tuple(int(t) for t in per_trials),
        detector_counts=tuple(int(c) for c in counts.sum(axis=0)),
        seed=seed,
        analytic_Q=analytic,
        expected_failure=tuple(float(x) for x in q),
    )


def trial_outcomes(problem: FilterProblem, d: DilationUnitary, trials: int, seed: int) -> list[TrialOutcome]:
    """Individual outcomes, drawn from the same streams as :func:`run_trials`."""
    frame, probs, cum_priors = _prepare(problem, d, check=True)
    cum_probs = _cumulative(probs)
    out = []
    for c in range(-(-trials // CHUNK)):
        size = min(CHUNK, trials - c * CHUNK)
        states, dets = _sample_chunk(seed, c, size, cum_priors, cum_probs)
        out += [TrialOutcome(int(s), frame.verdicts[k], int(k)) for s, k in zip(states, dets)]
    return out


@dataclass(frozen=True)
class Comparison:
    z: Optional[float]
    sigma: Optional[float]
    passed: bool
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {"z": self.z, "sigma": self.sigma, "passed": self.passed, "error": self.error}


def summarize_vs_analytic(summary: SimulationSummary, report: StrategyReport | float,
                          z_max: float = 3.0) -> Comparison:
    """z-score of the empirical failure rate against the analytic value."""
    analytic = report if isinstance(report, float) else report.Q
    if summary.trials == 0:
        return Comparison(None, None, False, "zero-trial summary")
    sigma = math.sqrt(analytic * (1.0 - analytic) / summary.trials)
    if sigma == 0.0:
        ok = summary.empirical_Q == analytic
        return Comparison(0.0 if ok else math.inf, 0.0, ok)
    z = (summary.empirical_Q - analytic) / sigma
    return Comparison(z, sigma, abs(z) <= z_max)


def per_state_consistent(summary: SimulationSummary, k_sigma: float = 4.0,
                         min_trials: int = 1000) -> list[bool]:
    """Per-state failure rate within ``k_sigma`` binomial deviations of q_j."""
    flags = []
    for emp, n, q in zip(summary.per_state_failure, summary.per_state_trials,
                         summary.expected_failure):
        if n < min_trials:
            flags.append(True)
            continue
        flags.append(abs(emp - q) <= k_sigma * math.sqrt(q * (1 - q) / n) + 1e-15)
    return flags
