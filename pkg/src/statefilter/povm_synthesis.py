"""Construct the filtering POVM as a unitary on the system plus a one-dimensional
failure ancilla.

Each input is sent to ``psi'_j + sign_j sqrt(q_j) phi_A`` where the system
parts satisfy ``<psi'_1|psi'_j> = 0`` for ``j >= 2``. The ancilla is the last
coordinate of the ``(D+1)``-dimensional space.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import vectors
from .filtering import FilterProblem
from .walsh_basis import full_basis

DILATION_TOL = 1e-10


class RankDeficiencyError(ValueError):
    pass


class OutsideSubspaceError(ValueError):
    pass


def _check_q1(q1: float):
    if not 0.0 < q1 <= 1.0:
        raise ValueError(f"q1 must lie in (0, 1], got {q1}")


def _ancilla_amplitudes(overlaps: np.ndarray, q1: float) -> np.ndarray:
    """Signed sqrt(q_j): sqrt(q_1) first, then <psi_1|psi_j>/sqrt(q_1)."""
    return np.concatenate([[np.sqrt(q1)], overlaps / np.sqrt(q1)])


def reduced_gram(problem: FilterProblem, q1: float) -> np.ndarray:
    """Gram matrix of the output system vectors psi'_j.

    ``M_11 = 1 - q_1``, ``M_1j = 0`` and
    ``M_jk = <psi_j|psi_k> - <psi_j|psi_1><psi_1|psi_k> / q_1``.
    """
    _check_q1(q1)
    t = _ancilla_amplitudes(problem.overlaps(), q1)
    m = vectors.gram(problem.states) - np.outer(t, t)
    m[0, 1:] = m[1:, 0] = 0.0
    m[0, 0] = 1.0 - q1
    return m


def default_frame(dim: int) -> np.ndarray:
    """Walsh basis when ``dim`` is a power of two, else the standard basis."""
    if dim >= 2 and dim & (dim - 1) == 0:
        return full_basis(dim.bit_length() - 1)
    return np.eye(dim)


@dataclass(frozen=True)
class DilationUnitary:
    dim_system: int
    matrix: np.ndarray
    q1: float
    q: np.ndarray
    p: np.ndarray
    signs: np.ndarray
    output_vectors: np.ndarray
    inputs: np.ndarray
    n_given: int
    reduced_gram: np.ndarray

    @property
    def ancilla(self) -> int:
        return self.dim_system

    def apply(self, psi) -> np.ndarray:
        psi = vectors.as_vector(psi)
        if psi.size != self.dim_system:
            raise vectors.DimensionError("state does not live in the system space")
        return self.matrix[:, :self.dim_system] @ psi

    def to_json(self) -> dict:
        return {
            "dim": self.dim_system,
            "q1": self.q1,
            "q": self.q[:self.n_given].tolist(),
            "matrix": self.matrix.tolist(),
        }


def synthesize_dilation(problem: FilterProblem, q1: float,
                        frame: Optional[np.ndarray] = None,
                        psd_tol: float = vectors.PSD_TOL) -> DilationUnitary:
    """Build the (D+1)x(D+1) orthogonal matrix realising the filter at ``q1``.

    If the given states span fewer than D dimensions, the set of others is
    padded with an orthonormal completion (taken from ``frame`` in order);
    those padding states are orthogonal to psi_1 and get ``q_j = 0``.

    Raises :class:`vectors.NotPSDError` when ``q1`` is infeasible and
    :class:`RankDeficiencyError` when the given states are linearly dependent.
    """
    _check_q1(q1)
    d = problem.dim
    states = np.array(problem.states)
    if vectors.matrix_rank(states) < len(states):
        raise RankDeficiencyError("input states are linearly dependent")
    if frame is None:
        frame = default_frame(d)
    frame = vectors.check_orthonormal(frame)

    pad = vectors.orthonormal_complement(states, frame)
    padded = FilterProblem(problem.psi1, problem.others + tuple(pad),
                           problem.priors + (0.0,) * len(pad))
    inputs = np.array(padded.states)

    m = reduced_gram(padded, q1)
    b = vectors.psd_factor(m, psd_tol)
    # psi'_j = sum_i B_ij frame_i
    outputs = b.T @ frame
    t = _ancilla_amplitudes(padded.overlaps(), q1)

    images = np.hstack([outputs, t[:, None]])
    # U restricted to the system block: U_S @ inputs.T = images.T
    u_sys = np.linalg.solve(inputs, images).T
    u = np.zeros((d + 1, d + 1))
    u[:, :d] = u_sys
    u[:, d] = _complement_column(u_sys)

    q = t * t
    p = np.einsum("ij,ij->i", outputs, outputs)
    signs = np.where(t < 0, -1.0, 1.0)
    return DilationUnitary(d, u, q1, q, p, signs, outputs, inputs, len(problem.states), m)


def _complement_column(cols: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to the columns of ``cols``; largest entry positive."""
    q, _ = np.linalg.qr(cols, mode="complete")
    c = q[:, -1]
    # re-orthogonalise against the given columns for accuracy
    for _ in range(2):
        c = c - cols @ (cols.T @ c)
        c /= np.linalg.norm(c)
    if c[np.argmax(np.abs(c))] < 0:
        c = -c
    return c


@dataclass
class DilationValidation:
    unitarity: float
    structure: float
    ortho: float
    qproduct: float
    completeness: float
    gram: float
    tol: float = DILATION_TOL

    @property
    def deviations(self) -> dict:
        return {
            "unitarity": self.unitarity,
            "structure": self.structure,
            "ortho": self.ortho,
            "qproduct": self.qproduct,
            "completeness": self.completeness,
            "gram": self.gram,
        }

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.deviations.values())

    def to_json(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, **self.deviations}


def validate_dilation(d: DilationUnitary, problem: FilterProblem,
                      tol: float = DILATION_TOL) -> DilationValidation:
    """Measure how far ``d`` is from every defining identity of the filter."""
    u = d.matrix
    dim = d.dim_system
    unitarity = float(np.max(np.abs(u.T @ u - np.eye(dim + 1))))

    inputs = d.inputs
    expected = np.hstack([d.output_vectors, (d.signs * np.sqrt(d.q))[:, None]])
    structure = float(np.max(np.abs(inputs @ u[:, :dim].T - expected)))

    out = d.output_vectors
    ortho = float(np.max(np.abs(out[1:] @ out[0]), initial=0.0))

    ov = np.array(problem.others) @ problem.psi1 if problem.others else np.zeros(0)
    n_others = len(problem.others)
    qprod = float(np.max(np.abs(d.q1 * d.q[1:1 + n_others] - ov * ov), initial=0.0))

    completeness = float(np.max(np.abs(d.p + d.q - 1.0)))
    gram_dev = float(np.max(np.abs(vectors.gram(out) - d.reduced_gram)))
    return DilationValidation(unitarity, structure, ortho, qprod, completeness, gram_dev, tol)


def failure_for_general_input(d: DilationUnitary, psi, residual_tol: float = DILATION_TOL) -> float:
    """Failure probability of the filter for a state in the span of the others.

    Computed as ``<psi_1|psi>^2 / q_1`` and cross-checked against the ancilla
    amplitude of ``U psi``.
    """
    psi = vectors.as_vector(psi)
    others = d.inputs[1:d.n_given]
    span = vectors.orthonormal_span(others)
    comp, _ = vectors.project_parallel(psi, span)
    if np.max(np.abs(psi - comp)) > residual_tol:
        raise OutsideSubspaceError("state is not in the span of the competing set")
    q_formula = float(np.dot(d.inputs[0], psi)) ** 2 / d.q1
    q_direct = float(d.apply(psi)[d.ancilla]) ** 2
    if abs(q_formula - q_direct) > DILATION_TOL:
        raise AssertionError(
            f"ancilla population {q_direct!r} disagrees with overlap law {q_formula!r}")
    return q_formula


# the worked k = 2 example ---------------------------------------------------

def worked_example_problem(n: int = 2) -> FilterProblem:
    """w_2 against v_{1,1}, v_{2,1}, v_{2,2}; four states spanning a 4-dim subspace."""
    from .boolean_functions import wk_state
    from .walsh_basis import BasisIndex, basis_vector

    others = tuple(basis_vector(n, BasisIndex(p, j)) for p, j in ((1, 1), (2, 1), (2, 2)))
    return FilterProblem(wk_state(n, 2), others, (0.25,) * 4)


def worked_example_gram(q1: float) -> np.ndarray:
    """The 4x4 reduced Gram matrix of the k = 2 example, x = 1 / (4 q_1)."""
    _check_q1(q1)
    x = 1.0 / (4.0 * q1)
    return np.array([
        [1 - q1, 0, 0, 0],
        [0, 1 - x, -x, x],
        [0, -x, 1 - x, x],
        [0, x, x, 1 - x],
    ])


def worked_example_outputs(q1: float, coefficient: str = "corrected") -> np.ndarray:
    """Explicit output vectors of the k = 2 example in (v01, v11, v21, v22) coordinates.

    ``coefficient="printed"`` uses sqrt(1 - x/3) for the v22 weight, which does
    not reproduce the Gram matrix; ``"corrected"`` uses sqrt(1/3 - x).
    """
    _check_q1(q1)
    x = 1.0 / (4.0 * q1)
    if coefficient == "corrected":
        c = np.sqrt(max(1.0 / 3.0 - x, 0.0))
    elif coefficient == "printed":
        c = np.sqrt(1.0 - x / 3.0)
    else:
        raise ValueError("coefficient must be 'corrected' or 'printed'")
    r2, r6 = 1 / np.sqrt(2), 1 / np.sqrt(6)
    return np.array([
        [np.sqrt(1 - q1), 0, 0, 0],
        [0, r2, r6, c],
        [0, -r2, r6, c],
        [0, 0, np.sqrt(2 / 3), -c],
    ])
