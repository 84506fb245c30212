"""Dense real linear-algebra kernel.

All states in this package are real: every amplitude is a signed real and
phases reduce to signs, so plain ``float64`` numpy arrays are used throughout.
"""
from __future__ import annotations

import numpy as np

NORM_TOL = 1e-12
ORTHO_TOL = 1e-10
PSD_TOL = 1e-12


class DimensionError(ValueError):
    pass


class NotOrthonormalError(ValueError):
    pass


class NotPSDError(ValueError):
    """Raised when a symmetric matrix has an eigenvalue below ``-tol``."""

    def __init__(self, min_eigenvalue: float, tol: float):
        self.min_eigenvalue = float(min_eigenvalue)
        self.tol = tol
        super().__init__(f"matrix is not positive semidefinite: "
                         f"min eigenvalue {self.min_eigenvalue:.6g} < -{tol:g}")


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {arr.shape}")
    return arr


def normalize(v) -> np.ndarray:
    v = as_vector(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / nrm


def is_normalized(v, tol: float = NORM_TOL) -> bool:
    return abs(float(np.dot(v, v)) - 1.0) <= tol


def inner(u, v) -> float:
    """Real inner product <u|v>."""
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.size} vs {v.size}")
    return float(np.dot(u, v))


def equal_up_to_sign(u, v, tol: float = NORM_TOL) -> bool:
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        return False
    return bool(np.max(np.abs(u - v)) <= tol or np.max(np.abs(u + v)) <= tol)


def check_orthonormal(vectors, tol: float = ORTHO_TOL) -> np.ndarray:
    """Stack ``vectors`` as rows and verify their Gram matrix is the identity."""
    basis = np.atleast_2d(np.asarray(vectors, dtype=float))
    if basis.size == 0:
        return basis.reshape(0, 0)
    gram = basis @ basis.T
    dev = np.max(np.abs(gram - np.eye(len(basis))))
    if dev > tol:
        raise NotOrthonormalError(f"subspace vectors are not orthonormal (deviation {dev:.3g})")
    return basis


def project_parallel(v, subspace, tol: float = ORTHO_TOL) -> tuple[np.ndarray, float]:
    """Project ``v`` onto the span of the orthonormal ``subspace`` vectors.

    Returns the parallel component and its squared norm.
    """
    v = as_vector(v)
    if len(subspace) == 0:
        return np.zeros_like(v), 0.0
    basis = check_orthonormal(subspace, tol)
    if basis.shape[1] != v.size:
        raise DimensionError(f"dimension mismatch: {v.size} vs {basis.shape[1]}")
    coeffs = basis @ v
    return coeffs @ basis, float(np.dot(coeffs, coeffs))


def orthonormal_span(vectors, rank_tol: float = ORTHO_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the span of ``vectors`` via SVD."""
    mat = np.atleast_2d(np.asarray(vectors, dtype=float))
    if mat.size == 0:
        return mat.reshape(0, 0)
    _, s, vt = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > rank_tol * max(1.0, s[0])))
    return vt[:rank]


def matrix_rank(vectors, rank_tol: float = ORTHO_TOL) -> int:
    return len(orthonormal_span(vectors, rank_tol))


def orthonormal_complement(vectors, frame, tol: float = ORTHO_TOL) -> np.ndarray:
    """Complete the span of ``vectors`` using ``frame`` rows, in frame order.

    Classical Gram-Schmidt with re-orthogonalisation; candidates whose residual
    is below ``tol`` are skipped, so the result is deterministic.
    """
    frame = np.asarray(frame, dtype=float)
    dim = frame.shape[1]
    current = list(orthonormal_span(vectors)) if len(vectors) else []
    added = []
    for cand in frame:
        if len(current) == dim:
            break
        r = cand.copy()
        for _ in range(2):
            for b in current:
                r -= np.dot(b, r) * b
        nrm = np.linalg.norm(r)
        if nrm > tol:
            r /= nrm
            current.append(r)
            added.append(r)
    return np.array(added).reshape(len(added), dim)


def gram(vectors) -> np.ndarray:
    mat = np.atleast_2d(np.asarray(vectors, dtype=float))
    g = mat @ mat.T
    return (g + g.T) / 2


def symmetrize(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return (m + m.T) / 2


def psd_factor(m, tol: float = PSD_TOL) -> np.ndarray:
    """Factor a symmetric PSD matrix as ``B.T @ B`` with ``B = sqrt(M)``.

    Uses the symmetric eigendecomposition. Eigenvalues in ``[-tol, 0]`` are
    clipped to zero; anything more negative raises :class:`NotPSDError`.
    The returned factor is the symmetric square root, i.e. the orthogonal
    freedom is fixed to the identity.
    """
    m = symmetrize(m)
    w, v = np.linalg.eigh(m)
    if w[0] < -tol:
        raise NotPSDError(w[0], tol)
    w = np.clip(w, 0.0, None)
    b = (v * np.sqrt(w)) @ v.T
    return (b + b.T) / 2


def to_json(a) -> dict:
    arr = np.asarray(a, dtype=float)
    return {"shape": list(arr.shape), "data": arr.tolist()}


def from_json(obj: dict) -> np.ndarray:
    return np.asarray(obj["data"], dtype=float).reshape(obj["shape"])
