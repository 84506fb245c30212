"""Recursive orthonormal basis of R^(2^n) built from blocks of +-1.

Vectors are labelled ``(p, j)``. ``(0, 1)`` is the constant-function vector,
``(1, 1)`` is ``(u(D/2), -u(D/2))`` and for ``p >= 2`` the vector is made of
``2^(p-1)`` blocks ``(u(D/2^p), -u(D/2^p))``, each signed by a component of
the ``j``-th vector of the ``2^(p-1)``-dimensional basis. Every vector with
``p >= 1`` has zero component sum, so those ``D - 1`` vectors span the
balanced subspace.

Canonical order is ``(p, j)`` ascending.
"""
from __future__ import annotations

import csv
import io
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boolean_functions import make_wk, sign_vector

_LOCK = threading.Lock()


@dataclass(frozen=True, order=True)
class BasisIndex:
    p: int
    j: int


def level_size(p: int) -> int:
    return 1 if p == 0 else 2 ** (p - 1)


def indices(n: int) -> list[BasisIndex]:
    """All ``D`` labels in canonical order."""
    return [BasisIndex(p, j) for p in range(n + 1) for j in range(1, level_size(p) + 1)]


def _check_index(n: int, idx: BasisIndex):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= idx.p <= n or not 1 <= idx.j <= level_size(idx.p):
        raise IndexError(f"basis index (p={idx.p}, j={idx.j}) out of range for n={n}")


@lru_cache(maxsize=None)
def _sign_basis(m: int) -> np.ndarray:
    """Integer +-1 rows of the 2^m basis in canonical order."""
    d = 2 ** m
    if m == 0:
        return np.ones((1, 1), dtype=np.int64)
    rows = [np.ones(d, dtype=np.int64)]
    for p in range(1, m + 1):
        half = d >> p
        block = np.concatenate([np.ones(half, dtype=np.int64), -np.ones(half, dtype=np.int64)])
        # p = 1 is the same construction driven by the 1-dim basis (1,)
        for signs in _sign_basis(p - 1):
            rows.append(np.kron(signs, block))
    out = np.array(rows)
    out.setflags(write=False)
    return out


def sign_basis(n: int) -> np.ndarray:
    with _LOCK:
        return _sign_basis(n)


def basis_vector(n: int, idx: BasisIndex) -> np.ndarray:
    _check_index(n, idx)
    pos = (0 if idx.p == 0 else level_size(idx.p)) + idx.j - 1
    return sign_basis(n)[pos] / np.sqrt(2 ** n)


def full_basis(n: int) -> np.ndarray:
    """``D x D`` array whose rows are the orthonormal basis in canonical order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sign_basis(n) / np.sqrt(2 ** n)


def balanced_basis(n: int) -> np.ndarray:
    """The ``D - 1`` rows with ``p >= 1``."""
    return full_basis(n)[1:]


def overlap_with_wk(n: int, k: int, idx: BasisIndex) -> float:
    """<v_{p,j}|w_k>; zero whenever p > k.

    Evaluated on the integer sign patterns, so vanishing overlaps are exactly 0.
    """
    _check_index(n, idx)
    pos = (0 if idx.p == 0 else level_size(idx.p)) + idx.j - 1
    dot = int(np.dot(sign_basis(n)[pos], sign_vector(make_wk(n, k, 0))))
    return dot / 2 ** n


def export_csv(n: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "j"] + [f"x{x}" for x in range(2 ** n)])
    for idx, row in zip(indices(n), full_basis(n)):
        writer.writerow([idx.p, idx.j] + [repr(float(v)) for v in row])
    return buf.getvalue()


def export_json(n: int) -> dict:
    return {
        "n": n,
        "dim": 2 ** n,
        "index": [[i.p, i.j] for i in indices(n)],
        "rows": full_basis(n).tolist(),
    }
