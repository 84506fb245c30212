"""Average overlap of w_k with all balanced-function states.

A balanced table whose last D/2^k entries contain ``m`` positive amplitudes
(f = 0) has overlap ``1/2^(k-1) - 4m/D`` with w_k. ``C_m`` counts such
tables. All counts are exact Python integers; floats appear only in the final
division.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .boolean_functions import (ENUMERATION_CAP, _check_level, count_balanced,
                                enumerate_balanced, make_wk, sign_vector)
from .filtering import f_k

SB_TOL = 1e-12


def _check_eta1(eta1: float):
    if not 0.0 <= eta1 <= 1.0:
        raise ValueError("eta1 must lie in [0, 1]")


def overlap_for_m(n: int, k: int, m: int) -> Fraction:
    d = 2 ** n
    return Fraction(1, 2 ** (k - 1)) - Fraction(4 * m, d)


@dataclass(frozen=True)
class EnsembleCounts:
    n: int
    k: int
    C: tuple[int, ...]
    s0: int
    s1: int
    s2: int

    def direct_sums(self) -> tuple[int, int, int]:
        return (sum(self.C),
                sum(m * c for m, c in enumerate(self.C)),
                sum(m * m * c for m, c in enumerate(self.C)))


def ensemble_counts(n: int, k: int) -> EnsembleCounts:
    """C_m for m = 0..D/2^k with the closed forms of s0, s1, s2."""
    _check_level(n, k)
    d = 2 ** n
    tail = d >> k
    head = d - tail
    C = tuple(math.comb(tail, m) * math.comb(head, d // 2 - m) for m in range(tail + 1))
    s0 = math.comb(d, d // 2)
    s1 = tail * math.comb(d - 1, d // 2 - 1)
    s2 = tail * (tail - 1) * math.comb(d - 2, d // 2 - 2) + s1
    return EnsembleCounts(n, k, C, s0, s1, s2)


def weighted_overlap_sum(n: int, k: int) -> Fraction:
    """Exact sum over balanced functions of <w_k|v_b>^2, grouped by m."""
    counts = ensemble_counts(n, k)
    return sum((c * overlap_for_m(n, k, m) ** 2 for m, c in enumerate(counts.C)), Fraction(0))


def Sb_closed(n: int, k: int, eta1: float) -> float:
    _check_level(n, k)
    _check_eta1(eta1)
    return (1.0 - eta1) * f_k(k) / (2 ** n - 1)


def Sb_weighted(n: int, k: int, eta1: float) -> float:
    _check_level(n, k)
    _check_eta1(eta1)
    total = weighted_overlap_sum(n, k) / count_balanced(n)
    return (1.0 - eta1) * float(total)


def enumerated_overlap_sum(n: int, k: int, cap: int = ENUMERATION_CAP) -> Fraction:
    """Sum of <w_k|v_b>^2 by literal enumeration of every balanced table.

    Overlaps are taken on integer sign vectors, so the sum is exact.
    """
    _check_level(n, k)
    d = 2 ** n
    w = sign_vector(make_wk(n, k, 0))
    total = 0
    for f in enumerate_balanced(n, cap):
        dot = int(np.dot(w, sign_vector(f)))
        total += dot * dot
    return Fraction(total, d * d)


def Sb_bruteforce(n: int, k: int, eta1: float, cap: int = ENUMERATION_CAP,
                  tol: float = SB_TOL) -> float:
    """Enumeration result, asserted equal to the C_m-weighted and closed forms."""
    _check_eta1(eta1)
    brute = (1.0 - eta1) * float(enumerated_overlap_sum(n, k, cap) / count_balanced(n))
    weighted = Sb_weighted(n, k, eta1)
    closed = Sb_closed(n, k, eta1)
    if abs(brute - weighted) > tol or abs(brute - closed) > tol:
        raise AssertionError(
            f"S_b mismatch: enumeration {brute!r}, weighted {weighted!r}, closed {closed!r}")
    return brute


@dataclass(frozen=True)
class EnsembleSummary:
    n: int
    k: int
    eta1: float
    C: tuple[int, ...]
    s0: int
    s1: int
    s2: int
    Sb_closed: float
    Sb_weighted: float
    Sb_bruteforce: float | None = field(default=None)

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k, "eta1": self.eta1,
            "C": list(self.C), "s0": self.s0, "s1": self.s1, "s2": self.s2,
            "Sb_closed": self.Sb_closed,
            "Sb_weighted": self.Sb_weighted,
            "Sb_bruteforce": self.Sb_bruteforce,
        }

    def audit_csv(self) -> str:
        """Rows of (m, C_m, overlap, contribution to the overlap sum)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "C_m", "overlap", "contribution"])
        for m, c in enumerate(self.C):
            ov = overlap_for_m(self.n, self.k, m)
            w.writerow([m, c, repr(float(ov)), repr(float(c * ov * ov))])
        return buf.getvalue()


def summarize(n: int, k: int, eta1: float, brute_force: bool = True,
              cap: int = ENUMERATION_CAP) -> EnsembleSummary:
    counts = ensemble_counts(n, k)
    brute = Sb_bruteforce(n, k, eta1, cap) if brute_force else None
    return EnsembleSummary(n, k, eta1, counts.C, counts.s0, counts.s1, counts.s2,
                           Sb_closed(n, k, eta1), Sb_weighted(n, k, eta1), brute)
