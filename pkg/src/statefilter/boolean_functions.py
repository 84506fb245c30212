"""Boolean functions on n bits, their classification and state encoding."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

ENUMERATION_CAP = 4
MAX_ENCODE_BITS = 20


class EnumerationCapError(ValueError):
    pass


class Kind(str, enum.Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"
    BIASED = "biased"


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of an n-bit Boolean function, indexed by x ascending."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        table = tuple(int(b) for b in self.table)
        if len(table) != 2 ** self.n:
            raise ValueError(f"truth table has length {len(table)}, expected {2 ** self.n}")
        if any(b not in (0, 1) for b in table):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", table)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def __call__(self, x: int) -> int:
        return self.table[x]

    @classmethod
    def from_bits(cls, bits: str) -> "BooleanFunction":
        n = int(math.log2(len(bits))) if bits else 0
        if not bits or 2 ** n != len(bits):
            raise ValueError(f"bit string length {len(bits)} is not a power of two")
        return cls(n, tuple(int(c) for c in bits))

    @classmethod
    def from_hex(cls, digits: str, n: int) -> "BooleanFunction":
        """Parse a hex string whose binary expansion, MSB first, is the table."""
        value = int(digits, 16)
        d = 2 ** n
        if value >> d:
            raise ValueError(f"hex value does not fit a table of length {d}")
        return cls.from_bits(format(value, f"0{d}b"))

    def to_bits(self) -> str:
        return "".join(map(str, self.table))

    def to_hex(self) -> str:
        width = max(1, -(-self.dim // 4))
        return format(int(self.to_bits(), 2), f"0{width}x")

    def counts(self) -> tuple[int, int]:
        m1 = sum(self.table)
        return self.dim - m1, m1

    def to_json(self) -> dict:
        cls = classify(self)
        return {
            "n": self.n,
            "table": self.to_bits(),
            "class": cls.kind.value,
            "m0": cls.m0,
            "m1": cls.m1,
            "wk": None if cls.wk_index is None else
                  {"k": cls.wk_index[0], "polarity": cls.wk_index[1]},
        }


@dataclass(frozen=True)
class FunctionClass:
    kind: Kind
    m0: int
    m1: int
    wk_index: Optional[tuple[int, int]] = None


def _check_level(n: int, k: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 2 <= k <= n:
        raise ValueError(f"level k must satisfy 2 <= k <= n, got k={k}, n={n}")


def classify(f: BooleanFunction) -> FunctionClass:
    m0, m1 = f.counts()
    if m0 == 0 or m1 == 0:
        return FunctionClass(Kind.CONSTANT, m0, m1)
    if m0 == m1:
        return FunctionClass(Kind.BALANCED, m0, m1)
    # W_k tables are 'a' on a prefix and '1-a' on the last D/2^k entries
    minority = min(m0, m1)
    k = f.n - int(math.log2(minority))
    wk = None
    if 2 ** (f.n - k) == minority and 2 <= k <= f.n:
        polarity = f.table[0]
        if f == make_wk(f.n, k, polarity):
            wk = (k, polarity)
    return FunctionClass(Kind.BIASED, m0, m1, wk)


def make_wk(n: int, k: int, polarity: int) -> BooleanFunction:
    """Member of W_k: value ``polarity`` on the first D - D/2^k arguments and
    ``1 - polarity`` on the last D/2^k."""
    _check_level(n, k)
    if polarity not in (0, 1):
        raise ValueError("polarity must be 0 or 1")
    d = 2 ** n
    tail = d >> k
    return BooleanFunction(n, (polarity,) * (d - tail) + (1 - polarity,) * tail)


def constant(n: int, value: int = 0) -> BooleanFunction:
    return BooleanFunction(n, (value,) * 2 ** n)


def encode(f: BooleanFunction) -> np.ndarray:
    """Phase-oracle state: amplitude (-1)^f(x)/sqrt(D), ancilla qubit dropped."""
    if f.n > MAX_ENCODE_BITS:
        raise ValueError(f"encoding supports n <= {MAX_ENCODE_BITS}")
    signs = 1 - 2 * np.asarray(f.table, dtype=np.int64)
    return signs / math.sqrt(f.dim)


def sign_vector(f: BooleanFunction) -> np.ndarray:
    """Integer +-1 amplitudes before scaling."""
    return 1 - 2 * np.asarray(f.table, dtype=np.int64)


def wk_state(n: int, k: int) -> np.ndarray:
    return encode(make_wk(n, k, 0))


def enumerate_balanced(n: int, cap: int = ENUMERATION_CAP) -> Iterator[BooleanFunction]:
    """Yield every balanced function on n bits in lexicographic table order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise EnumerationCapError(
            f"enumerating balanced functions for n={n} exceeds the cap n<={cap}")
    d = 2 ** n
    table = [0] * d

    def rec(x: int, zeros: int, ones: int):
        if x == d:
            yield BooleanFunction(n, tuple(table))
            return
        if zeros:
            table[x] = 0
            yield from rec(x + 1, zeros - 1, ones)
        if ones:
            table[x] = 1
            yield from rec(x + 1, zeros, ones - 1)

    yield from rec(0, d // 2, d // 2)


def count_balanced(n: int) -> int:
    d = 2 ** n
    return math.comb(d, d // 2)


def classical_worst_case(n: int, k: int) -> int:
    """Worst-case classical queries to tell w_k from an unknown balanced function."""
    _check_level(n, k)
    return 2 ** (n - 1) + 2 ** (n - k) + 1


def worst_case_witness(n: int, k: int, polarity: int = 0) -> BooleanFunction:
    """A balanced function agreeing with the W_k member on 2^(n-1) + 2^(n-k) arguments.

    It copies the minority value wherever w_k takes it, then fills the first
    majority-valued positions until the table is balanced.
    """
    wk = make_wk(n, k, polarity)
    d = wk.dim
    minority = 1 - polarity
    table = list(wk.table)
    need = d // 2 - (d >> k)
    for x in range(d):
        if need == 0:
            break
        if table[x] != minority:
            table[x] = minority
            need -= 1
    return BooleanFunction(n, tuple(table))


def agreements(f: BooleanFunction, g: BooleanFunction) -> int:
    if f.n != g.n:
        raise ValueError("functions have different bit counts")
    return sum(a == b for a, b in zip(f.table, g.table))
