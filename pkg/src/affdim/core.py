"""Validated domain types for affine multiplicative subshift systems.

A system couples positions p*k+a and q*k+b of a one-sided sequence over the
alphabet {0, ..., m-1}: for every k placing both positions at index >= 1, the
letter pair must hit a 1-entry of a binary transition matrix.  Everything
downstream (chain decomposition, dimension formulas, sampling) dispatches on
the case classification computed here.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence


class InvalidSystemError(ValueError):
    """System parameters or transition matrix rejected at validation."""


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to converge."""


class CaseTag(str, Enum):
    """Partition of valid (p, q, a, b) into the four formula regimes."""

    NON_DIVISIBLE = "non_divisible"          # gcd(p,q) does not divide b-a
    DIVISIBLE_GENERAL = "divisible_general"  # p > 1, gcd | (b-a), p1 >= 2
    DIVISIBLE_DEGENERATE = "divisible_degenerate"  # p > 1, gcd | (b-a), p1 == 1
    CLASSICAL = "classical"                  # p == 1


def _ceil_div(num: int, den: int) -> int:
    # den > 0; works for negative num (true ceiling)
    return -((-num) // den)


@dataclass(frozen=True)
class TransitionMatrix:
    """Immutable binary m x m matrix with cached entry-sum powers.

    ``power_sum(k)`` returns the sum of all entries of the k-th matrix power
    as an exact integer; the cache is lock-guarded so concurrent readers see
    either a missing or a fully computed value.
    """

    rows: tuple[tuple[int, ...], ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False, compare=False
    )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "TransitionMatrix":
        m = len(rows)
        if m < 2:
            raise InvalidSystemError(f"alphabet size must be >= 2, got {m}")
        tup = []
        for r in rows:
            if len(r) != m:
                raise InvalidSystemError("transition matrix must be square")
            for e in r:
                if e not in (0, 1):
                    raise InvalidSystemError(f"matrix entries must be 0 or 1, got {e!r}")
            tup.append(tuple(int(e) for e in r))
        return cls(rows=tuple(tup))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.rows)

    @property
    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(r[j] for r in self.rows) for j in range(self.m))

    @property
    def entry_sum(self) -> int:
        return sum(self.row_sums)

    def all_row_sums_equal(self) -> bool:
        rs = self.row_sums
        return min(rs) == max(rs)

    def is_irreducible(self) -> bool:
        """True iff the digraph with edge i->j whenever rows[i][j] == 1 is
        strongly connected."""
        m = self.m
        fwd = [[j for j in range(m) if self.rows[i][j]] for i in range(m)]
        bwd = [[j for j in range(m) if self.rows[j][i]] for i in range(m)]

        def reaches_all(adj):
            seen = {0}
            stack = [0]
            while stack:
                for j in adj[stack.pop()]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            return len(seen) == m

        return reaches_all(fwd) and reaches_all(bwd)

    def is_primitive(self) -> bool:
        """True iff some power up to the Wielandt bound (m-1)^2 + 1 is
        entrywise positive."""
        m = self.m
        power = [list(r) for r in self.rows]
        for _ in range((m - 1) ** 2 + 1):
            if all(all(e > 0 for e in r) for r in power):
                return True
            power = _matmul(power, self.rows)
        return all(all(e > 0 for e in r) for r in power)

    def power_sum(self, k: int) -> int:
        """Exact sum of all entries of the k-th power (k = 0 gives m)."""
        if k < 0:
            raise ValueError(f"power must be >= 0, got {k}")
        cache = self._cache
        got = cache.get(k)
        if got is not None:
            return got
        with self._lock:
            sums = cache.get("sums")
            if sums is None:
                sums = [self.m]
                power = [[1 if i == j else 0 for j in range(self.m)] for i in range(self.m)]
                cache["sums"] = sums
                cache["power"] = power
            power = cache["power"]
            while len(sums) <= k:
                power = _matmul(power, self.rows)
                sums.append(sum(map(sum, power)))
            cache["power"] = power
            value = sums[k]
            cache[k] = value
        return value


def _matmul(a, b):
    n = len(a)
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def is_irreducible(matrix: TransitionMatrix) -> bool:
    return matrix.is_irreducible()


def is_primitive(matrix: TransitionMatrix) -> bool:
    return matrix.is_primitive()


def matrix_power_sum(matrix: TransitionMatrix, k: int) -> int:
    return matrix.power_sum(k)


@dataclass(frozen=True)
class AffineSystem:
    """A validated (p, q, a, b, matrix) tuple with derived arithmetic data."""

    p: int
    q: int
    a: int
    b: int
    matrix: TransitionMatrix
    d: int          # gcd(p, q)
    p1: int         # p / d
    q1: int         # q / d
    c: int | None   # (b - a) / d when divisible, else None
    case_tag: CaseTag

    @property
    def m(self) -> int:
        return self.matrix.m

    @property
    def k_min(self) -> int:
        """Smallest k for which both constrained positions are >= 1."""
        return max(1, _ceil_div(1 - self.a, self.p), _ceil_div(1 - self.b, self.q))

    @property
    def divisible(self) -> bool:
        return self.case_tag is not CaseTag.NON_DIVISIBLE

    def describe(self) -> str:
        return f"(p={self.p}, q={self.q}; a={self.a}, b={self.b}), m={self.m}"

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "matrix": [list(r) for r in self.matrix.rows],
            "p": self.p,
            "q": self.q,
            "a": self.a,
            "b": self.b,
        }


def validate_system(
    p: int, q: int, a: int, b: int, matrix: TransitionMatrix | Sequence[Sequence[int]]
) -> AffineSystem:
    """Build an AffineSystem, rejecting invalid parameters.

    Rejects p < 1, p >= q, alphabets smaller than 2, non-binary entries and
    reducible matrices.  Primitivity is not required here; operations that
    need it check on entry.
    """
    if not isinstance(matrix, TransitionMatrix):
        matrix = TransitionMatrix.from_rows(matrix)
    if p < 1:
        raise InvalidSystemError(f"need p >= 1, got p={p}")
    if p >= q:
        raise InvalidSystemError(f"need p < q, got p={p}, q={q}")
    if not matrix.is_irreducible():
        raise InvalidSystemError("transition matrix is reducible")
    d = math.gcd(p, q)
    p1, q1 = p // d, q // d
    divisible = (b - a) % d == 0
    c = (b - a) // d if divisible else None
    if p == 1:
        tag = CaseTag.CLASSICAL
    elif not divisible:
        tag = CaseTag.NON_DIVISIBLE
    elif p1 == 1:
        tag = CaseTag.DIVISIBLE_DEGENERATE
    else:
        tag = CaseTag.DIVISIBLE_GENERAL
    return AffineSystem(
        p=p, q=q, a=a, b=b, matrix=matrix, d=d, p1=p1, q1=q1, c=c, case_tag=tag
    )


def system_from_json_dict(data: dict) -> AffineSystem:
    """Parse the canonical JSON description of a system.

    Schema: {"m": int, "matrix": [[0/1, ...], ...], "p", "q", "a", "b"}.
    Unknown keys are rejected.
    """
    required = {"m", "matrix", "p", "q", "a", "b"}
    keys = set(data)
    if keys != required:
        unknown = sorted(keys - required)
        missing = sorted(required - keys)
        parts = []
        if unknown:
            parts.append(f"unknown keys {unknown}")
        if missing:
            parts.append(f"missing keys {missing}")
        raise InvalidSystemError("bad system description: " + ", ".join(parts))
    matrix = TransitionMatrix.from_rows(data["matrix"])
    if matrix.m != data["m"]:
        raise InvalidSystemError(
            f"declared m={data['m']} does not match matrix size {matrix.m}"
        )
    for key in ("p", "q", "a", "b"):
        if not isinstance(data[key], int) or isinstance(data[key], bool):
            raise InvalidSystemError(f"field {key!r} must be an integer")
    return validate_system(data["p"], data["q"], data["a"], data["b"], matrix)


def load_system(path: str) -> AffineSystem:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidSystemError(f"malformed JSON in {path}: {exc}") from exc
    return system_from_json_dict(data)


@dataclass(frozen=True)
class DimensionReport:
    """Result of a dimension computation plus its accuracy accounting.

    For series-based values the reported value underestimates the true sum
    by at most ``tail_bound``; closed forms carry tail_bound == 0.
    """

    value: float
    kind: str                      # "minkowski" or "hausdorff"
    case_tag: CaseTag
    truncation_index: int
    tail_bound: float
    tolerance: float
    notes: tuple[str, ...] = ()
    #: per-term diagnostics for series-based values, e.g. one entry per
    #: chain length in the divisible Hausdorff series
    contributions: tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        data = {
            "value": self.value,
            "kind": self.kind,
            "case": self.case_tag.value,
            "truncation_index": self.truncation_index,
            "tail_bound": self.tail_bound,
            "tolerance": self.tolerance,
            "notes": list(self.notes),
        }
        if self.contributions:
            data["contributions"] = [dict(c) for c in self.contributions]
        return data
