"""Minkowski (box) dimension: closed forms, rigorous series truncation, and
exact admissible-pattern counts over finite windows.

The divisible closed form is a series over matrix power sums; it is summed
in high precision and truncated once a matrix-independent geometric tail
bound drops below the requested tolerance.  Window pattern counts multiply
one exact power-sum factor per chain, which the enumeration oracle checks
against raw constraint counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .core import AffineSystem, CaseTag, DimensionReport, InvalidSystemError, TransitionMatrix
from .lattice import Census, empirical_census

_DPS = 40


@dataclass(frozen=True)
class SeriesEvaluation:
    """Truncated power-sum series sum_{i} log_m |A^{i-1}| / q1^{i+1}.

    tail_bound dominates the omitted terms via log_m |A^{i-1}| <= i + 1 and
    an arithmetic-geometric closed form, so it is rigorous for every binary
    matrix and shrinks monotonically as terms_used grows.
    """

    partial_sum: float
    terms_used: int
    tail_bound: float
    log_base: int


def series_tail_bound(upto_i: int, q1: int, d: int) -> Fraction:
    """Exact bound on ((q1-1)^2/d) * sum_{i > upto_i} log_m |A^{i-1}| / q1^{i+1}."""
    N = upto_i
    if N < 1:
        raise ValueError("truncation index must be >= 1")
    return Fraction(1, d) * Fraction(1, q1**N) * ((N + 2) - Fraction(N + 1, q1))


def _series_value(matrix: TransitionMatrix, q1: int, d: int, tol: float, first_i: int):
    """Sum ((q1-1)^2/d) * sum_{i >= first_i} log_m |A^{i-1}| / q1^{i+1} until
    the tail bound is <= tol.  Returns (value_mpf, N, tail_bound)."""
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    m = matrix.m
    with mp.workdps(_DPS):
        log_m = mp.log(m)
        coeff = mp.mpf((q1 - 1) ** 2) / d
        total = mp.mpf(0)
        i = first_i
        while True:
            total += mp.log(matrix.power_sum(i - 1)) / log_m / mp.mpf(q1) ** (i + 1)
            tail = series_tail_bound(i, q1, d)
            if tail <= tol:
                return coeff * total, i, tail
            i += 1


def dimension_nondivisible(sys: AffineSystem) -> DimensionReport:
    """Closed form 1 - 2/q + log_m |A| / q for the non-divisible case."""
    if sys.case_tag is not CaseTag.NON_DIVISIBLE:
        raise InvalidSystemError(
            f"non-divisible formula called on {sys.case_tag.value} system"
        )
    value = 1 - 2 / sys.q + math.log2(sys.matrix.entry_sum) / math.log2(sys.m) / sys.q
    return DimensionReport(
        value=value,
        kind="minkowski",
        case_tag=sys.case_tag,
        truncation_index=0,
        tail_bound=0.0,
        tolerance=0.0,
    )


def dimension_divisible(sys: AffineSystem, tol: float = 1e-8) -> DimensionReport:
    """Series form for any system whose gcd divides b - a (this covers the
    classical p = 1 and the degenerate p1 = 1 regimes as well: the count of
    window patterns depends only on d and q1)."""
    if not sys.divisible:
        raise InvalidSystemError("divisible formula called on a non-divisible system")
    d, q1 = sys.d, sys.q1
    const = 1 - Fraction(2 * q1 - 1, d * q1**2)
    series, N, tail = _series_value(sys.matrix, q1, d, tol, first_i=2)
    with mp.workdps(_DPS):
        value = float(mp.mpf(const.numerator) / const.denominator + series)
    return DimensionReport(
        value=value,
        kind="minkowski",
        case_tag=sys.case_tag,
        truncation_index=N,
        tail_bound=float(tail),
        tolerance=tol,
    )


def dimension_classical(q: int, matrix: TransitionMatrix, tol: float = 1e-8) -> DimensionReport:
    """Series (q-1)^2 sum_{i>=1} log_m |A^{i-1}| / q^{i+1} for ratio-q systems."""
    if q < 2:
        raise InvalidSystemError(f"classical ratio must be >= 2, got {q}")
    series, N, tail = _series_value(matrix, q, 1, tol, first_i=1)
    return DimensionReport(
        value=float(series),
        kind="minkowski",
        case_tag=CaseTag.CLASSICAL,
        truncation_index=N,
        tail_bound=float(tail),
        tolerance=tol,
    )


def dimension(sys: AffineSystem, tol: float = 1e-8) -> DimensionReport:
    """Minkowski dimension of the system, dispatching on its case."""
    if sys.case_tag is CaseTag.NON_DIVISIBLE:
        return dimension_nondivisible(sys)
    return dimension_divisible(sys, tol)


def series_evaluation(sys: AffineSystem, tol: float = 1e-8) -> SeriesEvaluation:
    """The truncated divisible-case series with its rigorous tail bound."""
    if not sys.divisible:
        raise InvalidSystemError("the power-sum series belongs to the divisible case")
    series, N, tail = _series_value(sys.matrix, sys.q1, sys.d, tol, first_i=2)
    return SeriesEvaluation(
        partial_sum=float(series), terms_used=N, tail_bound=float(tail), log_base=sys.m
    )


def pattern_count_exact(
    n: int, sys: AffineSystem, census: Census | None = None
) -> int:
    """Exact number of admissible window patterns on {1, ..., n}.

    Each chain with j window members contributes a factor |A^{j-1}|
    (singletons contribute m); irreducibility, enforced at validation,
    guarantees every chain word extends past the window.
    """
    if census is None:
        census = empirical_census(n, sys)
    count = 1
    for j, cnt in census.D.items():
        count *= sys.matrix.power_sum(j - 1) ** cnt
    return count


def empirical_dimension(n: int, sys: AffineSystem, census: Census | None = None) -> float:
    """log_m of the exact window pattern count divided by n, accumulated in
    log space so that large windows avoid astronomically large integers."""
    if census is None:
        census = empirical_census(n, sys)
    log2_m = math.log2(sys.m)
    total = sum(cnt * math.log2(sys.matrix.power_sum(j - 1)) for j, cnt in census.D.items())
    return total / (n * log2_m)
