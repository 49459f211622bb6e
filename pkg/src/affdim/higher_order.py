"""Superlinear higher-order constraints and why they cost no dimension.

A higher-order system adds, for each k, a forbidden-word condition over the
positions (p*k+a, q*k+b, f_1(k), ..., f_l(k)) with every f growing like
k^s, s > 1.  The fraction of a window touched by complete higher-order
constraints then vanishes (at rate n^(1/s - 1) log n), so both dimensions
coincide with those of the pairwise system obtained by projecting the
forbidden set.  This module computes the measured and bound densities and
the small-window count gap.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import AffineSystem, InvalidSystemError, TransitionMatrix, validate_system
from .oracle import brute_force_count


@dataclass(frozen=True)
class GrowthMap:
    """Strictly increasing position map with a declared growth exponent."""

    fn: Callable[[int], int]
    exponent: float
    label: str

    def __post_init__(self):
        if self.exponent <= 1:
            raise InvalidSystemError(
                f"growth exponent must exceed 1, got {self.exponent} for {self.label}"
            )
        # Numerical check of the declared order: f(k)/k^s bounded above and
        # below by positive constants on a sparse grid up to 10^6, and f
        # strictly increasing with f(k) >= k on the dense low range.
        prev = 0
        for k in range(1, 200):
            v = self.fn(k)
            if v <= prev:
                raise InvalidSystemError(f"{self.label} is not strictly increasing at k={k}")
            if v < k:
                raise InvalidSystemError(f"{self.label} must satisfy f(k) >= k, got f({k})={v}")
            prev = v
        ratios = [self.fn(k) / k**self.exponent for k in (1, 10, 100, 1_000, 10_000, 100_000, 1_000_000)]
        if min(ratios) <= 0 or max(ratios) / min(ratios) > 1e6:
            raise InvalidSystemError(
                f"{self.label} does not look like order k^{self.exponent}: "
                f"ratio range {min(ratios):.3g}..{max(ratios):.3g}"
            )

    def count_upto(self, n: int) -> int:
        """#{k >= 1 : fn(k) <= n} (a prefix of N by monotonicity)."""
        if self.fn(1) > n:
            return 0
        lo, hi = 1, 1
        while self.fn(hi) <= n:
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.fn(mid) <= n:
                lo = mid
            else:
                hi = mid
        return lo


_POWER_RE = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?k\s*\^\s*(\d+(?:\.\d+)?)\s*$")


def parse_growth(text: str) -> GrowthMap:
    """Parse "k^2" or "3*k^2" into a GrowthMap."""
    match = _POWER_RE.match(text)
    if not match:
        raise InvalidSystemError(
            f"cannot parse growth map {text!r}; expected forms like 'k^2' or '2*k^3'"
        )
    coeff = int(match.group(1) or 1)
    exponent = float(match.group(2))
    if exponent == int(exponent):
        exp_i = int(exponent)
        fn = lambda k, c=coeff, e=exp_i: c * k**e  # noqa: E731 - exact integers
    else:
        fn = lambda k, c=coeff, e=exponent: c * math.ceil(k**e)  # noqa: E731
    return GrowthMap(fn=fn, exponent=exponent, label=text.strip())


@dataclass(frozen=True)
class HigherOrderSystem:
    """Base affine system plus forbidden words over l extra positions."""

    base: AffineSystem
    forbidden: frozenset[tuple[int, ...]]
    growth_maps: tuple[GrowthMap, ...]

    def __post_init__(self):
        arity = len(self.growth_maps) + 2
        for word in self.forbidden:
            if len(word) != arity:
                raise InvalidSystemError(
                    f"forbidden words must have length {arity}, got {word}"
                )
            if any(not 0 <= v < self.base.m for v in word):
                raise InvalidSystemError(f"letters out of range in forbidden word {word}")

    @property
    def order(self) -> int:
        return len(self.growth_maps)


def projected_pair_matrix(hos: HigherOrderSystem) -> TransitionMatrix:
    """Pair matrix of the comparison baseline: (u, v) is forbidden exactly
    when every completion over the extra positions lies in the forbidden set."""
    m = hos.base.m
    ell = hos.order
    rows = []
    for u in range(m):
        row = []
        for v in range(m):
            if ell == 0:
                allowed = (u, v) not in hos.forbidden
            else:
                completions = _all_words(m, ell)
                allowed = any((u, v) + w not in hos.forbidden for w in completions)
            row.append(1 if allowed else 0)
        rows.append(row)
    return TransitionMatrix.from_rows(rows)


def _all_words(m: int, length: int) -> list[tuple[int, ...]]:
    words = [()]
    for _ in range(length):
        words = [w + (v,) for w in words for v in range(m)]
    return words


def baseline_system(hos: HigherOrderSystem) -> AffineSystem:
    """The pairwise system the higher-order dimensions collapse to."""
    base = hos.base
    return validate_system(base.p, base.q, base.a, base.b, projected_pair_matrix(hos))


def affected_density(n: int, hos: HigherOrderSystem) -> tuple[float, float]:
    """(measured, bound) for the window fraction touched by extra constraints.

    measured = 2 * #{k <= n : some f_i(k) <= n} * log_q1(n) / n; the bound
    replaces the count by sum_i n^(1/s_i).  Both vanish as n grows since
    every s_i > 1.
    """
    if n < hos.base.q1:
        raise ValueError(f"need n >= q1 = {hos.base.q1}, got {n}")
    if hos.order == 0:
        return 0.0, 0.0
    log_q1 = math.log(n) / math.log(hos.base.q1)
    touched = max(min(g.count_upto(n), n) for g in hos.growth_maps)
    measured = 2.0 * touched * log_q1 / n
    bound = 2.0 * sum(n ** (1.0 / g.exponent) for g in hos.growth_maps) * log_q1 / n
    return measured, bound


def window_tuples(n: int, hos: HigherOrderSystem) -> list[tuple[int, ...]]:
    """Constraint position tuples fully inside {1, ..., n}."""
    base = hos.base
    out = []
    k = base.k_min
    while True:
        u, v = base.p * k + base.a, base.q * k + base.b
        if u > n:
            break
        positions = (u, v) + tuple(g.fn(k) for g in hos.growth_maps)
        if max(positions) <= n:
            out.append(positions)
        k += 1
    return out


def dim_gap_empirical(n: int, hos: HigherOrderSystem) -> float:
    """|log_m count_with - log_m count_without| / n over the window.

    Both counts run on the projected pairwise baseline; the "with" count
    additionally enforces every higher-order constraint that fits inside the
    window.  Zero extra constraints give a gap of exactly zero.
    """
    base = baseline_system(hos)
    extras = [(pos, hos.forbidden) for pos in window_tuples(n, hos)]
    without = brute_force_count(n, base).count
    if not extras:
        return 0.0
    with_ho = brute_force_count(n, base, extra_constraints=extras).count
    return abs(math.log2(with_ho) - math.log2(without)) / (n * math.log2(base.m))
