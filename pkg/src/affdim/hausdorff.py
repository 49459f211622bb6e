"""Hausdorff dimension of affine multiplicative subshifts.

Four regimes: a closed form when gcd(p,q) does not divide b-a; a series of
chain potentials when it does and p1 >= 2; a fixed-point vector when p = 1;
and a sublattice reduction when p > 1 but p1 = 1 (where the series formula
degenerates, see ``dimension_degenerate``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    AffineSystem,
    CaseTag,
    DimensionReport,
    InvalidSystemError,
    NumericalError,
    TransitionMatrix,
)
from . import minkowski
from .lattice import chain_density, weighted_extra_census_tail


@dataclass(frozen=True)
class FixedPointVector:
    """Positive solution of t_i^exponent = sum_j a_{i,j} t_j."""

    values: tuple[float, ...]
    exponent: int
    residual: float
    iterations: int

    @property
    def total(self) -> float:
        return sum(self.values)


def power_fixed_point(
    matrix: TransitionMatrix,
    exponent: int,
    tol: float = 1e-13,
    max_iterations: int = 200,
) -> FixedPointVector:
    """Iterate t <- (A t)^(1/exponent) componentwise from all-ones.

    The map is monotone on the positive cone and converges to the unique
    positive fixed point for primitive matrices; non-convergence within the
    iteration budget is a hard error.
    """
    if exponent < 2:
        raise InvalidSystemError(f"fixed-point exponent must be >= 2, got {exponent}")
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if not matrix.is_primitive():
        raise InvalidSystemError("fixed-point vector requires a primitive matrix")
    m = matrix.m
    rows = matrix.rows
    t = [1.0] * m
    inv = 1.0 / exponent

    def residual_of(vec):
        return max(
            abs(vec[i] ** exponent - sum(rows[i][j] * vec[j] for j in range(m)))
            for i in range(m)
        )

    for iteration in range(1, max_iterations + 1):
        nxt = [sum(rows[i][j] * t[j] for j in range(m)) ** inv for i in range(m)]
        step = max(abs(nxt[i] - t[i]) for i in range(m))
        t = nxt
        if step < tol / 10:
            res = residual_of(t)
            if res < tol:
                return FixedPointVector(
                    values=tuple(t), exponent=exponent, residual=res, iterations=iteration
                )
    raise NumericalError(
        f"fixed-point iteration did not reach residual {tol} in {max_iterations} steps"
    )


def dimension_nondivisible(sys: AffineSystem) -> DimensionReport:
    """Closed form 1 - 1/p - 1/q + log_m(sum_i a_i^(p/q)) / p."""
    if sys.case_tag is not CaseTag.NON_DIVISIBLE:
        raise InvalidSystemError(
            f"non-divisible formula called on {sys.case_tag.value} system"
        )
    ratio = sys.p / sys.q
    total = sum(r**ratio for r in sys.matrix.row_sums)
    value = 1 - 1 / sys.p - 1 / sys.q + math.log2(total) / math.log2(sys.m) / sys.p
    return DimensionReport(
        value=value,
        kind="hausdorff",
        case_tag=sys.case_tag,
        truncation_index=0,
        tail_bound=0.0,
        tolerance=0.0,
    )


def dimension_classical(sys: AffineSystem, tol: float = 1e-10) -> DimensionReport:
    """Fixed-point form ((q-1)/q) log_m(sum_i t_i) for p = 1; the offsets a, b
    do not enter."""
    if sys.case_tag is not CaseTag.CLASSICAL:
        raise InvalidSystemError(f"classical formula called on {sys.case_tag.value} system")
    fp = power_fixed_point(sys.matrix, sys.q, tol=min(tol, 1e-12))
    value = (sys.q - 1) / sys.q * math.log2(fp.total) / math.log2(sys.m)
    return DimensionReport(
        value=value,
        kind="hausdorff",
        case_tag=sys.case_tag,
        truncation_index=0,
        tail_bound=0.0,
        tolerance=tol,
        notes=(f"fixed-point residual {fp.residual:.3e} after {fp.iterations} iterations",),
    )


@dataclass(frozen=True)
class ChainPotential:
    """Backward dynamic program over one chain of full length i.

    S[k] holds the cumulative weight sum_{j>k} chain_density(i, j+1)
    (S[0] = S_1 > ... > S_{i-1} = S_i > 0, exact rationals).  Level values
    u[k][x] aggregate admissible continuations below level k+1; the chain
    potential ``value`` normalizes the induced optimal measure, and
    log_m(value) weighted by S_1 is that measure's entropy payoff.
    """

    i: int
    S: tuple[Fraction, ...]
    exponents: tuple[float, ...]   # exponents[k] = S_{k+2} / S_{k+1}, last one 0
    u: tuple[tuple[float, ...], ...]
    value: float
    log_base: int
    matrix_rows: tuple[tuple[int, ...], ...]

    def log_value(self) -> float:
        return math.log2(self.value) / math.log2(self.log_base)

    def weight(self) -> Fraction:
        """Total density weight S_1 = sum_j chain_density(i, j)."""
        return self.S[0]

    def first_letter_probs(self) -> tuple[float, ...]:
        e = self.exponents[0]
        return tuple(ux**e / self.value for ux in self.u[0])

    def transition_probs(self, level: int) -> tuple[tuple[float, ...], ...]:
        """Transition matrix from letters at ``level`` (1-based) to the next."""
        if not 1 <= level <= self.i - 1:
            raise ValueError(f"level must be in [1, {self.i - 1}], got {level}")
        rows = []
        e = self.exponents[level]
        u_here = self.u[level - 1]
        u_next = self.u[level]
        for x in range(self.log_base):
            row = []
            for y in range(self.log_base):
                if self.matrix_rows[x][y]:
                    row.append(u_next[y] ** e / u_here[x])
                else:
                    row.append(0.0)
            rows.append(tuple(row))
        return tuple(rows)


def chain_potential(i: int, sys: AffineSystem) -> ChainPotential:
    """Potential of the entropy-optimal measure on chains of full length i.

    Computed by a backward pass: u at the deepest level is all ones, each
    higher level sums admissible continuations raised to the ratio of
    consecutive cumulative weights, and the potential is the top-level sum
    raised to S_2/S_1.  All quantities stay >= 1, so the pass is stable.
    """
    if sys.case_tag is not CaseTag.DIVISIBLE_GENERAL:
        raise InvalidSystemError(
            f"chain potentials require the divisible-general case, got {sys.case_tag.value}"
        )
    if i < 2:
        raise ValueError(f"chain potential is defined for lengths >= 2, got {i}")
    m = sys.m
    rows = sys.matrix.rows
    densities = [chain_density(i, j, sys) for j in range(1, i + 1)]
    S = []
    acc = Fraction(0)
    for dens in reversed(densities):
        acc += dens
        S.append(acc)
    S.reverse()  # S[k] = S_{k+1} in 1-based terms
    exponents = [float(S[k + 1] / S[k]) for k in range(i - 1)] + [0.0]

    u_levels = [None] * i
    u_levels[i - 1] = tuple(1.0 for _ in range(m))
    for level in range(i - 2, -1, -1):
        e = exponents[level + 1]
        below = u_levels[level + 1]
        u_levels[level] = tuple(
            sum(below[y] ** e for y in range(m) if rows[x][y]) for x in range(m)
        )
    value = sum(ux ** exponents[0] for ux in u_levels[0])
    return ChainPotential(
        i=i,
        S=tuple(S),
        exponents=tuple(exponents),
        u=tuple(u_levels),
        value=value,
        log_base=m,
        matrix_rows=rows,
    )


def dimension_divisible(sys: AffineSystem, tol: float = 1e-8) -> DimensionReport:
    """Series of weighted chain-potential logs for the divisible-general case.

    Truncated once the exact tail bound sum_{i>N} sum_j (j+1) * density
    drops below the tolerance (each omitted term is at most that row sum).
    """
    if sys.case_tag is not CaseTag.DIVISIBLE_GENERAL:
        raise InvalidSystemError(
            f"divisible-general series called on {sys.case_tag.value} system; "
            "degenerate systems use the sublattice reduction"
        )
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    base = chain_density(1, 1, sys)
    total = float(base)
    i = 2
    contributions = []
    while True:
        pot = chain_potential(i, sys)
        weight = float(pot.weight())
        term = weight * pot.log_value()
        total += term
        contributions.append(
            {"i": i, "weight": weight, "t_phi": pot.value, "contribution": term}
        )
        tail = weighted_extra_census_tail(i, sys)
        if tail <= tol:
            break
        i += 1
    return DimensionReport(
        value=total,
        kind="hausdorff",
        case_tag=sys.case_tag,
        truncation_index=i,
        tail_bound=float(weighted_extra_census_tail(i, sys)),
        tolerance=tol,
        contributions=tuple(contributions),
    )


def dimension_degenerate(sys: AffineSystem, tol: float = 1e-10) -> DimensionReport:
    """Sublattice reduction for p > 1 with p1 = 1.

    Positions in the progression {p*k + a} carry a ratio-q1 system while all
    other positions are free: value = (1 - 1/p) + dim_ratio_q1 / p.  The
    divisible-general series is NOT used here: with p1 = 1 all its chain
    densities beyond the singleton vanish and the series would return only
    the singleton weight, strictly below the reduction value.
    """
    if sys.case_tag is not CaseTag.DIVISIBLE_DEGENERATE:
        raise InvalidSystemError(
            f"degenerate reduction called on {sys.case_tag.value} system"
        )
    fp = power_fixed_point(sys.matrix, sys.q1, tol=min(tol, 1e-12))
    ratio_dim = (sys.q1 - 1) / sys.q1 * math.log2(fp.total) / math.log2(sys.m)
    value = (1 - 1 / sys.p) + ratio_dim / sys.p
    literal = 1 - Fraction(1, sys.p) - Fraction(1, sys.q) + Fraction(1, sys.d * sys.p1 * sys.q1)
    return DimensionReport(
        value=value,
        kind="hausdorff",
        case_tag=sys.case_tag,
        truncation_index=0,
        tail_bound=0.0,
        tolerance=tol,
        notes=(
            f"sublattice reduction: embedded ratio-{sys.q1} dimension {ratio_dim:.12f}",
            f"literal divisible series degenerates to {literal} = {float(literal):.12f}; "
            "reduction value used instead",
        ),
    )


def dimension(sys: AffineSystem, tol: float = 1e-8) -> DimensionReport:
    """Hausdorff dimension, dispatching on the case classification."""
    if sys.case_tag is CaseTag.NON_DIVISIBLE:
        return dimension_nondivisible(sys)
    if sys.case_tag is CaseTag.CLASSICAL:
        return dimension_classical(sys, tol)
    if sys.case_tag is CaseTag.DIVISIBLE_DEGENERATE:
        return dimension_degenerate(sys, tol)
    return dimension_divisible(sys, tol)


def comparison_gap(
    sys: AffineSystem, tol: float = 1e-10
) -> tuple[DimensionReport, DimensionReport, float]:
    """Both dimensions and their gap; the Hausdorff value never exceeds the
    Minkowski value, with equality exactly when all row sums agree."""
    h = dimension(sys, tol)
    mk = minkowski.dimension(sys, tol)
    return h, mk, mk.value - h.value
