import math
import random
from fractions import Fraction

import pytest

from affdim import InvalidSystemError, NumericalError, TransitionMatrix, chain_density, validate_system
from affdim import minkowski
from affdim.hausdorff import (
    chain_potential,
    comparison_gap,
    dimension,
    dimension_classical,
    dimension_degenerate,
    dimension_divisible,
    dimension_nondivisible,
    power_fixed_point,
)
from conftest import BATTERY, FULL2, GOLDEN, random_irreducible, sys_full, sys_golden

# root of x^3 = x + 1; the golden-matrix ratio-2 fixed point is (r^2, r)
PLASTIC = 1.3247179572447460


def explicit_pair_potential(matrix, w1: Fraction, w2: Fraction) -> float:
    """Closed form for length-2 chains: sum_x a_x^(w2/(w1+w2))."""
    e = float(w2 / (w1 + w2))
    return sum(r**e for r in matrix.row_sums)


def explicit_triple_potential(matrix, w1: Fraction, w2: Fraction, w3: Fraction) -> float:
    """Closed form for length-3 chains via the inner sum
    F(x) = sum_y a_{x,y} a_y^(w3/(w2+w3)), potential sum_{x,y} a_{x,y}
    a_y^(w3/(w2+w3)) F(x)^(-w1/(w1+w2+w3))."""
    m = matrix.m
    rows = matrix.rows
    sums = matrix.row_sums
    e_in = float(w3 / (w2 + w3))
    e_out = float(w1 / (w1 + w2 + w3))
    total = 0.0
    for x in range(m):
        F = sum(rows[x][y] * sums[y] ** e_in for y in range(m))
        for y in range(m):
            if rows[x][y]:
                total += sums[y] ** e_in * F ** (-e_out)
    return total


class TestFixedPoint:
    def test_golden_ratio_two(self, golden):
        fp = power_fixed_point(golden, 2, tol=1e-12)
        assert fp.values[1] == pytest.approx(PLASTIC, abs=1e-12)
        assert fp.values[0] == pytest.approx(PLASTIC**2, abs=1e-12)
        assert fp.residual <= 1e-12
        assert fp.iterations <= 200

    def test_full_matrix_symmetric(self, full2):
        fp = power_fixed_point(full2, 2, tol=1e-12)
        assert fp.values[0] == pytest.approx(2.0, abs=1e-12)
        assert fp.values[1] == pytest.approx(2.0, abs=1e-12)

    def test_rejects_non_primitive(self):
        swap = TransitionMatrix.from_rows([[0, 1], [1, 0]])
        with pytest.raises(InvalidSystemError, match="primitive"):
            power_fixed_point(swap, 2)

    def test_residual_budget_random(self):
        rng = random.Random(5)
        for _ in range(12):
            m = rng.choice((2, 3, 4, 6, 8))
            q = rng.choice((2, 3, 4, 6))
            mat = random_irreducible(m, rng, primitive=True)
            fp = power_fixed_point(mat, q, tol=1e-12)
            assert fp.residual <= 1e-12
            assert fp.iterations <= 200
            assert all(1.0 <= t <= m ** (1.0 / (q - 1)) + 1e-12 for t in fp.values)

    def test_divergence_budget_error(self, golden):
        with pytest.raises(NumericalError):
            power_fixed_point(golden, 2, tol=1e-12, max_iterations=3)


class TestNonDivisible:
    def test_golden_value(self):
        report = dimension_nondivisible(sys_golden(2, 4, 0, 1))
        expect = 1 - 0.5 - 0.25 + 0.5 * math.log2(math.sqrt(2) + 1)
        assert report.value == pytest.approx(expect, abs=1e-14)

    def test_full_is_one(self):
        assert dimension_nondivisible(sys_full(2, 4, 0, 1)).value == pytest.approx(1.0, abs=1e-12)

    def test_sits_below_box_dimension(self):
        h = dimension_nondivisible(sys_golden(2, 4, 0, 1)).value
        mk = minkowski.dimension_nondivisible(sys_golden(2, 4, 0, 1)).value
        assert h < mk


class TestClassical:
    def test_golden_ratio_two(self):
        report = dimension_classical(sys_golden(1, 2, 0, 0), tol=1e-12)
        expect = 0.5 * math.log2(PLASTIC**2 + PLASTIC)
        assert report.value == pytest.approx(expect, abs=1e-12)

    def test_offset_invariance(self):
        base = dimension_classical(sys_golden(1, 2, 0, 0), tol=1e-12).value
        for a, b in ((1, 0), (5, -3), (-2, 7)):
            assert dimension_classical(sys_golden(1, 2, a, b), tol=1e-12).value == base

    def test_full_is_one(self):
        assert dimension_classical(sys_full(1, 2, 0, 0)).value == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_classical(self):
        with pytest.raises(InvalidSystemError):
            dimension_classical(sys_golden(2, 3, 0, 0))


class TestChainPotential:
    def test_pair_closed_form_golden(self):
        s = sys_golden(2, 3, 0, 0)
        pot = chain_potential(2, s)
        assert pot.value == pytest.approx(2 ** (4 / 7) + 1, abs=1e-13)
        assert pot.weight() == Fraction(7, 54)

    def test_cumulative_weights_decrease(self):
        s = sys_golden(4, 6, 1, 3)
        for i in (2, 3, 5, 8):
            pot = chain_potential(i, s)
            assert all(a > b > 0 for a, b in zip(pot.S, pot.S[1:]))
            assert 1.0 <= pot.value <= s.m**i

    @pytest.mark.parametrize("pqab", [(2, 3, 0, 0), (4, 6, 1, 3), (3, 5, 1, 2)])
    def test_matches_explicit_forms_random_matrices(self, pqab):
        s_ref = sys_golden(*pqab)
        rng = random.Random(93)
        for _ in range(20):
            mat = random_irreducible(rng.choice((2, 3)), rng)
            s = validate_system(*pqab, mat)
            w = [chain_density(i, j, s) for i, j in ((2, 1), (2, 2))]
            pot2 = chain_potential(2, s)
            assert pot2.value == pytest.approx(
                explicit_pair_potential(mat, *w), abs=1e-12
            )
            w3 = [chain_density(3, j, s) for j in (1, 2, 3)]
            pot3 = chain_potential(3, s)
            assert pot3.value == pytest.approx(
                explicit_triple_potential(mat, *w3), abs=1e-12
            )
        assert s_ref.case_tag.value == "divisible_general"

    def test_equal_row_sums_reach_entropy_bound(self, full2):
        # with every row sum equal the weighted-power bound is an equality
        s = validate_system(2, 3, 0, 0, FULL2)
        for i in range(2, 7):
            pot = chain_potential(i, s)
            bound = sum(
                float(chain_density(i, k, s)) * math.log2(s.matrix.power_sum(k - 1))
                for k in range(1, i + 1)
            ) / float(pot.weight())
            assert pot.log_value() == pytest.approx(bound, abs=1e-10)

    def test_hoelder_level_bound_random(self):
        rng = random.Random(55)
        s_base = (2, 3, 0, 0)
        for _ in range(15):
            mat = random_irreducible(rng.choice((2, 3)), rng)
            s = validate_system(*s_base, mat)
            for i in (2, 3, 4):
                pot = chain_potential(i, s)
                bound = sum(
                    float(chain_density(i, k, s)) * math.log2(mat.power_sum(k - 1))
                    for k in range(1, i + 1)
                ) / (float(pot.weight()) * math.log2(mat.m))
                assert pot.log_value() <= bound + 1e-12

    def test_rejects_wrong_case_and_length(self):
        with pytest.raises(InvalidSystemError):
            chain_potential(2, sys_golden(1, 2, 0, 0))
        with pytest.raises(ValueError):
            chain_potential(1, sys_golden(2, 3, 0, 0))


class TestDivisibleGeneral:
    def test_golden_two_three(self):
        report = dimension_divisible(sys_golden(2, 3, 0, 0), tol=1e-10)
        # constant term 1/3 plus the first chain contribution
        assert float(chain_density(1, 1, sys_golden(2, 3, 0, 0))) == pytest.approx(1 / 3)
        first = (7 / 54) * math.log2(2 ** (4 / 7) + 1)
        assert first == pytest.approx(0.170310386583, abs=1e-10)
        assert report.value == pytest.approx(0.868793066945, abs=2e-9)
        assert report.tail_bound <= 1e-10

    def test_full_matrix_is_one(self):
        report = dimension_divisible(sys_full(2, 3, 0, 0), tol=1e-11)
        assert report.value == pytest.approx(1.0, abs=1e-9)

    def test_below_box_dimension(self):
        h = dimension_divisible(sys_golden(2, 3, 0, 0), tol=1e-10).value
        mk = minkowski.dimension(sys_golden(2, 3, 0, 0), tol=1e-10).value
        assert mk - h >= 1e-4

    def test_rejects_degenerate(self):
        with pytest.raises(InvalidSystemError, match="degenerate"):
            dimension_divisible(sys_golden(2, 4, 0, 0))


class TestDegenerate:
    def test_golden_examples(self):
        classical = dimension_classical(sys_golden(1, 2, 0, 0), tol=1e-12).value
        r240 = dimension_degenerate(sys_golden(2, 4, 0, 0), tol=1e-12)
        assert r240.value == pytest.approx(0.5 + classical / 2, abs=1e-12)
        r363 = dimension_degenerate(sys_golden(3, 6, 0, 3), tol=1e-12)
        assert r363.value == pytest.approx(2 / 3 + classical / 3, abs=1e-12)

    def test_exceeds_literal_series_value(self):
        s = sys_golden(2, 4, 0, 0)
        report = dimension_degenerate(s, tol=1e-12)
        literal = float(1 - Fraction(1, 2) - Fraction(1, 4) + Fraction(1, 4))
        assert literal == 0.5
        assert report.value > literal
        assert any("degenerates" in note for note in report.notes)

    def test_full_is_one(self):
        assert dimension_degenerate(sys_full(2, 4, 0, 0)).value == pytest.approx(1.0, abs=1e-12)


class TestDispatchAndGap:
    def test_dispatch_routes_every_case(self):
        for pqab in BATTERY:
            report = dimension(sys_golden(*pqab), tol=1e-9)
            assert report.kind == "hausdorff"
            assert 0.0 <= report.value <= 1.0

    def test_golden_gaps(self):
        _, _, gap241 = comparison_gap(sys_golden(2, 4, 0, 1))
        assert gap241 == pytest.approx(0.0104639736, abs=1e-9)
        _, _, gap12 = comparison_gap(sys_golden(1, 2, 0, 0))
        assert gap12 == pytest.approx(0.0129231429, abs=1e-6)

    def test_full_matrix_gap_vanishes(self):
        for pqab in BATTERY:
            _, _, gap = comparison_gap(sys_full(*pqab), tol=1e-10)
            assert abs(gap) <= 1e-9

    def test_random_battery_ordering(self):
        rng = random.Random(17)
        for _ in range(25):
            mat = random_irreducible(rng.choice((2, 3)), rng, primitive=True)
            pqab = BATTERY[rng.randrange(len(BATTERY))]
            _, _, gap = comparison_gap(validate_system(*pqab, mat), tol=1e-10)
            assert gap >= -1e-9
