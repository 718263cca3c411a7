import math
from fractions import Fraction

import pytest
from pydantic import ValidationError

from hypercube_cops import (
    BoundReport,
    InvalidConfig,
    bound_report,
    chernoff_bk_bound,
    inflated_survival_product,
    lower_bound,
    p_constant,
    recommended_cop_count,
    survival_product,
    trivial_upper_bound,
)
from hypercube_cops.bounds import (
    P_LIMIT,
    clamp_probability,
    coverage_family_sizes,
    epsilon,
    evasion_rate,
    format_rational,
    survivor_floor,
    switch_round,
    theorem_constant,
)
from hypercube_cops.utils import DegenerateFactor


@pytest.mark.parametrize("half", range(1, 21))
def test_even_survival_telescopes(half: int) -> None:
    assert survival_product(2 * half, half) == Fraction(1, 2**half)


@pytest.mark.parametrize("half", range(1, 21))
def test_odd_survival_telescopes(half: int) -> None:
    expected = Fraction(2**half, math.comb(2 * half + 1, half + 1))
    assert survival_product(2 * half + 1, half) == expected


@pytest.mark.parametrize(
    ("n", "expected"),
    [
        pytest.param(2, Fraction(2), id="n=2"),
        pytest.param(4, Fraction(4), id="n=4"),
        pytest.param(6, Fraction(8), id="n=6"),
        pytest.param(5, Fraction(5, 2), id="n=5"),
        pytest.param(7, Fraction(35, 8), id="n=7"),
        pytest.param(1, Fraction(1), id="n=1"),
        pytest.param(3, Fraction(3, 2), id="n=3"),
    ],
)
def test_lower_bound(n: int, expected: Fraction) -> None:
    assert lower_bound(n) == expected


@pytest.mark.parametrize("n", range(1, 30))
def test_lower_bound_is_the_reciprocal_survival(n: int) -> None:
    assert lower_bound(n) * survival_product(n, n // 2) == 1
    assert math.ceil(lower_bound(n)) <= trivial_upper_bound(n)


def test_survival_product_range() -> None:
    assert survival_product(6, 0) == 1
    with pytest.raises(InvalidConfig):
        survival_product(6, 4)
    with pytest.raises(InvalidConfig):
        survival_product(6, -1)


def test_survival_product_single_factor() -> None:
    assert survival_product(10, 1) == Fraction(9, 10)


def test_inflated_product_is_below_the_exact_one() -> None:
    n = 40
    for upto in range(1, n // 2 + 1):
        assert inflated_survival_product(n, upto) < survival_product(n, upto)


def test_inflated_product_first_factor() -> None:
    assert inflated_survival_product(10, 1) == 1 - Fraction(2, 1) * Fraction(1, 10)
    assert epsilon(2) == Fraction(1, 8)
    assert evasion_rate(10, 2) == Fraction(2, 9)


def test_inflated_product_degenerates_at_small_n() -> None:
    with pytest.raises(DegenerateFactor) as error:
        inflated_survival_product(2, 1)
    assert error.value.index == 1
    assert error.value.n == 2
    assert inflated_survival_product(4, 2) == Fraction(1, 8)


def test_survivor_floor() -> None:
    assert survivor_floor(40, 100, 1) == 100
    assert survivor_floor(40, 100, 3) == 100 * inflated_survival_product(40, 2)


def test_p_constant() -> None:
    assert p_constant(1) == 2.0
    assert p_constant(2) == 2.5
    assert p_constant(10) < p_constant(1000) < P_LIMIT
    assert p_constant() == pytest.approx(P_LIMIT, rel=1e-5)


def test_p_constant_needs_a_term() -> None:
    with pytest.raises(InvalidConfig):
        p_constant(0)


def test_theorem_constant() -> None:
    assert theorem_constant(20) == pytest.approx(210 * P_LIMIT, rel=1e-5)
    assert theorem_constant(21) == pytest.approx(35 / 3 * P_LIMIT, rel=1e-5)


def test_recommended_cop_count() -> None:
    assert recommended_cop_count(20) > 1_000_000
    assert recommended_cop_count(8, c_override=1.0) == math.ceil(math.log(8) * 16)
    assert recommended_cop_count(9, c_override=1.0) == math.ceil(math.log(9) * 32 / 3)
    with pytest.raises(InvalidConfig):
        recommended_cop_count(1)


def test_chernoff_reference() -> None:
    assert chernoff_bk_bound(10, 1, 0) == 20
    assert chernoff_bk_bound(10, 1, 1e6) < chernoff_bk_bound(10, 1, 1e3)
    assert clamp_probability(chernoff_bk_bound(10, 1, 10)) == 1.0
    with pytest.raises(InvalidConfig):
        chernoff_bk_bound(10, 6, 10)
    with pytest.raises(InvalidConfig):
        chernoff_bk_bound(10, 1, -1)


@pytest.mark.parametrize(
    ("n", "expected"),
    [
        pytest.param(4, 6, id="n=4"),
        pytest.param(5, 10, id="n=5"),
        pytest.param(8, 70, id="n=8"),
    ],
)
def test_trivial_upper_bound(n: int, expected: int) -> None:
    assert trivial_upper_bound(n) == expected


def test_switch_and_families() -> None:
    assert switch_round(16, 7) == 2
    assert switch_round(8, 7) == 1
    assert coverage_family_sizes(30, 7) == (math.comb(22, 15), math.comb(22, 16))
    assert coverage_family_sizes(8, 7) == (70, 56)


def test_bound_report_serializes_exact_values() -> None:
    report = bound_report(5)
    payload = report.model_dump(mode="json")
    assert payload["lower"] == "5/2"
    assert payload["lower_ceiling"] == 3
    assert payload["parity"] == "odd"
    assert payload["trivial_upper"] == 10
    assert payload["strike_family"] is not None
    assert format_rational(Fraction(3)) == "3/1"


def test_bound_report_records_degenerate_factor() -> None:
    report = bound_report(2)
    assert report.inflated_survival is None
    assert report.degenerate_factor == 1
    assert report.recommended is not None
    assert report.recommended >= report.lower_ceiling


def test_bound_report_with_override() -> None:
    report = bound_report(10, c_override=0.1)
    assert report.constant_overridden
    assert report.constant == 0.1


def test_bound_report_of_single_element() -> None:
    report = bound_report(1)
    assert report.recommended is None
    assert report.survival == 1


def test_bound_report_orders_bounds() -> None:
    payload = dict(bound_report(4))
    payload.update({"lower": Fraction(7), "trivial_upper": 6})
    with pytest.raises(ValidationError):
        BoundReport(**payload)


def test_bound_report_rejects_a_budget_below_the_lower_bound() -> None:
    payload = {**dict(bound_report(4)), "recommended": 1}
    with pytest.raises(ValidationError, match="below the lower bound"):
        BoundReport(**payload)
    assert BoundReport(**{**payload, "constant_overridden": True}).recommended == 1
