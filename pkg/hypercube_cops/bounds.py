"""Closed-form quantities of the levelled game.

Every product here is exact (``fractions.Fraction``). Floats only appear for
the constant P, logarithms and the exponential in the Chernoff reference.
Throughout, ``h = n // 2`` is the number of full rounds.
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import (
    Optional,
    Tuple,
)

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    PlainSerializer,
    computed_field,
    model_validator,
)
from typing_extensions import Annotated, Self

from hypercube_cops.utils import (
    DegenerateFactor,
    InvalidConfig,
    check_ground_size,
)

logger = logging.getLogger(__name__)

P_TERMS = 1_000_000
P_LIMIT = math.sinh(math.pi) / math.pi
EVEN_CONSTANT_FACTOR = 210.0
ODD_CONSTANT_FACTOR = 35.0 / 3.0
DEFAULT_SWITCH_OFFSET = 7


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


ExactRational = Annotated[
    Fraction, PlainSerializer(format_rational, return_type=str, when_used="always")
]


def _full_rounds(n: int, upto: int) -> int:
    check_ground_size(n)
    half = n // 2
    if not 0 <= upto <= half:
        error_message = f"Product index {upto} outside 0..{half} for n={n}"
        raise InvalidConfig(error_message)
    return half


def epsilon(k: int) -> Fraction:
    return Fraction(1, k**3)


def evasion_rate(n: int, k: int) -> Fraction:
    """Fraction ``k/(n-k+1)`` of survivors the robber can always evade on round k."""
    return Fraction(k, n - k + 1)


def lower_bound(n: int) -> Fraction:
    check_ground_size(n)
    half = n // 2
    if n % 2 == 0:
        return Fraction(2**half)
    return Fraction(math.comb(2 * half + 1, half + 1), 2**half)


def survival_product(n: int, upto: int) -> Fraction:
    _full_rounds(n, upto)
    product = Fraction(1)
    for i in range(1, upto + 1):
        product *= Fraction(n - 2 * i + 1, n - i + 1)
    return product


def inflated_factor(n: int, i: int) -> Fraction:
    return 1 - (1 + epsilon(i)) * evasion_rate(n, i)


def inflated_survival_product(n: int, upto: int) -> Fraction:
    _full_rounds(n, upto)
    product = Fraction(1)
    for i in range(1, upto + 1):
        factor = inflated_factor(n, i)
        if factor <= 0:
            raise DegenerateFactor(n, i, format_rational(factor))
        product *= factor
    return product


def survivor_floor(n: int, cop_count: int, k: int) -> Fraction:
    """Least possible survivor count at round ``k`` if no bad event preceded it."""
    return cop_count * inflated_survival_product(n, k - 1)


@lru_cache(maxsize=4)
def _cumulative_p(terms: int) -> npt.NDArray[np.float64]:
    index = np.arange(1, terms + 1, dtype=np.float64)
    return np.cumprod(1.0 + 1.0 / index**2)


def p_constant(terms: int = P_TERMS) -> float:
    """Partial product of ``1 + 1/i**2``; the limit is ``sinh(pi)/pi``."""
    if terms < 1:
        error_message = f"P needs at least one term, got {terms}"
        raise InvalidConfig(error_message)

    table = _cumulative_p(max(terms, P_TERMS))
    return float(table[terms - 1])


def theorem_constant(n: int, terms: int = P_TERMS) -> float:
    factor = EVEN_CONSTANT_FACTOR if n % 2 == 0 else ODD_CONSTANT_FACTOR
    return factor * p_constant(terms)


def recommended_cop_count(
    n: int, c_override: Optional[float] = None, terms: int = P_TERMS
) -> int:
    if n < 2:
        error_message = f"The randomized budget needs n >= 2, got {n}"
        raise InvalidConfig(error_message)

    c = theorem_constant(n, terms) if c_override is None else c_override
    half = n // 2
    if n % 2 == 0:
        return math.ceil(c * math.log(n) * 2**half)
    return math.ceil(c * math.log(n) * 2 ** (half + 1) / math.sqrt(n))


def chernoff_bk_bound(n: int, k: int, survivors: float) -> float:
    half = n // 2
    if not 1 <= k <= half:
        error_message = f"Round {k} outside 1..{half} for n={n}"
        raise InvalidConfig(error_message)
    if survivors < 0:
        error_message = f"Survivor count must be non-negative, got {survivors}"
        raise InvalidConfig(error_message)

    eps = 1.0 / k**3
    mu = survivors * k / (n - k + 1)
    return 2 * (n - k + 1) * math.exp(-(eps**2) * mu / 3)


def clamp_probability(value: float) -> float:
    return min(1.0, max(0.0, value))


def trivial_upper_bound(n: int) -> int:
    check_ground_size(n)
    return math.comb(n, (n + 1) // 2)


def switch_round(n: int, switch_offset: int) -> int:
    """First round played with chain commitments."""
    return max(1, n // 2 - switch_offset + 1)


def coverage_family_sizes(n: int, switch_offset: int) -> Tuple[int, int]:
    """Sizes of the level-h and level-(h+1) families under the robber at the switch."""
    half = n // 2
    robber_size = n - switch_round(n, switch_offset) + 1
    return math.comb(robber_size, half), math.comb(robber_size, half + 1)


class BoundReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    lower: ExactRational
    trivial_upper: int
    survival: ExactRational
    inflated_survival: Optional[ExactRational] = None
    degenerate_factor: Optional[int] = None
    constant: float
    constant_overridden: bool = False
    recommended: Optional[int] = None
    p_constant_estimate: float
    p_terms: int
    switch_offset: int
    target_family: int
    strike_family: Optional[int] = None

    @computed_field  # type: ignore[prop-decorator]
    @property
    def parity(self: Self) -> str:
        return "even" if self.n % 2 == 0 else "odd"

    @computed_field  # type: ignore[prop-decorator]
    @property
    def lower_ceiling(self: Self) -> int:
        return math.ceil(self.lower)

    @model_validator(mode="after")
    def _ordered(self: Self) -> Self:
        if self.lower > self.trivial_upper:
            error_message = f"Lower bound {self.lower} exceeds the covering bound {self.trivial_upper}"
            raise ValueError(error_message)

        if (
            self.recommended is not None
            and not self.constant_overridden
            and self.recommended < math.ceil(self.lower)
        ):
            error_message = f"Budget {self.recommended} is below the lower bound {self.lower}"
            raise ValueError(error_message)
        return self


def bound_report(
    n: int,
    c_override: Optional[float] = None,
    terms: int = P_TERMS,
    switch_offset: int = DEFAULT_SWITCH_OFFSET,
) -> BoundReport:
    half = n // 2
    try:
        inflated: Optional[Fraction] = inflated_survival_product(n, half)
        degenerate = None
    except DegenerateFactor as exc:
        logger.info("Inflated product for n=%d degenerates at factor %d", n, exc.index)
        inflated, degenerate = None, exc.index

    target_family, strike_family = coverage_family_sizes(n, switch_offset)
    return BoundReport(
        n=n,
        lower=lower_bound(n),
        trivial_upper=trivial_upper_bound(n),
        survival=survival_product(n, half),
        inflated_survival=inflated,
        degenerate_factor=degenerate,
        constant=theorem_constant(n, terms) if c_override is None else c_override,
        constant_overridden=c_override is not None,
        recommended=recommended_cop_count(n, c_override, terms) if n >= 2 else None,
        p_constant_estimate=p_constant(terms),
        p_terms=terms,
        switch_offset=switch_offset,
        target_family=target_family,
        strike_family=None if n % 2 == 0 else strike_family,
    )
