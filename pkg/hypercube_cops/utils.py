from itertools import combinations
from typing import (
    Iterable,
    Iterator,
    List,
)

MAX_GROUND_SIZE = 64


class InvalidConfig(ValueError):
    pass


class IllegalMove(ValueError):
    pass


class StrategyError(RuntimeError):
    def __init__(self, strategy: str, round_: int, cause: IllegalMove) -> None:
        self.strategy = strategy
        self.round = round_
        self.cause = cause
        super().__init__(f"Strategy {strategy!r} made an illegal move on round {round_}: {cause}")


class BudgetExceeded(RuntimeError):
    pass


class DegenerateFactor(ArithmeticError):
    def __init__(self, n: int, index: int, factor: object) -> None:
        self.n = n
        self.index = index
        self.factor = factor
        super().__init__(f"Inflated survival factor {index} for n={n} is not positive: {factor}")


class DiagnosticsUnavailable(InvalidConfig):
    pass


class InvalidAttribute(AttributeError):
    pass


def bit(element: int) -> int:
    """Mask of the single ground element ``element`` (1-based)."""
    return 1 << (element - 1)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for element in elements:
        mask |= bit(element)
    return mask


def iter_elements(mask: int) -> Iterator[int]:
    """Yield the members of ``mask`` in increasing order."""
    element = 1
    while mask:
        if mask & 1:
            yield element
        mask >>= 1
        element += 1


def elements_of(mask: int) -> List[int]:
    return list(iter_elements(mask))


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def level_subsets(ground: int, size: int) -> List[int]:
    """All ``size``-element subsets of ``ground``, lexicographic in members."""
    return [mask_of(chosen) for chosen in combinations(elements_of(ground), size)]


def check_ground_size(n: int) -> None:
    if n < 1:
        error_message = f"Ground set size must be positive, got {n}"
        raise InvalidConfig(error_message)

    if n > MAX_GROUND_SIZE:
        error_message = f"Ground set size {n} exceeds the engine cap of {MAX_GROUND_SIZE}"
        raise InvalidConfig(error_message)
