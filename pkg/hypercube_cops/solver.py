"""Exact cop numbers for small n by memoized minimax.

Positions are searched at cop half-moves as ``(robber mask, sorted cop
masks)``. Only cop moves inside the robber's set are generated: a cop
stepping outside it can never again lie below the robber, so such moves
are dominated by any in-set move. Transpositions are keyed on the orbit of
the position under relabelings of the robber's elements.
"""

import logging
import math
import time
from collections import Counter
from itertools import (
    combinations_with_replacement,
    permutations,
    product,
)
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
)

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from typing_extensions import Self

from hypercube_cops.bounds import lower_bound, trivial_upper_bound
from hypercube_cops.game import GameState
from hypercube_cops.utils import (
    BudgetExceeded,
    InvalidConfig,
    bit,
    check_ground_size,
    elements_of,
    full_mask,
    level_subsets,
    popcount,
)

logger = logging.getLogger(__name__)

CopTuple = Tuple[int, ...]
T = TypeVar("T")

PERMUTATION_CAP = 10
DEADLINE_CHECK_INTERVAL = 64


class CanonicalKey(NamedTuple):
    robber: int
    cops: CopTuple


class SolverBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_n: int = Field(default=6, ge=1, le=7)
    max_nodes: int = Field(default=20_000_000, ge=1)
    max_memo: int = Field(default=5_000_000, ge=1)
    seconds: Optional[float] = Field(default=None, gt=0)
    symmetry: bool = True
    permutation_cap: int = Field(default=PERMUTATION_CAP, ge=1)
    image_cap: Optional[int] = Field(default=None, ge=1)


def _refine_colors(elements: Sequence[int], cops: Sequence[int]) -> Dict[int, int]:
    """Colour elements by cop incidence until the partition is stable."""
    containing = {e: [cop for cop in cops if cop & bit(e)] for e in elements}
    colors = {e: len(containing[e]) for e in elements}
    classes = len(set(colors.values()))

    while True:
        signatures = {
            e: (
                colors[e],
                tuple(
                    sorted(
                        tuple(sorted(colors[x] for x in elements if cop & bit(x)))
                        for cop in containing[e]
                    )
                ),
            )
            for e in elements
        }
        ranking = {signature: rank for rank, signature in enumerate(sorted(set(signatures.values())))}
        colors = {e: ranking[signatures[e]] for e in elements}
        refined = len(ranking)
        if refined == classes:
            return colors
        classes = refined


def _image(elements: Sequence[int], cops: Sequence[int], order: Sequence[int]) -> CopTuple:
    relabel = {e: position for position, e in enumerate(order, start=1)}
    return tuple(
        sorted(
            sum(1 << (relabel[e] - 1) for e in elements if cop & bit(e))
            for cop in cops
        )
    )


def canonical_key(
    robber: int,
    cops: Sequence[int],
    permutation_cap: int = PERMUTATION_CAP,
    image_cap: Optional[int] = None,
) -> CanonicalKey:
    """Orbit representative of the position under relabeling of ``robber``.

    Elements are relabeled onto ``{1..|R|}``: colour classes first, then the
    minimum image over permutations of twin groups inside each class.

    With ``image_cap`` set and more arrangements than that, only the colour
    order is used. The key is then still an image of the position, so
    distinct orbits stay apart, but two members of one orbit may get
    different keys.
    """
    elements = elements_of(robber)
    size = len(elements)
    if not cops:
        return CanonicalKey(full_mask(size), ())

    if size > permutation_cap:
        error_message = f"Robber set of size {size} exceeds the permutation cap {permutation_cap}"
        raise BudgetExceeded(error_message)

    colors = _refine_colors(elements, cops)
    columns = {e: tuple(index for index, cop in enumerate(cops) if cop & bit(e)) for e in elements}

    classes: List[List[List[int]]] = []
    for color in sorted(set(colors.values())):
        twins: Dict[Tuple[int, ...], List[int]] = {}
        for e in elements:
            if colors[e] == color:
                twins.setdefault(columns[e], []).append(e)
        classes.append(list(twins.values()))

    arrangements = math.prod(math.factorial(len(groups)) for groups in classes)
    if image_cap is not None and arrangements > image_cap:
        order = [e for groups in classes for group in groups for e in group]
        return CanonicalKey(full_mask(size), _image(elements, cops, order))

    best = min(
        _image(elements, cops, [e for groups in arrangement for group in groups for e in group])
        for arrangement in product(*(permutations(groups) for groups in classes))
    )
    return CanonicalKey(full_mask(size), best)


def canonicalize(state: GameState, permutation_cap: int = PERMUTATION_CAP) -> CanonicalKey:
    return canonical_key(
        int(state.robber), [int(cop) for cop in state.cops], permutation_cap
    )


class GameSearch:
    """Memoized game-tree search for one ground-set size."""

    def __init__(self: Self, n: int, budget: Optional[SolverBudget] = None) -> None:
        check_ground_size(n)
        self.n = n
        self.half = n // 2
        self.even = n % 2 == 0
        self.budget = budget or SolverBudget()
        self.nodes = 0
        self.memo_hits = 0
        self._polls = 0
        self._memo: Dict[CanonicalKey, bool] = {}
        self._escape_memo: Dict[CanonicalKey, float] = {}
        self._deadline: Optional[float] = None
        self.restart_clock()

    def restart_clock(self: Self) -> None:
        seconds = self.budget.seconds
        self._deadline = None if seconds is None else time.monotonic() + seconds

    @property
    def memo_size(self: Self) -> int:
        return len(self._memo) + len(self._escape_memo)

    def key(self: Self, robber: int, cops: Sequence[int]) -> CanonicalKey:
        if self.budget.symmetry:
            return canonical_key(
                robber, cops, self.budget.permutation_cap, self.budget.image_cap
            )
        return CanonicalKey(robber, tuple(sorted(cops)))

    def round_of(self: Self, robber: int) -> int:
        return self.n - popcount(robber) + 1

    def _poll(self: Self) -> None:
        """Clock check, also called from the move enumerations inside one node."""
        self._polls += 1
        if (
            self._deadline is not None
            and self._polls % DEADLINE_CHECK_INTERVAL == 0
            and time.monotonic() > self._deadline
        ):
            error_message = f"Search exceeded {self.budget.seconds} seconds"
            raise BudgetExceeded(error_message)

    def _polled(self: Self, items: Iterable[T]) -> Iterator[T]:
        for item in items:
            self._poll()
            yield item

    def _tick(self: Self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            error_message = f"Search exceeded {self.budget.max_nodes} nodes"
            raise BudgetExceeded(error_message)
        self._poll()

    def _remember(
        self: Self, table: Dict[CanonicalKey, Any], key: CanonicalKey, value: Any
    ) -> None:
        if self.memo_size >= self.budget.max_memo:
            error_message = f"Transposition table reached {self.budget.max_memo} entries"
            raise BudgetExceeded(error_message)
        table[key] = value

    def greedy_escape(self: Self, survivors: int, first_round: int) -> bool:
        """Whether greedy deletions from ``first_round`` on are sure to evade everyone."""
        for i in range(first_round, self.half + 1):
            survivors -= -(-survivors * i // (self.n - i + 1))
            if survivors <= 0:
                return True
        return False

    def covered(self: Self, robber: int, cops: Sequence[int]) -> bool:
        """Whether distinct cops can be routed onto every level-h set under the robber."""
        targets = level_subsets(robber, self.half)
        if len(cops) < len(targets):
            return False

        rows, columns = [], []
        for row, target in enumerate(targets):
            for column, cop in enumerate(cops):
                if cop & ~target == 0:
                    rows.append(row)
                    columns.append(column)

        graph = csr_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, columns)),
            shape=(len(targets), len(cops)),
        )
        matching = maximum_bipartite_matching(graph, perm_type="column")
        return bool((matching >= 0).all())

    def _check_branching(self: Self, robber: int, cops: Sequence[int]) -> None:
        """Refuse a cop half-move whose joint options alone exceed the node budget."""
        branching = math.prod(
            math.comb(popcount(robber & ~cop) + count - 1, count)
            for cop, count in Counter(cops).items()
        )
        if branching > self.budget.max_nodes:
            error_message = f"A cop half-move has {branching} joint options, above the {self.budget.max_nodes} node budget"
            raise BudgetExceeded(error_message)

    def joint_moves(self: Self, robber: int, cops: Sequence[int]) -> List[CopTuple]:
        """Distinct resulting cop multisets, one per orbit, spread-out moves first."""
        self._check_branching(robber, cops)
        options: List[List[CopTuple]] = []
        for cop, count in sorted(Counter(cops).items()):
            free = elements_of(robber & ~cop)
            options.append([
                tuple(cop | bit(e) for e in chosen)
                for chosen in self._polled(combinations_with_replacement(free, count))
            ])

        seen: Dict[CanonicalKey, CopTuple] = {}
        for parts in product(*options):
            self._poll()
            moved = tuple(sorted(cop for part in parts for cop in part))
            seen.setdefault(self.key(robber, moved), moved)

        return sorted(seen.values(), key=lambda moved: -len(set(moved)))

    def survivors_after(self: Self, cops: Sequence[int], element: int) -> CopTuple:
        mask = bit(element)
        return tuple(cop for cop in cops if not cop & mask)

    def cops_win(self: Self, robber: int, cops: Sequence[int]) -> bool:
        """Value of a position with the cops to move."""
        self._tick()
        if not cops:
            return False

        k = self.round_of(robber)
        if k > self.half:
            return True
        if self.greedy_escape(len(cops), k):
            return False
        if self.covered(robber, cops):
            return True

        key = self.key(robber, cops)
        cached = self._memo.get(key)
        if cached is not None:
            self.memo_hits += 1
            return cached

        value = any(self.robber_loses(robber, moved) for moved in self.joint_moves(robber, cops))
        self._remember(self._memo, key, value)
        return value

    def robber_loses(self: Self, robber: int, cops: Sequence[int]) -> bool:
        """Value of a position with the robber to move."""
        self._tick()
        k = self.round_of(robber)
        tried = set()
        for element in elements_of(robber):
            survivors = self.survivors_after(cops, element)
            if k == self.half:
                if not survivors:
                    return False
                continue

            remaining = robber & ~bit(element)
            key = self.key(remaining, survivors)
            if key in tried:
                continue
            tried.add(key)
            if not self.cops_win(remaining, survivors):
                return False
        return True

    def robber_move_wins(self: Self, robber: int, cops: Sequence[int], element: int) -> bool:
        survivors = self.survivors_after(cops, element)
        if self.round_of(robber) == self.half:
            return not survivors
        return not self.cops_win(robber & ~bit(element), survivors)

    def escape_probability(self: Self, robber: int, cops: Sequence[int]) -> float:
        """Robber's winning chance against uniformly random in-set cop moves."""
        self._tick()
        if not cops:
            return 1.0

        k = self.round_of(robber)
        if k > self.half:
            return 0.0

        key = self.key(robber, cops)
        cached = self._escape_memo.get(key)
        if cached is not None:
            self.memo_hits += 1
            return cached

        value = sum(
            weight * self.best_escape(robber, moved)
            for moved, weight in self.uniform_outcomes(robber, cops)
        )
        self._remember(self._escape_memo, key, value)
        return value

    def best_escape(self: Self, robber: int, cops: Sequence[int]) -> float:
        return max(self.escape_after(robber, cops, element) for element in elements_of(robber))

    def escape_after(self: Self, robber: int, cops: Sequence[int], element: int) -> float:
        survivors = self.survivors_after(cops, element)
        if self.round_of(robber) == self.half:
            return 0.0 if survivors else 1.0
        return self.escape_probability(robber & ~bit(element), survivors)

    def uniform_outcomes(self: Self, robber: int, cops: Sequence[int]) -> Iterator[Tuple[CopTuple, float]]:
        """Resulting cop multisets with their probabilities, merged by orbit."""
        self._check_branching(robber, cops)
        options: List[List[Tuple[CopTuple, float]]] = []
        for cop, count in sorted(Counter(cops).items()):
            free = elements_of(robber & ~cop)
            group: List[Tuple[CopTuple, float]] = []
            for chosen in self._polled(combinations_with_replacement(free, count)):
                arrangements = math.factorial(count)
                for repeats in Counter(chosen).values():
                    arrangements //= math.factorial(repeats)
                weight = arrangements / len(free) ** count
                group.append((tuple(cop | bit(e) for e in chosen), weight))
            options.append(group)

        representatives: Dict[CanonicalKey, CopTuple] = {}
        weights: Dict[CanonicalKey, float] = {}
        for parts in product(*options):
            self._poll()
            moved = tuple(sorted(cop for part, _ in parts for cop in part))
            key = self.key(robber, moved)
            representatives.setdefault(key, moved)
            weights[key] = weights.get(key, 0.0) + math.prod(w for _, w in parts)

        for key, moved in representatives.items():
            yield moved, weights[key]

    def winning_joint_move(self: Self, robber: int, cops: Sequence[int]) -> Optional[List[int]]:
        """Per-cop elements, aligned with ``cops``, of a move the robber cannot beat."""
        self._check_branching(robber, cops)
        groups: Dict[int, List[int]] = {}
        for index, cop in enumerate(cops):
            groups.setdefault(cop, []).append(index)

        options = [
            list(self._polled(combinations_with_replacement(elements_of(robber & ~cop), len(indices))))
            for cop, indices in groups.items()
        ]
        tried = set()
        for parts in product(*options):
            self._poll()
            choices = [0] * len(cops)
            for indices, chosen in zip(groups.values(), parts):
                for index, element in zip(indices, chosen):
                    choices[index] = element

            moved = tuple(sorted(cop | bit(e) for cop, e in zip(cops, choices)))
            key = self.key(robber, moved)
            if key in tried:
                continue
            tried.add(key)
            if self.robber_loses(robber, moved):
                return choices
        return None


class SolveResult(BaseModel):
    n: int
    cop_number: Optional[int] = None
    win_table: Dict[int, Optional[bool]]
    unknown_from: Optional[int] = None
    nodes: int
    memo_hits: int
    memo_size: int
    elapsed_seconds: float

    @computed_field  # type: ignore[prop-decorator]
    @property
    def solved(self: Self) -> bool:
        return self.cop_number is not None


def _check_solvable(n: int, budget: SolverBudget) -> None:
    check_ground_size(n)
    if n > budget.max_n:
        error_message = f"Exact search is capped at n={budget.max_n}, got n={n}"
        raise InvalidConfig(error_message)


def cops_win_with(
    n: int,
    cop_count: int,
    budget: Optional[SolverBudget] = None,
    search: Optional[GameSearch] = None,
) -> bool:
    budget = budget or (search.budget if search else SolverBudget())
    _check_solvable(n, budget)
    search = search or GameSearch(n, budget)
    return search.cops_win(full_mask(n), (0,) * cop_count)


def cop_number_exact(
    n: int, max_cops: Optional[int] = None, budget: Optional[SolverBudget] = None
) -> SolveResult:
    budget = budget or SolverBudget()
    _check_solvable(n, budget)
    search = GameSearch(n, budget)
    started = time.monotonic()

    first = math.ceil(lower_bound(n))
    last = trivial_upper_bound(n) if max_cops is None else max_cops
    table: Dict[int, Optional[bool]] = {}
    cop_number = unknown_from = None

    for cop_count in range(first, last + 1):
        try:
            wins = cops_win_with(n, cop_count, search=search)
        except BudgetExceeded as exc:
            logger.warning("n=%d, C=%d left unknown: %s", n, cop_count, exc)
            table[cop_count] = None
            unknown_from = cop_count
            break

        table[cop_count] = wins
        logger.info("n=%d, C=%d: cops %s", n, cop_count, "win" if wins else "lose")
        if wins:
            cop_number = cop_count
            break

    return SolveResult(
        n=n,
        cop_number=cop_number,
        win_table=table,
        unknown_from=unknown_from,
        nodes=search.nodes,
        memo_hits=search.memo_hits,
        memo_size=search.memo_size,
        elapsed_seconds=time.monotonic() - started,
    )
