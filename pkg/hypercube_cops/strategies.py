import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import (
    Any,
    ClassVar,
    Dict,
    NamedTuple,
    Optional,
    Type,
    Union,
)

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
)
from typing_extensions import Self

from hypercube_cops.bounds import DEFAULT_SWITCH_OFFSET, switch_round
from hypercube_cops.game import (
    Elements,
    GameConfig,
    GameState,
    Phase,
    evasion_counts,
)
from hypercube_cops.solver import GameSearch, SolverBudget
from hypercube_cops.utils import (
    IllegalMove,
    InvalidConfig,
    elements_of,
    level_subsets,
)

logger = logging.getLogger(__name__)

DEFAULT_EXHAUSTIVE_CAP = 12
LOOKAHEAD_MOVE_SECONDS = 60.0
LOOKAHEAD_NODES = 2_000_000
LOOKAHEAD_IMAGE_CAP = 120


class CopKind(str, Enum):
    UNIFORM = "uniform"
    CHAIN = "chain"
    PAPER = "paper"
    COVER = "cover"
    SOLVER = "solver"


class RobberKind(str, Enum):
    GREEDY = "greedy"
    RANDOM = "random"
    LOOKAHEAD = "lookahead"


class LookaheadModel(str, Enum):
    MINIMAX = "minimax"
    EXPECTIMAX = "expectimax"


class CopMove(NamedTuple):
    choices: Elements
    commitments: Optional[Elements] = None


def _parse_error(text: str, reason: str) -> InvalidConfig:
    return InvalidConfig(f"Cannot parse strategy {text!r}: {reason}")


class CopStrategySpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: CopKind
    switch_offset: int = Field(default=DEFAULT_SWITCH_OFFSET, ge=1)
    capped: bool = False

    @classmethod
    def parse(cls: Type[Self], text: str) -> Self:
        name, _, option = text.strip().partition(":")
        try:
            kind = CopKind(name)
        except ValueError as exc:
            raise _parse_error(text, f"unknown cop strategy {name!r}") from exc

        if not option:
            return cls(kind=kind)

        if kind is CopKind.PAPER and option.startswith("t="):
            try:
                return cls(kind=kind, switch_offset=int(option[2:]))
            except ValueError as exc:
                raise _parse_error(text, "switch offset must be a positive integer") from exc

        if kind is CopKind.COVER and option == "capped":
            return cls(kind=kind, capped=True)

        raise _parse_error(text, f"unknown option {option!r}")

    def __str__(self: Self) -> str:
        if self.kind is CopKind.PAPER:
            return f"paper:t={self.switch_offset}"
        if self.kind is CopKind.COVER and self.capped:
            return "cover:capped"
        return self.kind.value

    def build(self: Self) -> "CopStrategy":
        return _COP_STRATEGIES[self.kind](self)


class RobberStrategySpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: RobberKind
    model: LookaheadModel = LookaheadModel.MINIMAX
    exhaustive_cap: int = Field(default=DEFAULT_EXHAUSTIVE_CAP, ge=1, le=64)

    @classmethod
    def parse(cls: Type[Self], text: str) -> Self:
        name, _, option = text.strip().partition(":")
        try:
            kind = RobberKind(name)
        except ValueError as exc:
            raise _parse_error(text, f"unknown robber strategy {name!r}") from exc

        if not option:
            return cls(kind=kind)

        if kind is RobberKind.LOOKAHEAD:
            try:
                return cls(kind=kind, model=LookaheadModel(option))
            except ValueError as exc:
                raise _parse_error(text, f"unknown lookahead model {option!r}") from exc

        raise _parse_error(text, f"unknown option {option!r}")

    def __str__(self: Self) -> str:
        if self.kind is RobberKind.LOOKAHEAD:
            return f"lookahead:{self.model.value}"
        return self.kind.value

    def build(self: Self, cop_model: Optional[CopStrategySpec] = None) -> "RobberStrategy":
        if self.kind is RobberKind.LOOKAHEAD:
            return LookaheadRobber(self, cop_model)
        return _ROBBER_STRATEGIES[self.kind](self)


class CopStrategy(ABC):
    randomized: ClassVar[bool] = True

    def __init__(self: Self, spec: CopStrategySpec) -> None:
        self.spec = spec

    @property
    def name(self: Self) -> str:
        return str(self.spec)

    def check(self: Self, config: GameConfig) -> None:
        """Reject configurations the strategy cannot play."""

    def uniform_rounds(self: Self, config: GameConfig) -> int:
        """Number of leading rounds played with uniformly random growth."""
        return 0

    @abstractmethod
    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> CopMove:
        raise NotImplementedError


class RobberStrategy(ABC):
    randomized: ClassVar[bool] = False

    def __init__(self: Self, spec: RobberStrategySpec) -> None:
        self.spec = spec

    @property
    def name(self: Self) -> str:
        return str(self.spec)

    def check(self: Self, config: GameConfig) -> None:
        """Reject configurations the strategy cannot play."""

    @abstractmethod
    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> int:
        raise NotImplementedError


def _require_phase(state: GameState, phase: Phase) -> None:
    if state.phase is not phase:
        error_message = f"Expected the {phase.value} half-move, state is in {state.phase.value}"
        raise IllegalMove(error_message)


def _holdings(state: GameState, elements: Elements) -> Any:
    shifts = (elements - 1).astype(np.uint64)
    return ((state.cops[:, np.newaxis] >> shifts) & np.uint64(1)).astype(bool)


def uniform_cop_moves(state: GameState, rng: np.random.Generator) -> Elements:
    """Each surviving cop adds a uniformly random element of ``R - S``."""
    _require_phase(state, Phase.COPS)
    elements = np.asarray(elements_of(state.robber), dtype=np.int64)
    free = ~_holdings(state, elements)
    options = free.sum(axis=1)
    if (options == 0).any():
        error_message = f"A cop already holds the whole robber set on round {state.round}"
        raise IllegalMove(error_message)

    ranks = rng.integers(0, options) if len(options) else options
    position = np.cumsum(free, axis=1) - 1
    picked = free & (position == ranks[:, np.newaxis])
    return elements[np.argmax(picked, axis=1)] if len(options) else options


def make_chain_commitments(state: GameState, rng: np.random.Generator) -> Elements:
    """Row ``i``: a uniformly random chain from cop ``i``'s set to a level-h set under R.

    Uniform over targets and uniform over orderings, which is the same as
    uniform over maximal chains since every target has ``|A - S|!`` of them.
    """
    _require_phase(state, Phase.COPS)
    length = state.config.full_rounds - state.cop_level
    elements = np.asarray(elements_of(state.robber), dtype=np.int64)
    if length > len(elements) - state.cop_level:
        error_message = f"No level-{state.config.full_rounds} target is reachable on round {state.round}"
        raise IllegalMove(error_message)

    keys = rng.random((state.survivors, len(elements)))
    keys[_holdings(state, elements)] = np.inf
    order = np.argsort(keys, axis=1, kind="stable")[:, :length]
    return elements[order]


def chain_cop_moves(state: GameState) -> Elements:
    _require_phase(state, Phase.COPS)
    paths = state.committed_paths
    if paths is None or paths.shape[1] == 0:
        error_message = f"No committed chain left on round {state.round}"
        raise IllegalMove(error_message)
    return paths[:, 0].copy()


class UniformCops(CopStrategy):
    def uniform_rounds(self: Self, config: GameConfig) -> int:
        return config.full_rounds

    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> CopMove:
        return CopMove(uniform_cop_moves(state, rng))


class PaperCops(CopStrategy):
    """Uniform growth, then chains committed ``switch_offset`` rounds before the middle."""

    def first_chain_round(self: Self, config: GameConfig) -> int:
        return switch_round(config.n, self.spec.switch_offset)

    def uniform_rounds(self: Self, config: GameConfig) -> int:
        return min(config.full_rounds, self.first_chain_round(config) - 1)

    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> CopMove:
        if state.round < self.first_chain_round(state.config):
            return CopMove(uniform_cop_moves(state, rng))

        if state.committed_paths is None:
            paths = make_chain_commitments(state, rng)
            return CopMove(paths[:, 0].copy(), paths)

        return CopMove(chain_cop_moves(state))


class ChainCops(PaperCops):
    def first_chain_round(self: Self, config: GameConfig) -> int:
        return 1


class FullCoverCops(CopStrategy):
    """Cop ``i`` walks to the ``i``-th level-h set (cyclically), in ascending order."""

    randomized = False

    def check(self: Self, config: GameConfig) -> None:
        needed = len(level_subsets((1 << config.n) - 1, config.full_rounds))
        if config.cop_count < needed and not self.spec.capped:
            error_message = f"Covering level {config.full_rounds} of the {config.n}-cube needs {needed} cops, got {config.cop_count}"
            raise InvalidConfig(error_message)

    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> CopMove:
        if state.committed_paths is not None:
            return CopMove(chain_cop_moves(state))

        config = state.config
        targets = np.asarray(
            [elements_of(target) for target in level_subsets(config.ground, config.full_rounds)],
            dtype=np.int64,
        )
        paths = targets[state.cop_ids % len(targets), state.cop_level :]
        return CopMove(paths[:, 0].copy(), paths)


class SolverCops(CopStrategy):
    """Plays a move the exact search proves winning, else each cop's smallest option."""

    randomized = False

    def __init__(self: Self, spec: CopStrategySpec, budget: Optional[SolverBudget] = None) -> None:
        super().__init__(spec)
        self.budget = budget or SolverBudget()
        self._searches: Dict[int, GameSearch] = {}

    def check(self: Self, config: GameConfig) -> None:
        if config.n > self.budget.max_n:
            error_message = f"Solver cops are capped at n={self.budget.max_n}, got n={config.n}"
            raise InvalidConfig(error_message)

    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> CopMove:
        _require_phase(state, Phase.COPS)
        search = self._searches.setdefault(state.config.n, GameSearch(state.config.n, self.budget))
        search.restart_clock()
        cops = [int(cop) for cop in state.cops]
        choices = search.winning_joint_move(int(state.robber), cops)
        if choices is None:
            choices = [elements_of(state.robber & ~cop)[0] for cop in cops]
        return CopMove(np.asarray(choices, dtype=np.int64))


def paper_cop_strategy(spec: CopStrategySpec) -> CopStrategy:
    return spec.build()


def full_cover_strategy(config: GameConfig, capped: bool = False) -> CopStrategy:
    strategy = FullCoverCops(CopStrategySpec(kind=CopKind.COVER, capped=capped))
    strategy.check(config)
    return strategy


def greedy_guarantee(state: GameState) -> int:
    """Cops a greedy deletion is sure to evade: ``ceil(N k / (n-k+1))``."""
    k = state.round
    return -(-state.survivors * k // (state.config.n - k + 1))


def greedy_robber_choice(state: GameState) -> int:
    """Delete the element held by the most surviving cops, smallest on ties.

    On the last even-n move an unoccupied destination, if any, wins outright
    and is preferred.
    """
    _require_phase(state, Phase.ROBBER)
    counts = evasion_counts(state)
    members = list(state.robber.members)
    config = state.config

    if config.even and state.round == config.full_rounds:
        occupied = {int(cop) for cop in state.cops}
        free = [e for e in members if int(state.robber.without(e)) not in occupied]
        if free:
            members = free

    return max(members, key=lambda e: (counts[e - 1], -e))


def lookahead_robber_choice(
    state: GameState,
    search: GameSearch,
    model: LookaheadModel = LookaheadModel.MINIMAX,
) -> int:
    """Best deletion by exhaustive search; ties go to the greedier, then smaller element.

    Under the minimax model the deletions are tried in greedy order and the
    first winning one is played, so a position with no winning deletion gets
    the greedy deletion.
    """
    _require_phase(state, Phase.ROBBER)
    robber = int(state.robber)
    cops = [int(cop) for cop in state.cops]
    counts = evasion_counts(state)
    ranked = sorted(state.robber.members, key=lambda e: (-counts[e - 1], e))

    if model is LookaheadModel.MINIMAX:
        winning = (e for e in ranked if search.robber_move_wins(robber, cops, e))
        return next(winning, None) or greedy_robber_choice(state)

    scores = {e: search.escape_after(robber, cops, e) for e in ranked}
    return max(ranked, key=lambda e: scores[e])


class GreedyRobber(RobberStrategy):
    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> int:
        return greedy_robber_choice(state)


class RandomRobber(RobberStrategy):
    randomized = True

    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> int:
        return int(rng.choice(state.robber.members))


class LookaheadRobber(RobberStrategy):
    def __init__(
        self: Self,
        spec: RobberStrategySpec,
        cop_model: Optional[CopStrategySpec] = None,
        budget: Optional[SolverBudget] = None,
    ) -> None:
        super().__init__(spec)
        self.cop_model = cop_model
        self.budget = budget or SolverBudget(
            max_nodes=LOOKAHEAD_NODES,
            seconds=LOOKAHEAD_MOVE_SECONDS,
            permutation_cap=spec.exhaustive_cap,
            image_cap=LOOKAHEAD_IMAGE_CAP,
        )
        self._searches: Dict[int, GameSearch] = {}

    def check(self: Self, config: GameConfig) -> None:
        if config.n > self.spec.exhaustive_cap:
            error_message = f"Lookahead is capped at n={self.spec.exhaustive_cap}, got n={config.n}"
            raise InvalidConfig(error_message)

        uniform = self.cop_model is not None and self.cop_model.kind is CopKind.UNIFORM
        if self.spec.model is LookaheadModel.EXPECTIMAX and not uniform:
            error_message = "Expectimax lookahead needs the uniform cop strategy as its declared model"
            raise InvalidConfig(error_message)

    def __call__(self: Self, state: GameState, rng: np.random.Generator) -> int:
        n = state.config.n
        search = self._searches.get(n)
        if search is None or search.memo_size > self.budget.max_memo // 2:
            search = self._searches[n] = GameSearch(n, self.budget)
        search.nodes = 0
        search.restart_clock()
        return lookahead_robber_choice(state, search, self.spec.model)


_COP_STRATEGIES: Dict[CopKind, Type[CopStrategy]] = {
    CopKind.UNIFORM: UniformCops,
    CopKind.CHAIN: ChainCops,
    CopKind.PAPER: PaperCops,
    CopKind.COVER: FullCoverCops,
    CopKind.SOLVER: SolverCops,
}

_ROBBER_STRATEGIES: Dict[RobberKind, Type[RobberStrategy]] = {
    RobberKind.GREEDY: GreedyRobber,
    RobberKind.RANDOM: RandomRobber,
}


def as_cop_spec(value: Union[str, CopStrategySpec]) -> CopStrategySpec:
    return CopStrategySpec.parse(value) if isinstance(value, str) else value


def as_robber_spec(value: Union[str, RobberStrategySpec]) -> RobberStrategySpec:
    return RobberStrategySpec.parse(value) if isinstance(value, str) else value


def as_cop_strategy(value: Union[str, CopStrategySpec, CopStrategy]) -> CopStrategy:
    if isinstance(value, CopStrategy):
        return value
    return as_cop_spec(value).build()


def as_robber_strategy(
    value: Union[str, RobberStrategySpec, RobberStrategy],
    cop_model: Optional[CopStrategySpec] = None,
) -> RobberStrategy:
    if isinstance(value, RobberStrategy):
        return value
    return as_robber_spec(value).build(cop_model)
