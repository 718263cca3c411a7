import logging
import operator
from enum import Enum
from typing import (
    Any,
    Optional,
    Sequence,
    Tuple,
    Type,
    Union,
)

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)
from typing_extensions import Self

from hypercube_cops.utils import (
    IllegalMove,
    bit,
    check_ground_size,
    full_mask,
    mask_of,
)
from hypercube_cops.vertex import VertexSet

logger = logging.getLogger(__name__)

CopMasks = npt.NDArray[np.uint64]
CopIds = npt.NDArray[np.int64]
Elements = npt.NDArray[np.int64]


def _frozen(array: npt.NDArray[Any]) -> npt.NDArray[Any]:
    array.flags.writeable = False
    return array


def element_bits(elements: Elements) -> CopMasks:
    shifts = (np.asarray(elements, dtype=np.int64) - 1).astype(np.uint64)
    return np.left_shift(np.uint64(1), shifts)


class Winner(str, Enum):
    COPS = "cops"
    ROBBER = "robber"


class Phase(str, Enum):
    COPS = "cops"
    ROBBER = "robber"
    STRIKE = "strike"
    OVER = "over"


class GameConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    cop_count: int = Field(default=0, ge=0)

    @field_validator("n")
    @classmethod
    def ground_size(cls: Type[Self], value: int) -> int:
        check_ground_size(value)
        return value

    @computed_field  # type: ignore[prop-decorator]
    @property
    def middle(self: Self) -> int:
        """Capture level and capture round, ``ceil(n/2)``."""
        return (self.n + 1) // 2

    @property
    def full_rounds(self: Self) -> int:
        """Rounds with both a cop and a robber half-move, ``floor(n/2)``."""
        return self.n // 2

    @property
    def even(self: Self) -> bool:
        return self.n % 2 == 0

    @property
    def ground(self: Self) -> VertexSet:
        return VertexSet(full_mask(self.n))


class Outcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    winner: Winner
    final_robber: VertexSet
    capture_round: Optional[int] = None

    @model_validator(mode="after")
    def _capture_round_matches(self: Self) -> Self:
        if self.winner is Winner.COPS and self.capture_round is None:
            error_message = "A cop win must record its capture round"
            raise ValueError(error_message)
        if self.winner is Winner.ROBBER and self.capture_round is not None:
            error_message = "A robber win has no capture round"
            raise ValueError(error_message)
        return self

    @classmethod
    def decide(
        cls: Type[Self], config: GameConfig, robber: int, caught: bool
    ) -> Self:
        if caught:
            return cls(
                winner=Winner.COPS,
                final_robber=VertexSet(robber),
                capture_round=config.middle,
            )
        return cls(winner=Winner.ROBBER, final_robber=VertexSet(robber))


class ChainCommitment(BaseModel):
    model_config = ConfigDict(frozen=True)

    target: VertexSet
    remaining: Tuple[int, ...]

    @field_validator("remaining")
    @classmethod
    def distinct(cls: Type[Self], value: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(set(value)) != len(value):
            error_message = f"Chain {value} repeats an element"
            raise ValueError(error_message)
        return value


class GameState(BaseModel):
    """Observable position at a half-move boundary.

    ``cops`` holds the surviving cop sets, ``cop_ids`` their original
    indices (ascending). ``committed_paths`` row ``i`` is the element
    schedule of cop ``i`` for the remaining rounds, column 0 being the
    element of the next cop half-move.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    config: GameConfig
    round: int
    phase: Phase
    robber: VertexSet
    cops: CopMasks
    cop_ids: CopIds
    committed_paths: Optional[Elements] = None

    @property
    def survivors(self: Self) -> int:
        return len(self.cops)

    @property
    def cop_sets(self: Self) -> Tuple[VertexSet, ...]:
        return tuple(VertexSet(int(cop)) for cop in self.cops)

    @property
    def cop_level(self: Self) -> int:
        if self.phase is Phase.COPS or self.phase is Phase.STRIKE:
            return self.round - 1
        return self.round

    def commitment(self: Self, index: int) -> ChainCommitment:
        if self.committed_paths is None:
            error_message = "No chain commitments in this state"
            raise LookupError(error_message)

        remaining = tuple(int(element) for element in self.committed_paths[index])
        target = int(self.cops[index]) | mask_of(remaining)
        return ChainCommitment(target=VertexSet(target), remaining=remaining)

    def with_commitments(self: Self, paths: Elements) -> "GameState":
        if self.phase is not Phase.COPS:
            error_message = "Chains can only be committed before a cop half-move"
            raise IllegalMove(error_message)

        length = self.config.full_rounds - self.cop_level
        paths = np.asarray(paths, dtype=np.int64).reshape(self.survivors, length)
        return self.model_copy(update={"committed_paths": _frozen(paths.copy())})


def new_game(config: GameConfig) -> GameState:
    phase = Phase.COPS if config.full_rounds >= 1 else Phase.STRIKE
    return GameState(
        config=config,
        round=1,
        phase=phase,
        robber=config.ground,
        cops=_frozen(np.zeros(config.cop_count, dtype=np.uint64)),
        cop_ids=_frozen(np.arange(config.cop_count, dtype=np.int64)),
    )


def apply_cop_moves(
    state: GameState, choices: Union[Sequence[int], Elements]
) -> GameState:
    """Every surviving cop gains one element.

    Cops whose new set leaves the robber's set are evaded on the spot.
    """
    if state.phase is not Phase.COPS:
        error_message = f"Cops cannot move during the {state.phase.value} half-move"
        raise IllegalMove(error_message)

    chosen = np.asarray(choices, dtype=np.int64)
    if chosen.shape != (state.survivors,):
        error_message = f"Expected {state.survivors} cop choices, got {chosen.shape}"
        raise IllegalMove(error_message)

    n = state.config.n
    outside = (chosen < 1) | (chosen > n)
    if outside.any():
        offender = int(np.argmax(outside))
        error_message = f"Cop {int(state.cop_ids[offender])} chose {int(chosen[offender])}, outside 1..{n}"
        raise IllegalMove(error_message)

    bits = element_bits(chosen)
    repeated = (state.cops & bits) != 0
    if repeated.any():
        offender = int(np.argmax(repeated))
        error_message = f"Cop {int(state.cop_ids[offender])} already holds element {int(chosen[offender])}"
        raise IllegalMove(error_message)

    moved = state.cops | bits
    beyond_robber = np.uint64(full_mask(n) & ~state.robber)
    keep = (moved & beyond_robber) == 0

    paths = state.committed_paths
    if paths is not None:
        paths = _frozen(paths[keep, 1:]) if paths.shape[1] > 1 else None

    if not keep.all():
        logger.debug(
            "Round %d: %d cops stepped outside the robber set",
            state.round,
            int((~keep).sum()),
        )

    return state.model_copy(
        update={
            "phase": Phase.ROBBER,
            "cops": _frozen(moved[keep]),
            "cop_ids": _frozen(state.cop_ids[keep]),
            "committed_paths": paths,
        }
    )


def apply_robber_move(
    state: GameState, element: int
) -> Tuple[GameState, Optional[Outcome]]:
    element = operator.index(element)
    if state.phase is not Phase.ROBBER:
        error_message = f"The robber cannot move during the {state.phase.value} half-move"
        raise IllegalMove(error_message)

    if element not in state.robber:
        error_message = f"Element {element} is not in the robber set {state.robber}"
        raise IllegalMove(error_message)

    config = state.config
    robber = state.robber.without(element)
    keep = (state.cops & np.uint64(bit(element))) == 0
    cops = state.cops[keep]
    paths = state.committed_paths
    if paths is not None:
        paths = _frozen(paths[keep])

    update = {
        "robber": robber,
        "cops": _frozen(cops),
        "cop_ids": _frozen(state.cop_ids[keep]),
        "committed_paths": paths,
    }

    if state.round < config.full_rounds:
        update.update({"round": state.round + 1, "phase": Phase.COPS})
        return state.model_copy(update=update), None

    if not config.even:
        update.update({"round": state.round + 1, "phase": Phase.STRIKE})
        return state.model_copy(update=update), None

    update["phase"] = Phase.OVER
    caught = bool((cops == np.uint64(robber)).any())
    outcome = Outcome.decide(config, robber, caught)
    logger.debug("Robber moved onto %s: %s", robber, outcome.winner.value)
    return state.model_copy(update=update), outcome


def final_cop_strike(state: GameState) -> Outcome:
    if state.config.even:
        error_message = "The final strike only exists for odd n"
        raise IllegalMove(error_message)

    if state.phase is not Phase.STRIKE:
        error_message = f"The final strike cannot happen during the {state.phase.value} half-move"
        raise IllegalMove(error_message)

    beyond_robber = np.uint64(full_mask(state.config.n) & ~state.robber)
    caught = bool(((state.cops & beyond_robber) == 0).any())
    return Outcome.decide(state.config, state.robber, caught)


def evasion_count(state: GameState, element: int) -> int:
    element = operator.index(element)
    if element not in state.robber:
        error_message = f"Element {element} is not in the robber set {state.robber}"
        raise IllegalMove(error_message)

    return int(((state.cops & np.uint64(bit(element))) != 0).sum())


def evasion_counts(state: GameState) -> npt.NDArray[np.int64]:
    """Surviving cops containing each element; index ``i`` is element ``i+1``."""
    shifts = np.arange(state.config.n, dtype=np.uint64)
    held = (state.cops[:, np.newaxis] >> shifts) & np.uint64(1)
    return held.sum(axis=0, dtype=np.int64)
