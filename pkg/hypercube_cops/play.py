"""Runs games between a cop strategy and a robber strategy."""

import logging
import math
from typing import (
    Callable,
    List,
    NamedTuple,
    Optional,
    Tuple,
    Union,
)

import numpy as np
from typing_extensions import Self

from hypercube_cops.game import (
    Elements,
    GameConfig,
    GameState,
    Outcome,
    Phase,
    apply_cop_moves,
    apply_robber_move,
    element_bits,
    final_cop_strike,
    new_game,
)
from hypercube_cops.strategies import (
    CopStrategy,
    CopStrategySpec,
    RobberStrategy,
    RobberStrategySpec,
    as_cop_spec,
    as_cop_strategy,
    as_robber_strategy,
)
from hypercube_cops.transcript import DiagnosticEvent, RoundRecord, Transcript
from hypercube_cops.utils import (
    IllegalMove,
    InvalidConfig,
    StrategyError,
    bit,
    elements_of,
    level_subsets,
)

logger = logging.getLogger(__name__)

ROBBER_STREAM = 0
COP_STREAM = 1

Observer = Callable[[GameState], None]


def trial_generators(
    seed: int, trial: int, cop_count: int
) -> Tuple[np.random.Generator, np.random.Generator]:
    """Cop and robber generators of one trial.

    The robber stream ignores the cop count, so a sweep over cop counts
    reuses the robber's randomness trial by trial.
    """
    robber = np.random.SeedSequence(entropy=seed, spawn_key=(trial, ROBBER_STREAM))
    cops = np.random.SeedSequence(entropy=seed, spawn_key=(trial, COP_STREAM, cop_count))
    return np.random.default_rng(cops), np.random.default_rng(robber)


def bk_exceeded(n: int, k: int, evaded: int, survivors: int) -> bool:
    """Whether ``evaded / survivors > (1 + 1/k**3) k / (n-k+1)``, in integers."""
    cube = k**3
    return evaded * (n - k + 1) * cube > (cube + 1) * k * survivors


def bk_threshold(n: int, k: int) -> float:
    return (1 + 1 / k**3) * k / (n - k + 1)


class Coverage(NamedTuple):
    """Commitment targets at the switch and which bad-event family they miss."""

    round: int
    targets: Tuple[int, ...]
    missing: Tuple[int, ...]

    @property
    def covered(self: Self) -> bool:
        return not self.missing


def commitment_targets(state: GameState) -> Tuple[int, ...]:
    paths = state.committed_paths
    if paths is None:
        return ()
    reached = np.bitwise_or.reduce(element_bits(paths), axis=1) if paths.shape[1] else 0
    return tuple(int(target) for target in state.cops | reached)


def coverage_of(state: GameState) -> Coverage:
    """Family members no committed chain leads to (or, for odd n, under)."""
    targets = commitment_targets(state)
    config = state.config
    robber = int(state.robber)

    if config.even:
        family = level_subsets(robber, config.full_rounds)
        reached = set(targets)
    else:
        family = level_subsets(robber, config.full_rounds + 1)
        reached = {
            target | bit(element)
            for target in set(targets)
            for element in elements_of(robber & ~target)
        }

    missing = tuple(member for member in family if member not in reached)
    return Coverage(round=state.round, targets=targets, missing=missing)


class GameTrace(NamedTuple):
    """Per-game summary; ``rounds`` and ``diagnostics`` only when recorded."""

    outcome: Outcome
    survivors: Tuple[int, ...]
    evaded: Tuple[int, ...]
    bk_rounds: Tuple[int, ...]
    coverage: Optional[Coverage] = None
    rounds: Optional[List[RoundRecord]] = None
    diagnostics: Optional[List[DiagnosticEvent]] = None

    @property
    def evaded_fractions(self: Self) -> Tuple[float, ...]:
        return tuple(
            evaded / survivors if survivors else math.nan
            for evaded, survivors in zip(self.evaded, self.survivors)
        )


def _cop_half_move(
    state: GameState, strategy: CopStrategy, rng: np.random.Generator
) -> Tuple[GameState, Elements, Optional[Coverage]]:
    move = strategy(state, rng)
    coverage = None
    try:
        if move.commitments is not None:
            state = state.with_commitments(move.commitments)
            coverage = coverage_of(state)
        return apply_cop_moves(state, move.choices), move.choices, coverage
    except IllegalMove as exc:
        raise StrategyError(strategy.name, state.round, exc) from exc


def run_game(
    config: GameConfig,
    cop: CopStrategy,
    robber: RobberStrategy,
    cop_rng: np.random.Generator,
    robber_rng: np.random.Generator,
    record: bool = False,
    observer: Optional[Observer] = None,
) -> GameTrace:
    """Plays one game to its outcome.

    ``observer`` sees the state at every round boundary with the cops to
    move (commitments not yet attached).
    """
    state = new_game(config)
    n = config.n
    survivors: List[int] = []
    evaded: List[int] = []
    bk_rounds: List[int] = []
    rounds: List[RoundRecord] = []
    diagnostics: List[DiagnosticEvent] = []
    coverage: Optional[Coverage] = None
    outcome: Optional[Outcome] = None

    while state.phase is Phase.COPS:
        if observer is not None:
            observer(state)

        k = state.round
        before = state.survivors
        state, choices, committed = _cop_half_move(state, cop, cop_rng)
        if committed is not None:
            coverage = committed
            if record:
                diagnostics.extend(
                    DiagnosticEvent.uncovered_target(k, target) for target in committed.missing
                )

        present = state.survivors
        element = robber(state, robber_rng)
        try:
            state, outcome = apply_robber_move(state, element)
        except IllegalMove as exc:
            raise StrategyError(robber.name, k, exc) from exc

        gone = present - state.survivors
        survivors.append(present)
        evaded.append(gone)
        if bk_exceeded(n, k, gone, present):
            bk_rounds.append(k)
            if record:
                diagnostics.append(
                    DiagnosticEvent.bk_exceeded(k, gone / present, bk_threshold(n, k))
                )

        if record:
            if gone:
                diagnostics.append(DiagnosticEvent.evasion(k, gone))
            rounds.append(
                RoundRecord(
                    round=k,
                    cop_choices=[int(choice) for choice in choices],
                    self_evaded=before - present,
                    deletion=int(element),
                    evaded=gone,
                    survivors=present,
                )
            )

    if state.phase is Phase.STRIKE:
        if observer is not None:
            observer(state)
        outcome = final_cop_strike(state)
        if record:
            rounds.append(
                RoundRecord(round=state.round, cop_choices=[], survivors=state.survivors)
            )

    if outcome is None:  # pragma: no cover
        error_message = f"Game ended in the {state.phase.value} half-move without an outcome"
        raise IllegalMove(error_message)

    return GameTrace(
        outcome=outcome,
        survivors=tuple(survivors),
        evaded=tuple(evaded),
        bk_rounds=tuple(bk_rounds),
        coverage=coverage,
        rounds=rounds if record else None,
        diagnostics=diagnostics if record else None,
    )


def prepare(
    config: GameConfig,
    cop: Union[str, CopStrategySpec, CopStrategy],
    robber: Union[str, RobberStrategySpec, RobberStrategy],
) -> Tuple[CopStrategy, RobberStrategy]:
    cop_strategy = as_cop_strategy(cop)
    cop_model = cop_strategy.spec if isinstance(cop, CopStrategy) else as_cop_spec(cop)
    robber_strategy = as_robber_strategy(robber, cop_model)
    cop_strategy.check(config)
    robber_strategy.check(config)
    return cop_strategy, robber_strategy


def play_game(
    config: GameConfig,
    cop: Union[str, CopStrategySpec, CopStrategy],
    robber: Union[str, RobberStrategySpec, RobberStrategy],
    seed: int,
    trial: int = 0,
) -> Transcript:
    cop_strategy, robber_strategy = prepare(config, cop, robber)
    cop_rng, robber_rng = trial_generators(seed, trial, config.cop_count)
    trace = run_game(config, cop_strategy, robber_strategy, cop_rng, robber_rng, record=True)
    logger.debug("Seed %d trial %d: %s", seed, trial, trace.outcome.winner.value)

    return Transcript(
        config=config,
        seed=seed,
        cop_strategy=cop_strategy.name,
        robber_strategy=robber_strategy.name,
        rounds=trace.rounds or [],
        outcome=trace.outcome,
        diagnostics=trace.diagnostics or [],
    )


def replay(transcript: Transcript) -> Outcome:
    """Re-applies the recorded moves and returns the outcome they produce."""
    state = new_game(transcript.config)
    outcome: Optional[Outcome] = None

    for record in transcript.rounds:
        if state.phase is Phase.STRIKE:
            outcome = final_cop_strike(state)
            break

        state = apply_cop_moves(state, record.cop_choices)
        if state.survivors != record.survivors:
            error_message = f"Round {record.round} records {record.survivors} survivors, replay has {state.survivors}"
            raise InvalidConfig(error_message)

        if record.deletion is None:
            error_message = f"Round {record.round} has no deletion"
            raise InvalidConfig(error_message)
        state, outcome = apply_robber_move(state, record.deletion)

    if outcome is None and state.phase is Phase.STRIKE:
        outcome = final_cop_strike(state)

    if outcome is None:
        error_message = f"Transcript stops on round {state.round} before the game ends"
        raise InvalidConfig(error_message)
    return outcome
