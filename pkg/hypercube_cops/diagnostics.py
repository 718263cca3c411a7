"""Empirical checks of the randomized cop strategy's bad events."""

import logging
import math
from itertools import combinations
from typing import (
    Dict,
    List,
    Optional,
    Tuple,
)

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, computed_field
from scipy import stats
from typing_extensions import Self

from hypercube_cops.bounds import (
    chernoff_bk_bound,
    clamp_probability,
    evasion_rate,
    survivor_floor,
)
from hypercube_cops.game import GameConfig, GameState, new_game
from hypercube_cops.montecarlo import (
    EstimateResult,
    TrialConfig,
    estimate_win_probability,
)
from hypercube_cops.play import prepare, run_game, trial_generators
from hypercube_cops.strategies import CopKind, make_chain_commitments
from hypercube_cops.utils import (
    DiagnosticsUnavailable,
    InvalidConfig,
    bit,
    level_subsets,
    mask_of,
)

logger = logging.getLogger(__name__)

RANDOMIZED_COPS = (CopKind.UNIFORM, CopKind.PAPER, CopKind.CHAIN)


class RoundDiagnostics(BaseModel):
    round: int
    expected_fraction: float
    mean_evaded_fraction: Optional[float] = None
    standard_error: Optional[float] = None
    bk_frequency: float
    chernoff_reference: float
    mean_survivors: float
    survivor_floor: float

    @computed_field  # type: ignore[prop-decorator]
    @property
    def deviation(self: Self) -> Optional[float]:
        """Distance of the observed fraction from the expected one, in standard errors."""
        if self.mean_evaded_fraction is None or not self.standard_error:
            return None
        return abs(self.mean_evaded_fraction - self.expected_fraction) / self.standard_error


class DiagnosticReport(BaseModel):
    estimate: EstimateResult
    rounds: List[RoundDiagnostics]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def coverage_rate(self: Self) -> Optional[float]:
        """Share of trials whose committed chains reach the whole target family."""
        rate = self.estimate.coverage_failure_rate
        return None if rate is None else 1 - rate

    @computed_field  # type: ignore[prop-decorator]
    @property
    def coverage_implies_win(self: Self) -> bool:
        estimate = self.estimate
        return estimate.covered_wins == estimate.commitment_trials - estimate.coverage_failures


def _round_row(estimate: EstimateResult, k: int) -> RoundDiagnostics:
    n, index = estimate.n, k - 1
    expected = float(evasion_rate(n, k))
    pooled = estimate.survivor_totals[index]
    mean_survivors = estimate.mean_survivors[index]

    return RoundDiagnostics(
        round=k,
        expected_fraction=expected,
        mean_evaded_fraction=estimate.mean_evaded_fraction[index],
        standard_error=math.sqrt(expected * (1 - expected) / pooled) if pooled else None,
        bk_frequency=estimate.bk_frequency[index],
        chernoff_reference=clamp_probability(chernoff_bk_bound(n, k, mean_survivors)),
        mean_survivors=mean_survivors,
        survivor_floor=float(survivor_floor(n, estimate.cop_count, k)),
    )


def diagnose(cfg: TrialConfig, workers: int = 1) -> DiagnosticReport:
    if cfg.cop_spec.kind not in RANDOMIZED_COPS:
        error_message = f"Diagnostics need a randomized cop strategy, got {cfg.cop_spec}"
        raise DiagnosticsUnavailable(error_message)

    estimate = estimate_win_probability(cfg, workers)
    rounds = [_round_row(estimate, k) for k in range(1, cfg.n // 2 + 1)]
    return DiagnosticReport(estimate=estimate, rounds=rounds)


def _subset_index(size: int, level: int) -> Dict[Tuple[int, ...], int]:
    return {chosen: index for index, chosen in enumerate(combinations(range(size), level))}


def _relative_position(state: GameState, cop: int) -> Tuple[int, ...]:
    return tuple(
        position
        for position, element in enumerate(state.robber.members)
        if cop & bit(element)
    )


def positional_histogram(
    cfg: TrialConfig, after_round: int
) -> npt.NDArray[np.int64]:
    """Counts of surviving cop positions after ``after_round`` rounds.

    A position is the cop's set written as positions inside the robber's
    current set, so bin ``i`` is the ``i``-th ``k``-subset of
    ``0..|R|-1`` in lexicographic order.
    """
    config = cfg.game_config
    if not 1 <= after_round < config.middle:
        error_message = f"Positions are observable after rounds 1..{config.middle - 1}, got {after_round}"
        raise InvalidConfig(error_message)

    cop, robber = prepare(config, cfg.cop_spec, cfg.robber_strategy)
    bins = _subset_index(config.n - after_round, after_round)
    counts = np.zeros(len(bins), dtype=np.int64)

    def observe(state: GameState) -> None:
        if state.round == after_round + 1:
            for mask in state.cops:
                counts[bins[_relative_position(state, int(mask))]] += 1

    for trial in range(cfg.trials):
        cop_rng, robber_rng = trial_generators(cfg.seed, trial, cfg.cop_count)
        run_game(config, cop, robber, cop_rng, robber_rng, observer=observe)
    return counts


def chain_target_histogram(
    n: int, trials: int, seed: int = 0, cop_count: int = 1, cop_index: int = 0
) -> npt.NDArray[np.int64]:
    """Realized level-h targets of one cop committing from the empty set.

    Bin ``i`` is the ``i``-th level-h subset of ``{1..n}`` in
    lexicographic order.
    """
    config = GameConfig(n=n, cop_count=cop_count)
    if not 0 <= cop_index < cop_count:
        error_message = f"Cop index {cop_index} outside 0..{cop_count - 1}"
        raise InvalidConfig(error_message)
    if config.full_rounds < 1:
        error_message = f"No chain phase for n={n}"
        raise InvalidConfig(error_message)

    bins = {target: index for index, target in enumerate(level_subsets(config.ground, config.full_rounds))}
    counts = np.zeros(len(bins), dtype=np.int64)
    state = new_game(config)

    for trial in range(trials):
        cop_rng, _ = trial_generators(seed, trial, cop_count)
        paths = make_chain_commitments(state, cop_rng)
        counts[bins[mask_of(int(e) for e in paths[cop_index])]] += 1
    return counts


def uniformity_pvalue(counts: npt.NDArray[np.int64]) -> float:
    """Chi-square p-value of ``counts`` against the uniform distribution."""
    observed = np.asarray(counts)
    if observed.sum() == 0:
        error_message = "Uniformity test needs at least one observation"
        raise InvalidConfig(error_message)
    return float(stats.chisquare(observed).pvalue)

