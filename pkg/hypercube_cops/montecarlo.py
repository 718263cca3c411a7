"""Seeded Monte Carlo estimates of the cops' win probability.

Every per-trial quantity is accumulated as an integer sum, so shard results
merge exactly and the report does not depend on how trials were split.
"""

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import (
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)
from typing_extensions import Self

from hypercube_cops.game import GameConfig, Winner
from hypercube_cops.intervals import wilson_interval
from hypercube_cops.play import play_game, prepare, run_game, trial_generators
from hypercube_cops.strategies import (
    CopKind,
    CopStrategySpec,
    RobberStrategySpec,
    as_cop_spec,
    as_robber_spec,
)
from hypercube_cops.transcript import Transcript
from hypercube_cops.utils import InvalidConfig

logger = logging.getLogger(__name__)

SWEEP_LEVELS = (0.5, 0.99)
CSV_COLUMNS = ("n", "C", "trials", "wins", "p_hat", "ci_low", "ci_high", "seed")


class TrialConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    cop_count: int = Field(ge=0)
    cop_strategy: CopStrategySpec
    robber_strategy: RobberStrategySpec
    trials: int = Field(ge=1)
    seed: int = Field(default=0, ge=0)
    switch_offset: Optional[int] = Field(default=None, ge=1)

    @field_validator("cop_strategy", mode="before")
    @classmethod
    def parse_cop(cls, value: Union[str, CopStrategySpec]) -> CopStrategySpec:
        return as_cop_spec(value)

    @field_validator("robber_strategy", mode="before")
    @classmethod
    def parse_robber(cls, value: Union[str, RobberStrategySpec]) -> RobberStrategySpec:
        return as_robber_spec(value)

    @model_validator(mode="after")
    def playable(self: Self) -> Self:
        prepare(self.game_config, self.cop_spec, self.robber_strategy)
        return self

    @property
    def game_config(self: Self) -> GameConfig:
        return GameConfig(n=self.n, cop_count=self.cop_count)

    @property
    def cop_spec(self: Self) -> CopStrategySpec:
        """Cop spec with ``switch_offset`` applied to the paper strategy."""
        if self.switch_offset is None or self.cop_strategy.kind is not CopKind.PAPER:
            return self.cop_strategy
        return self.cop_strategy.model_copy(update={"switch_offset": self.switch_offset})

    def with_cop_count(self: Self, cop_count: int) -> "TrialConfig":
        return TrialConfig(**{**self.model_dump(), "cop_count": cop_count})


def _ratios(numerators: Sequence[int], denominators: Sequence[int]) -> List[Optional[float]]:
    return [num / den if den else None for num, den in zip(numerators, denominators)]


class EstimateResult(BaseModel):
    """Win estimate for trials ``first_trial .. first_trial + trials - 1``."""

    n: int
    cop_count: int
    cop_strategy: str
    robber_strategy: str
    seed: int
    first_trial: int = 0
    trials: int = Field(ge=1)
    wins: int = Field(ge=0)
    survivor_totals: List[int]
    evaded_totals: List[int]
    bk_counts: List[int]
    commitment_trials: int = 0
    coverage_failures: int = 0
    covered_wins: int = 0

    @model_validator(mode="after")
    def consistent(self: Self) -> Self:
        if self.wins > self.trials:
            error_message = f"{self.wins} wins out of {self.trials} trials"
            raise ValueError(error_message)

        totals = self.survivor_totals
        if any(later > earlier for earlier, later in zip(totals, totals[1:])):
            error_message = f"Survivor curve must not increase: {totals}"
            raise ValueError(error_message)

        if self.coverage_failures > self.commitment_trials:
            error_message = "More coverage failures than trials with commitments"
            raise ValueError(error_message)
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def p_hat(self: Self) -> float:
        return self.wins / self.trials

    @computed_field  # type: ignore[prop-decorator]
    @property
    def ci_low(self: Self) -> float:
        return wilson_interval(self.wins, self.trials)[0]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def ci_high(self: Self) -> float:
        return wilson_interval(self.wins, self.trials)[1]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def bk_frequency(self: Self) -> List[float]:
        return [count / self.trials for count in self.bk_counts]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def mean_survivors(self: Self) -> List[float]:
        return [total / self.trials for total in self.survivor_totals]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def mean_evaded_fraction(self: Self) -> List[Optional[float]]:
        """Pooled evaded fraction per round: all evasions over all survivors."""
        return _ratios(self.evaded_totals, self.survivor_totals)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def coverage_failure_rate(self: Self) -> Optional[float]:
        if not self.commitment_trials:
            return None
        return self.coverage_failures / self.commitment_trials

    def _same_experiment(self: Self, other: "EstimateResult") -> bool:
        keys = ("n", "cop_count", "cop_strategy", "robber_strategy", "seed")
        return all(getattr(self, key) == getattr(other, key) for key in keys)

    def merge(self: Self, other: "EstimateResult") -> "EstimateResult":
        """Combine with the shard that follows this one."""
        if not self._same_experiment(other):
            error_message = "Only shards of the same experiment can be merged"
            raise InvalidConfig(error_message)
        if other.first_trial != self.first_trial + self.trials:
            error_message = f"Shard starting at trial {other.first_trial} does not follow trials {self.first_trial}..{self.first_trial + self.trials - 1}"
            raise InvalidConfig(error_message)

        def added(field: str) -> List[int]:
            return [a + b for a, b in zip(getattr(self, field), getattr(other, field))]

        return self.model_copy(
            update={
                "trials": self.trials + other.trials,
                "wins": self.wins + other.wins,
                "survivor_totals": added("survivor_totals"),
                "evaded_totals": added("evaded_totals"),
                "bk_counts": added("bk_counts"),
                "commitment_trials": self.commitment_trials + other.commitment_trials,
                "coverage_failures": self.coverage_failures + other.coverage_failures,
                "covered_wins": self.covered_wins + other.covered_wins,
            }
        )

    @classmethod
    def merge_all(cls, results: Iterable["EstimateResult"]) -> "EstimateResult":
        ordered = sorted(results, key=lambda result: result.first_trial)
        if not ordered:
            error_message = "Nothing to merge"
            raise InvalidConfig(error_message)

        merged = ordered[0]
        for result in ordered[1:]:
            merged = merged.merge(result)
        return merged

    def csv_row(self: Self) -> Tuple[str, ...]:
        return (
            str(self.n),
            str(self.cop_count),
            str(self.trials),
            str(self.wins),
            f"{self.p_hat:.6f}",
            f"{self.ci_low:.6f}",
            f"{self.ci_high:.6f}",
            str(self.seed),
        )


def estimate_shard(cfg: TrialConfig, start: int, stop: int) -> EstimateResult:
    """Trials ``start .. stop - 1`` of ``cfg``; the streams only depend on the trial index."""
    if not 0 <= start < stop:
        error_message = f"Empty or negative trial range {start}..{stop}"
        raise InvalidConfig(error_message)

    config = cfg.game_config
    cop, robber = prepare(config, cfg.cop_spec, cfg.robber_strategy)
    rounds = config.full_rounds
    survivors, evaded, bk = [0] * rounds, [0] * rounds, [0] * rounds
    wins = commitments = failures = covered_wins = 0

    for trial in range(start, stop):
        cop_rng, robber_rng = trial_generators(cfg.seed, trial, cfg.cop_count)
        trace = run_game(config, cop, robber, cop_rng, robber_rng)
        cops_won = trace.outcome.winner is Winner.COPS
        wins += cops_won

        for index, (present, gone) in enumerate(zip(trace.survivors, trace.evaded)):
            survivors[index] += present
            evaded[index] += gone
        for k in trace.bk_rounds:
            bk[k - 1] += 1

        if trace.coverage is not None:
            commitments += 1
            if trace.coverage.covered:
                covered_wins += cops_won
            else:
                failures += 1

    logger.debug("Shard %d..%d of n=%d C=%d: %d wins", start, stop - 1, cfg.n, cfg.cop_count, wins)
    return EstimateResult(
        n=cfg.n,
        cop_count=cfg.cop_count,
        cop_strategy=cop.name,
        robber_strategy=robber.name,
        seed=cfg.seed,
        first_trial=start,
        trials=stop - start,
        wins=wins,
        survivor_totals=survivors,
        evaded_totals=evaded,
        bk_counts=bk,
        commitment_trials=commitments,
        coverage_failures=failures,
        covered_wins=covered_wins,
    )


def shard_ranges(trials: int, shards: int) -> List[Tuple[int, int]]:
    shards = max(1, min(shards, trials))
    edges = [trials * index // shards for index in range(shards + 1)]
    return list(zip(edges, edges[1:]))


def _run_shard(job: Tuple[TrialConfig, int, int]) -> EstimateResult:
    cfg, start, stop = job
    return estimate_shard(cfg, start, stop)


def estimate_win_probability(
    cfg: TrialConfig, workers: int = 1, shards: Optional[int] = None
) -> EstimateResult:
    """Runs ``cfg.trials`` games, in parallel when ``workers > 1``."""
    ranges = shard_ranges(cfg.trials, shards or workers)
    jobs = [(cfg, start, stop) for start, stop in ranges]

    if workers <= 1 or len(jobs) == 1:
        results = [_run_shard(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_run_shard, jobs))

    result = EstimateResult.merge_all(results)
    logger.info(
        "n=%d C=%d %s vs %s: %d/%d cop wins",
        cfg.n,
        cfg.cop_count,
        result.cop_strategy,
        result.robber_strategy,
        result.wins,
        result.trials,
    )
    return result


class SweepThreshold(BaseModel):
    """Least cop count whose ``p_hat`` reaches ``level``, with that row's interval."""

    level: float
    cop_count: Optional[int] = None
    p_hat: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None

    @classmethod
    def of(cls, level: float, row: Optional[EstimateResult]) -> "SweepThreshold":
        if row is None:
            return cls(level=level)
        return cls(
            level=level,
            cop_count=row.cop_count,
            p_hat=row.p_hat,
            ci_low=row.ci_low,
            ci_high=row.ci_high,
        )


class SweepResult(BaseModel):
    rows: List[EstimateResult]

    def threshold(self: Self, level: float) -> Optional[EstimateResult]:
        """First row, by cop count, whose ``p_hat`` reaches ``level``."""
        return next((row for row in self.rows if row.p_hat >= level), None)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def thresholds(self: Self) -> List[SweepThreshold]:
        return [SweepThreshold.of(level, self.threshold(level)) for level in SWEEP_LEVELS]

    def to_csv(self: Self) -> str:
        return rows_to_csv(self.rows)


def sweep_cop_counts(
    cfg: TrialConfig,
    c_from: int,
    c_to: int,
    step: int = 1,
    workers: int = 1,
) -> SweepResult:
    """One estimate per cop count; trial ``i`` reuses the same robber stream in every row."""
    if c_from > c_to:
        error_message = f"Empty sweep {c_from}..{c_to}"
        raise InvalidConfig(error_message)
    if step < 1:
        error_message = f"Sweep step must be positive, got {step}"
        raise InvalidConfig(error_message)

    rows = [
        estimate_win_probability(cfg.with_cop_count(cop_count), workers)
        for cop_count in range(c_from, c_to + 1, step)
    ]
    return SweepResult(rows=rows)


def rows_to_csv(rows: Iterable[EstimateResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(row.csv_row() for row in rows)
    return buffer.getvalue()


def transcripts(cfg: TrialConfig, limit: Optional[int] = None) -> Iterable[Transcript]:
    """Recorded games for the first ``limit`` trials of ``cfg``."""
    count = cfg.trials if limit is None else min(limit, cfg.trials)
    for trial in range(count):
        yield play_game(cfg.game_config, cfg.cop_spec, cfg.robber_strategy, cfg.seed, trial)
