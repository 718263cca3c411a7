from .bounds import (
    BoundReport,
    bound_report,
    chernoff_bk_bound,
    inflated_survival_product,
    lower_bound,
    p_constant,
    recommended_cop_count,
    survival_product,
    trivial_upper_bound,
)
from .diagnostics import (
    DiagnosticReport,
    chain_target_histogram,
    diagnose,
    positional_histogram,
    uniformity_pvalue,
)
from .game import (
    GameConfig,
    GameState,
    Outcome,
    Phase,
    Winner,
    apply_cop_moves,
    apply_robber_move,
    evasion_count,
    evasion_counts,
    final_cop_strike,
    new_game,
)
from .intervals import wilson_interval
from .links import LinkedModel, UrlFor
from .montecarlo import (
    EstimateResult,
    SweepResult,
    SweepThreshold,
    TrialConfig,
    estimate_shard,
    estimate_win_probability,
    sweep_cop_counts,
)
from .play import play_game, replay, run_game
from .solver import (
    SolverBudget,
    SolveResult,
    canonicalize,
    cop_number_exact,
    cops_win_with,
)
from .strategies import (
    CopStrategySpec,
    RobberStrategySpec,
    chain_cop_moves,
    full_cover_strategy,
    greedy_robber_choice,
    lookahead_robber_choice,
    make_chain_commitments,
    paper_cop_strategy,
    uniform_cop_moves,
)
from .transcript import DiagnosticEvent, RoundRecord, Transcript
from .utils import (
    BudgetExceeded,
    DegenerateFactor,
    DiagnosticsUnavailable,
    IllegalMove,
    InvalidConfig,
    StrategyError,
)
from .vertex import VertexSet

__all__ = [
    "BoundReport",
    "BudgetExceeded",
    "CopStrategySpec",
    "DegenerateFactor",
    "DiagnosticEvent",
    "DiagnosticReport",
    "DiagnosticsUnavailable",
    "EstimateResult",
    "GameConfig",
    "GameState",
    "IllegalMove",
    "InvalidConfig",
    "LinkedModel",
    "Outcome",
    "Phase",
    "RobberStrategySpec",
    "RoundRecord",
    "SolveResult",
    "SolverBudget",
    "StrategyError",
    "SweepResult",
    "SweepThreshold",
    "Transcript",
    "TrialConfig",
    "UrlFor",
    "VertexSet",
    "Winner",
    "apply_cop_moves",
    "apply_robber_move",
    "bound_report",
    "canonicalize",
    "chain_cop_moves",
    "chain_target_histogram",
    "chernoff_bk_bound",
    "cop_number_exact",
    "cops_win_with",
    "diagnose",
    "estimate_shard",
    "estimate_win_probability",
    "evasion_count",
    "evasion_counts",
    "final_cop_strike",
    "full_cover_strategy",
    "greedy_robber_choice",
    "inflated_survival_product",
    "lookahead_robber_choice",
    "lower_bound",
    "make_chain_commitments",
    "new_game",
    "p_constant",
    "paper_cop_strategy",
    "play_game",
    "positional_histogram",
    "recommended_cop_count",
    "replay",
    "run_game",
    "survival_product",
    "sweep_cop_counts",
    "trivial_upper_bound",
    "uniform_cop_moves",
    "uniformity_pvalue",
    "wilson_interval",
]
