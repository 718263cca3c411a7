from typing import Callable

import numpy as np
import pytest
from scipy import stats

from hypercube_cops import (
    BudgetExceeded,
    CopStrategySpec,
    GameConfig,
    GameState,
    InvalidConfig,
    Phase,
    RobberStrategySpec,
    VertexSet,
    Winner,
    chain_cop_moves,
    full_cover_strategy,
    greedy_robber_choice,
    lookahead_robber_choice,
    make_chain_commitments,
    new_game,
    paper_cop_strategy,
    play_game,
    uniform_cop_moves,
)
from hypercube_cops.solver import GameSearch, SolverBudget
from hypercube_cops.strategies import (
    LOOKAHEAD_MOVE_SECONDS,
    ChainCops,
    CopKind,
    FullCoverCops,
    LookaheadModel,
    LookaheadRobber,
    PaperCops,
    RandomRobber,
    RobberKind,
    SolverCops,
    UniformCops,
    as_cop_strategy,
    as_robber_strategy,
    greedy_guarantee,
)


@pytest.mark.parametrize(
    ("text", "kind", "rendered"),
    [
        pytest.param("uniform", CopKind.UNIFORM, "uniform", id="Uniform"),
        pytest.param("chain", CopKind.CHAIN, "chain", id="Chain"),
        pytest.param("paper", CopKind.PAPER, "paper:t=7", id="Paper default offset"),
        pytest.param("paper:t=5", CopKind.PAPER, "paper:t=5", id="Paper offset"),
        pytest.param("cover", CopKind.COVER, "cover", id="Cover"),
        pytest.param("cover:capped", CopKind.COVER, "cover:capped", id="Capped cover"),
        pytest.param("solver", CopKind.SOLVER, "solver", id="Solver"),
    ],
)
def test_parse_cop_spec(text: str, kind: CopKind, rendered: str) -> None:
    spec = CopStrategySpec.parse(text)
    assert spec.kind is kind
    assert str(spec) == rendered


@pytest.mark.parametrize(
    ("text", "kind", "model"),
    [
        pytest.param("greedy", RobberKind.GREEDY, LookaheadModel.MINIMAX, id="Greedy"),
        pytest.param("random", RobberKind.RANDOM, LookaheadModel.MINIMAX, id="Random"),
        pytest.param("lookahead", RobberKind.LOOKAHEAD, LookaheadModel.MINIMAX, id="Lookahead default"),
        pytest.param("lookahead:expectimax", RobberKind.LOOKAHEAD, LookaheadModel.EXPECTIMAX, id="Expectimax"),
    ],
)
def test_parse_robber_spec(text: str, kind: RobberKind, model: LookaheadModel) -> None:
    spec = RobberStrategySpec.parse(text)
    assert spec.kind is kind
    assert spec.model is model


@pytest.mark.parametrize(
    "text",
    [
        pytest.param("sheriff", id="Unknown kind"),
        pytest.param("paper:t=0", id="Zero offset"),
        pytest.param("paper:t=x", id="Non-numeric offset"),
        pytest.param("uniform:fast", id="Unknown option"),
        pytest.param("cover:full", id="Unknown cover option"),
    ],
)
def test_parse_cop_spec_rejects(text: str) -> None:
    with pytest.raises(ValueError):  # noqa: PT011
        CopStrategySpec.parse(text)


@pytest.mark.parametrize(
    "text",
    [
        pytest.param("sneaky", id="Unknown kind"),
        pytest.param("lookahead:oracle", id="Unknown model"),
        pytest.param("greedy:fast", id="Unknown option"),
    ],
)
def test_parse_robber_spec_rejects(text: str) -> None:
    with pytest.raises(InvalidConfig):
        RobberStrategySpec.parse(text)


def test_spec_builds_strategy_classes() -> None:
    assert isinstance(CopStrategySpec.parse("uniform").build(), UniformCops)
    assert isinstance(CopStrategySpec.parse("chain").build(), ChainCops)
    assert isinstance(paper_cop_strategy(CopStrategySpec.parse("paper")), PaperCops)
    assert isinstance(CopStrategySpec.parse("cover").build(), FullCoverCops)
    assert isinstance(CopStrategySpec.parse("solver").build(), SolverCops)
    assert isinstance(as_robber_strategy("random"), RandomRobber)


def test_greedy_takes_the_most_evasive_element(make_state: Callable[..., GameState]) -> None:
    state = make_state(4, [1, 2, 3, 4], [[1], [1], [2]])
    assert greedy_robber_choice(state) == 1


def test_greedy_ties_go_to_the_smallest_element(make_state: Callable[..., GameState]) -> None:
    state = make_state(4, [1, 2, 3], [])
    assert greedy_robber_choice(state) == 1


def test_greedy_final_move_lands_on_a_free_set(make_state: Callable[..., GameState]) -> None:
    state = make_state(4, [1, 2, 3], [[1, 2], [1, 3]])
    choice = greedy_robber_choice(state)
    assert choice == 1
    assert int(state.robber.without(choice)) not in {int(cop) for cop in state.cops}


@pytest.mark.parametrize(
    ("survivors", "expected"),
    [
        pytest.param([[1], [1], [2]], 1, id="Three cops on round one"),
        pytest.param([[1], [2], [3], [4], [1]], 2, id="Five cops on round one"),
    ],
)
def test_greedy_guarantee(
    make_state: Callable[..., GameState], survivors: list, expected: int
) -> None:
    state = make_state(4, [1, 2, 3, 4], survivors)
    assert greedy_guarantee(state) == expected
    choice = greedy_robber_choice(state)
    assert int((state.cops & np.uint64(1 << (choice - 1)) != 0).sum()) >= expected


def test_greedy_on_the_wrong_half_move() -> None:
    with pytest.raises(ValueError, match="robber"):
        greedy_robber_choice(new_game(GameConfig(n=4, cop_count=1)))


def test_uniform_moves_with_single_option(
    make_state: Callable[..., GameState], rng: np.random.Generator
) -> None:
    state = make_state(4, [1, 2, 3], [[1, 2]] * 5, phase=Phase.COPS)
    assert uniform_cop_moves(state, rng).tolist() == [3] * 5


def test_uniform_moves_need_a_free_element(
    make_state: Callable[..., GameState], rng: np.random.Generator
) -> None:
    state = make_state(4, [1, 2, 3], [[1, 2, 3]], phase=Phase.COPS)
    with pytest.raises(ValueError, match="whole robber set"):
        uniform_cop_moves(state, rng)


def test_uniform_moves_are_uniform(rng: np.random.Generator) -> None:
    state = new_game(GameConfig(n=4, cop_count=4000))
    choices = uniform_cop_moves(state, rng)
    counts = np.bincount(choices, minlength=5)[1:]
    assert counts.sum() == 4000
    assert stats.chisquare(counts).pvalue > 0.001


def test_uniform_moves_avoid_held_elements(
    make_state: Callable[..., GameState], rng: np.random.Generator
) -> None:
    state = make_state(6, [1, 2, 3, 4, 5], [[1], [2], [5]] * 50, phase=Phase.COPS)
    choices = uniform_cop_moves(state, rng)
    held = np.array([1, 2, 5] * 50)
    assert (choices != held).all()
    assert set(choices.tolist()) <= {1, 2, 3, 4, 5}


def test_chain_commitments_from_the_empty_set(rng: np.random.Generator) -> None:
    state = new_game(GameConfig(n=6, cop_count=20))
    paths = make_chain_commitments(state, rng)
    assert paths.shape == (20, 3)
    assert all(len(set(row)) == 3 for row in paths.tolist())


def test_chain_commitments_extend_the_current_set(
    make_state: Callable[..., GameState], rng: np.random.Generator
) -> None:
    state = make_state(6, [1, 2, 3, 4, 5], [[1]] * 30, phase=Phase.COPS)
    paths = make_chain_commitments(state, rng)
    assert paths.shape == (30, 2)
    assert set(paths.ravel().tolist()) <= {2, 3, 4, 5}
    assert (paths[:, 0] != paths[:, 1]).all()


def test_chain_commitments_need_a_reachable_target(
    make_state: Callable[..., GameState], rng: np.random.Generator
) -> None:
    state = make_state(6, [1, 2], [[]], phase=Phase.COPS)
    with pytest.raises(ValueError, match="No level-3 target"):
        make_chain_commitments(state, rng)


def test_chain_moves_follow_the_commitment(make_state: Callable[..., GameState]) -> None:
    state = make_state(6, [1, 2, 3, 4, 5], [[1]], phase=Phase.COPS)
    state = state.with_commitments(np.array([[3, 5]]))
    assert chain_cop_moves(state).tolist() == [3]


def test_chain_moves_need_a_commitment(make_state: Callable[..., GameState]) -> None:
    state = make_state(6, [1, 2, 3, 4, 5], [[1]], phase=Phase.COPS)
    with pytest.raises(ValueError, match="No committed chain"):
        chain_cop_moves(state)


@pytest.mark.parametrize(
    ("n", "offset", "uniform_rounds"),
    [
        pytest.param(16, 7, 1, id="n=16 switches after one round"),
        pytest.param(30, 7, 8, id="n=30 switches after eight rounds"),
        pytest.param(8, 7, 0, id="n=8 is chains from the start"),
        pytest.param(9, 1, 3, id="Offset one"),
    ],
)
def test_paper_switch_round(n: int, offset: int, uniform_rounds: int) -> None:
    strategy = paper_cop_strategy(CopStrategySpec(kind=CopKind.PAPER, switch_offset=offset))
    assert strategy.uniform_rounds(GameConfig(n=n, cop_count=1)) == uniform_rounds


@pytest.mark.parametrize(
    ("strategy", "uniform_rounds"),
    [
        pytest.param("uniform", 5, id="Uniform throughout"),
        pytest.param("chain", 0, id="Chains from the start"),
        pytest.param("cover", 0, id="Deterministic cover"),
    ],
)
def test_uniform_rounds_by_strategy(strategy: str, uniform_rounds: int) -> None:
    assert as_cop_strategy(strategy).uniform_rounds(GameConfig(n=10, cop_count=1)) == uniform_rounds


def test_paper_commits_once(rng: np.random.Generator) -> None:
    config = GameConfig(n=8, cop_count=5)
    strategy = paper_cop_strategy(CopStrategySpec(kind=CopKind.PAPER))
    move = strategy(new_game(config), rng)
    assert move.commitments is not None
    assert move.commitments.shape == (5, 4)
    assert move.choices.tolist() == move.commitments[:, 0].tolist()


def test_full_cover_needs_the_whole_level() -> None:
    with pytest.raises(InvalidConfig):
        full_cover_strategy(GameConfig(n=4, cop_count=5))
    assert full_cover_strategy(GameConfig(n=4, cop_count=5), capped=True).spec.capped


def test_full_cover_routes_cops_to_distinct_targets(rng: np.random.Generator) -> None:
    config = GameConfig(n=4, cop_count=6)
    strategy = full_cover_strategy(config)
    move = strategy(new_game(config), rng)
    assert move.commitments is not None
    targets = {frozenset(row) for row in move.commitments.tolist()}
    assert len(targets) == 6


@pytest.mark.parametrize(
    ("n", "cops"),
    [
        pytest.param(2, 2, id="n=2"),
        pytest.param(4, 6, id="n=4"),
        pytest.param(5, 10, id="n=5 covers level two"),
    ],
)
@pytest.mark.parametrize("robber", ["greedy", "random", "lookahead"])
def test_full_cover_always_wins(n: int, cops: int, robber: str) -> None:
    for seed in range(5):
        transcript = play_game(GameConfig(n=n, cop_count=cops), "cover", robber, seed)
        assert transcript.outcome.winner is Winner.COPS


def test_solver_cops_win_with_enough_cops() -> None:
    transcript = play_game(GameConfig(n=4, cop_count=6), "solver", "greedy", 0)
    assert transcript.outcome.winner is Winner.COPS


def test_solver_cops_without_a_winning_move_still_play() -> None:
    transcript = play_game(GameConfig(n=4, cop_count=2), "solver", "greedy", 0)
    assert transcript.outcome.winner is Winner.ROBBER
    assert transcript.rounds[0].cop_choices == [1, 1]


def test_solver_cops_are_capped() -> None:
    with pytest.raises(InvalidConfig):
        play_game(GameConfig(n=8, cop_count=70), "solver", "greedy", 0)


def test_lookahead_forced_loss_returns_smallest(make_state: Callable[..., GameState]) -> None:
    state = make_state(2, [1, 2], [[1], [2]])
    assert lookahead_robber_choice(state, GameSearch(2)) == 1


def test_lookahead_prefers_the_greedy_deletion_among_winners(make_state: Callable[..., GameState]) -> None:
    state = make_state(4, [1, 2, 3, 4], [[2], [2]])
    search = GameSearch(4)
    assert all(search.robber_move_wins(int(state.robber), [2, 2], e) for e in range(1, 5))
    assert lookahead_robber_choice(state, search) == 2
    assert lookahead_robber_choice(state, search) == greedy_robber_choice(state)


def test_lookahead_budget_is_per_move() -> None:
    robber = LookaheadRobber(RobberStrategySpec.parse("lookahead"))
    assert robber.budget.seconds == LOOKAHEAD_MOVE_SECONDS
    assert robber.budget.image_cap is not None


def test_lookahead_out_of_budget_raises() -> None:
    robber = LookaheadRobber(RobberStrategySpec.parse("lookahead"), budget=SolverBudget(max_nodes=1))
    with pytest.raises(BudgetExceeded):
        play_game(GameConfig(n=7, cop_count=10), "uniform", robber, 0)


def test_lookahead_beats_three_cops_on_four_elements() -> None:
    for seed in range(5):
        transcript = play_game(GameConfig(n=4, cop_count=3), "uniform", "lookahead", seed)
        assert transcript.outcome.winner is Winner.ROBBER


def test_expectimax_needs_the_uniform_model() -> None:
    config = GameConfig(n=4, cop_count=4)
    with pytest.raises(InvalidConfig, match="uniform"):
        play_game(config, "chain", "lookahead:expectimax", 0)

    transcript = play_game(config, "uniform", "lookahead:expectimax", 0)
    assert transcript.robber_strategy == "lookahead:expectimax"


def test_lookahead_is_capped() -> None:
    with pytest.raises(InvalidConfig, match="capped"):
        play_game(GameConfig(n=13, cop_count=1), "uniform", "lookahead", 0)


def test_random_robber_plays_members(
    make_state: Callable[..., GameState], rng: np.random.Generator
) -> None:
    state = make_state(6, [2, 4, 6], [[2]])
    strategy = as_robber_strategy("random")
    assert {strategy(state, rng) for _ in range(50)} <= set(VertexSet.of([2, 4, 6]).members)
