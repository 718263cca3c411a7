import math
from typing import Optional

import numpy as np
import pytest

from hypercube_cops import (
    DiagnosticsUnavailable,
    InvalidConfig,
    TrialConfig,
    chain_target_histogram,
    diagnose,
    positional_histogram,
    uniformity_pvalue,
)
from hypercube_cops.diagnostics import RoundDiagnostics


def make_cfg(strategy: str, cop_count: int = 20, n: int = 8, trials: int = 30) -> TrialConfig:
    return TrialConfig(
        n=n,
        cop_count=cop_count,
        cop_strategy=strategy,
        robber_strategy="random",
        trials=trials,
        seed=1,
    )


def test_diagnose_reports_every_full_round() -> None:
    report = diagnose(make_cfg("uniform"))
    assert [row.round for row in report.rounds] == [1, 2, 3, 4]

    first = report.rounds[0]
    assert first.expected_fraction == pytest.approx(1 / 8)
    assert first.mean_survivors == 20
    assert first.survivor_floor == 20
    assert first.mean_evaded_fraction is not None
    assert first.standard_error == pytest.approx(math.sqrt(1 / 8 * 7 / 8 / 600))
    assert 0.0 <= first.chernoff_reference <= 1.0


def test_uniform_cops_never_commit() -> None:
    report = diagnose(make_cfg("uniform"))
    assert report.coverage_rate is None
    assert report.coverage_implies_win


def test_paper_cops_report_coverage() -> None:
    report = diagnose(make_cfg("paper", cop_count=3))
    assert report.coverage_rate == 0.0
    assert report.coverage_implies_win


@pytest.mark.parametrize(
    ("strategy", "cops"),
    [
        pytest.param("cover", 70, id="Full cover"),
        pytest.param("solver", 70, id="Solver"),
    ],
)
def test_diagnostics_need_randomized_cops(strategy: str, cops: int) -> None:
    cfg = make_cfg(strategy, cop_count=cops, n=6 if strategy == "solver" else 8)
    with pytest.raises(DiagnosticsUnavailable):
        diagnose(cfg)


def test_positional_histogram_bins() -> None:
    counts = positional_histogram(make_cfg("uniform", n=6), after_round=2)
    assert counts.shape == (math.comb(4, 2),)
    assert counts.sum() <= 30 * 20


@pytest.mark.parametrize("after_round", [0, 4])
def test_positional_histogram_range(after_round: int) -> None:
    with pytest.raises(InvalidConfig):
        positional_histogram(make_cfg("uniform"), after_round)


def test_chain_target_histogram() -> None:
    counts = chain_target_histogram(4, trials=60, seed=2)
    assert counts.shape == (6,)
    assert counts.sum() == 60


@pytest.mark.parametrize(
    ("n", "cop_index"),
    [
        pytest.param(1, 0, id="No chain phase"),
        pytest.param(4, 1, id="Cop index out of range"),
    ],
)
def test_chain_target_histogram_rejects(n: int, cop_index: int) -> None:
    with pytest.raises(InvalidConfig):
        chain_target_histogram(n, trials=5, cop_index=cop_index)


def test_uniformity_pvalue() -> None:
    assert uniformity_pvalue(np.full(10, 50)) == pytest.approx(1.0)
    assert uniformity_pvalue(np.array([500, 0, 0, 0])) < 1e-6
    with pytest.raises(InvalidConfig):
        uniformity_pvalue(np.zeros(3, dtype=np.int64))


@pytest.mark.parametrize(
    ("observed", "standard_error", "expected"),
    [
        pytest.param(0.25, 0.05, 2.0, id="Two standard errors"),
        pytest.param(None, None, None, id="No survivors left"),
        pytest.param(0.25, 0.0, None, id="Degenerate standard error"),
    ],
)
def test_round_deviation(observed: Optional[float], standard_error: Optional[float], expected: Optional[float]) -> None:
    row = RoundDiagnostics(
        round=2,
        expected_fraction=0.15,
        mean_evaded_fraction=observed,
        standard_error=standard_error,
        bk_frequency=0.0,
        chernoff_reference=1.0,
        mean_survivors=0.0,
        survivor_floor=1.0,
    )
    if expected is None:
        assert row.deviation is None
    else:
        assert row.deviation == pytest.approx(expected)
