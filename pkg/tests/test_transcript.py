import json

import jsonschema
import pytest
from pydantic import ValidationError

from hypercube_cops import (
    GameConfig,
    InvalidConfig,
    RoundRecord,
    Transcript,
    Winner,
    play_game,
)
from hypercube_cops.transcript import DiagnosticKind


@pytest.fixture()
def transcript() -> Transcript:
    return play_game(GameConfig(n=8, cop_count=3), "paper", "greedy", seed=11)


def test_loads_restores_the_transcript(transcript: Transcript) -> None:
    assert Transcript.loads(transcript.dumps()) == transcript


def test_lines_are_framed(transcript: Transcript) -> None:
    lines = transcript.lines()
    assert lines[0]["kind"] == "header"
    assert lines[0]["version"] == 1
    assert lines[0]["cop_strategy"] == "paper:t=7"
    assert lines[-1]["kind"] == "outcome"
    assert [line["round"] for line in lines if line["kind"] == "round"] == [1, 2, 3, 4]


def test_dumps_is_one_json_object_per_line(transcript: Transcript) -> None:
    text = transcript.dumps()
    assert text.endswith("\n")
    assert all(isinstance(json.loads(line), dict) for line in text.splitlines())


def test_uncovered_targets_are_reported(transcript: Transcript) -> None:
    uncovered = [event for event in transcript.diagnostics if event.kind is DiagnosticKind.UNCOVERED_TARGET]
    # three chains cannot reach all 70 middle sets
    assert len(uncovered) >= 67
    assert all(event.target is not None and event.target.level == 4 for event in uncovered)


def test_evasions_match_the_rounds(transcript: Transcript) -> None:
    evasions = {
        event.round: event.count
        for event in transcript.diagnostics
        if event.kind is DiagnosticKind.EVASION
    }
    assert evasions == {record.round: record.evaded for record in transcript.rounds if record.evaded}


def test_odd_transcript_records_the_strike() -> None:
    transcript = play_game(GameConfig(n=5, cop_count=10), "cover", "greedy", seed=0)
    strike = transcript.rounds[-1]
    assert strike.round == 3
    assert strike.cop_choices == []
    assert strike.deletion is None
    assert transcript.outcome.winner is Winner.COPS
    assert Transcript.loads(transcript.dumps()) == transcript


def test_loads_validates_lines(transcript: Transcript) -> None:
    lines = transcript.lines()
    lines[1]["cop_choices"] = [0]
    text = "".join(json.dumps(line) + "\n" for line in lines)
    with pytest.raises(jsonschema.ValidationError):
        Transcript.loads(text)


@pytest.mark.parametrize(
    ("drop", "message"),
    [
        pytest.param(0, "header", id="Missing header"),
        pytest.param(-1, "outcome", id="Missing outcome"),
    ],
)
def test_loads_needs_framing(transcript: Transcript, drop: int, message: str) -> None:
    lines = transcript.lines()
    del lines[drop]
    text = "".join(json.dumps(line) + "\n" for line in lines)
    with pytest.raises(InvalidConfig, match=message):
        Transcript.loads(text)


def test_loads_of_empty_text() -> None:
    with pytest.raises(InvalidConfig):
        Transcript.loads("\n")


def test_survivors_must_not_grow(transcript: Transcript) -> None:
    rounds = [
        RoundRecord(round=1, cop_choices=[1], survivors=1),
        RoundRecord(round=2, cop_choices=[2, 3], survivors=2),
    ]
    with pytest.raises(ValidationError):
        Transcript(
            config=transcript.config,
            seed=transcript.seed,
            cop_strategy=transcript.cop_strategy,
            robber_strategy=transcript.robber_strategy,
            rounds=rounds,
            outcome=transcript.outcome,
        )


def test_survivor_counts_follow_the_rounds(transcript: Transcript) -> None:
    counts = transcript.survivor_counts
    assert counts == [record.survivors for record in transcript.rounds]
    assert counts == sorted(counts, reverse=True)
