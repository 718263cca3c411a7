import json
from enum import Enum
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Type,
)

import jsonschema
from pydantic import (
    BaseModel,
    Field,
    model_validator,
)
from typing_extensions import Self

from hypercube_cops.game import GameConfig, Outcome
from hypercube_cops.utils import InvalidConfig
from hypercube_cops.vertex import VertexSet

from .transcript_schema import schema

TRANSCRIPT_VERSION = 1


class DiagnosticKind(str, Enum):
    BK_EXCEEDED = "bk_exceeded"
    UNCOVERED_TARGET = "uncovered_target"
    EVASION = "evasion"


class DiagnosticEvent(BaseModel):
    kind: DiagnosticKind
    round: Optional[int] = None
    count: Optional[int] = None
    evaded_fraction: Optional[float] = None
    threshold: Optional[float] = None
    target: Optional[VertexSet] = None

    @classmethod
    def bk_exceeded(
        cls: Type[Self], round_: int, evaded_fraction: float, threshold: float
    ) -> Self:
        return cls(
            kind=DiagnosticKind.BK_EXCEEDED,
            round=round_,
            evaded_fraction=evaded_fraction,
            threshold=threshold,
        )

    @classmethod
    def uncovered_target(cls: Type[Self], round_: int, target: int) -> Self:
        return cls(
            kind=DiagnosticKind.UNCOVERED_TARGET,
            round=round_,
            target=VertexSet(target),
        )

    @classmethod
    def evasion(cls: Type[Self], round_: int, count: int) -> Self:
        return cls(kind=DiagnosticKind.EVASION, round=round_, count=count)


class RoundRecord(BaseModel):
    """One round: cop choices in ascending cop-id order, then the deletion.

    ``survivors`` is the number of cops still below the robber after the
    cops moved; ``deletion`` is ``None`` on the odd-n strike round.
    """

    round: int = Field(ge=1)
    cop_choices: List[int]
    self_evaded: int = Field(default=0, ge=0)
    deletion: Optional[int] = None
    evaded: int = Field(default=0, ge=0)
    survivors: int = Field(ge=0)


class Transcript(BaseModel):
    config: GameConfig
    seed: int = Field(ge=0)
    cop_strategy: str
    robber_strategy: str
    rounds: List[RoundRecord] = Field(default_factory=list)
    outcome: Outcome
    diagnostics: List[DiagnosticEvent] = Field(default_factory=list)

    @model_validator(mode="after")
    def _survivors_never_grow(self: Self) -> Self:
        counts = [record.survivors for record in self.rounds]
        if any(later > earlier for earlier, later in zip(counts, counts[1:])):
            error_message = f"Survivor counts must not increase: {counts}"
            raise ValueError(error_message)
        return self

    @property
    def survivor_counts(self: Self) -> List[int]:
        return [record.survivors for record in self.rounds]

    def lines(self: Self) -> List[Dict[str, Any]]:
        header = {
            "kind": "header",
            "version": TRANSCRIPT_VERSION,
            "n": self.config.n,
            "cop_count": self.config.cop_count,
            "seed": self.seed,
            "cop_strategy": self.cop_strategy,
            "robber_strategy": self.robber_strategy,
        }
        rounds = [{"kind": "round", **record.model_dump(mode="json")} for record in self.rounds]
        events = [
            {"kind": "event", "event": event.kind.value, **event.model_dump(mode="json", exclude={"kind"})}
            for event in self.diagnostics
        ]
        outcome = {"kind": "outcome", **self.outcome.model_dump(mode="json")}
        return [header, *rounds, *events, outcome]

    def dumps(self: Self) -> str:
        return "".join(json.dumps(line, sort_keys=True) + "\n" for line in self.lines())

    @classmethod
    def loads(cls: Type[Self], text: str) -> Self:
        payloads = [json.loads(line) for line in text.splitlines() if line.strip()]
        for payload in payloads:
            jsonschema.validate(instance=payload, schema=schema)

        if not payloads or payloads[0]["kind"] != "header":
            error_message = "A transcript must start with its header line"
            raise InvalidConfig(error_message)
        if payloads[-1]["kind"] != "outcome":
            error_message = "A transcript must end with its outcome line"
            raise InvalidConfig(error_message)

        header, *body, outcome = payloads
        rounds = [item for item in body if item["kind"] == "round"]
        events = [item for item in body if item["kind"] == "event"]

        return cls(
            config=GameConfig(n=header["n"], cop_count=header["cop_count"]),
            seed=header["seed"],
            cop_strategy=header["cop_strategy"],
            robber_strategy=header["robber_strategy"],
            rounds=[RoundRecord.model_validate(item) for item in rounds],
            outcome=Outcome.model_validate(outcome),
            diagnostics=[
                DiagnosticEvent.model_validate({**item, "kind": item["event"]})
                for item in events
            ],
        )
