# Line schema for transcript format version 1, see docs/transcripts.md

_count = {"type": "integer", "minimum": 0}
_round = {"type": "integer", "minimum": 1}
_element = {"type": "integer", "minimum": 1, "maximum": 64}
_mask = {"type": "integer", "minimum": 0}

schema = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "TranscriptLine",
    "description": "One line of a levelled cops-and-robber transcript.",
    "oneOf": [
        {"$ref": "#/definitions/Header"},
        {"$ref": "#/definitions/Round"},
        {"$ref": "#/definitions/Event"},
        {"$ref": "#/definitions/Outcome"},
    ],
    "definitions": {
        "Header": {
            "type": "object",
            "required": [
                "kind",
                "version",
                "n",
                "cop_count",
                "seed",
                "cop_strategy",
                "robber_strategy",
            ],
            "properties": {
                "kind": {"const": "header"},
                "version": {"const": 1},
                "n": {"type": "integer", "minimum": 1, "maximum": 64},
                "cop_count": _count,
                "seed": _count,
                "cop_strategy": {"type": "string", "minLength": 1},
                "robber_strategy": {"type": "string", "minLength": 1},
            },
            "additionalProperties": False,
        },
        "Round": {
            "type": "object",
            "required": [
                "kind",
                "round",
                "cop_choices",
                "self_evaded",
                "deletion",
                "evaded",
                "survivors",
            ],
            "properties": {
                "kind": {"const": "round"},
                "round": _round,
                "cop_choices": {"type": "array", "items": _element},
                "self_evaded": _count,
                "deletion": {"oneOf": [_element, {"type": "null"}]},
                "evaded": _count,
                "survivors": _count,
            },
            "additionalProperties": False,
        },
        "Event": {
            "type": "object",
            "required": ["kind", "event"],
            "properties": {
                "kind": {"const": "event"},
                "event": {"enum": ["bk_exceeded", "uncovered_target", "evasion"]},
                "round": {"oneOf": [_round, {"type": "null"}]},
                "count": {"oneOf": [_count, {"type": "null"}]},
                "evaded_fraction": {"type": ["number", "null"]},
                "threshold": {"type": ["number", "null"]},
                "target": {"oneOf": [_mask, {"type": "null"}]},
            },
            "additionalProperties": False,
        },
        "Outcome": {
            "type": "object",
            "required": ["kind", "winner", "final_robber", "capture_round"],
            "properties": {
                "kind": {"const": "outcome"},
                "winner": {"enum": ["cops", "robber"]},
                "final_robber": _mask,
                "capture_round": {"oneOf": [_round, {"type": "null"}]},
            },
            "additionalProperties": False,
        },
    },
}
