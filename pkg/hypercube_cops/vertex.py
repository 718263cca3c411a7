import operator
from typing import (
    Any,
    Iterable,
    Tuple,
    Type,
)

import pydantic_core
from pydantic import GetJsonSchemaHandler
from pydantic.json_schema import JsonSchemaValue
from typing_extensions import Self

from hypercube_cops.utils import (
    MAX_GROUND_SIZE,
    elements_of,
    mask_of,
    popcount,
)

VERTEX_SET_SCHEMA = {
    "type": "integer",
    "minimum": 0,
    "maximum": 2**MAX_GROUND_SIZE - 1,
    "description": "Subset of {1..n} encoded as a bit mask, bit i-1 for element i",
}


class VertexSet(int):
    """A hypercube vertex: a subset of ``{1..n}`` stored as an n-bit mask."""

    @classmethod
    def __get_pydantic_core_schema__(
        cls: Type[Self], *_: Any
    ) -> pydantic_core.CoreSchema:
        return pydantic_core.core_schema.no_info_after_validator_function(
            cls,
            pydantic_core.core_schema.int_schema(ge=0, lt=2**MAX_GROUND_SIZE),
        )

    @classmethod
    def __get_pydantic_json_schema__(
        cls: Type[Self],
        core_schema: pydantic_core.CoreSchema,
        handler: GetJsonSchemaHandler,
    ) -> JsonSchemaValue:
        json_schema = handler(core_schema)
        json_schema = handler.resolve_ref_schema(json_schema)
        json_schema.update(VERTEX_SET_SCHEMA)

        return json_schema

    @classmethod
    def of(cls: Type[Self], elements: Iterable[int]) -> Self:
        return cls(mask_of(elements))

    @property
    def level(self: Self) -> int:
        return popcount(self)

    @property
    def members(self: Self) -> Tuple[int, ...]:
        return tuple(elements_of(self))

    def __contains__(self: Self, element: object) -> bool:
        try:
            position = operator.index(element)  # type: ignore[call-overload]
        except TypeError:
            return False
        return position >= 1 and bool(self >> (position - 1) & 1)

    def issubset(self: Self, other: int) -> bool:
        return self & ~other == 0

    def without(self: Self, element: int) -> "VertexSet":
        return VertexSet(self & ~(1 << (element - 1)))

    def with_element(self: Self, element: int) -> "VertexSet":
        return VertexSet(self | (1 << (element - 1)))

    def __repr__(self: Self) -> str:
        return f"VertexSet({set(self.members) or '{}'})"

    def __str__(self: Self) -> str:
        return "{" + ",".join(str(element) for element in self.members) + "}"
