"""
Links between the HTTP resources.

A resource declares each link as a ``UrlFor`` field naming a route and a
parameter template such as ``{"n": "<n>"}``. The template is filled from the
resource's own fields once the resource is validated, and the link
serializes as the bare path string.
"""

import logging
import re
from functools import reduce
from typing import Any, Callable, ClassVar, Dict, Mapping, Optional, Union

from pydantic import BaseModel, PrivateAttr, model_serializer, model_validator
from starlette.applications import Starlette
from typing_extensions import Self

from hypercube_cops.utils import InvalidAttribute

logger = logging.getLogger(__name__)

LinkCondition = Callable[[Mapping[str, Any]], bool]

_FIELD_REFERENCE = re.compile(r"^\s*<\s*([\w.]+)\s*>\s*$")


def _step(value: Any, key: str) -> Any:
    if value is None:
        return None
    if isinstance(value, Mapping):
        return value.get(key)
    return getattr(value, key, None)


def extract_value_by_name(data_object: Any, attribute: str) -> Any:
    """Follow a dotted path through mappings and attributes."""
    value = reduce(_step, attribute.split("."), data_object)
    if value is None:
        error_message = f"{attribute} is not a valid attribute of {data_object}"
        raise InvalidAttribute(error_message)
    return value


def resolve_param_values(
    param_values_template: Optional[Mapping[str, Any]], data_object: Any
) -> Dict[str, Any]:
    """
    Replace every ``<field>`` template with the value found in
    ``data_object``. Literal values are kept.
    """
    resolved: Dict[str, Any] = {}
    for param, template in (param_values_template or {}).items():
        reference = _FIELD_REFERENCE.match(str(template))
        resolved[param] = (
            extract_value_by_name(data_object, reference.group(1))
            if reference
            else template
        )
    return resolved


class UrlFor(BaseModel):
    """
    Path of a named route. Unresolved, or resolved without an app or with a
    failing condition, the path is ``None``.
    """

    href: Optional[str] = None

    _route: Optional[str] = PrivateAttr(default=None)
    _template: Mapping[str, Any] = PrivateAttr(default_factory=dict)
    _condition: Optional[LinkCondition] = PrivateAttr(default=None)

    def __init__(
        self: Self,
        endpoint: Union[Callable[..., Any], str],
        param_values: Optional[Mapping[str, Any]] = None,
        condition: Optional[LinkCondition] = None,
        **kwargs: Any,
    ) -> None:
        super().__init__(**kwargs)
        self._route = endpoint if isinstance(endpoint, str) else endpoint.__name__
        self._template = param_values or {}
        self._condition = condition

    @model_validator(mode="before")
    @classmethod
    def _accept_rendered_path(cls, data: Any) -> Any:
        # A serialized resource carries its links as plain paths.
        if data is None or isinstance(data, str):
            return {"href": data}
        return data

    @model_serializer
    def _as_path(self: Self) -> Optional[str]:
        return self.href

    def _relink(self: Self, route: str, href: Optional[str]) -> "UrlFor":
        return UrlFor(route, self._template, self._condition, href=href)

    def __call__(
        self: Self, app: Optional[Starlette], values: Mapping[str, Any]
    ) -> "UrlFor":
        route = self._route
        if route is None:
            return self
        if app is None:
            return self._relink(route, None)
        if self._condition is not None and not self._condition(values):
            logger.debug("Link to %s withheld for %s", route, dict(values))
            return self._relink(route, None)

        params = resolve_param_values(self._template, values)
        return self._relink(route, str(app.url_path_for(route, **params)))


class LinkedModel(BaseModel):
    """Model whose ``UrlFor`` fields are resolved against the bound app."""

    _app: ClassVar[Optional[Starlette]] = None

    @model_validator(mode="after")
    def _resolve_links(self: Self) -> Self:
        values = {name: getattr(self, name) for name in type(self).model_fields}
        for name, value in values.items():
            if isinstance(value, UrlFor):
                setattr(self, name, value(LinkedModel._app, values))
        return self

    @classmethod
    def init_app(cls, app: Starlette) -> None:
        """Bind the app that owns the route names used by every link."""
        LinkedModel._app = app
