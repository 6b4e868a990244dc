"""Named, parameterized query templates.

The registry maps a template name to query source text plus its
declared parameters. Running a template parses and executes the source
with the supplied parameter values. Two optional post-steps extend
what the pattern language itself can express:

* ``distinct_by``: keep only the first row per distinct binding of one
  variable (used by ``overview`` for "newest article per resort");
* ``limit``: a row cap applied after ``distinct_by``, either a fixed
  integer or a ``$param`` reference.

Without post-steps, ``run(name, params)`` is exactly
``execute(parse(source), params, store)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Mapping, Optional, Tuple, Union

from newsagent.graph import GraphStore
from newsagent.query.ast import QueryPlan
from newsagent.query.errors import (
    MissingParamError,
    TypeMismatchError,
    UnknownTemplateError,
)
from newsagent.query.executor import ResultRow, execute
from newsagent.query.parser import parse


@dataclass(frozen=True)
class TemplateParam:
    name: str
    kind: str = "string"


@dataclass(frozen=True)
class QueryTemplate:
    name: str
    source: str
    params: Tuple[TemplateParam, ...] = ()
    distinct_by: Optional[str] = None
    limit: Union[int, str, None] = None  # int, or "$param"

    def placeholder_names(self, plan: QueryPlan) -> set:
        names = set(plan.param_names())
        if isinstance(self.limit, str):
            names.add(self.limit.lstrip("$"))
        return names


class TemplateRegistry:
    """Holds parsed templates; validates declared params against placeholders."""

    def __init__(self):
        self._templates: Dict[str, QueryTemplate] = {}
        self._plans: Dict[str, QueryPlan] = {}

    def register(self, template: QueryTemplate) -> None:
        plan = parse(template.source)
        declared = {p.name for p in template.params}
        placeholders = template.placeholder_names(plan)
        if declared != placeholders:
            raise ValueError(
                f"template {template.name!r}: declared params {sorted(declared)} "
                f"!= placeholders {sorted(placeholders)}"
            )
        if template.distinct_by is not None and template.distinct_by not in plan.variables():
            raise ValueError(
                f"template {template.name!r}: distinct_by {template.distinct_by!r} "
                "not bound in MATCH"
            )
        self._templates[template.name] = template
        self._plans[template.name] = plan

    def names(self) -> List[str]:
        return sorted(self._templates)

    def get(self, name: str) -> QueryTemplate:
        try:
            return self._templates[name]
        except KeyError:
            raise UnknownTemplateError(f"no template named {name!r}") from None

    def run(self, name: str, params: Mapping[str, object], store: GraphStore) -> List[ResultRow]:
        template = self.get(name)
        rows = execute(self._plans[name], params, store)
        if template.distinct_by is not None:
            seen = set()
            deduped = []
            for row in rows:
                key = row[template.distinct_by].key
                if key not in seen:
                    seen.add(key)
                    deduped.append(row)
            rows = deduped
        limit = template.limit
        if isinstance(limit, str):
            pname = limit.lstrip("$")
            if pname not in params:
                raise MissingParamError(f"missing value for ${pname}")
            value = params[pname]
            if isinstance(value, bool) or not isinstance(value, int):
                try:
                    value = int(value)
                except (TypeError, ValueError):
                    raise TypeMismatchError(
                        f"limit param ${pname} must be an integer, got {value!r}"
                    ) from None
            limit = value
        if limit is not None:
            if limit < 0:
                raise TypeMismatchError(f"limit must be non-negative, got {limit}")
            rows = rows[:limit]
        return rows

    @classmethod
    def from_mapping(cls, data: Mapping[str, Mapping[str, object]]) -> "TemplateRegistry":
        registry = cls()
        for name, spec in data.items():
            params = tuple(
                TemplateParam(p["name"], p.get("kind", "string"))
                for p in spec.get("params", [])
            )
            registry.register(
                QueryTemplate(
                    name=name,
                    source=spec["source"],
                    params=params,
                    distinct_by=spec.get("distinct_by"),
                    limit=spec.get("limit"),
                )
            )
        return registry

    @classmethod
    def from_file(cls, path) -> "TemplateRegistry":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_mapping(json.load(fh))

    @classmethod
    def builtin(cls) -> "TemplateRegistry":
        """The shipped template set covering every dialogue query."""
        text = resources.files("newsagent").joinpath("assets/query_templates.json").read_text("utf-8")
        return cls.from_mapping(json.loads(text))
