"""Query plan data model and pretty-printer.

A plan is a single linear path of node steps joined by directed edge
steps, equality-only filters, one returned variable, and optional
ORDER BY / LIMIT. ``parse(render(plan)) == plan`` holds for every plan
the parser can produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class Param:
    """A `$name` placeholder bound at execution time."""

    name: str


Value = Union[Param, str]


@dataclass(frozen=True)
class NodeStep:
    var: Optional[str] = None
    label: Optional[str] = None
    props: Tuple[Tuple[str, Value], ...] = ()


@dataclass(frozen=True)
class EdgeStep:
    edge_type: Optional[str] = None
    direction: str = "out"  # "out": -[..]->  "in": <-[..]-


@dataclass(frozen=True)
class Filter:
    var: str
    prop: str
    value: Value


@dataclass(frozen=True)
class OrderBy:
    var: str
    prop: str
    descending: bool = False


@dataclass(frozen=True)
class QueryPlan:
    nodes: Tuple[NodeStep, ...]
    edges: Tuple[EdgeStep, ...] = ()
    filters: Tuple[Filter, ...] = ()  # kept sorted (normalized form)
    return_var: str = ""
    order_by: Optional[OrderBy] = None
    limit: Optional[int] = None

    def param_names(self) -> set:
        names = set()
        for step in self.nodes:
            for _, value in step.props:
                if isinstance(value, Param):
                    names.add(value.name)
        for flt in self.filters:
            if isinstance(flt.value, Param):
                names.add(flt.value.name)
        return names

    def variables(self) -> Tuple[str, ...]:
        return tuple(step.var for step in self.nodes if step.var is not None)


def _render_value(value: Value) -> str:
    if isinstance(value, Param):
        return f"${value.name}"
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _render_node(step: NodeStep) -> str:
    parts = step.var or ""
    if step.label:
        parts += f":{step.label}"
    if step.props:
        inner = ", ".join(f"{k}: {_render_value(v)}" for k, v in step.props)
        parts += (" " if parts else "") + "{" + inner + "}"
    return f"({parts})"


def render(plan: QueryPlan) -> str:
    """Pretty-print a plan back to query text the parser accepts."""
    out = ["MATCH", _render_node(plan.nodes[0])]
    for edge, node in zip(plan.edges, plan.nodes[1:]):
        label = f":{edge.edge_type}" if edge.edge_type else ""
        arrow = f"-[{label}]->" if edge.direction == "out" else f"<-[{label}]-"
        out[-1] = out[-1] + arrow + _render_node(node)
    if plan.filters:
        conds = " AND ".join(
            f"{f.var}.{f.prop} = {_render_value(f.value)}" for f in plan.filters
        )
        out.append(f"WHERE {conds}")
    out.append(f"RETURN {plan.return_var}")
    if plan.order_by:
        direction = "DESC" if plan.order_by.descending else "ASC"
        out.append(f"ORDER BY {plan.order_by.var}.{plan.order_by.prop} {direction}")
    if plan.limit is not None:
        out.append(f"LIMIT {plan.limit}")
    return " ".join(out)
