"""Evaluate query plans against a graph store.

Binding semantics: a row is one assignment of store nodes to the
pattern's steps such that labels, node properties, edge types and
directions, and WHERE filters all hold. Rows are distinct over the
full binding, ordered by ORDER BY (ties and the no-ORDER BY case fall
back to the ascending tuple of node keys along the path), then cut to
LIMIT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from newsagent.graph import (
    EDGE_SCHEMA,
    EdgeType,
    GraphStore,
    NodeHandle,
    NodeLabel,
)
from newsagent.query.ast import Param, QueryPlan, Value
from newsagent.query.errors import MissingParamError, TypeMismatchError


@dataclass(frozen=True)
class NodeSnapshot:
    label: str
    key: str
    properties: Mapping[str, str]


ResultRow = Dict[str, NodeSnapshot]

Binding = Tuple[NodeHandle, ...]


def _resolve(value: Value, params: Mapping[str, object]) -> object:
    if isinstance(value, Param):
        if value.name not in params:
            raise MissingParamError(f"missing value for ${value.name}")
        return params[value.name]
    return value


def _node_matches(store: GraphStore, handle: NodeHandle, step, params) -> bool:
    if step.label is not None and handle.label.value != step.label:
        return False
    if step.props:
        view = store.property_view(handle)
        for key, value in step.props:
            if view.get(key) != _resolve(value, params):
                return False
    return True


def _candidates(store: GraphStore, step, params) -> List[NodeHandle]:
    labels = [NodeLabel(step.label)] if step.label else list(NodeLabel)
    found = []
    for label in labels:
        for handle in store.nodes(label):
            if _node_matches(store, handle, step, params):
                found.append(handle)
    return found


def _expand(store: GraphStore, handle: NodeHandle, edge) -> List[NodeHandle]:
    if edge.edge_type is not None:
        return store.neighbors(handle, EdgeType(edge.edge_type), edge.direction)
    out = []
    for edge_type in EdgeType:
        src_label, dst_label = EDGE_SCHEMA[edge_type]
        expected = src_label if edge.direction == "out" else dst_label
        if handle.label is expected:
            out.extend(store.neighbors(handle, edge_type, edge.direction))
    return sorted(set(out), key=lambda h: (h.label.value, h.key))


def find_bindings(plan: QueryPlan, params: Mapping[str, object], store: GraphStore) -> List[Binding]:
    """All distinct full bindings of the path pattern, before WHERE."""
    partial: List[Binding] = [(h,) for h in _candidates(store, plan.nodes[0], params)]
    for edge, step in zip(plan.edges, plan.nodes[1:]):
        grown: List[Binding] = []
        for binding in partial:
            for neighbor in _expand(store, binding[-1], edge):
                if _node_matches(store, neighbor, step, params):
                    grown.append(binding + (neighbor,))
        partial = grown
    seen = set()
    unique = []
    for binding in partial:
        if binding not in seen:
            seen.add(binding)
            unique.append(binding)
    return unique


def _binding_vars(plan: QueryPlan, binding: Binding) -> Dict[str, NodeHandle]:
    return {
        step.var: handle
        for step, handle in zip(plan.nodes, binding)
        if step.var is not None
    }


def _key_tuple(binding: Binding) -> Tuple[str, ...]:
    return tuple(f"{h.label.value}\x00{h.key}" for h in binding)


def order_bindings(
    plan: QueryPlan,
    bindings: List[Binding],
    store: GraphStore,
) -> List[Binding]:
    """Deterministic ordering: ORDER BY key, then path key tuple ascending."""
    ordered = sorted(bindings, key=_key_tuple)
    if plan.order_by is None:
        return ordered
    spec = plan.order_by

    def sort_value(binding: Binding) -> str:
        handle = _binding_vars(plan, binding)[spec.var]
        value = store.property_view(handle).get(spec.prop)
        if not isinstance(value, str):
            raise TypeMismatchError(
                f"cannot order by {spec.var}.{spec.prop}: "
                f"{'missing' if value is None else type(value).__name__} value on {handle.key!r}"
            )
        return value

    values = [(sort_value(b), b) for b in ordered]
    values.sort(key=lambda pair: pair[0], reverse=spec.descending)
    return [b for _, b in values]


def execute(plan: QueryPlan, params: Mapping[str, object], store: GraphStore) -> List[ResultRow]:
    """Run a plan; returns rows mapping each named variable to a snapshot."""
    missing = sorted(plan.param_names() - set(params))
    if missing:
        raise MissingParamError(f"missing value for ${missing[0]}")
    bindings = find_bindings(plan, params, store)

    kept = []
    for binding in bindings:
        bound = _binding_vars(plan, binding)
        ok = True
        for flt in plan.filters:
            view = store.property_view(bound[flt.var])
            if view.get(flt.prop) != _resolve(flt.value, params):
                ok = False
                break
        if ok:
            kept.append(binding)

    kept = order_bindings(plan, kept, store)
    if plan.limit is not None:
        kept = kept[: plan.limit]

    rows: List[ResultRow] = []
    for binding in kept:
        row: ResultRow = {}
        for step, handle in zip(plan.nodes, binding):
            if step.var is not None:
                row[step.var] = NodeSnapshot(
                    label=handle.label.value,
                    key=handle.key,
                    properties=store.property_view(handle),
                )
        rows.append(row)
    return rows
