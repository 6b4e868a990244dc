"""Independent brute-force oracles used to cross-check the implementations.

These deliberately re-derive results from first principles (enumerate
everything, then filter/sort) instead of calling into the code paths
they verify.
"""

from itertools import product

from newsagent.graph import EDGE_SCHEMA, EdgeType, GraphStore, NodeLabel
from newsagent.query.ast import Param, QueryPlan


def _value(v, params):
    return params[v.name] if isinstance(v, Param) else v


def _view(store: GraphStore, handle):
    return store.property_view(handle)


def _adjacent(store: GraphStore, a, b, edge) -> bool:
    """Is there an edge of this step's type/direction from a to b?"""
    src, dst = (a, b) if edge.direction == "out" else (b, a)
    if edge.edge_type is not None:
        types = [EdgeType(edge.edge_type)]
    else:
        types = list(EdgeType)
    for t in types:
        s_label, d_label = EDGE_SCHEMA[t]
        if src.label is s_label and dst.label is d_label and store.has_edge(t, src.key, dst.key):
            return True
    return False


def brute_force_execute(plan: QueryPlan, params, store: GraphStore):
    """Enumerate label-filtered node tuples, then check edges and filters.

    Returns rows as tuples of (var, (label, key)) pairs for named steps,
    fully ordered like the engine contract: ORDER BY value (ties by the
    path's key tuple ascending), LIMIT applied last.
    """
    all_nodes = [h for label in NodeLabel for h in store.nodes(label)]
    pools = []
    for step in plan.nodes:
        pool = [h for h in all_nodes if step.label is None or h.label.value == step.label]
        pools.append(pool)

    matches = []
    for combo in product(*pools):
        ok = True
        for step, handle in zip(plan.nodes, combo):
            for key, value in step.props:
                if _view(store, handle).get(key) != _value(value, params):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        for i, edge in enumerate(plan.edges):
            if not _adjacent(store, combo[i], combo[i + 1], edge):
                ok = False
                break
        if not ok:
            continue
        named = {s.var: h for s, h in zip(plan.nodes, combo) if s.var is not None}
        for flt in plan.filters:
            if _view(store, named[flt.var]).get(flt.prop) != _value(flt.value, params):
                ok = False
                break
        if ok:
            matches.append(combo)

    # distinct over the full binding
    seen, unique = set(), []
    for combo in matches:
        if combo not in seen:
            seen.add(combo)
            unique.append(combo)

    def key_tuple(combo):
        return tuple((h.label.value, h.key) for h in combo)

    unique.sort(key=key_tuple)
    if plan.order_by is not None:
        spec = plan.order_by
        named_index = {s.var: i for i, s in enumerate(plan.nodes) if s.var is not None}
        decorated = []
        for combo in unique:
            value = _view(store, combo[named_index[spec.var]]).get(spec.prop)
            if not isinstance(value, str):
                raise TypeError(f"non-comparable order value {value!r}")
            decorated.append((value, combo))
        decorated.sort(key=lambda pair: pair[0], reverse=spec.descending)
        unique = [c for _, c in decorated]
    if plan.limit is not None:
        unique = unique[: plan.limit]

    rows = []
    for combo in unique:
        rows.append(
            tuple(
                (s.var, (h.label.value, h.key))
                for s, h in zip(plan.nodes, combo)
                if s.var is not None
            )
        )
    return rows


def engine_rows_as_tuples(rows, plan: QueryPlan):
    """Project engine output to the oracle's comparable form."""
    out = []
    for row in rows:
        items = []
        for step in plan.nodes:
            if step.var is not None and step.var in row:
                snap = row[step.var]
                items.append((step.var, (snap.label, snap.key)))
        out.append(tuple(items))
    return out


def brute_force_related(store: GraphStore, seed_key: str, entity_weight=2, tag_weight=1):
    """Pairwise-score every other article against the seed, rank, and return."""
    def out_keys(article_key, edge_type):
        keys = set()
        for label in (NodeLabel.ARTICLE,):
            handle = store.node(label, article_key)
            for n in store.neighbors(handle, edge_type, "out"):
                keys.add(n.key)
        return keys

    seed_entities = out_keys(seed_key, EdgeType.MENTIONS)
    seed_tags = out_keys(seed_key, EdgeType.HAS_TAG)
    scored = []
    for key in store.keys(NodeLabel.ARTICLE):
        if key == seed_key:
            continue
        entities = out_keys(key, EdgeType.MENTIONS)
        tags = out_keys(key, EdgeType.HAS_TAG)
        score = entity_weight * len(entities & seed_entities) + tag_weight * len(tags & seed_tags)
        if score > 0:
            date = store.node_props(store.node(NodeLabel.ARTICLE, key))["date"]
            scored.append((score, date, key))
    # score desc, date desc, key asc
    scored.sort(key=lambda t: (-t[0], tuple(-ord(c) for c in t[1]), t[2]))
    return [(key, score) for score, _, key in scored]
