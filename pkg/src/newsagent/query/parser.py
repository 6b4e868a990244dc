"""Recursive-descent parser for the graph-pattern query grammar.

    query   := "MATCH" pattern ["WHERE" cond {"AND" cond}] "RETURN" var
               ["ORDER BY" var "." prop ("ASC"|"DESC")] ["LIMIT" int]
    pattern := node {edge node}
    node    := "(" [var] [":" Label] [props] ")"
    edge    := "-[" [":" EdgeType] "]->" | "<-[" [":" EdgeType] "]-"
    props   := "{" key ":" (param|string) {"," key ":" (param|string)} "}"
    cond    := var "." prop "=" (param|string)
    param   := "$" ident

Keywords are case-sensitive. Labels and edge types are validated
against the graph schema at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from newsagent.graph import EdgeType, NodeLabel
from newsagent.query.ast import (
    EdgeStep,
    Filter,
    NodeStep,
    OrderBy,
    Param,
    QueryPlan,
    Value,
)
from newsagent.query.errors import (
    QuerySyntaxError,
    UnboundVariableError,
    UnknownLabelOrEdgeTypeError,
)

_KEYWORDS = {"MATCH", "WHERE", "AND", "RETURN", "ORDER", "BY", "ASC", "DESC", "LIMIT"}
_LABELS = {label.value for label in NodeLabel}
_EDGE_TYPES = {t.value for t in EdgeType}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<param>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow_out>-\[)
  | (?P<arrow_in><-\[)
  | (?P<close_out>\]->)
  | (?P<close_in>\]-)
  | (?P<punct>[(){}:,.=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int  # 1-based


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), pos + 1))
        pos = match.end()
    tokens.append(_Token("eof", "", len(text) + 1))
    return tokens


def _unescape(raw: str) -> str:
    return raw[1:-1].replace('\\"', '"').replace("\\\\", "\\")


def _filter_sort_key(flt: Filter):
    if isinstance(flt.value, Param):
        return (flt.var, flt.prop, 0, flt.value.name)
    return (flt.var, flt.prop, 1, flt.value)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            wanted = text or kind
            raise QuerySyntaxError(
                f"expected {wanted!r}, found {token.text or 'end of query'!r}",
                token.column,
            )
        return self.advance()

    def keyword(self, word: str) -> _Token:
        return self.expect("ident", word)

    def at_keyword(self, word: str) -> bool:
        return self.current.kind == "ident" and self.current.text == word

    # -- grammar ------------------------------------------------------------

    def parse(self) -> QueryPlan:
        self.keyword("MATCH")
        nodes, edges = self.pattern()
        filters: List[Filter] = []
        if self.at_keyword("WHERE"):
            self.advance()
            filters.append(self.condition())
            while self.at_keyword("AND"):
                self.advance()
                filters.append(self.condition())
        self.keyword("RETURN")
        return_var = self.variable()
        order_by = None
        if self.at_keyword("ORDER"):
            self.advance()
            self.keyword("BY")
            var = self.variable()
            self.expect("punct", ".")
            prop = self.expect("ident").text
            direction = self.expect("ident")
            if direction.text not in ("ASC", "DESC"):
                raise QuerySyntaxError("expected 'ASC' or 'DESC'", direction.column)
            order_by = OrderBy(var, prop, descending=direction.text == "DESC")
        limit = None
        if self.at_keyword("LIMIT"):
            self.advance()
            limit = int(self.expect("int").text)
        self.expect("eof")

        plan = QueryPlan(
            nodes=tuple(nodes),
            edges=tuple(edges),
            filters=tuple(sorted(filters, key=_filter_sort_key)),
            return_var=return_var,
            order_by=order_by,
            limit=limit,
        )
        self._check_bindings(plan)
        return plan

    def pattern(self) -> Tuple[List[NodeStep], List[EdgeStep]]:
        nodes = [self.node_step()]
        edges: List[EdgeStep] = []
        while self.current.kind in ("arrow_out", "arrow_in"):
            edges.append(self.edge_step())
            nodes.append(self.node_step())
        return nodes, edges

    def node_step(self) -> NodeStep:
        self.expect("punct", "(")
        var = None
        if self.current.kind == "ident":
            var = self.advance().text
        label = None
        if self.current.kind == "punct" and self.current.text == ":":
            self.advance()
            token = self.expect("ident")
            if token.text not in _LABELS:
                raise UnknownLabelOrEdgeTypeError(f"unknown node label {token.text!r}")
            label = token.text
        props: List[Tuple[str, Value]] = []
        if self.current.kind == "punct" and self.current.text == "{":
            props = self.props()
        self.expect("punct", ")")
        return NodeStep(var=var, label=label, props=tuple(props))

    def props(self) -> List[Tuple[str, Value]]:
        self.expect("punct", "{")
        out = [self.prop_entry()]
        while self.current.kind == "punct" and self.current.text == ",":
            self.advance()
            out.append(self.prop_entry())
        self.expect("punct", "}")
        return out

    def prop_entry(self) -> Tuple[str, Value]:
        key = self.expect("ident").text
        self.expect("punct", ":")
        return key, self.value()

    def edge_step(self) -> EdgeStep:
        direction = "out" if self.current.kind == "arrow_out" else "in"
        self.advance()
        edge_type = None
        if self.current.kind == "punct" and self.current.text == ":":
            self.advance()
            token = self.expect("ident")
            if token.text not in _EDGE_TYPES:
                raise UnknownLabelOrEdgeTypeError(f"unknown edge type {token.text!r}")
            edge_type = token.text
        closer = "close_out" if direction == "out" else "close_in"
        if self.current.kind != closer:
            raise QuerySyntaxError(
                f"malformed edge near {self.current.text!r}", self.current.column
            )
        self.advance()
        return EdgeStep(edge_type=edge_type, direction=direction)

    def condition(self) -> Filter:
        var = self.variable()
        self.expect("punct", ".")
        prop = self.expect("ident").text
        self.expect("punct", "=")
        return Filter(var, prop, self.value())

    def value(self) -> Value:
        token = self.current
        if token.kind == "param":
            self.advance()
            return Param(token.text[1:])
        if token.kind == "string":
            self.advance()
            return _unescape(token.text)
        raise QuerySyntaxError(
            f"expected a string or $param, found {token.text or 'end of query'!r}",
            token.column,
        )

    def variable(self) -> str:
        token = self.expect("ident")
        if token.text in _KEYWORDS:
            raise QuerySyntaxError(f"expected a variable, found {token.text!r}", token.column)
        return token.text

    def _check_bindings(self, plan: QueryPlan):
        bound = set(plan.variables())
        for flt in plan.filters:
            if flt.var not in bound:
                raise UnboundVariableError(f"variable {flt.var!r} not bound in MATCH")
        if plan.return_var not in bound:
            raise UnboundVariableError(f"variable {plan.return_var!r} not bound in MATCH")
        if plan.order_by and plan.order_by.var not in bound:
            raise UnboundVariableError(f"variable {plan.order_by.var!r} not bound in MATCH")


def parse(text: str) -> QueryPlan:
    """Parse query text into a normalized QueryPlan."""
    if not text or not text.strip():
        raise QuerySyntaxError("empty query", 1)
    return _Parser(text).parse()
