"""Declarative graph-pattern query language and template registry."""

from newsagent.query.ast import EdgeStep, NodeStep, Param, QueryPlan, render
from newsagent.query.errors import (
    MissingParamError,
    QuerySyntaxError,
    TypeMismatchError,
    UnboundVariableError,
    UnknownLabelOrEdgeTypeError,
    UnknownTemplateError,
)
from newsagent.query.executor import NodeSnapshot, ResultRow, execute
from newsagent.query.parser import parse
from newsagent.query.related import related_articles, UnknownArticleError
from newsagent.query.templates import QueryTemplate, TemplateParam, TemplateRegistry

__all__ = [
    "EdgeStep",
    "MissingParamError",
    "NodeSnapshot",
    "NodeStep",
    "Param",
    "QueryPlan",
    "QuerySyntaxError",
    "QueryTemplate",
    "ResultRow",
    "TemplateParam",
    "TemplateRegistry",
    "TypeMismatchError",
    "UnboundVariableError",
    "UnknownArticleError",
    "UnknownLabelOrEdgeTypeError",
    "UnknownTemplateError",
    "execute",
    "parse",
    "related_articles",
    "render",
]
