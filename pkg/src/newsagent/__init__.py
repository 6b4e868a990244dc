"""Conversational news search over an embedded property graph."""

__version__ = "0.1.0"
