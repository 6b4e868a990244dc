"""HTTP session API and runtime wiring for the news agent."""

from newsagent.service.app import create_app
from newsagent.service.config import ServiceConfig, load_config
from newsagent.service.runtime import AgentRuntime, SessionNotFoundError, UnknownSourceError

__all__ = [
    "AgentRuntime",
    "ServiceConfig",
    "SessionNotFoundError",
    "UnknownSourceError",
    "create_app",
    "load_config",
]
