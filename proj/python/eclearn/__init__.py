"""Distributed online learner of Event Calculus event definitions."""

from ._core import (
    ConfigError,
    DataError,
    cross_validate,
    evaluate,
    generate,
    hoeffding_epsilon,
    learn,
)

__all__ = [
    "ConfigError",
    "DataError",
    "cross_validate",
    "evaluate",
    "generate",
    "hoeffding_epsilon",
    "learn",
]
