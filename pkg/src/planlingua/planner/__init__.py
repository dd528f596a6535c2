"""Grounding and forward search over typed STRIPS tasks."""

from .grounding import (
    DEFAULT_MAX_ACTIONS,
    CompiledTask,
    GroundingLimitError,
    GroundTask,
    ground,
)
from .search import (
    DEFAULT_BUDGET,
    PURE_PYTHON_ENV,
    SearchConfig,
    SearchResult,
    SearchStats,
    available_backends,
    compare_search,
    default_backend,
    kernel,
    plan,
    solve,
)

__all__ = [
    "CompiledTask",
    "DEFAULT_BUDGET",
    "DEFAULT_MAX_ACTIONS",
    "GroundTask",
    "GroundingLimitError",
    "PURE_PYTHON_ENV",
    "SearchConfig",
    "SearchResult",
    "SearchStats",
    "available_backends",
    "compare_search",
    "ground",
    "default_backend",
    "kernel",
    "plan",
    "solve",
]
