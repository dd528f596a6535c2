"""Surface-text helpers shared by the goal, template and relation readers."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

# Multi-word names that are not household types but still appear in model output.
EXTRA_NAMES = ("lamp", "robot_has_obj", "can_reach", "two_task", "go_to", "pick_up")


@lru_cache(maxsize=1)
def default_vocabulary() -> frozenset[str]:
    from .household import household_domain

    return frozenset(household_domain().hierarchy.types()) | frozenset(EXTRA_NAMES)


def split_entries(text: str) -> list[list[str]]:
    """``"a b, c d"`` -> ``[["a", "b"], ["c", "d"]]``; empty entries are dropped."""
    out = []
    for chunk in text.split(","):
        tokens = chunk.lower().split()
        if tokens:
            out.append(tokens)
    return out


def join_words(tokens: list[str], vocabulary: Iterable[str] | None = None, max_words: int = 3) -> list[str]:
    """Greedily merge runs of tokens that spell a known underscore name."""
    vocab = default_vocabulary() if vocabulary is None else frozenset(vocabulary)
    out, i = [], 0
    while i < len(tokens):
        for width in range(min(max_words, len(tokens) - i), 1, -1):
            candidate = "_".join(tokens[i:i + width])
            if candidate in vocab:
                out.append(candidate)
                i += width
                break
        else:
            out.append(tokens[i])
            i += 1
    return out


def fit_arity(tokens: list[str], arity: int, vocabulary=None) -> list[str] | None:
    """Split ``tokens`` into exactly ``arity`` names, or ``None`` if impossible."""
    if len(tokens) == arity:
        return list(tokens)
    merged = join_words(tokens, vocabulary)
    if len(merged) == arity:
        return merged
    if arity == 1 and tokens:
        return ["_".join(tokens)]
    return None


def spoken(name: str) -> str:
    return name.replace("_", " ")
