"""Equivalence classes of object types that count as interchangeable."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

DEFAULT_CLASSES = (("lamp", "floor_lamp"), ("knife", "butter_knife"))


class PermissiveMap:
    def __init__(self, classes: Iterable[Iterable[str]] = DEFAULT_CLASSES):
        self._rep: dict[str, str] = {}
        self.classes: list[frozenset[str]] = []
        for group in classes:
            members = frozenset(name.strip().lower().replace(" ", "_") for name in group)
            overlap = [m for m in members if m in self._rep]
            if overlap:
                raise ValueError(f"permissive classes overlap on {sorted(overlap)}")
            rep = min(members)
            for m in members:
                self._rep[m] = rep
            self.classes.append(members)

    @classmethod
    def load(cls, path: str | Path) -> "PermissiveMap":
        data = json.loads(Path(path).read_text())
        groups = data["classes"] if isinstance(data, dict) else data
        return cls(groups)

    def canonical(self, name: str | None) -> str | None:
        if name is None:
            return None
        return self._rep.get(name, name)

    def equivalent(self, a: str | None, b: str | None) -> bool:
        return self.canonical(a) == self.canonical(b)

    def names(self) -> set[str]:
        return set(self._rep)

    def __repr__(self) -> str:
        return f"PermissiveMap({[sorted(c) for c in self.classes]})"
