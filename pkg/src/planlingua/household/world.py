"""Household domain fixture, scenes and problem construction."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..pddl import ROOT_TYPE, Domain, GoalFormula, PDDLError, Problem, normalize_name, parse_domain
from ..textutil import fit_arity, split_entries

MOVABLES = ("apple", "tomato", "potato", "lettuce", "knife", "butter_knife", "spoon", "cup", "bowl",
            "pan", "spatula", "floor_lamp")
RECEPTACLES = ("table", "dining_table", "countertop", "fridge", "microwave", "sink", "drawer")
SLICEABLE = ("apple", "tomato", "potato", "lettuce")
CONTAINERS = ("cup", "bowl", "pan")
START = "start"
START_TYPE = "location"

# static per-class facts: predicate -> classes carrying it
CLASS_FACTS = {
    "is_knife": ("knife", "butter_knife"),
    "is_heater": ("microwave",),
    "is_cooler": ("fridge",),
    "is_washer": ("sink",),
    "is_toggleable": ("floor_lamp",),
}


class SceneError(PDDLError):
    pass


def domain_text() -> str:
    return resources.files("planlingua.household").joinpath("data/domain.pddl").read_text()


@lru_cache(maxsize=1)
def household_domain() -> Domain:
    return parse_domain(domain_text())


@dataclass(frozen=True)
class Scene:
    """Scene instances ``(id, class)`` and ``on`` relations ``(upper, lower)``."""

    objects: tuple[tuple[str, str], ...] = ()
    relations: tuple[tuple[str, str], ...] = ()

    def type_of(self, obj: str) -> str:
        for name, cls in self.objects:
            if name == obj:
                return cls
        raise KeyError(obj)

    def of_class(self, cls: str) -> list[str]:
        return [name for name, c in self.objects if c == cls]

    def support(self, obj: str) -> str | None:
        for upper, lower in self.relations:
            if upper == obj:
                return lower
        return None

    def validate(self, domain: Domain | None = None) -> None:
        names = [n for n, _ in self.objects]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise SceneError(f"duplicate instance id(s) {dupes}")
        if START in names:
            raise SceneError(f"'{START}' is reserved for the robot start location")
        known = set(names)
        for upper, lower in self.relations:
            for end in (upper, lower):
                if end not in known:
                    raise SceneError(f"relation 'on {upper} {lower}' mentions undeclared instance '{end}'")
            if upper == lower:
                raise SceneError(f"relation 'on {upper} {lower}' puts an object on itself")
        _check_acyclic(self.relations)
        if domain is not None:
            hierarchy = domain.hierarchy
            for name, cls in self.objects:
                if cls not in hierarchy:
                    raise SceneError(f"instance '{name}' has unknown class '{cls}'")
                if not hierarchy.is_subtype(cls, "place"):
                    raise SceneError(f"instance '{name}' has class '{cls}', which is not a scene object type")
            for upper, _ in self.relations:
                if not hierarchy.is_subtype(self.type_of(upper), "movable"):
                    raise SceneError(f"'{upper}' ({self.type_of(upper)}) cannot be placed on anything")

    def to_record(self) -> dict:
        return {"objects": [f"{n}:{c}" for n, c in self.objects],
                "relations": [f"on {a} {b}" for a, b in self.relations]}

    @classmethod
    def from_record(cls, record: dict) -> "Scene":
        objects = []
        for item in record.get("objects", []):
            if ":" not in item:
                raise SceneError(f"object entry {item!r} is not 'id:class'")
            name, cls_name = item.split(":", 1)
            objects.append((normalize_name(name), normalize_name(cls_name)))
        relations = []
        for item in record.get("relations", []):
            parts = item.split()
            if len(parts) != 3 or parts[0].lower() != "on":
                raise SceneError(f"relation {item!r} is not 'on <id> <id>'")
            relations.append((normalize_name(parts[1]), normalize_name(parts[2])))
        return cls(tuple(objects), tuple(relations))

    def relations_text(self) -> str:
        """Type-level rendering, as given to language models."""
        return ", ".join(f"on {self.type_of(a).replace('_', ' ')} {self.type_of(b).replace('_', ' ')}"
                         for a, b in self.relations)


def _check_acyclic(relations) -> None:
    below: dict[str, list[str]] = {}
    for upper, lower in relations:
        below.setdefault(upper, []).append(lower)
    state: dict[str, int] = {}

    def visit(node, trail):
        mark = state.get(node, 0)
        if mark == 1:
            cycle = trail[trail.index(node):] + [node]
            raise SceneError("relation cycle: " + " -> ".join(cycle))
        if mark == 2:
            return
        state[node] = 1
        for nxt in below.get(node, ()):
            visit(nxt, trail + [node])
        state[node] = 2

    for node in sorted(below):
        visit(node, [])


_INSTANCE = re.compile(r"^(.+)_(\d+)$")


def parse_relations(text: str, vocabulary=None) -> Scene:
    """Read ``"on tomato table, on bowl countertop"`` into a scene.

    A token like ``tomato_2`` is an instance id. A bare type on the left
    reuses an instance of that type that is not yet on anything, otherwise a
    new one is numbered; a bare type on the right reuses the first instance
    of the type.
    """
    objects: list[tuple[str, str]] = []
    relations: list[tuple[str, str]] = []
    supported: set[str] = set()
    counters: dict[str, int] = {}

    def new_instance(cls: str) -> str:
        while True:
            counters[cls] = counters.get(cls, 0) + 1
            name = f"{cls}_{counters[cls]}"
            if all(n != name for n, _ in objects):
                objects.append((name, cls))
                return name

    def resolve(token: str, left: bool) -> str:
        m = _INSTANCE.match(token)
        if m:
            if all(n != token for n, _ in objects):
                objects.append((token, m.group(1)))
                counters[m.group(1)] = max(counters.get(m.group(1), 0), int(m.group(2)))
            return token
        existing = [n for n, c in objects if c == token]
        if left:
            free = [n for n in existing if n not in supported]
            return free[0] if free else new_instance(token)
        return existing[0] if existing else new_instance(token)

    for tokens in split_entries(text):
        if tokens[0] != "on":
            raise SceneError(f"relation {' '.join(tokens)!r} does not start with 'on'")
        args = fit_arity(tokens[1:], 2, vocabulary)
        if args is None:
            raise SceneError(f"relation {' '.join(tokens)!r} needs exactly two objects")
        upper = resolve(normalize_name(args[0]), True)
        lower = resolve(normalize_name(args[1]), False)
        if upper in supported:
            raise SceneError(f"'{upper}' is already on something")
        supported.add(upper)
        relations.append((upper, lower))
    scene = Scene(tuple(objects), tuple(relations))
    _check_acyclic(scene.relations)
    return scene


def class_facts(scene: Scene) -> set[tuple[str, ...]]:
    facts = set()
    for name, cls in scene.objects:
        for predicate, classes in CLASS_FACTS.items():
            if cls in classes:
                facts.add((predicate, name))
    return facts


def build_problem(scene: Scene, goal: GoalFormula, name: str = "task", domain: Domain | None = None) -> Problem:
    """Problem over the scene: on facts, robot at ``start`` with an empty hand, class facts."""
    domain = domain or household_domain()
    scene.validate(domain)
    init = {("on", a, b) for a, b in scene.relations}
    init |= {("robot_at", START), ("hand_empty",)}
    init |= class_facts(scene)
    objects = (*scene.objects, (START, START_TYPE))
    return Problem(name, domain.name, objects, frozenset(init), goal)


def scene_types(domain: Domain | None = None) -> list[str]:
    hierarchy = (domain or household_domain()).hierarchy
    return [t for t in hierarchy.types() if t != ROOT_TYPE]
