"""Samples: the line-delimited record format and a synthetic generator."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..goals import goal_from_text
from ..pddl import ActionCall, PDDLError, format_plan, parse_plan_text, satisfies_goal, validate_plan
from ..planner import SearchConfig, solve
from ..templates import augment_domain, constrain, parse_template
from .world import (
    CONTAINERS,
    MOVABLES,
    RECEPTACLES,
    SLICEABLE,
    Scene,
    build_problem,
    household_domain,
)

TASK_TYPES = (
    "pick_and_place",
    "stack_and_place",
    "pick_two_and_place",
    "clean_and_place",
    "heat_and_place",
    "cool_and_place",
    "examine_in_light",
)
FIELDS = ("id", "task_type", "task_text", "relations_text", "gold_goal", "gold_template", "gold_plan", "scene")
MAX_DRAWS = 1000


class SampleFormatError(PDDLError):
    pass


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Sample:
    id: str
    task_type: str
    task_text: str
    relations_text: str
    gold_goal: str
    gold_template: str
    gold_plan: tuple[ActionCall, ...]
    scene: Scene = field(default_factory=Scene)

    def goal(self):
        return goal_from_text(self.gold_goal)

    def problem(self, goal=None):
        return build_problem(self.scene, self.goal() if goal is None else goal, name=self.id)

    def template(self):
        return parse_template(self.gold_template)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "task_type": self.task_type,
            "task_text": self.task_text,
            "relations_text": self.relations_text,
            "gold_goal": self.gold_goal,
            "gold_template": self.gold_template,
            "gold_plan": format_plan(self.gold_plan),
            "scene": self.scene.to_record(),
        }

    @classmethod
    def from_record(cls, record: dict) -> "Sample":
        if not isinstance(record, dict):
            raise SampleFormatError("record is not an object")
        for name in FIELDS:
            if name not in record:
                raise SampleFormatError(f"missing field '{name}'")
        for name in FIELDS[:-1]:
            if not isinstance(record[name], str):
                raise SampleFormatError(f"field '{name}' must be a string")
        if not isinstance(record["scene"], dict):
            raise SampleFormatError("field 'scene' must be an object with 'objects' and 'relations'")
        try:
            plan = parse_plan_text(record["gold_plan"])
            scene = Scene.from_record(record["scene"])
        except PDDLError as exc:
            raise SampleFormatError(str(exc)) from exc
        return cls(record["id"], record["task_type"], record["task_text"], record["relations_text"],
                   record["gold_goal"], record["gold_template"], plan, scene)


def save_samples(path: str | Path, samples: Iterable[Sample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_record(), sort_keys=False) + "\n")


def read_records(path: str | Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise SampleFormatError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from exc


def load_samples(path: str | Path) -> list[Sample]:
    out = []
    for lineno, record in read_records(path):
        try:
            out.append(Sample.from_record(record))
        except SampleFormatError as exc:
            raise SampleFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


# --- generation -------------------------------------------------------------

_INSIDE = {"fridge", "microwave", "sink", "drawer"}
_PLURAL = {"tomato": "tomatoes", "potato": "potatoes", "butter_knife": "butter knives", "knife": "knives"}


def _say(cls: str) -> str:
    return cls.replace("_", " ")


def _prep(receptacle: str) -> str:
    return "in" if receptacle in _INSIDE else "on"


def _plural(cls: str) -> str:
    return _PLURAL.get(cls, _say(cls) + "s")


class _SceneBuilder:
    def __init__(self):
        self.objects: list[tuple[str, str]] = []
        self.relations: list[tuple[str, str]] = []
        self.counts: dict[str, int] = {}

    def add(self, cls: str, on: str | None = None) -> str:
        self.counts[cls] = self.counts.get(cls, 0) + 1
        name = f"{cls}_{self.counts[cls]}"
        self.objects.append((name, cls))
        if on is not None:
            self.relations.append((name, on))
        return name

    def first(self, cls: str) -> str:
        return next(n for n, c in self.objects if c == cls)

    def receptacles(self) -> list[str]:
        return [n for n, c in self.objects if c in RECEPTACLES]

    def scene(self) -> Scene:
        return Scene(tuple(self.objects), tuple(self.relations))


def _draw_task(rng: random.Random, task_type: str) -> dict:
    """Pick classes for one task; returns slots plus goal/template/text."""
    carry = [m for m in MOVABLES if m != "floor_lamp"]
    if task_type == "pick_and_place":
        if rng.random() < 0.3:
            o = rng.choice(SLICEABLE)
            k = rng.choice(("knife", "butter_knife"))
            rk, r1, r2 = rng.choice(RECEPTACLES), rng.choice(RECEPTACLES), rng.choice(RECEPTACLES)
            return dict(
                needs=[(k, rk), (o, r1)], targets=[r2],
                goal=f"sliced {o}, on {o} {r2}",
                template=(f"go to {rk}, pick up {k} {rk}, go to {r1}, slice {o} {k}, put {k} {r1}, "
                          f"pick up {o} {r1}, go to {r2}, put {o} {r2}"),
                text=f"Put a slice of {_say(o)} {_prep(r2)} the {_say(r2)}.")
        o = rng.choice(carry)
        r1, r2 = rng.sample(RECEPTACLES, 2)
        return dict(needs=[(o, r1)], targets=[r2], goal=f"on {o} {r2}",
                    template=f"go to {r1}, pick up {o} {r1}, go to {r2}, put {o} {r2}",
                    text=f"Put a {_say(o)} {_prep(r2)} the {_say(r2)}.")
    if task_type == "stack_and_place":
        c = rng.choice(CONTAINERS)
        o = rng.choice([m for m in carry if m not in CONTAINERS])
        r1, r2, r3 = rng.choice(RECEPTACLES), rng.choice(RECEPTACLES), rng.choice(RECEPTACLES)
        while r3 == r2:
            r3 = rng.choice(RECEPTACLES)
        return dict(needs=[(o, r1), (c, r2)], targets=[r3], goal=f"on {o} {c}, on {c} {r3}",
                    template=(f"go to {r1}, pick up {o} {r1}, go to {c}, put {o} {c}, "
                              f"go to {r2}, pick up {c} {r2}, go to {r3}, put {c} {r3}"),
                    text=f"Put a {_say(c)} with a {_say(o)} in it {_prep(r3)} the {_say(r3)}.")
    if task_type == "pick_two_and_place":
        o = rng.choice(carry)
        r1a, r1b = rng.choice(RECEPTACLES), rng.choice(RECEPTACLES)
        r2 = rng.choice([r for r in RECEPTACLES if r not in (r1a, r1b)])
        return dict(needs=[(o, r1a), (o, r1b)], targets=[r2], goal=f"on {o} {r2}, two_task",
                    template=(f"go to {r1a}, pick up {o} {r1a}, go to {r2}, put {o} {r2}, "
                              f"go to {r1b}, pick up {o} {r1b}, go to {r2}, put {o} {r2}"),
                    text=f"Put two {_plural(o)} {_prep(r2)} the {_say(r2)}.")
    if task_type in ("clean_and_place", "heat_and_place", "cool_and_place"):
        appliance, verb, state, word = {
            "clean_and_place": ("sink", "clean", "cleaned", "clean"),
            "heat_and_place": ("microwave", "heat", "hot", "hot"),
            "cool_and_place": ("fridge", "cool", "cold", "cold"),
        }[task_type]
        o = rng.choice(carry)
        r1 = rng.choice([r for r in RECEPTACLES if r != appliance])
        r2 = rng.choice([r for r in RECEPTACLES if r not in (appliance, r1)])
        return dict(needs=[(o, r1)], targets=[r2, appliance], goal=f"{state} {o}, on {o} {r2}",
                    template=(f"go to {r1}, pick up {o} {r1}, go to {appliance}, {verb} {o} {appliance}, "
                              f"go to {r2}, put {o} {r2}"),
                    text=f"Put a {word} {_say(o)} {_prep(r2)} the {_say(r2)}.")
    if task_type == "examine_in_light":
        o = rng.choice([m for m in carry])
        r1, rl = rng.choice(RECEPTACLES), rng.choice(RECEPTACLES)
        return dict(needs=[(o, r1), ("floor_lamp", rl)], targets=[],
                    goal=f"toggled floor_lamp, robot_has_obj {o}",
                    template=f"go to {r1}, pick up {o} {r1}, go to floor_lamp, toggle floor_lamp",
                    text=f"Examine a {_say(o)} under the floor lamp.")
    raise ValueError(f"unknown task type {task_type!r}")


def _draw_scene(rng: random.Random, schema: dict, n_objects: int) -> Scene:
    b = _SceneBuilder()
    needed_receptacles = []
    for _, r in schema["needs"]:
        if r in RECEPTACLES and r not in needed_receptacles:
            needed_receptacles.append(r)
    for r in schema["targets"]:
        if r not in needed_receptacles:
            needed_receptacles.append(r)
    for r in needed_receptacles:
        b.add(r)
    for cls, r in schema["needs"]:
        b.add(cls, on=b.first(r))
    n_receptacles = max(len(needed_receptacles), min(len(RECEPTACLES), n_objects // 3))
    while len(b.receptacles()) < n_receptacles:
        b.add(rng.choice(RECEPTACLES))
    while len(b.objects) < n_objects:
        b.add(rng.choice(MOVABLES), on=rng.choice(b.receptacles()))
    return b.scene()


def parse_mix(mix) -> dict[str, float]:
    """``None`` (uniform), a dict, a list of names, or ``"type:weight,type"``."""
    if mix is None or mix == "" or mix == "all":
        return {t: 1.0 for t in TASK_TYPES}
    if isinstance(mix, str):
        out = {}
        for part in mix.split(","):
            part = part.strip()
            if not part:
                continue
            name, _, weight = part.partition(":")
            out[name.strip()] = float(weight) if weight else 1.0
        mix = out
    if not isinstance(mix, dict):
        mix = {t: 1.0 for t in mix}
    for name, weight in mix.items():
        if name not in TASK_TYPES:
            raise ValueError(f"unknown task type {name!r}; expected one of {', '.join(TASK_TYPES)}")
        if weight < 0:
            raise ValueError(f"negative weight for {name}")
    if not any(mix.values()):
        raise ValueError("task mix has no positive weight")
    return dict(mix)


def generate_sample(rng: random.Random, task_type: str, sample_id: str, size: tuple[int, int] = (6, 12),
                    max_draws: int = MAX_DRAWS) -> Sample:
    domain = household_domain()
    augmented = _augmented()
    for _ in range(max_draws):
        schema = _draw_task(rng, task_type)
        n_objects = rng.randint(*size)
        scene = _draw_scene(rng, schema, n_objects)
        goal = goal_from_text(schema["goal"])
        problem = build_problem(scene, goal, name=sample_id)
        if satisfies_goal(problem.init, goal, problem.index(domain)):
            continue
        template = parse_template(schema["template"])
        result = solve(augmented.domain, constrain(problem, template, augmented), SearchConfig())
        if result.plan is None:
            continue
        from ..templates import strip_plan

        plan = strip_plan(result.plan, augmented)
        if not validate_plan(domain, problem, plan).valid:
            continue
        return Sample(sample_id, task_type, schema["text"], scene.relations_text(), schema["goal"],
                      schema["template"], plan, scene)
    raise GenerationError(f"no solvable {task_type} scene after {max_draws} draws")


_AUG = None


def _augmented():
    global _AUG
    if _AUG is None:
        _AUG = augment_domain(household_domain())
    return _AUG


def generate_dataset(seed: int, n: int, mix=None, *, size: tuple[int, int] = (6, 12),
                     prefix: str = "gen", max_draws: int = MAX_DRAWS) -> list[Sample]:
    """``n`` samples with planner-found gold plans; same seed, same output."""
    if n <= 0:
        raise ValueError("n must be positive")
    if size[0] < 1 or size[0] > size[1]:
        raise ValueError(f"bad scene size range {size}")
    weights = parse_mix(mix)
    names = [t for t in TASK_TYPES if weights.get(t, 0) > 0]
    rng = random.Random(seed)
    out = []
    for i in range(n):
        task_type = rng.choices(names, weights=[weights[t] for t in names])[0]
        out.append(generate_sample(rng, task_type, f"{prefix}-{i:04d}", size, max_draws))
    return out


def samples_by_id(samples: Sequence[Sample]) -> dict[str, Sample]:
    return {s.id: s for s in samples}
