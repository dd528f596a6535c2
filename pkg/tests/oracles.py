"""Independent reference implementations used as test oracles.

Nothing here calls the planner or the template compiler: plans are found by
plain enumeration and goals by trying every variable assignment.
"""

from __future__ import annotations

import itertools
import random

from planlingua.goals import GoalEntry, GoalPredicateList
from planlingua.household import Scene, build_problem
from planlingua.pddl import Exists, And, apply, instantiate, is_applicable
from planlingua.templates import PlanTemplate, TemplateStep

SMALL_MOVABLES = ("apple", "tomato", "knife", "floor_lamp", "cup")
SMALL_RECEPTACLES = ("table", "countertop", "fridge", "microwave", "sink")
GOAL_PREDICATES = ("robot_has_obj", "on", "sliced", "hot", "cold", "cleaned", "toggled")
SLOTS = {"go_to": 1, "toggle": 1}


def all_ground_actions(domain, problem):
    """Every type-consistent instantiation, sorted by (name, args)."""
    index = problem.index(domain)
    out = []
    for schema in domain.actions:
        pools = [index.of_type(t) for _, t in schema.parameters]
        for args in itertools.product(*pools):
            out.append(instantiate(schema, args, index))
    out.sort(key=lambda a: (a.name, a.args))
    return out


def fits(action, step: TemplateStep, index) -> bool:
    if action.name != step.action:
        return False
    return all(index.type_of(obj) == t for obj, t in zip(action.args, step.args))


def first_conforming_plan(domain, problem, template: PlanTemplate, goal_test):
    """Lexicographically first applicable sequence that follows the template step
    by step and satisfies ``goal_test`` after exactly ``len(template)`` steps."""
    index = problem.index(domain)
    actions = all_ground_actions(domain, problem)
    per_step = [[a for a in actions if fits(a, step, index)] for step in template.steps]

    def dfs(state, depth, prefix):
        if depth == len(template):
            return prefix if goal_test(state) else None
        for a in per_step[depth]:
            if is_applicable(state, a):
                found = dfs(apply(state, a), depth + 1, prefix + [a.call])
                if found is not None:
                    return found
        return None

    return dfs(frozenset(problem.init), 0, [])


def witnesses(goal, state, index) -> bool:
    """Try every assignment of the exists variables."""
    if isinstance(goal, And):
        return all(witnesses(p, state, index) for p in goal.parts)
    if not isinstance(goal, Exists):
        return (goal.fact in state) == goal.positive
    names = [v for v, _ in goal.variables]
    pools = [index.of_type(t) for _, t in goal.variables]
    for values in itertools.product(*pools):
        binding = dict(zip(names, values))
        if any(binding[a] == binding[b] for a, b in goal.distinct):
            continue
        if all(((lit.predicate, *(binding.get(x, x) for x in lit.args)) in state) == lit.positive
               for lit in goal.body):
            return True
    return False


def random_scene(rng: random.Random, max_objects: int = 6) -> Scene:
    n_rec = rng.randint(1, min(3, max_objects - 1))
    n_mov = rng.randint(1, max_objects - n_rec)
    recs = rng.sample(SMALL_RECEPTACLES, n_rec)
    objects, relations = [], []
    for cls in recs:
        objects.append((f"{cls}_1", cls))
    counts: dict[str, int] = {}
    for _ in range(n_mov):
        cls = rng.choice(SMALL_MOVABLES)
        counts[cls] = counts.get(cls, 0) + 1
        name = f"{cls}_{counts[cls]}"
        objects.append((name, cls))
        relations.append((name, rng.choice(objects[:n_rec])[0]))
    return Scene(tuple(objects), tuple(relations))


def random_walk(rng, domain, problem, length):
    """A random applicable action sequence of at most ``length`` steps, with the
    state after each step."""
    actions = all_ground_actions(domain, problem)
    state = frozenset(problem.init)
    walk = []
    for _ in range(length):
        options = [a for a in actions if is_applicable(state, a)]
        if not options:
            break
        a = rng.choice(options)
        state = apply(state, a)
        walk.append(a)
    return walk, state


def template_of(walk, index) -> PlanTemplate:
    steps = []
    for a in walk:
        n = SLOTS.get(a.name, 2)
        steps.append(TemplateStep(a.name, tuple(index.type_of(o) for o in a.args[:n])))
    return PlanTemplate(tuple(steps))


def goal_entries_true_in(state, index) -> list[GoalEntry]:
    out = []
    for fact in sorted(state):
        if fact[0] in GOAL_PREDICATES:
            out.append(GoalEntry(fact[0], *(index.type_of(o) for o in fact[1:])))
    return out


def random_goal(rng, types) -> GoalPredicateList:
    pred = rng.choice(GOAL_PREDICATES)
    if pred == "on":
        return GoalPredicateList((GoalEntry("on", rng.choice(SMALL_MOVABLES), rng.choice(SMALL_RECEPTACLES)),))
    return GoalPredicateList((GoalEntry(pred, rng.choice(types)),))


def random_template(rng, scene_types, length) -> PlanTemplate:
    steps = []
    for _ in range(length):
        name = rng.choice(["go_to", "pick_up", "put", "heat", "cool", "toggle", "slice", "clean"])
        if name in SLOTS:
            steps.append(TemplateStep(name, (rng.choice(scene_types),)))
        else:
            steps.append(TemplateStep(name, (rng.choice(scene_types), rng.choice(scene_types))))
    return PlanTemplate(tuple(steps))


def world(rng, domain, goal_formula=None, scene=None):
    scene = scene or random_scene(rng)
    return scene, build_problem(scene, goal_formula if goal_formula is not None else And(), domain=domain)


def goal_list_holds(entries, two_task, state, objects) -> bool:
    """Decide a type-level goal list straight from its entries.

    One instance is picked per mentioned type; with ``two_task`` the first
    ``on`` entry's type needs two different instances that both satisfy every
    entry mentioning that type.
    """
    types = []
    for e in entries:
        for t in e.args:
            if t not in types:
                types.append(t)
    primary = next((e.arg1 for e in entries if e.predicate == "on"), None) if two_task else None
    pools = {t: [o for o, ot in objects if ot == t] for t in types}

    def holds(pick):
        return all((e.predicate, *(pick[a] for a in e.args)) in state for e in entries)

    for values in itertools.product(*(pools[t] for t in types)):
        pick = dict(zip(types, values))
        if not holds(pick):
            continue
        if primary is None:
            return True
        for other in pools[primary]:
            if other != pick[primary] and holds({**pick, primary: other}):
                return True
    return False
