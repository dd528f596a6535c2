"""Grounding: schemas x typed objects -> ground actions, plus the integer
encoding the search kernels run on."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

from ..pddl import (
    And,
    Domain,
    Exists,
    GoalFormula,
    GroundAction,
    Literal,
    ObjectIndex,
    PDDLError,
    Problem,
    ground_schema,
)

DEFAULT_MAX_ACTIONS = 2_000_000


class GroundingLimitError(PDDLError):
    """The instance would ground more actions than the configured cap."""


@dataclass
class CompiledTask:
    """Integer form of a ground task shared by both search kernels.

    Facts are numbered in lexicographic order over the reachable fact
    universe. ``actions[i]`` of the kernel is ``GroundTask.actions[action_map[i]]``.
    Each action is keyed on one dynamic positive precondition fact
    (``trigger``); actions without one are ``free`` and tried in every state.
    Goal = AND over groups, group = OR over (positive ids, negative ids).
    """

    n_facts: int
    init: list[int]
    pre_pos: list[list[int]]
    pre_neg: list[list[int]]
    add: list[list[int]]
    delete: list[list[int]]
    cond: list[list[tuple[int, int, bool]]]
    trigger: list[list[int]]
    free: list[int]
    goal_groups: list[list[tuple[list[int], list[int]]]]
    action_map: list[int]
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_actions(self) -> int:
        return len(self.pre_pos)

    @property
    def unsatisfiable_goal(self) -> bool:
        return any(not group for group in self.goal_groups)


@dataclass
class GroundTask:
    domain: Domain
    problem: Problem
    index: ObjectIndex
    actions: tuple[GroundAction, ...]
    facts: tuple[tuple, ...]
    fact_ids: dict
    compiled: CompiledTask

    @property
    def n_facts(self) -> int:
        return len(self.facts)

    def counts_by_schema(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for a in self.actions:
            out[a.name] = out.get(a.name, 0) + 1
        return out


def _holds_static(lit: Literal, binding: dict, init: frozenset) -> bool:
    fact = (lit.predicate, *(binding.get(a, a) for a in lit.args))
    return (fact in init) == lit.positive


def _static_bindings(schema, index: ObjectIndex, init: frozenset, static: set) -> Iterator[tuple]:
    """Parameter tuples that satisfy every precondition literal over static predicates."""
    params = [v for v, _ in schema.parameters]
    domains = {v: index.of_type(t) for v, t in schema.parameters}
    checks = [lit for lit in schema.precondition if lit.predicate in static]
    if any(not lit.variables() and not _holds_static(lit, {}, init) for lit in checks):
        return
    checks = [lit for lit in checks if lit.variables()]

    # greedy order: bind the variable that completes most static checks, then the smallest domain
    order, bound, staged = [], set(), []
    while len(order) < len(params):
        def score(v):
            done = sum(1 for lit in checks if v in lit.args and set(lit.variables()) <= bound | {v})
            return (-done, len(domains[v]), params.index(v))
        v = min((p for p in params if p not in bound), key=score)
        ready = [lit for lit in checks
                 if v in lit.args and set(lit.variables()) <= bound | {v}
                 and not set(lit.variables()) <= bound]
        order.append(v)
        bound.add(v)
        staged.append(ready)

    binding: dict[str, str] = {}

    def extend(k: int):
        if k == len(order):
            yield tuple(binding[p] for p in params)
            return
        v = order[k]
        for obj in domains[v]:
            binding[v] = obj
            if all(_holds_static(lit, binding, init) for lit in staged[k]):
                yield from extend(k + 1)
        binding.pop(v, None)

    yield from extend(0)


def _reachable_universe(actions, init: frozenset) -> set:
    universe = set(init)
    for a in actions:
        universe |= a.add
        universe.update(fact for _, fact, positive in a.conditional if positive)
    return universe


def ground(domain: Domain, problem: Problem, *, prune_static: bool = False,
           max_actions: int = DEFAULT_MAX_ACTIONS) -> GroundTask:
    """Instantiate every schema over all type-consistent argument tuples.

    With ``prune_static`` only tuples satisfying the static preconditions are
    built, and actions needing a fact no action can ever produce are
    dropped. Both variants have the same applicable actions in every
    reachable state, so search results are identical.
    """
    if problem.domain_name != domain.name:
        raise PDDLError(f"problem is for domain '{problem.domain_name}', not '{domain.name}'")
    index = problem.index(domain)
    init = frozenset(problem.init)
    static = domain.static_predicates()
    actions: list[GroundAction] = []
    for schema in domain.actions:
        if prune_static:
            bindings = _static_bindings(schema, index, init, static)
        else:
            sizes = [len(index.of_type(t)) for _, t in schema.parameters]
            if len(actions) + math.prod(sizes) > max_actions:
                raise GroundingLimitError(
                    f"grounding {schema.name} needs {math.prod(sizes)} actions; cap is {max_actions}")
            bindings = itertools.product(*(index.of_type(t) for _, t in schema.parameters))
        for args in bindings:
            actions.append(ground_schema(schema, args, index))
            if len(actions) > max_actions:
                raise GroundingLimitError(f"more than {max_actions} ground actions")

    universe = _reachable_universe(actions, init)
    if prune_static:
        while True:
            kept = [a for a in actions if a.pre_pos <= universe]
            if len(kept) == len(actions):
                break
            actions = kept
            universe = _reachable_universe(actions, init)
    actions.sort(key=lambda a: (a.name, a.args))

    facts = tuple(sorted(universe))
    fact_ids = {f: i for i, f in enumerate(facts)}
    compiled = _compile(actions, init, fact_ids, problem.goal, index)
    return GroundTask(domain, problem, index, tuple(actions), facts, fact_ids, compiled)


def _compile(actions, init, fact_ids: dict, goal: GoalFormula, index: ObjectIndex) -> CompiledTask:
    dynamic = set()
    for a in actions:
        dynamic |= a.add | a.delete
        dynamic.update(fact for _, fact, _ in a.conditional)

    pre_pos, pre_neg, add, delete, cond, keys, action_map = [], [], [], [], [], [], []
    usage: dict[int, int] = {}
    for i, a in enumerate(actions):
        if not a.pre_pos <= fact_ids.keys():
            continue  # needs a fact that can never hold
        pp = sorted(fact_ids[f] for f in a.pre_pos)
        action_map.append(i)
        pre_pos.append(pp)
        pre_neg.append(sorted(fact_ids[f] for f in a.pre_neg if f in fact_ids))
        add.append(sorted(fact_ids[f] for f in a.add))
        delete.append(sorted(fact_ids[f] for f in a.delete if f in fact_ids))
        cond.append([(fact_ids[c], fact_ids[e], positive) for c, e, positive in a.conditional
                     if c in fact_ids and e in fact_ids])
        dyn = [fact_ids[f] for f in a.pre_pos if f in dynamic]
        keys.append(dyn)
        for f in dyn:
            usage[f] = usage.get(f, 0) + 1

    trigger: list[list[int]] = [[] for _ in fact_ids]
    free = []
    for k, dyn in enumerate(keys):
        if dyn:
            trigger[min(dyn, key=lambda f: (usage[f], f))].append(k)
        else:
            free.append(k)

    groups = _goal_groups(goal, index, fact_ids)
    return CompiledTask(len(fact_ids), sorted(fact_ids[f] for f in init), pre_pos, pre_neg, add, delete,
                        cond, trigger, free, groups, action_map)


def _flatten(goal: GoalFormula):
    if isinstance(goal, And):
        for part in goal.parts:
            yield from _flatten(part)
    else:
        yield goal


def _goal_groups(goal: GoalFormula, index: ObjectIndex, fact_ids: dict):
    groups = []
    for part in _flatten(goal):
        if isinstance(part, Literal):
            if part.variables():
                raise PDDLError(f"free variable in goal literal {part}")
            if part.fact in fact_ids:
                groups.append([([fact_ids[part.fact]], [])] if part.positive else [([], [fact_ids[part.fact]])])
            elif part.positive:
                groups.append([])  # can never hold
        else:
            groups.append(_exists_alternatives(part, index, fact_ids))
    return groups


def _exists_alternatives(block: Exists, index: ObjectIndex, fact_ids: dict):
    """Every witness binding of ``block`` as an alternative, pruned by reachability."""
    variables = [v for v, _ in block.variables]
    position = {v: i for i, v in enumerate(variables)}
    staged: list[list] = [[] for _ in variables]
    fixed_pos, fixed_neg = set(), set()
    for lit in block.body:
        last = max((position[a] for a in lit.args if a in position), default=-1)
        if last < 0:
            if lit.fact in fact_ids:
                (fixed_pos if lit.positive else fixed_neg).add(fact_ids[lit.fact])
            elif lit.positive:
                return []
        else:
            staged[last].append(lit)
    for a, b in block.distinct:
        staged[max(position[a], position[b])].append((a, b))

    seen, out = set(), []
    binding: dict[str, str] = {}

    def extend(i: int, pos: frozenset, neg: frozenset):
        if i == len(variables):
            key = (pos, neg)
            if key not in seen:
                seen.add(key)
                out.append((sorted(pos), sorted(neg)))
            return
        for obj in index.of_type(block.variables[i][1]):
            binding[variables[i]] = obj
            p, n, ok = set(pos), set(neg), True
            for check in staged[i]:
                if isinstance(check, tuple):
                    if binding[check[0]] == binding[check[1]]:
                        ok = False
                        break
                    continue
                fact = (check.predicate, *(binding.get(a, a) for a in check.args))
                if fact in fact_ids:
                    (p if check.positive else n).add(fact_ids[fact])
                elif check.positive:
                    ok = False
                    break
            if ok:
                extend(i + 1, frozenset(p), frozenset(n))
        binding.pop(variables[i], None)

    extend(0, frozenset(fixed_pos), frozenset(fixed_neg))
    return out
