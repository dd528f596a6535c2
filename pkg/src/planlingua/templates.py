"""Plan templates and their compilation into step-constraint predicates.

A template like ``"go to table, pick up apple table"`` fixes the plan length,
the action at every step and the type of each constrained argument. The
compiler turns it into three fact families added to a problem (length,
action allowance, object allowance) and augments every action schema with
the step bookkeeping that consumes them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .pddl import (
    ROOT_TYPE,
    ActionCall,
    ActionSchema,
    And,
    Domain,
    GoalFormula,
    Literal,
    ObjectIndex,
    PDDLError,
    Problem,
    TypeHierarchy,
)
from .permissive import PermissiveMap
from .textutil import fit_arity, join_words, split_entries

STEP_TYPE = "step"
CLASS_TYPE = "object_class"
MAX_STEPS = 63
ONE_SLOT_ACTIONS = frozenset({"go_to", "toggle"})
_ACTION_WORDS = {("go", "to"): "go_to", ("pick", "up"): "pick_up", ("goto",): "go_to", ("pickup",): "pick_up"}


class TemplateError(PDDLError):
    pass


def step_token(i: int) -> str:
    return f"s{i}"


def allowed_action_predicate(action: str) -> str:
    return "allowed_" + action.replace("_", "").replace("-", "")


def allowed_arg_predicate(slot: int) -> str:
    return f"allowed_arg{slot}"


def slot_count(action: str, n_params: int | None = None) -> int:
    """How many leading parameters a template constrains for ``action``."""
    if action in ONE_SLOT_ACTIONS:
        return 1 if n_params is None else min(1, n_params)
    return 2 if n_params is None else min(2, n_params)


@dataclass(frozen=True)
class TemplateStep:
    action: str
    args: tuple[str, ...] = ()

    def text(self) -> str:
        return " ".join((self.action.replace("_", " ") if self.action in ("go_to", "pick_up") else self.action,
                         *self.args))


@dataclass(frozen=True)
class PlanTemplate:
    steps: tuple[TemplateStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def text(self) -> str:
        return ", ".join(s.text() for s in self.steps)

    @classmethod
    def of(cls, *steps: Sequence[str]) -> "PlanTemplate":
        return cls(tuple(TemplateStep(s[0], tuple(s[1:])) for s in steps))


def _split_action(tokens: list[str]) -> tuple[str, list[str]]:
    for words, name in _ACTION_WORDS.items():
        if tuple(tokens[:len(words)]) == words:
            return name, tokens[len(words):]
    return tokens[0], tokens[1:]


def parse_template(text: str, vocabulary=None, *, strict: bool = True) -> PlanTemplate:
    """Read comma-separated template steps.

    ``go to`` / ``pick up`` become ``go_to`` / ``pick_up``; multi-word type
    names are joined with underscores using ``vocabulary``. With
    ``strict=False`` steps whose arguments cannot be fitted are kept
    best-effort instead of raising (used when scoring model output).
    """
    steps = []
    for tokens in split_entries(text):
        action, rest = _split_action(tokens)
        merged = join_words(rest, vocabulary)
        arity = 1 if action in ONE_SLOT_ACTIONS else min(2, len(merged))
        if action not in ONE_SLOT_ACTIONS and action in _KNOWN_TWO_SLOT:
            arity = 2
        args = fit_arity(rest, arity, vocabulary)
        if args is None:
            if strict:
                raise TemplateError(f"step {' '.join(tokens)!r}: '{action}' takes {arity} argument(s)")
            args = merged[:2]
        steps.append(TemplateStep(action, tuple(args)))
    return PlanTemplate(tuple(steps))


_KNOWN_TWO_SLOT = frozenset({"pick_up", "put", "slice", "heat", "cool", "clean"})


@dataclass(frozen=True)
class ConstraintSet:
    """Facts produced from one template, in presentation order."""

    init: tuple[tuple[str, ...], ...]
    goal: tuple[tuple[str, ...], ...]
    length: int
    classes: tuple[str, ...] = ()

    def lines(self) -> list[str]:
        return ["(" + " ".join(f) + ")" for f in self.init]

    def goal_lines(self) -> list[str]:
        return ["(" + " ".join(f) + ")" for f in self.goal]


def expected_fact_count(template: PlanTemplate) -> int:
    """Closed form: 1 + T next + T action + sum(slots) object facts + 1 goal fact."""
    return 2 * len(template) + sum(len(s.args) for s in template) + 2


def compile_template(template: PlanTemplate, domain: Domain | None = None) -> ConstraintSet:
    length = len(template)
    if length > MAX_STEPS:
        raise TemplateError(f"template has {length} steps; at most {MAX_STEPS} are supported")
    if domain is not None:
        for i, step in enumerate(template.steps):
            if not domain.has_action(step.action):
                raise TemplateError(f"step {i}: unknown action '{step.action}'")
            want = slot_count(step.action, domain.action(step.action).arity)
            if len(step.args) != want:
                raise TemplateError(f"step {i}: '{step.action}' takes {want} template argument(s), "
                                    f"got {len(step.args)}")
    init: list[tuple[str, ...]] = [("current_step", step_token(0))]
    init += [("next", step_token(i), step_token(i + 1)) for i in range(length)]
    init += [(allowed_action_predicate(s.action), step_token(i)) for i, s in enumerate(template.steps)]
    classes: list[str] = []
    for i, step in enumerate(template.steps):
        for j, type_name in enumerate(step.args, start=1):
            init.append((allowed_arg_predicate(j), type_name, step_token(i)))
            if type_name not in classes:
                classes.append(type_name)
    return ConstraintSet(tuple(init), (("current_step", step_token(length)),), length, tuple(classes))


@dataclass(frozen=True)
class AugmentedDomain:
    domain: Domain
    base: Domain
    slots: dict = field(compare=False)

    @property
    def class_names(self) -> list[str]:
        return [c for c, t in self.domain.constants if t == CLASS_TYPE]


def _fresh(name: str, taken: set[str]) -> str:
    candidate, k = name, 0
    while candidate in taken:
        k += 1
        candidate = f"{name}{k}"
    taken.add(candidate)
    return candidate


def augment_domain(domain: Domain) -> AugmentedDomain:
    """Add step bookkeeping and allowance preconditions to every schema."""
    type_names = {c for c, _ in domain.types}
    if STEP_TYPE in type_names or "current_step" in domain.signatures:
        raise TemplateError(f"domain '{domain.name}' is already augmented")
    names = [allowed_action_predicate(a.name) for a in domain.actions]
    if len(set(names)) != len(names):
        raise TemplateError("two actions map to the same allowance predicate")

    slots = {a.name: slot_count(a.name, a.arity) for a in domain.actions}
    max_slots = max(slots.values(), default=0)
    types = list(domain.types)
    types.append((STEP_TYPE, ROOT_TYPE))
    if CLASS_TYPE not in type_names:
        types.append((CLASS_TYPE, ROOT_TYPE))
    constants = list(domain.constants)
    constant_names = {c for c, _ in constants}
    for t in domain.hierarchy.types():
        if t not in (CLASS_TYPE,) and t not in constant_names:
            constants.append((t, CLASS_TYPE))

    predicates = list(domain.predicates)
    predicates.append(("current_step", (("?s", STEP_TYPE),)))
    predicates.append(("next", (("?s1", STEP_TYPE), ("?s2", STEP_TYPE))))
    predicates += [(allowed_action_predicate(a.name), (("?s", STEP_TYPE),)) for a in domain.actions]
    predicates += [(allowed_arg_predicate(j), (("?c", CLASS_TYPE), ("?s", STEP_TYPE)))
                   for j in range(1, max_slots + 1)]
    if "is_class" not in domain.signatures:
        predicates.append(("is_class", (("?o", ROOT_TYPE), ("?c", CLASS_TYPE))))

    actions = []
    for schema in domain.actions:
        taken = {v for v, _ in schema.parameters}
        si, sj = _fresh("?si", taken), _fresh("?sj", taken)
        class_vars = [_fresh(f"?c{j}", taken) for j in range(1, slots[schema.name] + 1)]
        params = (*schema.parameters, (si, STEP_TYPE), (sj, STEP_TYPE),
                  *((c, CLASS_TYPE) for c in class_vars))
        pre = [*schema.precondition,
               Literal("current_step", (si,)),
               Literal("next", (si, sj)),
               Literal(allowed_action_predicate(schema.name), (si,))]
        for j, c in enumerate(class_vars, start=1):
            pre.append(Literal(allowed_arg_predicate(j), (c, si)))
            pre.append(Literal("is_class", (schema.parameters[j - 1][0], c)))
        effects = (*schema.effects, Literal("current_step", (si,), False), Literal("current_step", (sj,)))
        actions.append(ActionSchema(schema.name, params, tuple(pre), effects))

    augmented = Domain(domain.name, domain.requirements, tuple(types), tuple(predicates),
                       tuple(constants), tuple(actions))
    return AugmentedDomain(augmented, domain, slots)


def type_match(template_type: str, object_type: str, permissive: PermissiveMap | None = None,
               hierarchy: TypeHierarchy | None = None) -> bool:
    """Does an object of ``object_type`` fill a template slot typed ``template_type``?"""
    if template_type == object_type:
        return True
    if hierarchy is not None and template_type != ROOT_TYPE and template_type in hierarchy.ancestors(object_type):
        return True
    return permissive is not None and permissive.equivalent(template_type, object_type)


def _conjoin(goal: GoalFormula, extra: Sequence[Literal]) -> GoalFormula:
    if isinstance(goal, And):
        return And((*goal.parts, *extra))
    return And((goal, *extra))


def restrict_problem(problem: Problem, constraints: ConstraintSet, augmented: AugmentedDomain,
                     permissive: PermissiveMap | None = None) -> Problem:
    """Add step tokens, constraint facts and ``is_class`` facts to ``problem``."""
    reserved = {step_token(i) for i in range(MAX_STEPS + 1)}
    names = {o for o, _ in problem.objects}
    clash = sorted(names & reserved)
    if clash:
        raise TemplateError(f"object name(s) {clash} collide with reserved step tokens")
    class_names = augmented.class_names
    known = set(class_names)
    clash = sorted(names & known)
    if clash:
        raise TemplateError(f"object name(s) {clash} collide with type-class constants")

    steps = [(step_token(i), STEP_TYPE) for i in range(constraints.length + 1)]
    extra = [(c, CLASS_TYPE) for c in constraints.classes if c not in known and c not in names]
    all_classes = class_names + [c for c, _ in extra]

    hierarchy = augmented.domain.hierarchy
    members = [(o, t) for o, t in (*augmented.base.constants, *problem.objects)]
    is_class = set()
    for obj, obj_type in members:
        for c in all_classes:
            if type_match(c, obj_type, permissive, hierarchy):
                is_class.add(("is_class", obj, c))

    init = frozenset(problem.init) | frozenset(constraints.init) | is_class
    goal = _conjoin(problem.goal, [Literal(f[0], f[1:]) for f in constraints.goal])
    return Problem(problem.name, problem.domain_name, (*problem.objects, *steps, *extra), init, goal)


def strip_plan(plan: Sequence[ActionCall], augmented: AugmentedDomain) -> tuple[ActionCall, ...]:
    """Drop the step and class arguments the augmentation appended."""
    out = []
    for call in plan:
        n = augmented.base.action(call.name).arity
        out.append(ActionCall(call.name, tuple(call.args[:n])))
    return tuple(out)


def conformance_violations(plan: Sequence[ActionCall], template: PlanTemplate, index: ObjectIndex,
                           permissive: PermissiveMap | None = None) -> list[str]:
    """Check a stripped plan against its template without running a planner."""
    problems = []
    if len(plan) != len(template):
        problems.append(f"plan has {len(plan)} steps, template has {len(template)}")
    for i, (call, step) in enumerate(zip(plan, template.steps)):
        if call.name != step.action:
            problems.append(f"step {i}: action {call.name} != {step.action}")
            continue
        for j, type_name in enumerate(step.args):
            if j >= len(call.args):
                problems.append(f"step {i}: missing argument {j + 1}")
                continue
            obj = call.args[j]
            if not type_match(type_name, index.type_of(obj), permissive, index.hierarchy):
                problems.append(f"step {i}: {obj} ({index.type_of(obj)}) does not fit {type_name}")
    return problems


def constrain(problem: Problem, template: PlanTemplate, augmented: AugmentedDomain,
              permissive: PermissiveMap | None = None) -> Problem:
    """compile_template + restrict_problem in one call."""
    return restrict_problem(problem, compile_template(template, augmented.base), augmented, permissive)
