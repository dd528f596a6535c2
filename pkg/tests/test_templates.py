from __future__ import annotations

import pytest

from planlingua.household import Scene, build_problem
from planlingua.pddl import (
    ActionCall,
    And,
    Literal,
    ObjectIndex,
    Problem,
    parse_domain,
    parse_problem,
    serialize,
    validate_plan,
)
from planlingua.permissive import PermissiveMap
from planlingua.planner import SearchConfig, solve
from planlingua.templates import (
    MAX_STEPS,
    PlanTemplate,
    TemplateError,
    augment_domain,
    compile_template,
    conformance_violations,
    constrain,
    expected_fact_count,
    parse_template,
    restrict_problem,
    strip_plan,
    type_match,
)
from planlingua.goals import goal_from_text

GOLDEN = {
    ("current_step", "s0"), ("next", "s0", "s1"), ("next", "s1", "s2"), ("allowed_goto", "s0"),
    ("allowed_pickup", "s1"), ("allowed_arg1", "table", "s0"), ("allowed_arg1", "apple", "s1"),
    ("allowed_arg2", "table", "s1"),
}


def test_golden_compilation():
    c = compile_template(parse_template("go to table, pick up apple table"))
    assert set(c.init) == GOLDEN and len(c.init) == len(GOLDEN)
    assert c.goal == (("current_step", "s2"),)


def test_empty_template():
    c = compile_template(parse_template(""))
    assert c.init == (("current_step", "s0"),) and c.goal == (("current_step", "s0"),)


def test_three_step_counts(domain):
    c = compile_template(parse_template("go to fridge, cool apple fridge, go to table"), domain)
    kinds = [f[0] for f in c.init]
    assert kinds.count("next") == 3
    assert sum(k.startswith("allowed_") and not k.startswith("allowed_arg") for k in kinds) == 3
    assert sum(k.startswith("allowed_arg") for k in kinds) == 4
    assert len(c.init) + len(c.goal) == expected_fact_count(parse_template("go to fridge, cool apple fridge, go to table"))


def test_slot_counts_are_checked_against_domain(domain):
    with pytest.raises(TemplateError, match="go_to"):
        compile_template(PlanTemplate.of(("go_to", "table", "fridge")), domain)
    with pytest.raises(TemplateError, match="unknown action"):
        compile_template(PlanTemplate.of(("fly", "table")), domain)


def test_parse_template_joins_multiword_types():
    t = parse_template("go to dining table, pick up butter knife dining table, toggle floor lamp")
    assert t == PlanTemplate.of(("go_to", "dining_table"), ("pick_up", "butter_knife", "dining_table"),
                                ("toggle", "floor_lamp"))
    assert parse_template(t.text()) == t


def test_too_long_template():
    with pytest.raises(TemplateError):
        compile_template(PlanTemplate.of(*[("go_to", "table")] * (MAX_STEPS + 1)))


def test_zero_arg_action_augmentation():
    d = parse_domain("(define (domain z) (:action noop :parameters () :precondition (and) :effect (and)))")
    a = augment_domain(d).domain.action("noop")
    assert len(a.parameters) == 2 and len(a.precondition) == 3 and len(a.effects) == 2
    assert {lit.predicate for lit in a.precondition} == {"current_step", "next", "allowed_noop"}


def test_pick_up_gains_both_slots(augmented):
    pre = augmented.domain.action("pick_up").precondition
    allow = [lit for lit in pre if lit.predicate.startswith("allowed_arg")]
    assert [(lit.predicate, lit.args) for lit in allow] == [("allowed_arg1", ("?c1", "?si")),
                                                            ("allowed_arg2", ("?c2", "?si"))]
    is_class = [lit.args for lit in pre if lit.predicate == "is_class"]
    assert is_class == [("?o", "?c1"), ("?p", "?c2")]


def test_go_to_constrains_only_destination(augmented):
    pre = augmented.domain.action("go_to").precondition
    assert [lit.predicate for lit in pre if lit.predicate.startswith("allowed_arg")] == ["allowed_arg1"]
    assert [lit.args[0] for lit in pre if lit.predicate == "is_class"] == ["?to"]


def test_double_augmentation_rejected(augmented):
    with pytest.raises(TemplateError, match="already augmented"):
        augment_domain(augmented.domain)


def test_augmented_domain_round_trip(augmented):
    assert parse_domain(serialize(augmented.domain)) == augmented.domain


def test_restricted_problem_round_trip(augmented, fixtures):
    base = augmented.base
    p = parse_problem((fixtures / "apple_problem.pddl").read_text(), base)
    r = constrain(p, parse_template("go to table, pick up apple table"), augmented)
    assert parse_problem(serialize(r), augmented.domain) == r


def test_empty_constraints(augmented):
    p = Problem("p", "household", (("apple_1", "apple"),), frozenset(), And())
    r = restrict_problem(p, compile_template(PlanTemplate()), augmented)
    assert ("s0", "step") in r.objects and ("current_step", "s0") in r.init
    assert Literal("current_step", ("s0",)) in r.goal.parts


def test_step_name_collision(augmented):
    p = Problem("p", "household", (("s1", "apple"),), frozenset(), And())
    with pytest.raises(TemplateError, match="s1"):
        constrain(p, parse_template("go to table"), augmented)


def test_type_match():
    pm = PermissiveMap()
    assert type_match("apple", "apple")
    assert type_match("knife", "butter_knife", pm)
    assert not type_match("knife", "butter_knife")
    assert type_match("lamp", "floor_lamp", pm)


def test_apple_scene_only_admits_two_step_plans(domain, augmented):
    scene = Scene.from_record({"objects": ["apple_1:apple", "table_1:table", "fridge_1:fridge"],
                               "relations": ["on apple_1 table_1"]})
    p = build_problem(scene, goal_from_text("robot_has_obj apple"), domain=domain)
    template = parse_template("go to table, pick up apple table")
    result = solve(augmented.domain, constrain(p, template, augmented), SearchConfig())
    plan = strip_plan(result.plan, augmented)
    assert plan == (ActionCall("go_to", ("table_1", "start")), ActionCall("pick_up", ("apple_1", "table_1")))
    assert validate_plan(domain, p, plan).valid
    assert conformance_violations(plan, template, p.index(domain)) == []
    # a template with a detour cannot be satisfied in two steps
    longer = parse_template("go to fridge, go to table, pick up apple table")
    detour = solve(augmented.domain, constrain(p, longer, augmented), SearchConfig())
    assert len(strip_plan(detour.plan, augmented)) == 3


def test_conformance_reports_mismatches(domain):
    index = ObjectIndex((("apple_1", "apple"), ("table_1", "table"), ("start", "location")), domain.hierarchy)
    plan = (ActionCall("go_to", ("table_1", "start")), ActionCall("pick_up", ("apple_1", "table_1")))
    assert conformance_violations(plan, parse_template("go to table, pick up tomato table"), index)
    assert conformance_violations(plan, parse_template("go to table"), index)
