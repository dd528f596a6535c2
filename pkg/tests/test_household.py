from __future__ import annotations

import json
import random

import pytest

from planlingua.goals import goal_from_text
from planlingua.household import (
    MOVABLES,
    RECEPTACLES,
    TASK_TYPES,
    SampleFormatError,
    Scene,
    SceneError,
    build_problem,
    generate_dataset,
    generate_sample,
    load_samples,
    parse_mix,
    parse_relations,
    save_samples,
)
from planlingua.pddl import And, satisfies_goal, validate_plan


def test_inventory_sizes():
    assert len(MOVABLES) == 12 and len(RECEPTACLES) == 7


def test_parse_relations_two_pairs():
    scene = parse_relations("on tomato table, on bowl countertop")
    assert len(scene.relations) == 2 and len(scene.objects) == 4
    assert scene.relations == (("tomato_1", "table_1"), ("bowl_1", "countertop_1"))


def test_parse_relations_empty():
    assert parse_relations("").relations == ()


def test_repeated_type_gets_new_instance():
    scene = parse_relations("on tomato table, on tomato countertop")
    assert scene.of_class("tomato") == ["tomato_1", "tomato_2"]
    assert scene.relations == (("tomato_1", "table_1"), ("tomato_2", "countertop_1"))


def test_multiword_relations():
    scene = parse_relations("on butter knife dining table")
    assert scene.objects == (("butter_knife_1", "butter_knife"), ("dining_table_1", "dining_table"))


def test_cycle_is_rejected():
    with pytest.raises(SceneError, match="cycle"):
        parse_relations("on a b, on b a")


def test_empty_scene_trivially_solved(domain):
    p = build_problem(Scene(), And(), domain=domain)
    assert validate_plan(domain, p, ()).valid


def test_apple_scene_init(domain):
    p = build_problem(parse_relations("on apple table"), And(), domain=domain)
    assert ("on", "apple_1", "table_1") in p.init
    assert ("robot_at", "start") in p.init and ("hand_empty",) in p.init


def test_scene_validation(domain):
    with pytest.raises(SceneError, match="undeclared"):
        Scene((("apple_1", "apple"),), (("apple_1", "table_1"),)).validate(domain)
    with pytest.raises(SceneError):
        Scene((("start", "table"),)).validate(domain)
    with pytest.raises(SceneError, match="unknown class"):
        Scene((("rock_1", "rock"),)).validate(domain)


def test_single_sample_is_deterministic(domain):
    a = generate_sample(random.Random(1), "pick_and_place", "x")
    b = generate_sample(random.Random(1), "pick_and_place", "x")
    assert a == b
    assert validate_plan(domain, a.problem(), a.gold_plan).valid


def test_dataset_is_deterministic():
    assert generate_dataset(5, 15) == generate_dataset(5, 15)
    assert generate_dataset(5, 15) != generate_dataset(6, 15)


def test_two_hundred_valid(dataset200, domain):
    assert len(dataset200) == 200
    assert {s.task_type for s in dataset200} == set(TASK_TYPES)
    for s in dataset200:
        p = s.problem()
        result = validate_plan(domain, p, s.gold_plan)
        assert result.valid, s.id
        assert not satisfies_goal(p.init, p.goal, p.index(domain))
        assert len(s.gold_plan) == len(s.template())


def test_heat_and_place_plan_validates(domain):
    s = generate_dataset(21, 1, {"heat_and_place": 1})[0]
    assert "hot" in s.gold_goal and any(c.name == "heat" for c in s.gold_plan)
    assert validate_plan(domain, s.problem(), s.gold_plan).valid


def test_pick_two_needs_two_instances(dataset200):
    twos = [s for s in dataset200 if s.task_type == "pick_two_and_place"]
    assert twos
    for s in twos:
        assert "two_task" in s.gold_goal
        obj = s.goal().variables[0][1]
        assert len(s.scene.of_class(obj)) >= 2


def test_parse_mix():
    assert parse_mix({"heat_and_place": 2})["heat_and_place"] == 2
    with pytest.raises(ValueError):
        parse_mix({"juggle": 1})


def test_save_load_round_trip(tmp_path, dataset200):
    path = tmp_path / "d.jsonl"
    save_samples(path, dataset200)
    assert load_samples(path) == dataset200


def test_missing_field_is_named_with_line(tmp_path, dataset200):
    recs = [s.to_record() for s in dataset200[:3]]
    del recs[1]["gold_template"]
    path = tmp_path / "bad.jsonl"
    path.write_text("".join(json.dumps(r) + "\n" for r in recs))
    with pytest.raises(SampleFormatError, match=r"bad.jsonl:2: missing field 'gold_template'"):
        load_samples(path)


def test_bad_json_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{not json\n")
    with pytest.raises(SampleFormatError, match=":1:"):
        load_samples(path)


def test_alfred_style_record(fixtures, domain):
    (s,) = load_samples(fixtures / "alfred_record.jsonl")
    assert s.scene.type_of("butterknife_1") == "butter_knife"
    assert s.template().steps[3].args == ("tomato", "butter_knife")
    assert validate_plan(domain, s.problem(), s.gold_plan).valid
    goal = goal_from_text(s.gold_goal)
    assert goal.variables == (("?tomato0", "tomato"), ("?fridge0", "fridge"))
