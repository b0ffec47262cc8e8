from dataclasses import replace

import pytest

from cpmx import SequenceFlow, VariationPoint, validate_model
from cpmx.validate import RULES

from _build import act, alt, data, model, res


@pytest.fixture
def base():
    return model([act("A", req=["f1"], res="R", data=["d"]), *alt("B", "B1", "B2"), act("D")],
                 resources=[res("R", ["f1"])], data_objects=[data("d")], vccs=[("B1", "excludes", "B2")])


def with_flows(m, *extra):
    return replace(m, flows=[*m.flows.values(), *extra])


MUTATIONS = {
    "W1": lambda m: with_flows(m, SequenceFlow("A", "ghost")),
    "W2": lambda m: replace(m, activities=[*m.activities.values(), act("V", of="nope")]),
    "W3": lambda m: replace(m, activities=[a for a in m.activities.values() if a.parent != "B"], vccs=()),
    "W4": lambda m: replace(m, activities=[*[a for a in m.activities.values() if a.id != "B"],
                                           replace(m.activities["B"], role=VariationPoint("sometimes"))]),
    "W5": lambda m: replace(m, activities=[*[a for a in m.activities.values() if a.id != "A"],
                                           replace(m.activities["A"], req_f={"f1", "f9"})]),
    "W6": lambda m: replace(m, vccs=[*m.vccs, type(next(iter(m.vccs)))("B1", "requires", "A")]),
    "W7": lambda m: replace(m, activities=[*[a for a in m.activities.values() if a.id != "D"],
                                           replace(m.activities["D"], data={"missing"})]),
    "W8": lambda m: replace(m, max_activities=3),
    "W9": lambda m: replace(m, activities=[*m.activities.values(), act("X")]),
    "W10": lambda m: with_flows(m, SequenceFlow("A", "B1"), SequenceFlow("B1", "D")),
}


def test_base_is_clean(base):
    assert validate_model(base).ok


@pytest.mark.parametrize("rule", sorted(RULES, key=lambda r: int(r[1:])))
def test_mutation_triggers_exactly_one_rule(base, rule):
    report = validate_model(MUTATIONS[rule](base))
    assert report.rules() == {rule}, report.violations


def test_w1_variants():
    m = model([act("A")], resources=[res("A", ["f"])])
    assert validate_model(m).rules() == {"W1"}
    m = model([act("A")], flows=[SequenceFlow("start", "A"), SequenceFlow("A", "end"), SequenceFlow("A", "A")])
    assert "W1" in validate_model(m).rules()
    m = model([act("start")], flows=[SequenceFlow("start", "end")])
    assert "W1" in validate_model(m).rules()


def test_w5_missing_resource_reported():
    m = model([act("A", res="nope")])
    assert validate_model(m).rules() == {"W5"}


def test_w6_contradiction_and_self():
    m = model(alt("B", "B1", "B2"), vccs=[("B1", "requires", "B2"), ("B1", "excludes", "B2")])
    assert validate_model(m).rules() == {"W6"}
    m = model(alt("B", "B1", "B2"), vccs=[("B1", "requires", "B1")])
    assert validate_model(m).rules() == {"W6"}


def test_w9_end_unreachable():
    m = model([act("A")], flows=[SequenceFlow("start", "A")])
    assert "W9" in validate_model(m).rules()


def test_effective_functionalities_count_for_coverage():
    m = model([act("A", req=["f1", "f2"], res="R")],
              resources=[res("R", ["f1"], vp="optional"), res("R1", ["f2"], of="R")])
    assert validate_model(m).ok


def test_report_serialises(base):
    report = validate_model(MUTATIONS["W8"](base))
    assert report.to_dict()["violations"][0]["rule"] == "W8"
    assert not report
