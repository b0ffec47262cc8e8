"""Acceptance criteria. Each test prints one PASS/FAIL line (see the summary at the end of the run).

Run directly with ``python tests/test_acceptance.py`` to get just those lines.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from cpmx import (
    Trace, apply_pattern, canonical_hash, check_evolution_constraints, derive_variant,
    enumerate_configurations, is_variability_free, list_patterns, pattern_relations, record, replay,
    save_model, undo, validate_model,
)
from cpmx.constraints import SATISFIED, VIOLATED
from cpmx.errors import CpmError
from cpmx.validate import RULES

from _build import act, alt, data, model, res
from _gen import PATTERN_IDS, Ids, random_model, random_params
from conftest import fixture_model, fixture_params
from test_validate import MUTATIONS

RESULTS: dict[int, str] = {}


def verdict(number, title, check):
    """Run ``check``; record and print a PASS/FAIL line, then re-raise any failure."""
    start = time.perf_counter()
    try:
        detail = check() or ""
    except BaseException as exc:
        line = f"FAIL criterion {number}: {title} ({type(exc).__name__}: {exc})"
        RESULTS[number] = line
        print(line)
        raise
    line = f"PASS criterion {number}: {title} ({time.perf_counter() - start:.2f}s{', ' + detail if detail else ''})"
    RESULTS[number] = line
    print(line)


def timed(fn, limit):
    start = time.perf_counter()
    out = fn()
    elapsed = time.perf_counter() - start
    assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
    return out


# -- 1, 2: scenario reproduction --------------------------------------------------------


def c1():
    before, params = fixture_model("vpai_case_before"), fixture_params("vpai_case_params")
    result = timed(lambda: apply_pattern(before, "vpai", params), 1.0)
    assert save_model(result.model) == save_model(fixture_model("vpai_case_after"))


def c2():
    before = fixture_model("vpas_case_before")
    for choice in "ab":
        result = timed(lambda: apply_pattern(before, "vpas", fixture_params(f"vpas_case_params_{choice}")), 1.0)
        assert save_model(result.model) == save_model(fixture_model(f"vpas_case_after_{choice}")), choice
    return "designs (a) and (b)"


# -- 3: evolution constraints -----------------------------------------------------------


def _ec_scenarios():
    t2 = fixture_model("vpai_case_before")
    t3 = fixture_model("vpas_case_before")
    plain = model([act("A")])
    dep = model([*alt("A", "A1", "A2"), *alt("D", "D1", "D2")], vccs=[("D1", "requires", "A1")])
    dangling = dict(fixture_params("vpas_case_params_b"), variant_actions={"A1": "keep"})
    new_b = {"vp": {"id": "B"}, "position": ["A", "D"], "vp_type": "optional"}
    return [
        ("EC1", t2, "vpai", {**new_b, "variants": [{"id": "B1"}]}, None),
        ("EC1", t2, "vpai", {**new_b, "variants": []}, ["B"]),
        ("EC2", plain, "vai", {"vp": "A", "variant": {"id": "A1"}, "transform": True, "vp_type": "optional"}, None),
        ("EC2", plain, "vai", {"vp": "A", "variant": {"id": "A1"}}, ["A"]),
        ("EC3", t3, "vpas", fixture_params("vpas_case_params_b"), None),
        ("EC3", t3, "vpas", dangling, ["A2"]),
        ("EC4", dep, "vpad", {"vp": "D"}, None),
        ("EC4", dep, "vpad", {"vp": "A"}, ["D1"]),
        ("EC5", dep, "vad", {"variant": "A2"}, None),
        ("EC5", dep, "vad", {"variant": "A1"}, ["D1"]),
    ]


def c3():
    scenarios = _ec_scenarios()
    for ec, m, pattern, params, offending in scenarios:
        status = check_evolution_constraints(m, pattern, params)[ec]
        if offending is None:
            assert status.status == SATISFIED, (ec, pattern, status)
        else:
            assert status.status == VIOLATED, (ec, pattern, status)
            assert status.constraint == ec and set(offending) <= set(status.ids), (ec, status.ids)
    return f"{len(scenarios)} scenarios"


# -- 4: post-validation and atomicity ----------------------------------------------------


def c4():
    rng = random.Random(2024)
    ok = failed = 0

    def run():
        nonlocal ok, failed
        for _ in range(500):
            m = random_model(rng, max_activities=20, max_vps=6)
            pattern = rng.choice(PATTERN_IDS)
            before = canonical_hash(m)
            try:
                result = apply_pattern(m, pattern, random_params(rng, m, pattern, Ids()))
            except CpmError:
                assert canonical_hash(m) == before
                failed += 1
                continue
            report = validate_model(result.model)
            assert report.ok, (pattern, report.violations)
            ok += 1

    timed(run, 30.0)
    return f"{ok} applied, {failed} rejected"


# -- 5: configuration algebra ------------------------------------------------------------


def _factor(m, vp):
    k = len(m.variants_of(vp))
    return k if m.activities[vp].role.vp_type == "alternative" else k + 1


def _closed_form(m):
    return math.prod(_factor(m, vp) for vp in m.variation_points("activity"))


def c5():
    rng = random.Random(99)
    changes = 0

    def run():
        nonlocal changes
        for i in range(100):
            m = random_model(rng, max_activities=16, max_vps=5, vccs=False, slack=6)
            n = len(enumerate_configurations(m))
            assert n == _closed_form(m)
            vps = m.variation_points("activity")
            ops = [("VPAI", {"vp": {"id": f"n{i}"}, "position": list(rng.choice(sorted(m.flows))),
                             "vp_type": rng.choice(["alternative", "optional"]),
                             "variants": [{"id": f"n{i}v{j}"} for j in range(rng.randint(1, 2))]})]
            if vps:
                vp = rng.choice(vps)
                ops += [("VAI", {"vp": vp, "variant": {"id": f"x{i}"}}),
                        ("VAD", {"variant": rng.choice(m.variants_of(vp))}),
                        ("VPAD", {"vp": vp})]
            for pattern, params in ops:
                try:
                    out = apply_pattern(m, pattern, params).model
                except CpmError:
                    continue
                if pattern == "VPAI":
                    predicted = Fraction(_factor(out, params["vp"]["id"]))
                elif pattern == "VPAD":
                    predicted = 1 / Fraction(_factor(m, params["vp"]))
                else:
                    predicted = Fraction(_factor(out, vp), _factor(m, vp))
                assert Fraction(len(enumerate_configurations(out)), n) == predicted, pattern
                changes += 1

    timed(run, 30.0)
    return f"{changes} count changes checked"


# -- 6: derivation soundness -------------------------------------------------------------


def c6():
    total = 0
    for name in ("vpai_case_after", "vpas_case_after_a", "vpas_case_after_b"):
        m = fixture_model(name)
        for config in enumerate_configurations(m):
            out = derive_variant(m, config)
            assert is_variability_free(out), (name, config)
            report = validate_model(out)
            assert report.ok, (name, config, report.violations)
            total += 1
    return f"{total} variants derived"


# -- 7: trace determinism and inversion --------------------------------------------------


def c7():
    rng = random.Random(7)
    entries = 0
    for _ in range(100):
        start = random_model(rng, max_activities=14, slack=8)
        trace = Trace(base_hash=canonical_hash(start))
        live = start
        fresh = Ids()
        for _ in range(rng.randint(3, 12)):
            pattern = rng.choice(PATTERN_IDS)
            try:
                result = apply_pattern(live, pattern, random_params(rng, live, pattern, fresh))
            except CpmError:
                continue
            trace = record(trace, result.trace_entry)
            live = result.model
        entries += len(trace.entries)
        assert save_model(replay(start, trace)) == save_model(live)
        current = live
        while trace.entries:
            current, trace = undo(current, trace)
        assert save_model(current) == save_model(start)
    return f"{entries} entries"


# -- 8: validator mutations ---------------------------------------------------------------


def c8():
    base = model([act("A", req=["f1"], res="R", data=["d"]), *alt("B", "B1", "B2"), act("D")],
                 resources=[res("R", ["f1"])], data_objects=[data("d")], vccs=[("B1", "excludes", "B2")])
    assert validate_model(base).ok
    for rule in RULES:
        assert validate_model(MUTATIONS[rule](base)).rules() == {rule}, rule
    return f"{len(RULES)} rules"


# -- 9: catalog ----------------------------------------------------------------------------


def c9():
    concrete = [p for p in list_patterns() if not p.abstract]
    assert len(concrete) == 18
    graph = pattern_relations()
    assert graph.successors("VPAI", "refines") == {"AI"}
    assert graph.successors("VPAI", "uses") == {"VAI", "DI", "RI"}
    assert graph.successors("VPAS", "refines") == {"AS"}
    assert graph.successors("VPAS", "uses") == {"DS", "RS", "VAS", "VAI", "VAD"}


CRITERIA = [
    (1, "VPAI scenario reproduction", c1),
    (2, "VPAS scenario reproduction, both designs", c2),
    (3, "evolution constraints EC1-EC5", c3),
    (4, "post-validation and atomicity over 500 applications", c4),
    (5, "configuration algebra on 100 VCC-free models", c5),
    (6, "derivation soundness on result fixtures", c6),
    (7, "trace replay and undo over 100 sequences", c7),
    (8, "validator mutations W1-W10", c8),
    (9, "catalog conformance", c9),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check):
    verdict(number, title, check)


if __name__ == "__main__":
    for n, title, check in CRITERIA:
        try:
            verdict(n, title, check)
        except BaseException:
            pass
