import random

import pydot
import pytest

from cpmx import applicable_patterns, apply_pattern, list_patterns, pattern_relations
from cpmx.catalog import BY_ID, concrete_patterns
from cpmx.errors import CpmError, ElementNotFound, PreconditionError

from _build import act, alt, model
from _gen import Ids, random_model, random_params


def test_catalog_contents():
    ids = [p.identification for p in list_patterns()]
    assert len(ids) == len(set(ids)) == 27
    concrete = {p.identification for p in concrete_patterns()}
    assert len(concrete) == 18
    assert {"VPAI", "VAI", "VPAS", "VAS", "VPAD", "VAD"} <= concrete
    assert {"AI", "AS", "AD", "RI", "RS", "RD", "DI", "DS", "DD"} == set(ids) - concrete


def test_known_descriptors():
    vpai = BY_ID["VPAI"]
    assert vpai.refines == "AI" and vpai.context == {"VAI", "DI", "RI"}
    vpas = BY_ID["VPAS"]
    assert vpas.refines == "AS" and vpas.uses == {"DS", "RS", "VAS", "VAI", "VAD"}
    d = vpai.to_dict()
    assert set(d) >= {"identification", "classification", "context", "problem", "force", "relations"}


def test_closure_and_acyclicity():
    graph = pattern_relations()
    nodes = set(graph.nodes)
    assert all(s in nodes and t in nodes for s, _, t in graph.edges)
    order = graph.refines_order()
    assert order.index("AI") < order.index("VPAI")
    roots = {n for n in nodes if not graph.successors(n, "refines")}
    assert roots == {"AI", "AS", "AD", "RI", "RS", "RD", "DI", "DS", "DD"}
    assert ("VPAI", "refines", "AI") in graph.edges


def test_dot_parses():
    [graph] = pydot.graph_from_dot_data(pattern_relations().to_dot())
    styles = {(e.get_source().strip('"'), e.get_destination().strip('"')): e.get_style() for e in graph.get_edges()}
    assert styles[("VPAI", "AI")] == "solid"
    assert styles[("VPAI", "VAI")] == "dashed"


# -- guidance -------------------------------------------------------------------------


def verdicts(m, target=None):
    return {v.pattern: v for v in applicable_patterns(m, target)}


def test_plain_target_not_a_variant():
    m = model([act("A"), act("B")])
    v = verdicts(m, "A")["VAD"]
    assert not v.applicable and v.blocking_reasons == ("target is not a variant",)


def test_vpai_case_vpai_applicable(vpai_case_before):
    assert verdicts(vpai_case_before)["VPAI"].applicable


def test_capacity():
    m = model([act("A"), act("B"), act("C")], cap=3)
    v = verdicts(m)
    assert "capacity" in v["VPAI"].blocking_reasons and "capacity" in v["VAI"].blocking_reasons


def test_unknown_target():
    with pytest.raises(ElementNotFound):
        applicable_patterns(model([act("A")]), "nope")


def test_verdict_invariant(vpas_case_before):
    for target in [None, *vpas_case_before.activities, *vpas_case_before.resources]:
        for v in applicable_patterns(vpas_case_before, target):
            assert v.applicable == (not v.blocking_reasons)


def witness(m, pattern, target, fresh):
    """A maximally permissive parameter set for ``pattern``, or None."""
    p = BY_ID[pattern]
    kind, table = p.kind, m.table(p.kind)
    def pick(ids):
        ids = sorted(ids)
        return [i for i in ids if i == target] if target is not None else ids

    home = m.activities if p.evolution == "I" and p.target == "vp" else table
    if target is not None and target not in home:
        return None
    if p.evolution == "I" and p.target == "vp":
        if kind == "activity":
            if target is not None:
                return {"transform": target, "vp_type": "optional", "variants": [{"id": fresh()}]}
            if m.max_activities - m.activity_count >= 2:
                return {"vp": {"id": fresh()}, "position": list(sorted(m.flows)[0]),
                        "vp_type": "optional", "variants": [{"id": fresh()}]}
            plain = sorted(a for a, e in m.activities.items() if e.is_plain)
            return plain and {"transform": plain[0], "vp_type": "optional", "variants": [{"id": fresh()}]}
        el = {"id": fresh(), "vp_type": "optional"}
        payload = ({"r_f": sorted(m.activities[target].req_f if target else set()) or ["x"]}
                   if kind == "resource" else {"data_type": "doc"})
        el.update(payload, variants=[{"id": fresh(), **payload}])
        if target is not None:
            el["attach_to"] = [target]
        return {"element": el}
    if p.evolution == "I":
        options = pick(e for e, x in table.items() if not x.is_variant)
        if not options:
            return None
        vp = options[0]
        payload = {"r_f": ["x"]} if kind == "resource" else {"data_type": "doc"} if kind == "data" else {}
        spec = {"id": fresh(), **payload}
        if table[vp].is_plain:
            return {"vp": vp, "variant": spec, "transform": True, "vp_type": "optional"}
        return {"vp": vp, "variant": spec}
    if p.target == "vp":
        vps = pick(e for e, x in table.items() if x.is_vp)
        if p.evolution == "D":
            return [{"vp": v, "cascade": True} if kind != "activity" else {"vp": v, "cascade": True} for v in vps]
        out = []
        for v in vps:
            el = table[v]
            actions = {c: "keep" for c in m.variants_of(v)}
            if kind == "activity":
                out.append({"old_vp": v, "substitute": {"new": {"id": fresh()}}, "vp_type": el.role.vp_type,
                            "req_f": sorted(el.req_f), "variant_actions": actions})
            else:
                payload = {"r_f": sorted(el.r_f)} if kind == "resource" else {"data_type": el.data_type}
                out.append({"old": v, "new": {"id": fresh(), "vp_type": el.role.vp_type, **payload},
                            "variant_actions": actions})
        return out
    variants = pick(e for e, x in table.items() if x.is_variant)
    if p.evolution == "D":
        return [{"variant": v} if kind == "activity" else {"variant": v, "cascade": True} for v in variants]
    return [{"variant": v, "new": {"id": v}} for v in variants]


def _tries(m, pattern, target, fresh):
    w = witness(m, pattern, target, fresh)
    if not w:
        return []
    return w if isinstance(w, list) else [w]


def _succeeds(m, pattern, params):
    try:
        apply_pattern(m, pattern, params)
        return True
    except PreconditionError:
        return False


def test_guidance_soundness_and_completeness():
    rng = random.Random(13)
    for _ in range(60):
        m = random_model(rng, max_activities=10, max_vps=3, slack=rng.choice([0, 1, 3]))
        ids = sorted(el.id for _, el in m.elements())
        targets = [None, *rng.sample(ids, min(3, len(ids)))]
        for target in targets:
            for v in applicable_patterns(m, target):
                fresh = Ids("w")
                tries = _tries(m, v.pattern, target, fresh)
                if v.applicable:
                    assert any(_succeeds(m, v.pattern, t) for t in tries), (v, target)
                else:
                    assert not any(_succeeds(m, v.pattern, t) for t in tries), (v, target)
                    if target is None:
                        for _ in range(5):
                            params = random_params(rng, m, v.pattern, Ids("z"))
                            assert not _succeeds(m, v.pattern, params), (v, params)
