"""Seeded generators for random models and random pattern invocations."""

from __future__ import annotations

import itertools
import random

from cpmx import (
    VCC, Activity, ConfigurableProcessModel, DataObject, Resource, SequenceFlow, Variant,
    VariationPoint, validate_model,
)
from cpmx.evolution import PATTERNS

LABELS = ("f1", "f2", "f3", "f4")
TYPES = ("alternative", "optional", "optional-alternative")
DTYPES = ("doc", "form")


def _subset(rng: random.Random, pool, lo=0, hi=None):
    pool = sorted(pool)  # set order varies between runs
    hi = len(pool) if hi is None else min(hi, len(pool))
    return set(rng.sample(pool, rng.randint(min(lo, hi), hi)))


def random_model(rng: random.Random, *, max_activities: int = 20, max_vps: int = 6,
                 vccs: bool = True, resources: bool = True, slack: int = 4) -> ConfigurableProcessModel:
    """A valid model: a chain of plain and variation point activities, with optional skip edges."""
    res: list[Resource] = []
    if resources:
        for i in range(rng.randint(0, 3)):
            rf = _subset(rng, LABELS, 1)
            if rng.random() < 0.5:
                res.append(Resource(f"r{i}", role=VariationPoint(rng.choice(TYPES)), r_f=rf))
                for j in range(rng.randint(1, 2)):
                    res.append(Resource(f"r{i}v{j}", role=Variant(f"r{i}"), r_f=_subset(rng, LABELS, 1)))
            else:
                res.append(Resource(f"r{i}", r_f=rf))
    data: list[DataObject] = []
    if resources:
        for i in range(rng.randint(0, 2)):
            if rng.random() < 0.4:
                data.append(DataObject(f"d{i}", role=VariationPoint(rng.choice(TYPES)), data_type="doc"))
                for j in range(rng.randint(1, 2)):
                    data.append(DataObject(f"d{i}v{j}", role=Variant(f"d{i}"), data_type=rng.choice(DTYPES)))
            else:
                data.append(DataObject(f"d{i}", data_type=rng.choice(DTYPES)))
    tmp = ConfigurableProcessModel("tmp", 1, resources=res)

    def performer():
        if not res or rng.random() < 0.4:
            return None, set()
        r = rng.choice(res)
        return r.id, _subset(rng, tmp.effective_functionalities(r.id), 0, 2)

    acts: list[Activity] = []
    chain: list[str] = []
    n_vps = rng.randint(0, max_vps)
    budget = max_activities
    i = 0
    while budget > 0 and (n_vps > 0 or len(chain) < 2 or rng.random() < 0.3):
        aid = f"a{i}"
        i += 1
        rid, req = performer()
        refs = _subset(rng, [d.id for d in data], 0, 1)
        k = rng.randint(1, 3)
        if n_vps > 0 and budget >= 1 + k:
            acts.append(Activity(aid, role=VariationPoint(rng.choice(TYPES)), req_f=req, resource=rid, data=refs))
            for j in range(k):
                vrid, vreq = performer()
                acts.append(Activity(f"{aid}v{j}", role=Variant(aid, rng.choice([None, f"c{i}{j}"])),
                                     req_f=vreq, resource=vrid))
            budget -= 1 + k
            n_vps -= 1
        else:
            acts.append(Activity(aid, req_f=req, resource=rid, data=refs))
            budget -= 1
        chain.append(aid)
        if budget <= 0:
            break
    nodes = ["start", *chain, "end"]
    flows = {(a, b): SequenceFlow(a, b, rng.choice([None, None, "g"])) for a, b in zip(nodes, nodes[1:])}
    for _ in range(rng.randint(0, 2)):
        a = rng.randrange(len(nodes) - 2)
        b = rng.randrange(a + 2, len(nodes))
        flows.setdefault((nodes[a], nodes[b]), SequenceFlow(nodes[a], nodes[b]))
    constraints: set[VCC] = set()
    if vccs:
        variants = [a.id for a in acts if a.is_variant] + [r.id for r in res if r.is_variant]
        for _ in range(rng.randint(0, 3)):
            if len(variants) < 2:
                break
            s, o = rng.sample(variants, 2)
            rel = rng.choice(["requires", "excludes"])
            other = "excludes" if rel == "requires" else "requires"
            if VCC(s, other, o) not in constraints:
                constraints.add(VCC(s, rel, o))
    model = ConfigurableProcessModel(
        f"m{rng.randrange(10**6)}", len(acts) + rng.randint(0, slack),
        activities=acts, resources=res, data_objects=data, flows=flows.values(), vccs=constraints)
    report = validate_model(model)
    assert report.ok, report.violations
    return model


class Ids:
    def __init__(self, prefix: str = "n"):
        self._c = itertools.count()
        self.prefix = prefix

    def __call__(self) -> str:
        return f"{self.prefix}{next(self._c)}"


def _pick(rng, items):
    items = sorted(items)
    return rng.choice(items) if items else "missing"


def _ids(model, kind, pred):
    return [e.id for e in model.table(kind).values() if pred(e)]


def _vcc_specs(rng, model):
    variants = [e.id for _, e in model.elements() if e.is_variant]
    if not variants or rng.random() < 0.7:
        return None
    return [{"relation": rng.choice(["requires", "excludes"]), "object": rng.choice(variants)}]


def _act_variant(rng, model, fresh):
    spec = {"id": fresh(), "req_f": sorted(_subset(rng, LABELS, 0, 2))}
    if rng.random() < 0.3:
        spec["vsc"] = "s"
    if model.resources and rng.random() < 0.4:
        spec["resource"] = _pick(rng, model.resources)
    if model.data_objects and rng.random() < 0.3:
        spec["data"] = [_pick(rng, model.data_objects)]
    vccs = _vcc_specs(rng, model)
    if vccs:
        spec["vccs"] = vccs
    return spec


def _elem_variant(rng, model, kind, fresh):
    spec = {"id": fresh()}
    if kind == "resource":
        spec["r_f"] = sorted(_subset(rng, LABELS, 1))
    else:
        spec["data_type"] = rng.choice(DTYPES)
    if rng.random() < 0.5:
        spec["attach_to"] = sorted(_subset(rng, model.activities, 0, 2))
    return spec


def _elem(rng, model, kind, fresh, variants=True):
    spec = {"id": fresh()}
    if kind == "resource":
        spec["r_f"] = sorted(_subset(rng, LABELS, 1))
    else:
        spec["data_type"] = rng.choice(DTYPES)
    if variants:
        spec["vp_type"] = rng.choice(TYPES)
        spec["variants"] = [_elem_variant(rng, model, kind, fresh) for _ in range(rng.choice([0, 1, 1, 2]))]
    if rng.random() < 0.5:
        spec["attach_to"] = sorted(_subset(rng, model.activities, 0, 2))
    return spec


def random_params(rng: random.Random, model: ConfigurableProcessModel, pattern: str, fresh: Ids) -> dict:
    """Plausible (not necessarily admissible) parameters for ``pattern`` on ``model``."""
    acts = model.activities
    vps = _ids(model, "activity", lambda e: e.is_vp)
    plain = _ids(model, "activity", lambda e: e.is_plain)
    variants = _ids(model, "activity", lambda e: e.is_variant)
    if pattern == "VPAI":
        p = {"vp_type": rng.choice(TYPES), "variants": [_act_variant(rng, model, fresh)
                                                        for _ in range(rng.choice([0, 1, 2, 2, 3]))]}
        if plain and rng.random() < 0.3:
            p["transform"] = rng.choice(sorted(plain))
        else:
            p["vp"] = {"id": fresh()}
            p["position"] = list(rng.choice(sorted(model.flows)))
        if rng.random() < 0.5:
            p["req_f"] = sorted(_subset(rng, LABELS, 0, 2))
        if rng.random() < 0.4:
            p["condition"] = rng.choice(["x", "y"])
        if model.resources and rng.random() < 0.4:
            choice = {"candidate": _pick(rng, model.resources)}
            if rng.random() < 0.5:
                choice["variant"] = {"id": fresh(), "r_f": sorted(_subset(rng, LABELS, 1))}
            if rng.random() < 0.3:
                choice["new"] = {"id": fresh(), "r_f": list(LABELS)}
            p["resource"] = choice
        if rng.random() < 0.3:
            p["data"] = {"id": fresh(), "data_type": "doc"}
        return p
    if pattern == "VAI":
        transform = bool(plain) and rng.random() < 0.25
        p = {"vp": rng.choice(sorted(plain)) if transform else _pick(rng, vps or acts),
             "variant": _act_variant(rng, model, fresh)}
        if transform:
            p.update(transform=True, vp_type=rng.choice(TYPES))
        return p
    if pattern == "VPAS":
        old = _pick(rng, vps)
        p = {"old_vp": old, "vp_type": rng.choice(TYPES)}
        others = [a for a in plain]
        if others and rng.random() < 0.4:
            p["substitute"] = {"existing": rng.choice(sorted(others))}
        else:
            p["substitute"] = {"new": {"id": fresh()}}
        if rng.random() < 0.6:
            p["req_f"] = sorted(_subset(rng, LABELS, 0, 3))
        if rng.random() < 0.5 and old in acts:
            actions = {}
            for v in model.variants_of(old):
                r = rng.random()
                if r < 0.1:
                    continue  # leave one unhandled now and then
                if r < 0.5:
                    actions[v] = "keep"
                elif r < 0.8:
                    actions[v] = "delete"
                else:
                    actions[v] = {"substitute": _act_variant(rng, model, fresh)}
            p["variant_actions"] = actions
        if rng.random() < 0.4:
            p["new_variants"] = [_act_variant(rng, model, fresh)]
        if rng.random() < 0.3:
            p["condition"] = rng.choice(["x", "z"])
        if model.data_objects and rng.random() < 0.2:
            p["data_substitution"] = {"old": _pick(rng, model.data_objects), "new": {"id": fresh(), "data_type": "doc"}}
        if model.resources and rng.random() < 0.2:
            p["resource_substitution"] = {"assign": _pick(rng, model.resources)}
        return p
    if pattern == "VAS":
        return {"variant": _pick(rng, variants or acts), "new": _act_variant(rng, model, fresh)}
    if pattern == "VPAD":
        return {"vp": _pick(rng, vps or acts), "cascade": rng.random() < 0.5}
    if pattern == "VAD":
        return {"variant": _pick(rng, variants or acts)}

    kind = "resource" if pattern[-2] == "R" else "data"
    table = model.table(kind)
    kvps = [e.id for e in table.values() if e.is_vp]
    kvariants = [e.id for e in table.values() if e.is_variant]
    kplain = [e.id for e in table.values() if e.is_plain]
    op = pattern[-1]
    if pattern.startswith("VP"):
        if op == "I":
            return {"element": _elem(rng, model, kind, fresh)}
        if op == "S":
            new = _elem(rng, model, kind, fresh, variants=rng.random() < 0.8)
            new.setdefault("vp_type", rng.choice(TYPES))
            p = {"old": _pick(rng, kvps or table), "new": new}
            if rng.random() < 0.3 and p["old"] in table:
                p["variant_actions"] = {v: rng.choice(["keep", "delete"]) for v in model.variants_of(p["old"])}
            return p
        return {"vp": _pick(rng, kvps or table), "cascade": rng.random() < 0.5}
    if op == "I":
        transform = bool(kplain) and rng.random() < 0.3
        p = {"vp": rng.choice(sorted(kplain)) if transform else _pick(rng, kvps or table),
             "variant": _elem_variant(rng, model, kind, fresh)}
        if transform:
            p.update(transform=True, vp_type=rng.choice(TYPES))
        return p
    if op == "S":
        spec = _elem_variant(rng, model, kind, fresh)
        if rng.random() < 0.3:
            spec.pop("r_f", None)
            spec.pop("data_type", None)
        return {"variant": _pick(rng, kvariants or table), "new": spec}
    return {"variant": _pick(rng, kvariants or table), "cascade": rng.random() < 0.5}


PATTERN_IDS = sorted(PATTERNS)
