"""Well-formedness rules W1-W10 for configurable process models."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .model import (
    ACTIVITY, DATA, RESOURCE, RELATIONS, REQUIRES, EXCLUDES, VP_TYPES,
    ConfigurableProcessModel, VariationPoint, Variant,
)

RULES = {
    "W1": "flows reference existing, flow-eligible nodes",
    "W2": "every variant has exactly one same-kind variation point parent",
    "W3": "every variation point has at least one variant",
    "W4": "variation point type is legal",
    "W5": "assigned resources cover required functionalities",
    "W6": "variant configuration constraints are well-formed",
    "W7": "data references exist",
    "W8": "activity count within capacity",
    "W9": "every flow-eligible activity lies on a start-to-end path",
    "W10": "variants do not appear in sequence flows",
}


@dataclass(frozen=True, order=True)
class Violation:
    rule: str
    ids: tuple[str, ...]
    message: str

    def to_dict(self) -> dict:
        return {"rule": self.rule, "ids": list(self.ids), "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_dict(self) -> dict:
        return {"violations": [v.to_dict() for v in self.violations]}


def _flow_eligible(model: ConfigurableProcessModel, node: str) -> bool:
    if node in (model.start, model.end):
        return True
    act = model.activities.get(node)
    return act is not None and not act.is_variant


def validate_model(model: ConfigurableProcessModel) -> ValidationReport:
    """Collect every rule violation. Never raises for ill-formed input."""
    out: list[Violation] = []

    def add(rule: str, ids, message: str) -> None:
        out.append(Violation(rule, tuple(ids), message))

    # W1: node identity and flow endpoints
    seen: dict[str, str] = {}
    for kind, el in model.elements():
        if el.id in seen:
            add("W1", [el.id], f"identifier {el.id!r} used by both {seen[el.id]} and {kind} elements")
        seen.setdefault(el.id, kind)
    for node in (model.start, model.end):
        if node in seen:
            add("W1", [node], f"boundary node {node!r} collides with an element id")
    if model.start == model.end:
        add("W1", [model.start], "start and end nodes must differ")
    for (src, tgt), flow in sorted(model.flows.items()):
        if src == tgt:
            add("W1", [src], f"self-loop on {src!r}")
            continue
        for node in (src, tgt):
            if node in (model.start, model.end) or node in model.activities:
                continue
            add("W1", [src, tgt], f"flow {src}->{tgt} references non-node {node!r}")
        if tgt == model.start or src == model.end:
            add("W1", [src, tgt], f"flow {src}->{tgt} enters start or leaves end")

    # W2 / W3 / W4: roles
    for kind in (ACTIVITY, RESOURCE, DATA):
        table = model.table(kind)
        children: dict[str, int] = defaultdict(int)
        for el in table.values():
            role = el.role
            if isinstance(role, Variant):
                parent = table.get(role.parent)
                if parent is None or not parent.is_vp:
                    add("W2", [el.id, role.parent],
                        f"variant {el.id!r} has no {kind} variation point {role.parent!r}")
                else:
                    children[role.parent] += 1
        for el in sorted(table.values(), key=lambda e: e.id):
            if isinstance(el.role, VariationPoint):
                if el.role.vp_type not in VP_TYPES:
                    add("W4", [el.id], f"illegal variation point type {el.role.vp_type!r}")
                if children[el.id] == 0:
                    add("W3", [el.id], f"variation point {el.id!r} has no variant")

    # W5: functionality coverage
    for act in sorted(model.activities.values(), key=lambda a: a.id):
        if act.resource is None:
            continue
        if act.resource not in model.resources:
            add("W5", [act.id, act.resource], f"{act.id!r} assigned to missing resource {act.resource!r}")
            continue
        missing = act.req_f - model.effective_functionalities(act.resource)
        if missing:
            add("W5", [act.id, act.resource],
                f"{act.resource!r} lacks {sorted(missing)} required by {act.id!r}")

    # W6: VCCs
    relations: dict[tuple[str, str], set[str]] = defaultdict(set)
    for vcc in sorted(model.vccs):
        relations[(vcc.subject, vcc.object)].add(vcc.relation)
        if vcc.relation not in RELATIONS:
            add("W6", [vcc.subject, vcc.object], f"unknown relation {vcc.relation!r}")
        if vcc.subject == vcc.object:
            add("W6", [vcc.subject], f"{vcc.subject!r} constrains itself")
        for end in (vcc.subject, vcc.object):
            kind = model.kind_of(end)
            if kind is None or not model.table(kind)[end].is_variant:
                add("W6", [end], f"constraint endpoint {end!r} is not a variant")
    for (s, o), rels in sorted(relations.items()):
        if {REQUIRES, EXCLUDES} <= rels:
            add("W6", [s, o], f"{s!r} both requires and excludes {o!r}")

    # W7: data references
    for act in sorted(model.activities.values(), key=lambda a: a.id):
        for ref in sorted(act.data):
            if ref not in model.data_objects:
                add("W7", [act.id, ref], f"{act.id!r} references missing data object {ref!r}")

    # W8: capacity
    if model.max_activities < 1 or model.activity_count > model.max_activities:
        add("W8", [model.id],
            f"{model.activity_count} activities exceed capacity {model.max_activities}")

    # W9: every flow-eligible activity on some start->end path
    fwd: dict[str, set[str]] = defaultdict(set)
    bwd: dict[str, set[str]] = defaultdict(set)
    for src, tgt in model.flows:
        fwd[src].add(tgt)
        bwd[tgt].add(src)
    reach_from_start = _reach(model.start, fwd)
    reach_to_end = _reach(model.end, bwd)
    if model.end not in reach_from_start:
        add("W9", [model.start, model.end], "end is unreachable from start")
    for act in sorted(model.activities.values(), key=lambda a: a.id):
        if act.is_variant:
            continue
        if act.id not in reach_from_start or act.id not in reach_to_end:
            add("W9", [act.id], f"{act.id!r} is not on a start-to-end path")

    # W10: variants stay out of the main flow
    for (src, tgt) in sorted(model.flows):
        for node in (src, tgt):
            act = model.activities.get(node)
            if act is not None and act.is_variant:
                add("W10", [node], f"variant {node!r} appears in flow {src}->{tgt}")

    return ValidationReport(tuple(out))


def _reach(origin: str, adj: dict[str, set[str]]) -> set[str]:
    seen = {origin}
    stack = [origin]
    while stack:
        for nxt in adj.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen
