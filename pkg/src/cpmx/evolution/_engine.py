"""Working copy and the step functions shared by all evolution patterns.

A pattern application copies the input model into a :class:`Draft`, runs
its steps (which may invoke other patterns' steps, as composites do), then
commits: the draft is frozen, validated and diffed against the input. Any
exception before commit leaves the input model untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from ..errors import (
    AlreadyVariable, CapacityExceeded, CoverageViolation, DependentVariant, DuplicateId,
    ElementInUse, ElementNotFound, EmptyResultingVariantSet, InvalidParams, InvalidResult,
    InvalidVcc, LastVariant, MissingResourceCoverage, MissingVariant, NoVariationPoint,
    NotAVariant, NotAVariationPoint, PositionNotFound, TargetActivityNotFound, UnhandledVariant,
)
from ..model import (
    ACTIVITY, DATA, EXCLUDES, KINDS, REQUIRES, RESOURCE, VCC, Activity, ConfigurableProcessModel,
    DataObject, Resource, SequenceFlow, Variant, VariationPoint, VPType, PLAIN,
)
from ..trace import TraceEntry, make_entry
from ..validate import validate_model
from .params import (
    DELETE, KEEP, ActivityVariantSpec, Disposition, ElementSpec, ElementVariantSpec,
    ResourceChoice, VccSpec, VpaiParams, VpasParams,
)


def _a(word: str) -> str:
    return f"an {word}" if word[0] in "aeiou" else f"a {word}"


@dataclass(frozen=True)
class ApplyResult:
    model: ConfigurableProcessModel
    trace_entry: TraceEntry


class Draft:
    """Mutable working copy of a model, private to one pattern application."""

    def __init__(self, model: ConfigurableProcessModel):
        self.base = model
        self.id = model.id
        self.max_activities = model.max_activities
        self.start = model.start
        self.end = model.end
        self.tables = {kind: dict(model.table(kind)) for kind in KINDS}
        self.flows: dict[tuple[str, str], SequenceFlow] = dict(model.flows)
        self.vccs: set[VCC] = set(model.vccs)
        self.steps: list[str] = []

    def freeze(self) -> ConfigurableProcessModel:
        return ConfigurableProcessModel(
            id=self.id, max_activities=self.max_activities, start=self.start, end=self.end,
            activities=self.tables[ACTIVITY], resources=self.tables[RESOURCE],
            data_objects=self.tables[DATA], flows=self.flows, vccs=self.vccs,
        )

    # -- lookups ------------------------------------------------------------

    @property
    def activities(self) -> dict[str, Activity]:
        return self.tables[ACTIVITY]

    def kind_of(self, eid: str) -> str | None:
        for kind in KINDS:
            if eid in self.tables[kind]:
                return kind
        return None

    def get(self, kind: str, eid: str):
        el = self.tables[kind].get(eid)
        if el is None:
            other = self.kind_of(eid)
            where = f" (it is a {other})" if other else ""
            raise ElementNotFound(f"no {kind} {eid!r}{where}", ids=[eid])
        return el

    def require_fresh(self, eid: str) -> None:
        if not eid:
            raise InvalidParams("element ids must be non-empty")
        if self.kind_of(eid) is not None or eid in (self.start, self.end):
            raise DuplicateId(f"id {eid!r} already in use", ids=[eid])

    def variants_of(self, kind: str, vp: str) -> list[str]:
        return sorted(e.id for e in self.tables[kind].values() if e.parent == vp)

    def put(self, kind: str, el) -> None:
        self.tables[kind][el.id] = el

    def effective_rf(self, rid: str) -> frozenset[str]:
        res = self.tables[RESOURCE][rid]
        out = set(res.r_f)
        if res.is_vp:
            for vid in self.variants_of(RESOURCE, rid):
                out |= self.tables[RESOURCE][vid].r_f
        return frozenset(out)

    def preds(self, node: str) -> list[str]:
        return sorted(s for (s, t) in self.flows if t == node)

    def succs(self, node: str) -> list[str]:
        return sorted(t for (s, t) in self.flows if s == node)

    def users(self, kind: str, eid: str) -> list[str]:
        """Activities assigned to (resource) or referencing (data) ``eid``."""
        if kind == RESOURCE:
            return sorted(a.id for a in self.activities.values() if a.resource == eid)
        if kind == DATA:
            return sorted(a.id for a in self.activities.values() if eid in a.data)
        return []

    def requirers(self, targets: set[str], removed: set[str]) -> list[str]:
        return sorted({v.subject for v in self.vccs
                       if v.relation == REQUIRES and v.object in targets and v.subject not in removed})

    def check_coverage(self, activity_ids: Iterable[str]) -> None:
        for aid in sorted(set(activity_ids)):
            act = self.activities.get(aid)
            if act is None or act.resource is None:
                continue
            if act.resource not in self.tables[RESOURCE]:
                raise ElementNotFound(f"no resource {act.resource!r}", ids=[act.resource])
            missing = act.req_f - self.effective_rf(act.resource)
            if missing:
                raise CoverageViolation(
                    f"{act.resource!r} does not provide {sorted(missing)} required by {aid!r}",
                    ids=[aid, act.resource])

    def check_capacity(self, extra: int = 1) -> None:
        if len(self.activities) + extra > self.max_activities:
            raise CapacityExceeded(
                f"{len(self.activities)} of {self.max_activities} activities used, {extra} more needed",
                ids=[self.id])

    def log(self, step: str) -> None:
        self.steps.append(step)


def commit(draft: Draft, pattern: str, params: dict) -> ApplyResult:
    model = draft.freeze()
    report = validate_model(model)
    if not report.ok:
        rules = sorted(report.rules(), key=lambda r: int(r[1:]))
        ids = sorted({i for v in report.violations for i in v.ids})
        raise InvalidResult(f"result violates {', '.join(rules)}: {report.violations[0].message}", ids=ids)
    entry = make_entry(pattern, params, draft.base, model, draft.steps)
    return ApplyResult(model, entry)


# -- small building blocks ---------------------------------------------------------


def transform(d: Draft, kind: str, eid: str, vp_type: str | None) -> None:
    el = d.get(kind, eid)
    if not el.is_plain:
        raise AlreadyVariable(f"{eid!r} is already variable", ids=[eid])
    if vp_type is None:
        raise InvalidParams(f"transforming {eid!r} needs a vp_type")
    d.put(kind, replace(el, role=VariationPoint(VPType(vp_type).value)))
    d.log(f"transform {kind} {eid} to {vp_type} variation point")


def add_vccs(d: Draft, subject: str, specs: Sequence[VccSpec]) -> None:
    for spec in specs:
        obj_kind = d.kind_of(spec.object)
        if obj_kind is None or not d.tables[obj_kind][spec.object].is_variant:
            raise InvalidVcc(f"constraint target {spec.object!r} is not a variant", ids=[subject, spec.object])
        if spec.object == subject:
            raise InvalidVcc(f"{subject!r} cannot constrain itself", ids=[subject])
        opposite = EXCLUDES if spec.relation == REQUIRES else REQUIRES
        if VCC(subject, opposite, spec.object) in d.vccs:
            raise InvalidVcc(f"{subject!r} would both require and exclude {spec.object!r}",
                             ids=[subject, spec.object])
        d.vccs.add(VCC(subject, spec.relation, spec.object))


def attach(d: Draft, kind: str, eid: str, activity_ids: Iterable[str]) -> None:
    for aid in activity_ids:
        act = d.activities.get(aid)
        if act is None:
            raise TargetActivityNotFound(f"no activity {aid!r} to attach {eid!r} to", ids=[aid])
        if kind == RESOURCE:
            d.put(ACTIVITY, replace(act, resource=eid))
        else:
            d.put(ACTIVITY, replace(act, data=act.data | {eid}))


def _check_refs(d: Draft, resource: str | None, data: Iterable[str]) -> None:
    if resource is not None:
        d.get(RESOURCE, resource)
    for ref in data:
        d.get(DATA, ref)


def rename_vccs(d: Draft, old: str, new: str, keep_outgoing: bool = True) -> None:
    updated = set()
    for v in d.vccs:
        if v.subject == old:
            if keep_outgoing:
                updated.add(VCC(new, v.relation, v.object))
        elif v.object == old:
            updated.add(VCC(v.subject, v.relation, new))
        else:
            updated.add(v)
    d.vccs = updated


def make_element(kind: str, eid: str, name: str, role, r_f=None, data_type=None):
    if kind == RESOURCE:
        if r_f is None and not isinstance(role, VariationPoint):
            raise InvalidParams(f"resource {eid!r} needs functionalities (r_f)")
        return Resource(eid, name, role, r_f or frozenset())
    if kind == DATA:
        if data_type is None:
            raise InvalidParams(f"data object {eid!r} needs a data_type")
        return DataObject(eid, name, role, data_type)
    raise InvalidParams(f"kind must be resource or data, not {kind!r}")


def _payload(kind: str, spec) -> dict:
    if kind == RESOURCE and spec.data_type is not None:
        raise InvalidParams(f"resource {spec.id!r} cannot carry a data_type")
    if kind == DATA and spec.r_f is not None:
        raise InvalidParams(f"data object {spec.id!r} cannot carry functionalities")
    return {"r_f": spec.r_f, "data_type": spec.data_type}


# -- activity variants (VAI / VAS / VAD) -------------------------------------------------


def insert_activity_variant(d: Draft, vp: str, spec: ActivityVariantSpec,
                            transform_plain: bool = False, vp_type: str | None = None) -> str:
    parent = d.activities.get(vp)
    if parent is None or parent.is_variant or (parent.is_plain and not transform_plain):
        raise NoVariationPoint(f"{vp!r} is not a variation point activity", ids=[vp])
    if parent.is_plain:
        transform(d, ACTIVITY, vp, vp_type)
    d.check_capacity(1)
    d.require_fresh(spec.id)
    _check_refs(d, spec.resource, spec.data)
    d.put(ACTIVITY, Activity(spec.id, spec.name, Variant(vp, spec.vsc), spec.req_f,
                             spec.resource, frozenset(spec.data)))
    add_vccs(d, spec.id, spec.vccs or ())
    d.check_coverage([spec.id])
    d.log(f"VAI {spec.id} under {vp}")
    return spec.id


def substitute_activity_variant(d: Draft, variant: str, spec: ActivityVariantSpec) -> str:
    old = d.activities.get(variant)
    if old is None or not old.is_variant:
        raise NotAVariant(f"{variant!r} is not a variant activity", ids=[variant])
    if spec.id != variant:
        d.require_fresh(spec.id)
    _check_refs(d, spec.resource, spec.data)
    del d.activities[variant]
    d.put(ACTIVITY, Activity(spec.id, spec.name, Variant(old.parent, spec.vsc), spec.req_f,
                             spec.resource, frozenset(spec.data)))
    rename_vccs(d, variant, spec.id, keep_outgoing=spec.vccs is None)
    add_vccs(d, spec.id, spec.vccs or ())
    d.check_coverage([spec.id])
    d.log(f"VAS {variant} by {spec.id}")
    return spec.id


def remove_variants(d: Draft, kind: str, ids: Iterable[str], *, allow_last: bool = False,
                    cascade: bool = False) -> None:
    """Remove a batch of variants of one kind, guarding dependencies (EC5)."""
    ids = sorted(set(ids))
    for vid in ids:
        el = d.tables[kind].get(vid)
        if el is None or not el.is_variant:
            raise NotAVariant(f"{vid!r} is not {_a(kind)} variant", ids=[vid])
    removed = set(ids)
    dependents = d.requirers(removed, removed)
    if dependents:
        raise DependentVariant(f"{sorted(removed)} required by {dependents}", ids=dependents + ids)
    if not allow_last:
        parents = {d.tables[kind][v].parent for v in ids}
        for parent in sorted(parents):
            if set(d.variants_of(kind, parent)) <= removed:
                raise LastVariant(f"cannot remove the last variant of {parent!r}; delete the variation point",
                                  ids=[parent] + ids)
    parents = sorted({d.tables[kind][v].parent for v in ids})
    _detach_users(d, kind, removed, cascade)
    for vid in ids:
        del d.tables[kind][vid]
    d.vccs = {v for v in d.vccs if v.subject not in removed and v.object not in removed}
    if kind == RESOURCE:
        d.check_coverage(a for parent in parents if parent in d.tables[kind]
                         for a in d.users(kind, parent))
    d.log(f"{_code(kind, 'D', variant=True)} {', '.join(ids)}")


def _detach_users(d: Draft, kind: str, removed: set[str], cascade: bool) -> None:
    if kind == ACTIVITY:
        return
    users = sorted({a for eid in removed for a in d.users(kind, eid)})
    if not users:
        return
    if not cascade:
        raise ElementInUse(f"{sorted(removed)} still used by {users}", ids=users + sorted(removed))
    for aid in users:
        act = d.activities[aid]
        if kind == RESOURCE:
            d.put(ACTIVITY, replace(act, resource=None))
        else:
            d.put(ACTIVITY, replace(act, data=act.data - removed))


def _code(kind: str, op: str, variant: bool) -> str:
    letter = {ACTIVITY: "A", RESOURCE: "R", DATA: "D"}[kind]
    return f"V{letter}{op}" if variant else f"VP{letter}{op}"


# -- variation point deletion ------------------------------------------------------------


def bridge_out(d: Draft, node: str) -> None:
    """Remove ``node`` from the flow, linking each predecessor to each successor.

    A bridged flow takes the condition of the predecessor's flow into ``node``.
    """
    preds, succs = d.preds(node), d.succs(node)
    incoming = {p: d.flows[(p, node)].condition for p in preds}
    for p in preds:
        del d.flows[(p, node)]
    for s in succs:
        del d.flows[(node, s)]
    for p in preds:
        for s in succs:
            if p != s and (p, s) not in d.flows:
                d.flows[(p, s)] = SequenceFlow(p, s, incoming[p])


def delete_vp(d: Draft, kind: str, vp: str, cascade: bool = False) -> None:
    el = d.tables[kind].get(vp)
    if el is None or not el.is_vp:
        raise NotAVariationPoint(f"{vp!r} is not {_a(kind)} variation point", ids=[vp])
    variants = d.variants_of(kind, vp)
    removed = {vp, *variants}
    dependents = d.requirers(removed, removed)
    if dependents:
        raise DependentVariant(f"variants of {vp!r} required by {dependents}",
                               ids=dependents + variants, constraint="EC4")
    orphans: set[tuple[str, str]] = set()
    if kind == ACTIVITY:
        for aid in sorted(removed):
            act = d.activities[aid]
            if act.resource:
                orphans.add((RESOURCE, act.resource))
            orphans |= {(DATA, ref) for ref in act.data}
        bridge_out(d, vp)
    else:
        _detach_users(d, kind, removed, cascade)
    for eid in removed:
        del d.tables[kind][eid]
    d.vccs = {v for v in d.vccs if v.subject not in removed and v.object not in removed}
    d.log(f"{_code(kind, 'D', variant=False)} {vp} with variants {variants}")
    if cascade and orphans:
        prune_orphans(d, orphans)


def prune_orphans(d: Draft, candidates: set[tuple[str, str]]) -> None:
    """Drop resources/data objects left unused after an activity deletion."""
    for kind, eid in sorted(candidates):
        el = d.tables[kind].get(eid)
        if el is None or d.users(kind, eid):
            continue
        if el.is_vp:
            variants = d.variants_of(kind, eid)
            group = {eid, *variants}
            if any(d.users(kind, v) for v in variants) or d.requirers(group, group):
                continue
            for vid in group:
                del d.tables[kind][vid]
            d.vccs = {v for v in d.vccs if v.subject not in group and v.object not in group}
        elif el.is_variant:
            siblings = d.variants_of(kind, el.parent)
            if len(siblings) < 2 or d.requirers({eid}, {eid}):
                continue
            del d.tables[kind][eid]
            if kind == RESOURCE:
                try:
                    d.check_coverage(d.users(kind, el.parent))
                except CoverageViolation:
                    d.put(kind, el)
                    continue
            d.vccs = {v for v in d.vccs if eid not in (v.subject, v.object)}
        else:
            del d.tables[kind][eid]
        d.log(f"cascade remove {kind} {eid}")


# -- resources and data (RI/DI, VPRI/VPDI, VRI/VDI) -------------------------------------


def insert_element(d: Draft, kind: str, spec: ElementSpec, extra_attach: Sequence[str] = ()) -> str:
    """Insert a plain element, or a variation point with its variants."""
    payload = _payload(kind, spec)
    d.require_fresh(spec.id)
    if spec.vp_type is None:
        if spec.variants:
            raise InvalidParams(f"plain {kind} {spec.id!r} cannot have variants; give a vp_type")
        d.put(kind, make_element(kind, spec.id, spec.name, PLAIN, **payload))
        d.log(f"{'RI' if kind == RESOURCE else 'DI'} {spec.id}")
    else:
        if not spec.variants:
            raise MissingVariant(f"variation point {spec.id!r} needs at least one variant", ids=[spec.id])
        d.put(kind, make_element(kind, spec.id, spec.name, VariationPoint(spec.vp_type), **payload))
        d.log(f"{_code(kind, 'I', variant=False)} {spec.id}")
        for vspec in spec.variants:
            insert_element_variant(d, kind, spec.id, vspec)
    targets = list(spec.attach_to) + [a for a in extra_attach if a not in spec.attach_to]
    attach(d, kind, spec.id, targets)
    d.check_coverage(targets)
    return spec.id


def insert_element_variant(d: Draft, kind: str, vp: str, spec: ElementVariantSpec,
                           transform_plain: bool = False, vp_type: str | None = None,
                           default_attach: Sequence[str] = ()) -> str:
    payload = _payload(kind, spec)
    parent = d.tables[kind].get(vp)
    if parent is None or parent.is_variant or (parent.is_plain and not transform_plain):
        raise NoVariationPoint(f"{vp!r} is not {_a(kind)} variation point", ids=[vp])
    if parent.is_plain:
        transform(d, kind, vp, vp_type)
    d.require_fresh(spec.id)
    d.put(kind, make_element(kind, spec.id, spec.name, Variant(vp, spec.vsc), **payload))
    add_vccs(d, spec.id, spec.vccs or ())
    targets = default_attach if spec.attach_to is None else spec.attach_to
    attach(d, kind, spec.id, targets)
    d.check_coverage(targets)
    d.log(f"{_code(kind, 'I', variant=True)} {spec.id} under {vp}")
    return spec.id


def _compatible(kind: str, old, spec) -> bool:
    if kind == RESOURCE:
        return spec.r_f is None or old.r_f <= spec.r_f
    if kind == DATA:
        return spec.data_type is None or old.data_type == spec.data_type
    raise InvalidParams(f"kind must be resource or data, not {kind!r}")


def substitute_element(d: Draft, kind: str, old_id: str, spec: ElementSpec,
                       actions: dict[str, str] | None = None, require_vp: bool = False) -> str:
    """Replace a resource/data element and re-point every reference to it.

    Old variants are kept (re-parented) when compatible with the new
    element, otherwise deleted; explicit ``actions`` override that test.
    """
    payload = _payload(kind, spec)
    old = d.get(kind, old_id)
    if old.is_variant or (require_vp and not old.is_vp):
        raise NotAVariationPoint(f"{old_id!r} is not {_a(kind)} variation point", ids=[old_id])
    if require_vp and spec.vp_type is None:
        raise InvalidParams("the substitute variation point needs a vp_type")
    if spec.id != old_id:
        d.require_fresh(spec.id)
    old_variants = d.variants_of(kind, old_id)
    actions = dict(actions or {})
    for vid in actions:
        if vid not in old_variants:
            raise NotAVariant(f"{vid!r} is not a variant of {old_id!r}", ids=[vid])
    keep, drop = [], []
    for vid in old_variants:
        action = actions.get(vid)
        if action is None:
            action = KEEP if spec.vp_type is not None and _compatible(kind, d.tables[kind][vid], spec) else DELETE
        if action == KEEP and spec.vp_type is None:
            raise InvalidParams(f"plain substitute {spec.id!r} cannot keep variant {vid!r}")
        (keep if action == KEEP else drop).append(vid)

    users = d.users(kind, old_id)
    if drop:
        remove_variants(d, kind, drop, allow_last=True, cascade=True)
    del d.tables[kind][old_id]
    role = PLAIN if spec.vp_type is None else VariationPoint(spec.vp_type)
    d.put(kind, make_element(kind, spec.id, spec.name, role, **payload))
    for vid in keep:
        el = d.tables[kind][vid]
        d.put(kind, replace(el, role=Variant(spec.id, el.role.vsc)))
    for aid in users:
        act = d.activities[aid]
        if kind == RESOURCE:
            d.put(ACTIVITY, replace(act, resource=spec.id))
        else:
            d.put(ACTIVITY, replace(act, data=(act.data - {old_id}) | {spec.id}))
    d.log(f"{'RS' if kind == RESOURCE else 'DS'} {old_id} by {spec.id} (keep {keep}, delete {drop})")
    for vspec in spec.variants:
        insert_element_variant(d, kind, spec.id, vspec)
    attach(d, kind, spec.id, spec.attach_to)
    if spec.vp_type is not None and not d.variants_of(kind, spec.id):
        raise EmptyResultingVariantSet(f"{spec.id!r} would have no variants", ids=[spec.id])
    affected = set(users) | set(spec.attach_to)
    for vid in d.variants_of(kind, spec.id):
        affected |= set(d.users(kind, vid))
    d.check_coverage(affected)
    return spec.id


def substitute_element_variant(d: Draft, kind: str, variant: str, spec: ElementVariantSpec) -> str:
    payload = _payload(kind, spec)
    old = d.tables[kind].get(variant)
    if old is None or not old.is_variant:
        raise NotAVariant(f"{variant!r} is not {_a(kind)} variant", ids=[variant])
    if spec.id != variant:
        d.require_fresh(spec.id)
    if kind == RESOURCE and payload["r_f"] is None:
        payload["r_f"] = old.r_f
    if kind == DATA and payload["data_type"] is None:
        payload["data_type"] = old.data_type
    users = d.users(kind, variant)
    del d.tables[kind][variant]
    d.put(kind, make_element(kind, spec.id, spec.name, Variant(old.parent, spec.vsc), **payload))
    for aid in users:
        act = d.activities[aid]
        if kind == RESOURCE:
            d.put(ACTIVITY, replace(act, resource=spec.id))
        else:
            d.put(ACTIVITY, replace(act, data=(act.data - {variant}) | {spec.id}))
    rename_vccs(d, variant, spec.id, keep_outgoing=spec.vccs is None)
    add_vccs(d, spec.id, spec.vccs or ())
    attach(d, kind, spec.id, spec.attach_to or ())
    affected = set(users) | set(spec.attach_to or ()) | set(d.users(kind, old.parent))
    d.check_coverage(affected)
    d.log(f"{_code(kind, 'S', variant=True)} {variant} by {spec.id}")
    return spec.id


# -- composites ------------------------------------------------------------------------


def resolve_resource(d: Draft, activity: str, choice: ResourceChoice, new_variants: Sequence[str]) -> None:
    req = d.activities[activity].req_f
    if choice.candidate is not None:
        cand = d.get(RESOURCE, choice.candidate)
        if req <= d.effective_rf(cand.id):
            attach(d, RESOURCE, cand.id, [activity])
            d.log(f"assign {cand.id} to {activity}")
            if choice.variant is not None:
                if cand.is_variant:
                    raise InvalidParams(f"variant resource {cand.id!r} cannot receive variants")
                insert_element_variant(d, RESOURCE, cand.id, choice.variant, transform_plain=True,
                                       vp_type=choice.vp_type or VPType.ALTERNATIVE.value,
                                       default_attach=new_variants)
            return
        if choice.new is None:
            raise MissingResourceCoverage(
                f"{cand.id!r} lacks {sorted(req - d.effective_rf(cand.id))} and no new resource was given",
                ids=[activity, cand.id])
    if choice.new is not None:
        insert_element(d, RESOURCE, choice.new, extra_attach=[activity])
    elif choice.variant is not None:
        raise InvalidParams("a variant resource needs a candidate resource")


def set_incoming_condition(d: Draft, node: str, label: str) -> None:
    for p in d.preds(node):
        flow = d.flows[(p, node)]
        if flow.condition == label:
            continue
        verb = "insert" if flow.condition is None else f"substitute {flow.condition} by"
        d.flows[(p, node)] = replace(flow, condition=label)
        d.log(f"{verb} condition {label} on {p}->{node}")


def run_vpai(d: Draft, p: VpaiParams) -> str:
    if not p.variants:
        target = p.vp_id or p.transform
        raise MissingVariant(f"variation point {target!r} needs at least one variant", ids=[target])
    if p.transform is not None:
        act = d.get(ACTIVITY, p.transform)
        if not act.is_plain:
            raise AlreadyVariable(f"{p.transform!r} is already variable", ids=[p.transform])
        d.check_capacity(len(p.variants))
        vp = p.transform
        transform(d, ACTIVITY, vp, p.vp_type)
    else:
        d.check_capacity(1 + len(p.variants))
        pred, succ = p.position
        if (pred, succ) not in d.flows:
            raise PositionNotFound(f"no sequence flow {pred}->{succ}", ids=[pred, succ])
        d.require_fresh(p.vp_id)
        vp = p.vp_id
        old = d.flows.pop((pred, succ))
        d.put(ACTIVITY, Activity(vp, p.vp_name, VariationPoint(p.vp_type)))
        d.flows[(pred, vp)] = SequenceFlow(pred, vp, old.condition)
        d.flows[(vp, succ)] = SequenceFlow(vp, succ)
        d.log(f"splice {vp} into {pred}->{succ}")
    added = [insert_activity_variant(d, vp, spec) for spec in p.variants]
    if p.req_f is not None:
        d.put(ACTIVITY, replace(d.activities[vp], req_f=p.req_f))
    if p.resource is not None:
        resolve_resource(d, vp, p.resource, added)
    if p.condition is not None:
        set_incoming_condition(d, vp, p.condition)
    if p.data is not None:
        insert_element(d, DATA, p.data, extra_attach=[vp])
    d.check_coverage([vp, *added])
    return vp


def _dispositions(d: Draft, p: VpasParams, old_variants: list[str], nvpa: frozenset[str]) -> dict[str, Disposition]:
    if p.variant_actions is not None:
        for vid in p.variant_actions:
            if vid not in old_variants:
                raise NotAVariant(f"{vid!r} is not a variant of {p.old_vp!r}", ids=[vid])
        orphaned = [v for v in old_variants if v not in p.variant_actions]
        if orphaned:
            raise UnhandledVariant(f"no disposition for variants {orphaned}", ids=orphaned)
        return dict(p.variant_actions)
    return {v: Disposition(KEEP if d.activities[v].req_f <= nvpa else DELETE) for v in old_variants}


def run_vpas(d: Draft, p: VpasParams) -> str:
    old = d.activities.get(p.old_vp)
    if old is None or not old.is_vp:
        raise NotAVariationPoint(f"{p.old_vp!r} is not a variation point activity", ids=[p.old_vp])
    old_variants = d.variants_of(ACTIVITY, p.old_vp)

    if p.substitute_new is not None:
        new_id, new_name = p.substitute_new
        d.require_fresh(new_id)
        nvpa = p.req_f if p.req_f is not None else frozenset()
        dispositions = _dispositions(d, p, old_variants, nvpa)
        d.put(ACTIVITY, Activity(new_id, new_name, VariationPoint(p.vp_type), nvpa, old.resource, old.data))
        for (s, t), flow in list(d.flows.items()):
            if p.old_vp in (s, t):
                del d.flows[(s, t)]
                s2, t2 = (new_id if s == p.old_vp else s), (new_id if t == p.old_vp else t)
                d.flows[(s2, t2)] = SequenceFlow(s2, t2, flow.condition)
        d.log(f"replace {p.old_vp} by new {new_id} in the flow")
    else:
        new_id = p.substitute_existing
        target = d.get(ACTIVITY, new_id)
        if new_id == p.old_vp or not target.is_plain:
            raise AlreadyVariable(f"{new_id!r} is not a plain activity", ids=[new_id])
        nvpa = p.req_f if p.req_f is not None else target.req_f
        dispositions = _dispositions(d, p, old_variants, nvpa)
        transform(d, ACTIVITY, new_id, p.vp_type)
        d.put(ACTIVITY, replace(d.activities[new_id], req_f=nvpa))
        bridge_out(d, p.old_vp)
        d.log(f"remove {p.old_vp} from the flow; {new_id} takes over")
    del d.activities[p.old_vp]
    d.log(f"set type {p.vp_type} on {new_id}")

    for vid in old_variants:
        el = d.activities[vid]
        d.put(ACTIVITY, replace(el, role=Variant(new_id, el.role.vsc)))
    created: list[str] = []
    for vid in old_variants:
        disp = dispositions[vid]
        if disp.action == "substitute":
            created.append(substitute_activity_variant(d, vid, disp.spec))
    doomed = [v for v in old_variants if dispositions[v].action == DELETE]
    if doomed:
        remove_variants(d, ACTIVITY, doomed, allow_last=True)
    kept = [v for v in old_variants if dispositions[v].action == KEEP]
    if kept:
        d.log(f"keep compatible variants {kept}")
    for spec in p.new_variants:
        created.append(insert_activity_variant(d, new_id, spec))
    if not d.variants_of(ACTIVITY, new_id):
        raise EmptyResultingVariantSet(f"{new_id!r} would have no variants", ids=[new_id])

    if p.data_substitution is not None:
        old_data, new_data = p.data_substitution
        substitute_element(d, DATA, old_data, new_data)
        attach(d, DATA, new_data.id, [new_id])
    if p.data_insert is not None:
        insert_element(d, DATA, p.data_insert, extra_attach=[new_id])
    if p.condition is not None:
        set_incoming_condition(d, new_id, p.condition)
    rs = p.resource_substitution
    if rs is not None:
        if rs.substitute is not None:
            substitute_element(d, RESOURCE, rs.substitute[0], rs.substitute[1])
        if rs.assign is not None:
            d.get(RESOURCE, rs.assign)
            attach(d, RESOURCE, rs.assign, [new_id])
            d.log(f"assign {rs.assign} to {new_id}")
        performer = d.activities[new_id].resource
        if rs.variant is not None:
            if performer is None:
                raise InvalidParams(f"{new_id!r} has no resource to add a variant resource under")
            if d.tables[RESOURCE][performer].is_variant:
                raise InvalidParams(f"variant resource {performer!r} cannot receive variants")
            insert_element_variant(d, RESOURCE, performer, rs.variant, transform_plain=True,
                                   vp_type=rs.vp_type or VPType.ALTERNATIVE.value, default_attach=created)
    d.check_coverage(d.activities)
    return new_id
