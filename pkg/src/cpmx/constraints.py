"""Evolution constraints EC1-EC5 and variant configuration constraint analysis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .errors import CpmError, NotAVariant, UnknownPattern
from .model import ACTIVITY, EXCLUDES, REQUIRES, ConfigurableProcessModel, VPType

CONSTRAINTS = {
    "EC1": "inserting a variation point requires inserting at least one variant",
    "EC2": "inserting a variant requires a variation point, or transforming an element into one",
    "EC3": "substituting a variation point substitutes and/or preserves its variants",
    "EC4": "deleting a variation point deletes its variants",
    "EC5": "deleting a variant requires that no other variant requires it",
}

SATISFIED = "satisfied"
VIOLATED = "violated"
NOT_APPLICABLE = "not-applicable"

# constraints each pattern family is subject to
_RELEVANT = {
    "VPI": ("EC1",), "VI": ("EC2",), "VPS": ("EC3",), "VPD": ("EC4",), "VD": ("EC5",),
}


def _family(pattern: str) -> str:
    pid = pattern.upper()
    from .evolution import PATTERNS
    if pid not in PATTERNS:
        raise UnknownPattern(f"no invokable pattern {pattern!r}", ids=[pattern])
    return ("VP" if pid.startswith("VP") else "V") + pid[-1]


@dataclass(frozen=True)
class ConstraintStatus:
    constraint: str
    status: str
    ids: tuple[str, ...] = ()
    message: str = ""

    def to_dict(self) -> dict:
        return {"constraint": self.constraint, "status": self.status,
                "ids": list(self.ids), "message": self.message}


@dataclass(frozen=True)
class EvolutionConstraintReport:
    pattern: str
    statuses: tuple[ConstraintStatus, ...]

    def __getitem__(self, constraint: str) -> ConstraintStatus:
        for s in self.statuses:
            if s.constraint == constraint:
                return s
        raise KeyError(constraint)

    @property
    def ok(self) -> bool:
        return all(s.status != VIOLATED for s in self.statuses)

    def violated(self) -> list[ConstraintStatus]:
        return [s for s in self.statuses if s.status == VIOLATED]

    def to_dict(self) -> dict:
        return {"pattern": self.pattern, "constraints": [s.to_dict() for s in self.statuses]}


def check_evolution_constraints(model: ConfigurableProcessModel, pattern: str,
                                params: Mapping[str, Any]) -> EvolutionConstraintReport:
    """Evaluate the evolution constraints relevant to a proposed application.

    The proposal is dry-run against the model; a precondition error tagged
    with one of the relevant constraints marks it violated. Constraints the
    pattern is not subject to are reported not-applicable.
    """
    family = _family(pattern)
    relevant = _RELEVANT[family]
    failure: CpmError | None = None
    try:
        from .evolution import apply_pattern
        apply_pattern(model, pattern, params)
    except CpmError as exc:
        failure = exc
    statuses = []
    for ec in sorted(CONSTRAINTS):
        if ec not in relevant:
            statuses.append(ConstraintStatus(ec, NOT_APPLICABLE))
        elif failure is not None and _maps_to(failure, ec, family):
            statuses.append(ConstraintStatus(ec, VIOLATED, failure.ids, failure.message))
        else:
            statuses.append(ConstraintStatus(ec, SATISFIED))
    return EvolutionConstraintReport(pattern.upper(), tuple(statuses))


def _maps_to(exc: CpmError, ec: str, family: str) -> bool:
    if exc.constraint == ec:
        return True
    # a dependency block during VP deletion is the cascade failing
    return family == "VPD" and ec == "EC4" and exc.name == "DependentVariant"


# -- VCC analysis ---------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class VccConflict:
    kind: str  # contradiction | unselectable | self-competition
    ids: tuple[str, ...]
    message: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ids": list(self.ids), "message": self.message}


def variant_dependents(model: ConfigurableProcessModel, variant_id: str,
                       transitive: bool = False) -> set[str]:
    """Variants whose requires-constraints point at ``variant_id``.

    Direct dependents only unless ``transitive`` is set. Excludes-constraints
    are not dependencies.
    """
    kind = model.kind_of(variant_id)
    if kind is None or not model.table(kind)[variant_id].is_variant:
        raise NotAVariant(f"{variant_id!r} is not a variant", ids=[variant_id])
    direct = _requires_reverse(model)
    if not transitive:
        return set(direct.get(variant_id, ()))
    seen: set[str] = set()
    frontier = [variant_id]
    while frontier:
        for dep in direct.get(frontier.pop(), ()):
            if dep not in seen and dep != variant_id:
                seen.add(dep)
                frontier.append(dep)
    return seen


def _requires_reverse(model) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    for v in model.vccs:
        if v.relation == REQUIRES:
            out.setdefault(v.object, set()).add(v.subject)
    return out


def requires_closure(model: ConfigurableProcessModel, variant_id: str) -> set[str]:
    fwd: dict[str, set[str]] = {}
    for v in model.vccs:
        if v.relation == REQUIRES:
            fwd.setdefault(v.subject, set()).add(v.object)
    seen: set[str] = set()
    frontier = [variant_id]
    while frontier:
        for nxt in fwd.get(frontier.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    seen.discard(variant_id)
    return seen


def check_vcc_consistency(model: ConfigurableProcessModel) -> list[VccConflict]:
    """Report contradictory pairs, unselectable activity variants and sibling requirements."""
    out: list[VccConflict] = []
    rels: dict[tuple[str, str], set[str]] = {}
    for v in model.vccs:
        rels.setdefault((v.subject, v.object), set()).add(v.relation)
    for (s, o), r in sorted(rels.items()):
        if {REQUIRES, EXCLUDES} <= r:
            out.append(VccConflict("contradiction", (s, o), f"{s} both requires and excludes {o}"))

    for v in sorted(model.vccs):
        if v.relation != REQUIRES:
            continue
        ks, ko = model.kind_of(v.subject), model.kind_of(v.object)
        if ks is None or ko is None:
            continue
        ps, po = model.table(ks)[v.subject].parent, model.table(ko)[v.object].parent
        if ks == ko and ps is not None and ps == po:
            vp = model.table(ks)[ps]
            out.append(VccConflict(
                "self-competition", (v.subject, v.object),
                f"{v.subject} requires sibling {v.object} under {vp.role.vp_type} variation point {ps}"))

    selectable = _selectable_variants(model)
    for vid in sorted(a.id for a in model.activities.values() if a.is_variant):
        if vid not in selectable:
            out.append(VccConflict("unselectable", (vid, *sorted(requires_closure(model, vid))),
                                   f"no valid configuration selects {vid}"))
    return out


def _selectable_variants(model: ConfigurableProcessModel) -> set[str]:
    """Activity variants chosen by at least one valid configuration.

    Depth-first search over activity variation points with early pruning on
    activity-only constraints; complete selections go through the full
    configuration check.
    """
    from .configuration import check_selection

    vps = model.variation_points(ACTIVITY)
    options = []
    for vp in vps:
        variants = model.variants_of(vp)
        if model.activities[vp].role.vp_type == VPType.ALTERNATIVE.value:
            options.append(variants)
        else:
            options.append([None, *variants])
    chosen_of = {v: vp for vp in vps for v in model.variants_of(vp)}
    act_vccs = [v for v in model.vccs if v.subject in chosen_of and v.object in chosen_of]
    found: set[str] = set()
    picks: dict[str, str | None] = {}

    def consistent() -> bool:
        chosen = {c for c in picks.values() if c}
        for v in act_vccs:
            if v.subject not in chosen:
                continue
            obj_vp = chosen_of[v.object]
            if v.relation == REQUIRES and obj_vp in picks and picks[obj_vp] != v.object:
                return False
            if v.relation == EXCLUDES and v.object in chosen:
                return False
        return True

    def search(i: int) -> None:
        if i == len(vps):
            if not check_selection(model, picks):
                found.update(c for c in picks.values() if c)
            return
        for choice in options[i]:
            if len(found) == len(chosen_of):
                return  # every variant already has a witness
            picks[vps[i]] = choice
            if consistent():
                search(i + 1)
            del picks[vps[i]]

    search(0)
    return found


__all__ = [
    "CONSTRAINTS", "ConstraintStatus", "EvolutionConstraintReport", "VccConflict",
    "check_evolution_constraints", "check_vcc_consistency", "requires_closure", "variant_dependents",
]
