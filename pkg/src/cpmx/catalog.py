"""Pattern catalog: descriptors, the refines/uses relation graph and designer guidance."""

from __future__ import annotations

from dataclasses import dataclass, field
from graphlib import TopologicalSorter

from .errors import ElementNotFound
from .model import ACTIVITY, DATA, RESOURCE, ConfigurableProcessModel

_KIND_WORD = {ACTIVITY: "activity", RESOURCE: "resource", DATA: "data"}
_LETTER = {ACTIVITY: "A", RESOURCE: "R", DATA: "D"}
_EVOLUTION = {"I": "insertion", "S": "substitution", "D": "deletion"}


@dataclass(frozen=True)
class PatternDescriptor:
    identification: str
    name: str
    classification: tuple[str, ...]
    context: frozenset[str]
    problem: str
    force: str
    refines: str | None = None
    uses: frozenset[str] = frozenset()
    abstract: bool = False
    kind: str = ACTIVITY
    evolution: str = "I"
    target: str | None = None  # "vp" or "variant" for concrete patterns

    def to_dict(self) -> dict:
        return {
            "identification": self.identification,
            "name": self.name,
            "classification": list(self.classification),
            "context": sorted(self.context),
            "problem": self.problem,
            "force": self.force,
            "relations": {"refines": self.refines, "uses": sorted(self.uses)},
            "abstract": self.abstract,
        }


def _abstract(kind: str, evo: str) -> PatternDescriptor:
    word, letter = _KIND_WORD[kind], _LETTER[kind]
    return PatternDescriptor(
        identification=f"{letter}{evo}",
        name=f"{word.capitalize()} {_EVOLUTION[evo].capitalize()}",
        classification=(word, _EVOLUTION[evo], "configurable process model"),
        context=frozenset(),
        problem=f"{_EVOLUTION[evo].capitalize()} of a {word} in a configurable process model.",
        force="Groups the variation point and variant specialisations.",
        abstract=True, kind=kind, evolution=evo,
    )


def _concrete(kind: str, evo: str, target: str) -> PatternDescriptor:
    word, letter = _KIND_WORD[kind], _LETTER[kind]
    vp = target == "vp"
    pid = f"{'VP' if vp else 'V'}{letter}{evo}"
    subject = f"{word} variation point" if vp else f"variant {word}"
    # what a pattern delegates to, by kind of evolution
    if vp and evo == "I":
        uses = {f"V{letter}I"} | ({"DI", "RI"} if kind == ACTIVITY else set())
    elif vp and evo == "S":
        uses = {f"V{letter}S", f"V{letter}I", f"V{letter}D"} | ({"DS", "RS"} if kind == ACTIVITY else set())
    elif vp and evo == "D":
        uses = {f"V{letter}D"}
    else:
        uses = set()
    return PatternDescriptor(
        identification=pid,
        name=f"{'Variation Point' if vp else 'Variant'} {word.capitalize()} {_EVOLUTION[evo].capitalize()}",
        classification=(subject, _EVOLUTION[evo], "configurable process model"),
        context=frozenset(uses),
        problem=f"{_EVOLUTION[evo].capitalize()} of a {subject} in a configurable process model.",
        force=f"Checks the evolution constraints before the {_EVOLUTION[evo]} is committed.",
        refines=f"{letter}{evo}",
        uses=frozenset(uses),
        kind=kind, evolution=evo, target=target,
    )


def _build() -> tuple[PatternDescriptor, ...]:
    out = []
    for kind in (ACTIVITY, RESOURCE, DATA):
        for evo in ("I", "S", "D"):
            out.append(_abstract(kind, evo))
            for target in ("vp", "variant"):
                out.append(_concrete(kind, evo, target))
    return tuple(out)


CATALOG: tuple[PatternDescriptor, ...] = _build()
BY_ID = {p.identification: p for p in CATALOG}


def list_patterns() -> list[PatternDescriptor]:
    """Every descriptor, grouped by sub-system (activity, resource, data)."""
    return list(CATALOG)


def concrete_patterns() -> list[PatternDescriptor]:
    return [p for p in CATALOG if not p.abstract]


@dataclass(frozen=True)
class PatternGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (source, "refines" | "uses", target)

    def successors(self, node: str, label: str) -> set[str]:
        return {t for s, lab, t in self.edges if s == node and lab == label}

    def refines_order(self) -> list[str]:
        """Topological order of the refines forest (parents first)."""
        ts = TopologicalSorter({n: self.successors(n, "refines") for n in self.nodes})
        return list(ts.static_order())

    def to_dot(self) -> str:
        lines = ["digraph patterns {", "  rankdir=BT;"]
        for n in self.nodes:
            shape = "ellipse" if BY_ID[n].abstract else "box"
            lines.append(f'  "{n}" [shape={shape}];')
        for s, label, t in self.edges:
            style = "solid" if label == "refines" else "dashed"
            lines.append(f'  "{s}" -> "{t}" [label="{label}", style={style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def pattern_relations() -> PatternGraph:
    edges = []
    for p in CATALOG:
        if p.refines:
            edges.append((p.identification, "refines", p.refines))
        for u in sorted(p.uses):
            edges.append((p.identification, "uses", u))
    return PatternGraph(tuple(p.identification for p in CATALOG), tuple(edges))


# -- guidance ---------------------------------------------------------------------


@dataclass(frozen=True)
class ApplicabilityVerdict:
    pattern: str
    target: str | None
    applicable: bool
    blocking_reasons: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {"pattern": self.pattern, "target": self.target, "applicable": self.applicable,
                "blocking_reasons": list(self.blocking_reasons)}


def _requirers(model: ConfigurableProcessModel, removed: set[str]) -> set[str]:
    return {v.subject for v in model.vccs
            if v.relation == "requires" and v.object in removed and v.subject not in removed}


def _vp_deletable(model, vp: str) -> bool:
    return not _requirers(model, {vp, *model.variants_of(vp)})


def _variant_deletable(model, variant: str) -> list[str]:
    reasons = []
    el = model.element(variant)
    if len(model.variants_of(el.parent)) < 2:
        reasons.append("last variant")
    if _requirers(model, {variant}):
        reasons.append("dependent variants")
    if model.kind_of(variant) == RESOURCE:
        remaining = set(model.resources[el.parent].r_f)
        for sib in model.variants_of(el.parent):
            if sib != variant:
                remaining |= model.resources[sib].r_f
        if any(a.resource == el.parent and not a.req_f <= remaining for a in model.activities.values()):
            reasons.append("coverage")
    return reasons


def _verdict(model: ConfigurableProcessModel, p: PatternDescriptor, target: str | None) -> list[str]:
    kind, table = p.kind, model.table(p.kind)
    room = model.max_activities - model.activity_count
    word = _KIND_WORD[kind]
    reasons: list[str] = []

    def target_el():
        if target not in table:
            reasons.append(f"target is not a {word}")
            return None
        return table[target]

    if p.evolution == "I":
        if p.target == "vp":
            if kind == ACTIVITY:
                plain = [a for a in model.activities.values() if a.is_plain]
                if target is None:
                    if room < 2 and not (room >= 1 and plain):
                        reasons.append("capacity")
                else:
                    el = target_el()
                    if el is not None and not el.is_plain:
                        reasons.append("target is not a plain activity")
                    elif room < 1:
                        reasons.append("capacity")
            elif target is not None and target not in model.activities:
                reasons.append("target is not an activity")
        else:
            if kind == ACTIVITY and room < 1:
                reasons.append("capacity")
            if target is None:
                if not any(not e.is_variant for e in table.values()):
                    reasons.append(f"no {word} can take variants")
            else:
                el = target_el()
                if el is not None and el.is_variant:
                    reasons.append("target is not a variation point")
        return reasons

    candidates = [target] if target is not None else None
    if p.target == "vp":
        if target is not None:
            el = target_el()
            if el is not None and not el.is_vp:
                reasons.append("target is not a variation point")
            if reasons:
                return reasons
        vps = candidates or [e.id for e in table.values() if e.is_vp]
        if not vps:
            reasons.append(f"no {word} variation point")
        elif p.evolution == "D" and not any(_vp_deletable(model, v) for v in vps):
            reasons.append("dependent variants")
        return reasons

    if target is not None:
        el = target_el()
        if el is not None and not el.is_variant:
            reasons.append("target is not a variant")
        if reasons:
            return reasons
    variants = candidates or [e.id for e in table.values() if e.is_variant]
    if not variants:
        reasons.append(f"no variant {word}")
    elif p.evolution == "D":
        blocked = [_variant_deletable(model, v) for v in variants]
        if all(blocked):
            reasons.extend(sorted({r for rs in blocked for r in rs}))
    return reasons


def applicable_patterns(model: ConfigurableProcessModel, target: str | None = None) -> list[ApplicabilityVerdict]:
    """Evaluate each concrete pattern's parameter-independent preconditions.

    Nothing is mutated. A pattern marked applicable can be invoked with at
    least one admissible parameter set; one marked not applicable fails for
    every parameterisation on that target.
    """
    if target is not None and model.kind_of(target) is None:
        raise ElementNotFound(f"no element {target!r}", ids=[target])
    out = []
    for p in concrete_patterns():
        reasons = _verdict(model, p, target)
        out.append(ApplicabilityVerdict(p.identification, target, not reasons, tuple(reasons)))
    return out
