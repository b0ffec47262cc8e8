"""Configurations of a configurable model and derivation of plain process variants.

A configuration decides every activity variation point: an alternative one
picks exactly one variant, an optional or optional-alternative one picks at
most one. Resource and data variability follows from that decision: a
resource or data variant counts as chosen when a surviving activity
references it.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterator, Mapping

from .errors import InvalidSelection, SpaceTooLarge
from .evolution._engine import Draft, bridge_out
from .model import (
    ACTIVITY, DATA, EXCLUDES, PLAIN, REQUIRES, RESOURCE, ConfigurableProcessModel, SequenceFlow, VPType,
)

DEFAULT_BOUND = 10**6
BOUND_ENV = "CPMX_ENUM_BOUND"


@dataclass(frozen=True)
class Configuration:
    """Chosen variant (or ``None``) per activity variation point."""

    selection: Mapping[str, str | None] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "selection", MappingProxyType(dict(sorted(self.selection.items()))))

    __hash__ = None  # type: ignore[assignment]

    @property
    def chosen(self) -> frozenset[str]:
        return frozenset(v for v in self.selection.values() if v is not None)

    def to_dict(self) -> dict[str, str | None]:
        return dict(self.selection)

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        """Read ``vp=variant,...``; an empty variant (``vp=``) selects nothing."""
        selection: dict[str, str | None] = {}
        for item in filter(None, (part.strip() for part in text.split(","))):
            vp, sep, variant = item.partition("=")
            vp, variant = vp.strip(), variant.strip()
            if not sep or not vp:
                raise InvalidSelection(f"bad selection item {item!r}, expected vp=variant", ids=[item])
            if vp in selection:
                raise InvalidSelection(f"{vp!r} selected twice", ids=[vp])
            selection[vp] = variant or None
        return cls(selection)


@dataclass(frozen=True, order=True)
class SelectionViolation:
    ids: tuple[str, ...]
    message: str

    def to_dict(self) -> dict:
        return {"ids": list(self.ids), "message": self.message}


def _selection(config) -> Mapping[str, str | None]:
    return config.selection if isinstance(config, Configuration) else config


def surviving_activities(model: ConfigurableProcessModel, selection: Mapping[str, str | None]) -> list[str]:
    chosen = {v for v in selection.values() if v}
    return sorted(a.id for a in model.activities.values() if a.is_plain or a.id in chosen)


def _referenced(model: ConfigurableProcessModel, selection: Mapping[str, str | None]) -> set[str]:
    """Resource and data ids used once the selection is applied."""
    out: set[str] = set()
    for aid in surviving_activities(model, selection):
        act = model.activities[aid]
        if act.resource:
            out.add(act.resource)
        out |= act.data
        if act.is_variant:
            out |= model.activities[act.parent].data
    return out


def check_selection(model: ConfigurableProcessModel,
                    config: Configuration | Mapping[str, str | None]) -> list[SelectionViolation]:
    """Every way ``config`` breaks the configuration rules; empty when it is valid."""
    selection = _selection(config)
    out: list[SelectionViolation] = []
    vps = model.variation_points(ACTIVITY)
    for key in sorted(set(selection) - set(vps)):
        out.append(SelectionViolation((key,), f"{key!r} is not an activity variation point"))
    for vp in vps:
        pick = selection.get(vp)
        vp_type = model.activities[vp].role.vp_type
        if pick is None:
            if vp_type == VPType.ALTERNATIVE.value:
                out.append(SelectionViolation((vp,), f"alternative requires exactly one: {vp!r} has no variant chosen"))
        elif pick not in model.variants_of(vp):
            out.append(SelectionViolation((vp, pick), f"{pick!r} is not a variant of {vp!r}"))

    chosen = {v for k, v in selection.items() if v and k in vps}
    chosen |= {e for e in _referenced(model, selection)
               if model.kind_of(e) and model.element(e).is_variant}
    for vcc in sorted(model.vccs):
        if vcc.subject not in chosen:
            continue
        if vcc.relation == REQUIRES and vcc.object not in chosen:
            out.append(SelectionViolation((vcc.subject, vcc.object),
                                          f"{vcc.subject} requires {vcc.object}, which is not chosen"))
        elif vcc.relation == EXCLUDES and vcc.object in chosen:
            out.append(SelectionViolation((vcc.subject, vcc.object),
                                          f"{vcc.subject} excludes {vcc.object}, but both are chosen"))
    return out


def _options(model: ConfigurableProcessModel) -> list[tuple[str, list[str | None]]]:
    out = []
    for vp in model.variation_points(ACTIVITY):
        variants: list[str | None] = list(model.variants_of(vp))
        if model.activities[vp].role.vp_type != VPType.ALTERNATIVE.value:
            variants.insert(0, None)
        out.append((vp, variants))
    return out


def _bound(bound: int | None) -> int:
    if bound is not None:
        return bound
    raw = os.environ.get(BOUND_ENV)
    if raw is None:
        return DEFAULT_BOUND
    try:
        return int(raw)
    except ValueError:
        raise InvalidSelection(f"{BOUND_ENV} must be an integer, got {raw!r}") from None


def selection_space(model: ConfigurableProcessModel) -> int:
    """Number of candidate selections before constraints are applied."""
    return math.prod(len(opts) for _, opts in _options(model))


def iter_configurations(model: ConfigurableProcessModel, bound: int | None = None) -> Iterator[Configuration]:
    options = _options(model)
    space = math.prod(len(opts) for _, opts in options)
    limit = _bound(bound)
    if space > limit:
        raise SpaceTooLarge(f"{space} candidate selections exceed the bound of {limit}", ids=[model.id])
    vps = [vp for vp, _ in options]
    for combo in itertools.product(*(opts for _, opts in options)):
        selection = dict(zip(vps, combo))
        if not check_selection(model, selection):
            yield Configuration(selection)


def enumerate_configurations(model: ConfigurableProcessModel, bound: int | None = None) -> list[Configuration]:
    """All valid configurations, ordered by VP id then variant id (no choice first).

    Raises :class:`SpaceTooLarge` when the candidate space exceeds ``bound``
    (``CPMX_ENUM_BOUND`` or 10**6 by default).
    """
    return list(iter_configurations(model, bound))


def _join(condition: str | None, vsc: str | None) -> str | None:
    if condition and vsc:
        return f"{condition} and {vsc}"
    return condition or vsc


def derive_variant(model: ConfigurableProcessModel,
                   config: Configuration | Mapping[str, str | None]) -> ConfigurableProcessModel:
    """Flatten ``model`` under ``config`` into a model with no variability left."""
    selection = _selection(config)
    violations = check_selection(model, selection)
    if violations:
        ids = sorted({i for v in violations for i in v.ids})
        raise InvalidSelection("; ".join(v.message for v in violations), ids=ids)

    d = Draft(model)
    acts = d.tables[ACTIVITY]
    for vp in model.variation_points(ACTIVITY):
        pick = selection.get(vp)
        for vid in model.variants_of(vp):
            if vid != pick:
                del acts[vid]
        if pick is None:
            bridge_out(d, vp)
            del acts[vp]
            continue
        node, variant = acts.pop(vp), acts[pick]
        for (s, t), f in list(d.flows.items()):
            if t == vp:
                del d.flows[(s, t)]
                d.flows[(s, pick)] = SequenceFlow(s, pick, _join(f.condition, variant.role.vsc))
            elif s == vp:
                del d.flows[(s, t)]
                d.flows[(pick, t)] = SequenceFlow(pick, t, f.condition)
        acts[pick] = replace(variant, role=PLAIN, data=variant.data | node.data)

    used = set()
    for act in acts.values():
        used |= act.data | ({act.resource} if act.resource else set())
    for kind in (RESOURCE, DATA):
        table = d.tables[kind]
        for eid, el in sorted(table.items()):
            if el.is_plain:
                continue
            if eid not in used:
                del table[eid]
            elif el.is_vp and kind == RESOURCE:
                table[eid] = replace(el, role=PLAIN, r_f=model.effective_functionalities(eid))
            else:
                table[eid] = replace(el, role=PLAIN)
    d.vccs = set()
    return d.freeze()


def is_variability_free(model: ConfigurableProcessModel) -> bool:
    return not model.vccs and all(el.is_plain for _, el in model.elements())


__all__ = [
    "BOUND_ENV", "Configuration", "DEFAULT_BOUND", "SelectionViolation", "check_selection",
    "derive_variant", "enumerate_configurations", "is_variability_free", "iter_configurations",
    "selection_space", "surviving_activities",
]
