"""Configurable process model: elements, variability roles and the model value.

Models are immutable. Every transformation elsewhere in the package builds a
new :class:`ConfigurableProcessModel` instead of mutating one in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

from .errors import AlreadyVariable, DuplicateId, ElementNotFound


class VPType(str, Enum):
    OPTIONAL = "optional"
    ALTERNATIVE = "alternative"
    OPTIONAL_ALTERNATIVE = "optional-alternative"


VP_TYPES = frozenset(t.value for t in VPType)

ACTIVITY = "activity"
RESOURCE = "resource"
DATA = "data"
KINDS = (ACTIVITY, RESOURCE, DATA)

REQUIRES = "requires"
EXCLUDES = "excludes"
RELATIONS = (REQUIRES, EXCLUDES)


@dataclass(frozen=True)
class Plain:
    pass


@dataclass(frozen=True)
class VariationPoint:
    # kept as a plain string so ill-typed documents still load (rule W4 reports them)
    vp_type: str


@dataclass(frozen=True)
class Variant:
    parent: str
    vsc: str | None = None


Role = Union[Plain, VariationPoint, Variant]
PLAIN = Plain()


def annotation_for(role: Role) -> str | None:
    """Stereotype shown on a diagram for an element with this role."""
    if isinstance(role, VariationPoint):
        return "«VarPoint»" if role.vp_type == VPType.ALTERNATIVE.value else "«Null»"
    if isinstance(role, Variant):
        return "«Variant»"
    return None


class _Element:
    role: Role

    @property
    def annotation(self) -> str | None:
        return annotation_for(self.role)

    @property
    def is_vp(self) -> bool:
        return isinstance(self.role, VariationPoint)

    @property
    def is_variant(self) -> bool:
        return isinstance(self.role, Variant)

    @property
    def is_plain(self) -> bool:
        return isinstance(self.role, Plain)

    @property
    def parent(self) -> str | None:
        return self.role.parent if isinstance(self.role, Variant) else None


@dataclass(frozen=True)
class Activity(_Element):
    id: str
    name: str = ""
    role: Role = PLAIN
    req_f: frozenset[str] = frozenset()
    resource: str | None = None
    data: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "req_f", frozenset(self.req_f))
        object.__setattr__(self, "data", frozenset(self.data))


@dataclass(frozen=True)
class Resource(_Element):
    id: str
    name: str = ""
    role: Role = PLAIN
    r_f: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "r_f", frozenset(self.r_f))


@dataclass(frozen=True)
class DataObject(_Element):
    id: str
    name: str = ""
    role: Role = PLAIN
    data_type: str = ""


Element = Union[Activity, Resource, DataObject]

ELEMENT_CLASSES = {ACTIVITY: Activity, RESOURCE: Resource, DATA: DataObject}


@dataclass(frozen=True)
class SequenceFlow:
    source: str
    target: str
    condition: str | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.source, self.target)


@dataclass(frozen=True, order=True)
class VCC:
    """Variant configuration constraint: ``subject`` requires/excludes ``object``."""

    subject: str
    relation: str
    object: str


def _keyed(items: Iterable, key, what: str) -> Mapping:
    if isinstance(items, Mapping):
        items = items.values()
    out: dict = {}
    for item in items:
        k = key(item)
        if k in out:
            raise DuplicateId(f"duplicate {what} {k!r}", ids=[k] if isinstance(k, str) else list(k))
        out[k] = item
    return MappingProxyType(out)


@dataclass(frozen=True)
class ConfigurableProcessModel:
    id: str
    max_activities: int
    start: str = "start"
    end: str = "end"
    activities: Mapping[str, Activity] = field(default_factory=dict)
    resources: Mapping[str, Resource] = field(default_factory=dict)
    data_objects: Mapping[str, DataObject] = field(default_factory=dict)
    flows: Mapping[tuple[str, str], SequenceFlow] = field(default_factory=dict)
    vccs: frozenset[VCC] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "activities", _keyed(self.activities, lambda a: a.id, "activity"))
        object.__setattr__(self, "resources", _keyed(self.resources, lambda r: r.id, "resource"))
        object.__setattr__(self, "data_objects", _keyed(self.data_objects, lambda d: d.id, "data object"))
        object.__setattr__(self, "flows", _keyed(self.flows, lambda f: f.key, "flow"))
        object.__setattr__(self, "vccs", frozenset(self.vccs))

    __hash__ = None  # type: ignore[assignment]

    # -- lookups ------------------------------------------------------------

    def table(self, kind: str) -> Mapping[str, Element]:
        if kind == ACTIVITY:
            return self.activities
        if kind == RESOURCE:
            return self.resources
        if kind == DATA:
            return self.data_objects
        raise ValueError(f"unknown element kind {kind!r}")

    def kind_of(self, element_id: str) -> str | None:
        for kind in KINDS:
            if element_id in self.table(kind):
                return kind
        return None

    def element(self, element_id: str) -> Element:
        kind = self.kind_of(element_id)
        if kind is None:
            raise ElementNotFound(f"no element {element_id!r}", ids=[element_id])
        return self.table(kind)[element_id]

    def elements(self) -> Iterator[tuple[str, Element]]:
        for kind in KINDS:
            for el in self.table(kind).values():
                yield kind, el

    def variants_of(self, vp_id: str) -> list[str]:
        kind = self.kind_of(vp_id)
        if kind is None:
            return []
        return sorted(e.id for e in self.table(kind).values() if e.parent == vp_id)

    def variation_points(self, kind: str = ACTIVITY) -> list[str]:
        return sorted(e.id for e in self.table(kind).values() if e.is_vp)

    def predecessors(self, node: str) -> list[str]:
        return sorted(s for (s, t) in self.flows if t == node)

    def successors(self, node: str) -> list[str]:
        return sorted(t for (s, t) in self.flows if s == node)

    def effective_functionalities(self, resource_id: str) -> frozenset[str]:
        """Own functionalities plus, for a variation point, those of all its variants."""
        res = self.resources[resource_id]
        out = set(res.r_f)
        if res.is_vp:
            for vid in self.variants_of(resource_id):
                out |= self.resources[vid].r_f
        return frozenset(out)

    @property
    def activity_count(self) -> int:
        return len(self.activities)


def transform_to_variation_point(model: ConfigurableProcessModel, element_id: str,
                                 vp_type: str | VPType) -> ConfigurableProcessModel:
    """Turn a plain activity, resource or data object into a variation point.

    The result may temporarily lack variants; composite patterns add them
    before committing.
    """
    kind = model.kind_of(element_id)
    if kind is None:
        raise ElementNotFound(f"no element {element_id!r}", ids=[element_id])
    el = model.table(kind)[element_id]
    if not el.is_plain:
        raise AlreadyVariable(f"{element_id!r} is already variable", ids=[element_id])
    vp_type = VPType(vp_type).value
    table = dict(model.table(kind))
    table[element_id] = replace(el, role=VariationPoint(vp_type))
    return replace(model, **{_TABLE_FIELD[kind]: table})


_TABLE_FIELD = {ACTIVITY: "activities", RESOURCE: "resources", DATA: "data_objects"}
