"""Parameter payloads for evolution patterns.

Each class round-trips through plain JSON-compatible dicts (``from_dict`` /
``to_dict``); those dicts are what the CLI reads and what traces store.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from ..errors import InvalidParams
from ..model import RELATIONS, VP_TYPES


def _get(raw: Mapping, key: str, kind: type | tuple, default: Any = None, required: bool = False):
    if key not in raw or raw[key] is None:
        if required:
            raise InvalidParams(f"missing parameter {key!r}")
        return default
    value = raw[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise InvalidParams(f"parameter {key!r} has the wrong type: {value!r}")
    return value


def _labels(raw: Mapping, key: str) -> frozenset[str] | None:
    value = _get(raw, key, list)
    if value is None:
        return None
    if not all(isinstance(x, str) and x for x in value):
        raise InvalidParams(f"{key!r} must be a list of non-empty strings")
    return frozenset(value)


def _ids(raw: Mapping, key: str) -> tuple[str, ...]:
    value = _get(raw, key, list, default=[])
    if not all(isinstance(x, str) for x in value):
        raise InvalidParams(f"{key!r} must be a list of ids")
    return tuple(value)


def _vp_type(raw: Mapping, key: str = "vp_type", required: bool = False) -> str | None:
    value = _get(raw, key, str, required=required)
    if value is not None and value not in VP_TYPES:
        raise InvalidParams(f"unknown variation point type {value!r}")
    return value


def _check_keys(raw: Any, allowed: set[str], what: str) -> Mapping:
    if not isinstance(raw, Mapping):
        raise InvalidParams(f"{what} must be an object")
    extra = set(raw) - allowed
    if extra:
        raise InvalidParams(f"unknown {what} keys {sorted(extra)}")
    return raw


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


@dataclass(frozen=True)
class VccSpec:
    relation: str
    object: str

    @classmethod
    def from_dict(cls, raw: Any) -> "VccSpec":
        raw = _check_keys(raw, {"relation", "object"}, "constraint")
        rel = _get(raw, "relation", str, required=True)
        if rel not in RELATIONS:
            raise InvalidParams(f"unknown relation {rel!r}")
        return cls(rel, _get(raw, "object", str, required=True))

    def to_dict(self) -> dict:
        return {"relation": self.relation, "object": self.object}


def _vccs(raw: Mapping) -> tuple[VccSpec, ...] | None:
    value = _get(raw, "vccs", list)
    return None if value is None else tuple(VccSpec.from_dict(v) for v in value)


@dataclass(frozen=True)
class ActivityVariantSpec:
    """A variant activity to insert (VAI) or to substitute in (VAS).

    ``vccs`` of ``None`` means "not supplied": on substitution the old
    variant's constraints are carried over to the new id.
    """

    id: str
    name: str = ""
    vsc: str | None = None
    req_f: frozenset[str] = frozenset()
    vccs: tuple[VccSpec, ...] | None = None
    resource: str | None = None
    data: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, raw: Any) -> "ActivityVariantSpec":
        raw = _check_keys(raw, {"id", "name", "vsc", "req_f", "vccs", "resource", "data"}, "variant")
        return cls(
            id=_get(raw, "id", str, required=True),
            name=_get(raw, "name", str, default=""),
            vsc=_get(raw, "vsc", str),
            req_f=_labels(raw, "req_f") or frozenset(),
            vccs=_vccs(raw),
            resource=_get(raw, "resource", str),
            data=_ids(raw, "data"),
        )

    def to_dict(self) -> dict:
        return _drop_none({
            "id": self.id, "name": self.name, "vsc": self.vsc,
            "req_f": sorted(self.req_f),
            "vccs": None if self.vccs is None else [v.to_dict() for v in self.vccs],
            "resource": self.resource, "data": list(self.data),
        })


@dataclass(frozen=True)
class ElementVariantSpec:
    """A resource or data variant; ``attach_to`` lists activities that use it."""

    id: str
    name: str = ""
    vsc: str | None = None
    r_f: frozenset[str] | None = None
    data_type: str | None = None
    vccs: tuple[VccSpec, ...] | None = None
    attach_to: tuple[str, ...] | None = None

    @classmethod
    def from_dict(cls, raw: Any) -> "ElementVariantSpec":
        raw = _check_keys(raw, {"id", "name", "vsc", "r_f", "data_type", "vccs", "attach_to"},
                          "element variant")
        attach = _get(raw, "attach_to", list)
        return cls(
            id=_get(raw, "id", str, required=True),
            name=_get(raw, "name", str, default=""),
            vsc=_get(raw, "vsc", str),
            r_f=_labels(raw, "r_f"),
            data_type=_get(raw, "data_type", str),
            vccs=_vccs(raw),
            attach_to=None if attach is None else _ids(raw, "attach_to"),
        )

    def to_dict(self) -> dict:
        return _drop_none({
            "id": self.id, "name": self.name, "vsc": self.vsc,
            "r_f": None if self.r_f is None else sorted(self.r_f),
            "data_type": self.data_type,
            "vccs": None if self.vccs is None else [v.to_dict() for v in self.vccs],
            "attach_to": None if self.attach_to is None else list(self.attach_to),
        })


@dataclass(frozen=True)
class ElementSpec:
    """A resource or data object to insert: plain, or a variation point with variants."""

    id: str
    name: str = ""
    r_f: frozenset[str] | None = None
    data_type: str | None = None
    vp_type: str | None = None
    variants: tuple[ElementVariantSpec, ...] = ()
    attach_to: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, raw: Any) -> "ElementSpec":
        raw = _check_keys(raw, {"id", "name", "r_f", "data_type", "vp_type", "variants", "attach_to"},
                          "element")
        return cls(
            id=_get(raw, "id", str, required=True),
            name=_get(raw, "name", str, default=""),
            r_f=_labels(raw, "r_f"),
            data_type=_get(raw, "data_type", str),
            vp_type=_vp_type(raw),
            variants=tuple(ElementVariantSpec.from_dict(v) for v in _get(raw, "variants", list, [])),
            attach_to=_ids(raw, "attach_to"),
        )

    def to_dict(self) -> dict:
        return _drop_none({
            "id": self.id, "name": self.name,
            "r_f": None if self.r_f is None else sorted(self.r_f),
            "data_type": self.data_type, "vp_type": self.vp_type,
            "variants": [v.to_dict() for v in self.variants] or None,
            "attach_to": list(self.attach_to) or None,
        })


@dataclass(frozen=True)
class ResourceChoice:
    """How a variation point activity obtains its performer.

    ``candidate`` is tried first; ``variant`` is the variant resource added
    under it (its ``attach_to`` defaults to the newly inserted variant
    activities); ``new`` is inserted when the candidate cannot cover the
    required functionalities.
    """

    candidate: str | None = None
    variant: ElementVariantSpec | None = None
    vp_type: str | None = None
    new: ElementSpec | None = None

    @classmethod
    def from_dict(cls, raw: Any) -> "ResourceChoice":
        raw = _check_keys(raw, {"candidate", "variant", "vp_type", "new"}, "resource choice")
        variant = _get(raw, "variant", Mapping)
        new = _get(raw, "new", Mapping)
        return cls(
            candidate=_get(raw, "candidate", str),
            variant=None if variant is None else ElementVariantSpec.from_dict(variant),
            vp_type=_vp_type(raw),
            new=None if new is None else ElementSpec.from_dict(new),
        )

    def to_dict(self) -> dict:
        return _drop_none({
            "candidate": self.candidate,
            "variant": self.variant.to_dict() if self.variant else None,
            "vp_type": self.vp_type,
            "new": self.new.to_dict() if self.new else None,
        })


@dataclass(frozen=True)
class VpaiParams:
    """Variation point activity insertion.

    Either ``vp`` (new node spliced between ``position``) or ``transform``
    (id of an existing plain activity) is given.
    """

    vp_type: str
    variants: tuple[ActivityVariantSpec, ...]
    vp_id: str | None = None
    vp_name: str = ""
    position: tuple[str, str] | None = None
    transform: str | None = None
    req_f: frozenset[str] | None = None
    condition: str | None = None
    resource: ResourceChoice | None = None
    data: ElementSpec | None = None

    @classmethod
    def from_dict(cls, raw: Any) -> "VpaiParams":
        raw = _check_keys(raw, {"vp", "transform", "position", "vp_type", "req_f", "variants",
                                "condition", "resource", "data"}, "vpai")
        vp = _get(raw, "vp", Mapping)
        if vp is not None:
            vp = _check_keys(vp, {"id", "name"}, "vp")
        position = _get(raw, "position", list)
        if position is not None and (len(position) != 2 or not all(isinstance(p, str) for p in position)):
            raise InvalidParams("position must be [predecessor, successor]")
        transform = _get(raw, "transform", str)
        if (vp is None) == (transform is None):
            raise InvalidParams("give exactly one of 'vp' and 'transform'")
        if vp is not None and position is None:
            raise InvalidParams("a new variation point needs a position")
        resource = _get(raw, "resource", Mapping)
        data = _get(raw, "data", Mapping)
        return cls(
            vp_type=_vp_type(raw, required=True),
            variants=tuple(ActivityVariantSpec.from_dict(v) for v in _get(raw, "variants", list, [])),
            vp_id=None if vp is None else _get(vp, "id", str, required=True),
            vp_name="" if vp is None else _get(vp, "name", str, default=""),
            position=None if position is None else (position[0], position[1]),
            transform=transform,
            req_f=_labels(raw, "req_f"),
            condition=_get(raw, "condition", str),
            resource=None if resource is None else ResourceChoice.from_dict(resource),
            data=None if data is None else ElementSpec.from_dict(data),
        )

    def to_dict(self) -> dict:
        return _drop_none({
            "vp": None if self.vp_id is None else {"id": self.vp_id, "name": self.vp_name},
            "transform": self.transform,
            "position": None if self.position is None else list(self.position),
            "vp_type": self.vp_type,
            "req_f": None if self.req_f is None else sorted(self.req_f),
            "variants": [v.to_dict() for v in self.variants],
            "condition": self.condition,
            "resource": self.resource.to_dict() if self.resource else None,
            "data": self.data.to_dict() if self.data else None,
        })


KEEP = "keep"
DELETE = "delete"


@dataclass(frozen=True)
class Disposition:
    action: str  # keep | delete | substitute
    spec: ActivityVariantSpec | None = None

    @classmethod
    def from_json(cls, raw: Any) -> "Disposition":
        if raw in (KEEP, DELETE):
            return cls(raw)
        if isinstance(raw, Mapping) and set(raw) == {"substitute"}:
            return cls("substitute", ActivityVariantSpec.from_dict(raw["substitute"]))
        raise InvalidParams(f"bad variant disposition {raw!r}")

    def to_json(self) -> Any:
        if self.action == "substitute":
            return {"substitute": self.spec.to_dict()}
        return self.action


@dataclass(frozen=True)
class ResourceSubstitution:
    assign: str | None = None
    substitute: tuple[str, ElementSpec] | None = None
    variant: ElementVariantSpec | None = None
    vp_type: str | None = None

    @classmethod
    def from_dict(cls, raw: Any) -> "ResourceSubstitution":
        raw = _check_keys(raw, {"assign", "substitute", "variant", "vp_type"}, "resource substitution")
        sub = _get(raw, "substitute", Mapping)
        if sub is not None:
            sub = _check_keys(sub, {"old", "new"}, "substitute")
            sub = (_get(sub, "old", str, required=True),
                   ElementSpec.from_dict(_get(sub, "new", Mapping, required=True)))
        variant = _get(raw, "variant", Mapping)
        return cls(
            assign=_get(raw, "assign", str),
            substitute=sub,
            variant=None if variant is None else ElementVariantSpec.from_dict(variant),
            vp_type=_vp_type(raw),
        )

    def to_dict(self) -> dict:
        return _drop_none({
            "assign": self.assign,
            "substitute": None if self.substitute is None else
            {"old": self.substitute[0], "new": self.substitute[1].to_dict()},
            "variant": self.variant.to_dict() if self.variant else None,
            "vp_type": self.vp_type,
        })


@dataclass(frozen=True)
class VpasParams:
    """Variation point activity substitution.

    ``substitute_new`` (id, name) replaces the old node in place;
    ``substitute_existing`` names a plain activity that is turned into the
    new variation point while the old node is removed from the flow.
    ``variant_actions`` when given must cover every old variant.
    """

    old_vp: str
    vp_type: str
    substitute_new: tuple[str, str] | None = None
    substitute_existing: str | None = None
    req_f: frozenset[str] | None = None
    variant_actions: Mapping[str, Disposition] | None = None
    new_variants: tuple[ActivityVariantSpec, ...] = ()
    data_substitution: tuple[str, ElementSpec] | None = None
    data_insert: ElementSpec | None = None
    condition: str | None = None
    resource_substitution: ResourceSubstitution | None = None

    @classmethod
    def from_dict(cls, raw: Any) -> "VpasParams":
        raw = _check_keys(raw, {"old_vp", "substitute", "vp_type", "req_f", "variant_actions",
                                "new_variants", "data_substitution", "data_insert", "condition",
                                "resource_substitution"}, "vpas")
        sub = _check_keys(_get(raw, "substitute", Mapping, required=True), {"new", "existing"},
                          "substitute")
        if len(sub) != 1:
            raise InvalidParams("substitute takes exactly one of 'new' and 'existing'")
        new = existing = None
        if "new" in sub:
            spec = _check_keys(sub["new"], {"id", "name"}, "substitute.new")
            new = (_get(spec, "id", str, required=True), _get(spec, "name", str, default=""))
        else:
            existing = _get(sub, "existing", str, required=True)
        actions = _get(raw, "variant_actions", Mapping)
        if actions is not None:
            actions = {str(k): Disposition.from_json(v) for k, v in actions.items()}
        dsub = _get(raw, "data_substitution", Mapping)
        if dsub is not None:
            dsub = _check_keys(dsub, {"old", "new"}, "data_substitution")
            dsub = (_get(dsub, "old", str, required=True),
                    ElementSpec.from_dict(_get(dsub, "new", Mapping, required=True)))
        dins = _get(raw, "data_insert", Mapping)
        rsub = _get(raw, "resource_substitution", Mapping)
        return cls(
            old_vp=_get(raw, "old_vp", str, required=True),
            vp_type=_vp_type(raw, required=True),
            substitute_new=new,
            substitute_existing=existing,
            req_f=_labels(raw, "req_f"),
            variant_actions=actions,
            new_variants=tuple(ActivityVariantSpec.from_dict(v)
                               for v in _get(raw, "new_variants", list, [])),
            data_substitution=dsub,
            data_insert=None if dins is None else ElementSpec.from_dict(dins),
            condition=_get(raw, "condition", str),
            resource_substitution=None if rsub is None else ResourceSubstitution.from_dict(rsub),
        )

    def to_dict(self) -> dict:
        if self.substitute_new is not None:
            substitute = {"new": {"id": self.substitute_new[0], "name": self.substitute_new[1]}}
        else:
            substitute = {"existing": self.substitute_existing}
        return _drop_none({
            "old_vp": self.old_vp,
            "substitute": substitute,
            "vp_type": self.vp_type,
            "req_f": None if self.req_f is None else sorted(self.req_f),
            "variant_actions": None if self.variant_actions is None else
            {k: v.to_json() for k, v in sorted(self.variant_actions.items())},
            "new_variants": [v.to_dict() for v in self.new_variants] or None,
            "data_substitution": None if self.data_substitution is None else
            {"old": self.data_substitution[0], "new": self.data_substitution[1].to_dict()},
            "data_insert": self.data_insert.to_dict() if self.data_insert else None,
            "condition": self.condition,
            "resource_substitution": self.resource_substitution.to_dict()
            if self.resource_substitution else None,
        })


def coerce(cls, params):
    """Accept either a params instance or its dict form."""
    if isinstance(params, cls):
        return params
    return cls.from_dict(params)


__all__ = [
    "ActivityVariantSpec", "Disposition", "ElementSpec", "ElementVariantSpec", "ResourceChoice",
    "ResourceSubstitution", "VccSpec", "VpaiParams", "VpasParams", "coerce", "KEEP", "DELETE",
]
