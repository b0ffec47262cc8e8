"""Evolution patterns for activities, resources and data objects."""

from __future__ import annotations

import json
from dataclasses import replace
from typing import Any, Callable, Mapping

from ..errors import InvalidParams, UnknownPattern
from ..model import DATA, RESOURCE, ConfigurableProcessModel
from ._engine import ApplyResult
from .activity import (
    variant_activity_delete, variant_activity_insert, variant_activity_substitute,
    vp_activity_delete, vpai, vpas,
)
from .params import (
    ActivityVariantSpec, Disposition, ElementSpec, ElementVariantSpec, ResourceChoice,
    ResourceSubstitution, VccSpec, VpaiParams, VpasParams,
)
from .secondary import variant_delete, variant_insert, variant_substitute, vp_delete, vp_insert, vp_substitute


def _keys(params: Mapping, allowed: set[str], required: set[str]) -> Mapping:
    if not isinstance(params, Mapping):
        raise InvalidParams("params must be a JSON object")
    extra, missing = set(params) - allowed, required - set(params)
    if extra or missing:
        raise InvalidParams(f"unknown keys {sorted(extra)}, missing keys {sorted(missing)}")
    return params


def _flag(params: Mapping, key: str) -> bool:
    value = params.get(key, False)
    if not isinstance(value, bool):
        raise InvalidParams(f"{key!r} must be true or false")
    return value


def _id(params: Mapping, key: str) -> str:
    value = params[key]
    if not isinstance(value, str):
        raise InvalidParams(f"{key!r} must be an element id")
    return value


def _vai(model, p):
    p = _keys(p, {"vp", "variant", "transform", "vp_type"}, {"vp", "variant"})
    return variant_activity_insert(model, _id(p, "vp"), p["variant"],
                                   transform=_flag(p, "transform"), vp_type=p.get("vp_type"))


def _vas(model, p):
    p = _keys(p, {"variant", "new"}, {"variant", "new"})
    return variant_activity_substitute(model, _id(p, "variant"), p["new"])


def _vpad(model, p):
    p = _keys(p, {"vp", "cascade"}, {"vp"})
    return vp_activity_delete(model, _id(p, "vp"), cascade=_flag(p, "cascade"))


def _vad(model, p):
    p = _keys(p, {"variant"}, {"variant"})
    return variant_activity_delete(model, _id(p, "variant"))


def _secondary(kind: str) -> dict[str, Callable]:
    def ins_vp(model, p):
        p = _keys(p, {"element"}, {"element"})
        return vp_insert(model, kind, p["element"])

    def ins_variant(model, p):
        p = _keys(p, {"vp", "variant", "transform", "vp_type"}, {"vp", "variant"})
        return variant_insert(model, kind, _id(p, "vp"), p["variant"],
                              transform=_flag(p, "transform"), vp_type=p.get("vp_type"))

    def sub_vp(model, p):
        p = _keys(p, {"old", "new", "variant_actions"}, {"old", "new"})
        actions = p.get("variant_actions")
        if actions is not None and not isinstance(actions, Mapping):
            raise InvalidParams("variant_actions must be an object")
        return vp_substitute(model, kind, _id(p, "old"), p["new"], variant_actions=actions)

    def sub_variant(model, p):
        p = _keys(p, {"variant", "new"}, {"variant", "new"})
        return variant_substitute(model, kind, _id(p, "variant"), p["new"])

    def del_vp(model, p):
        p = _keys(p, {"vp", "cascade"}, {"vp"})
        return vp_delete(model, kind, _id(p, "vp"), cascade=_flag(p, "cascade"))

    def del_variant(model, p):
        p = _keys(p, {"variant", "cascade"}, {"variant"})
        return variant_delete(model, kind, _id(p, "variant"), cascade=_flag(p, "cascade"))

    k = "R" if kind == RESOURCE else "D"
    return {f"VP{k}I": ins_vp, f"V{k}I": ins_variant, f"VP{k}S": sub_vp,
            f"V{k}S": sub_variant, f"VP{k}D": del_vp, f"V{k}D": del_variant}


PATTERNS: dict[str, Callable[[ConfigurableProcessModel, Mapping], ApplyResult]] = {
    "VPAI": lambda m, p: vpai(m, p),
    "VAI": _vai,
    "VPAS": lambda m, p: vpas(m, p),
    "VAS": _vas,
    "VPAD": _vpad,
    "VAD": _vad,
    **_secondary(RESOURCE),
    **_secondary(DATA),
}


def apply_pattern(model: ConfigurableProcessModel, pattern: str, params: Mapping[str, Any]) -> ApplyResult:
    """Apply a concrete pattern by id (case-insensitive) with a JSON-style payload."""
    fn = PATTERNS.get(pattern.upper())
    if fn is None:
        raise UnknownPattern(f"no invokable pattern {pattern!r}", ids=[pattern])
    result = fn(model, params)
    # the trace keeps the payload exactly as supplied
    supplied = json.loads(json.dumps(params))
    return replace(result, trace_entry=replace(result.trace_entry, params=supplied))


__all__ = [
    "ApplyResult", "PATTERNS", "apply_pattern",
    "vpai", "variant_activity_insert", "vpas", "variant_activity_substitute",
    "vp_activity_delete", "variant_activity_delete",
    "vp_insert", "variant_insert", "vp_substitute", "variant_substitute", "vp_delete", "variant_delete",
    "ActivityVariantSpec", "Disposition", "ElementSpec", "ElementVariantSpec", "ResourceChoice",
    "ResourceSubstitution", "VccSpec", "VpaiParams", "VpasParams",
]
