"""Resource and data evolution patterns.

They mirror the activity sub-system: insertion, substitution and deletion
of variation points and variants, with functionalities (resources) or data
types (data objects) as the kind-specific payload. Resources and data
objects are not part of the sequence flow; their position is the set of
activities that use them.
"""

from __future__ import annotations

from typing import Any, Mapping

from ..errors import InvalidParams, MissingVariant
from ..model import DATA, RESOURCE, ConfigurableProcessModel
from . import _engine as eng
from ._engine import ApplyResult, Draft
from .params import ElementSpec, ElementVariantSpec, coerce

_LETTER = {RESOURCE: "R", DATA: "D"}


def _kind(kind: str) -> str:
    if kind not in _LETTER:
        raise InvalidParams(f"kind must be 'resource' or 'data', not {kind!r}")
    return kind


def vp_insert(model: ConfigurableProcessModel, kind: str,
              spec: ElementSpec | Mapping[str, Any]) -> ApplyResult:
    """VPRI / VPDI: insert a resource or data variation point with its variants."""
    kind = _kind(kind)
    spec = coerce(ElementSpec, spec)
    if spec.vp_type is None:
        raise InvalidParams(f"{spec.id!r} needs a vp_type")
    if not spec.variants:
        raise MissingVariant(f"variation point {spec.id!r} needs at least one variant", ids=[spec.id])
    d = Draft(model)
    eng.insert_element(d, kind, spec)
    return eng.commit(d, f"VP{_LETTER[kind]}I", {"element": spec.to_dict()})


def variant_insert(model: ConfigurableProcessModel, kind: str, vp_id: str,
                   spec: ElementVariantSpec | Mapping[str, Any], *,
                   transform: bool = False, vp_type: str | None = None) -> ApplyResult:
    """VRI / VDI: attach a variant to an existing resource/data variation point."""
    kind = _kind(kind)
    spec = coerce(ElementVariantSpec, spec)
    d = Draft(model)
    eng.insert_element_variant(d, kind, vp_id, spec, transform_plain=transform, vp_type=vp_type)
    params = {"vp": vp_id, "variant": spec.to_dict()}
    if transform:
        params.update(transform=True, vp_type=vp_type)
    return eng.commit(d, f"V{_LETTER[kind]}I", params)


def vp_substitute(model: ConfigurableProcessModel, kind: str, old_id: str,
                  spec: ElementSpec | Mapping[str, Any], *,
                  variant_actions: Mapping[str, str] | None = None) -> ApplyResult:
    """VPRS / VPDS: replace a variation point and re-point its users.

    Old variants stay under the substitute when compatible (functionalities
    within the substitute's declared ``r_f``, or equal data type); others are
    deleted. ``variant_actions`` maps old variant ids to "keep"/"delete".
    """
    kind = _kind(kind)
    spec = coerce(ElementSpec, spec)
    actions = dict(variant_actions or {})
    for vid, action in actions.items():
        if action not in ("keep", "delete"):
            raise InvalidParams(f"bad action {action!r} for {vid!r}")
    d = Draft(model)
    eng.substitute_element(d, kind, old_id, spec, actions=actions, require_vp=True)
    params: dict[str, Any] = {"old": old_id, "new": spec.to_dict()}
    if actions:
        params["variant_actions"] = dict(sorted(actions.items()))
    return eng.commit(d, f"VP{_LETTER[kind]}S", params)


def variant_substitute(model: ConfigurableProcessModel, kind: str, variant_id: str,
                       spec: ElementVariantSpec | Mapping[str, Any]) -> ApplyResult:
    kind = _kind(kind)
    spec = coerce(ElementVariantSpec, spec)
    d = Draft(model)
    eng.substitute_element_variant(d, kind, variant_id, spec)
    return eng.commit(d, f"V{_LETTER[kind]}S", {"variant": variant_id, "new": spec.to_dict()})


def vp_delete(model: ConfigurableProcessModel, kind: str, vp_id: str, *,
              cascade: bool = False) -> ApplyResult:
    """VPRD / VPDD. Without ``cascade`` the element must be unused."""
    kind = _kind(kind)
    d = Draft(model)
    eng.delete_vp(d, kind, vp_id, cascade=cascade)
    params: dict[str, Any] = {"vp": vp_id}
    if cascade:
        params["cascade"] = True
    return eng.commit(d, f"VP{_LETTER[kind]}D", params)


def variant_delete(model: ConfigurableProcessModel, kind: str, variant_id: str, *,
                   cascade: bool = False) -> ApplyResult:
    kind = _kind(kind)
    d = Draft(model)
    eng.remove_variants(d, kind, [variant_id], cascade=cascade)
    params: dict[str, Any] = {"variant": variant_id}
    if cascade:
        params["cascade"] = True
    return eng.commit(d, f"V{_LETTER[kind]}D", params)
