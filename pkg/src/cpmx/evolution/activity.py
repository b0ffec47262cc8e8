"""Activity evolution patterns: VPAI, VAI, VPAS, VAS, VPAD and VAD."""

from __future__ import annotations

from typing import Any, Mapping

from ..model import ACTIVITY, ConfigurableProcessModel
from . import _engine as eng
from ._engine import ApplyResult, Draft
from .params import ActivityVariantSpec, VpaiParams, VpasParams, coerce


def vpai(model: ConfigurableProcessModel, params: VpaiParams | Mapping[str, Any]) -> ApplyResult:
    """Insert a variation point activity together with its variants.

    The new node is spliced into an existing flow (or an existing plain
    activity is transformed), variants are attached, and the resource and
    data sub-patterns run as requested by ``params``.
    """
    p = coerce(VpaiParams, params)
    d = Draft(model)
    eng.run_vpai(d, p)
    return eng.commit(d, "VPAI", p.to_dict())


def variant_activity_insert(model: ConfigurableProcessModel, vp_id: str,
                            spec: ActivityVariantSpec | Mapping[str, Any], *,
                            transform: bool = False, vp_type: str | None = None) -> ApplyResult:
    spec = coerce(ActivityVariantSpec, spec)
    d = Draft(model)
    eng.insert_activity_variant(d, vp_id, spec, transform_plain=transform, vp_type=vp_type)
    params = {"vp": vp_id, "variant": spec.to_dict()}
    if transform:
        params.update(transform=True, vp_type=vp_type)
    return eng.commit(d, "VAI", params)


def vpas(model: ConfigurableProcessModel, params: VpasParams | Mapping[str, Any]) -> ApplyResult:
    """Substitute a variation point activity, by a new node or an existing plain one."""
    p = coerce(VpasParams, params)
    d = Draft(model)
    eng.run_vpas(d, p)
    return eng.commit(d, "VPAS", p.to_dict())


def variant_activity_substitute(model: ConfigurableProcessModel, variant_id: str,
                                spec: ActivityVariantSpec | Mapping[str, Any]) -> ApplyResult:
    spec = coerce(ActivityVariantSpec, spec)
    d = Draft(model)
    eng.substitute_activity_variant(d, variant_id, spec)
    return eng.commit(d, "VAS", {"variant": variant_id, "new": spec.to_dict()})


def vp_activity_delete(model: ConfigurableProcessModel, vp_id: str, *, cascade: bool = False) -> ApplyResult:
    """Delete a variation point activity and all its variants, bridging the flow.

    With ``cascade`` resources and data objects that only the deleted
    activities used are removed as well.
    """
    d = Draft(model)
    eng.delete_vp(d, ACTIVITY, vp_id, cascade=cascade)
    params = {"vp": vp_id}
    if cascade:
        params["cascade"] = True
    return eng.commit(d, "VPAD", params)


def variant_activity_delete(model: ConfigurableProcessModel, variant_id: str) -> ApplyResult:
    d = Draft(model)
    eng.remove_variants(d, ACTIVITY, [variant_id])
    return eng.commit(d, "VAD", {"variant": variant_id})
