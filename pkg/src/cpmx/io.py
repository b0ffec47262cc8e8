"""Canonical JSON documents, content hashing and DOT export."""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .errors import DuplicateId, ParseError, UnsupportedVersion
from .model import (
    ACTIVITY, DATA, RESOURCE, VCC, Activity, ConfigurableProcessModel, DataObject,
    Plain, Resource, Role, SequenceFlow, Variant, VariationPoint, PLAIN,
)

FORMAT_VERSION = "1"
SUPPORTED_VERSIONS = {"1"}

_TABLE_KEYS = {ACTIVITY: "activities", RESOURCE: "resources", DATA: "data_objects"}


# -- element <-> dict ------------------------------------------------------------


def role_to_json(role: Role) -> Any:
    if isinstance(role, VariationPoint):
        return {"vp": role.vp_type}
    if isinstance(role, Variant):
        out = {"variant_of": role.parent}
        if role.vsc is not None:
            out["vsc"] = role.vsc
        return out
    return "plain"


def role_from_json(raw: Any, where: str = "role") -> Role:
    if raw == "plain":
        return PLAIN
    if isinstance(raw, dict):
        if set(raw) == {"vp"} and isinstance(raw["vp"], str):
            return VariationPoint(raw["vp"])
        if "variant_of" in raw and set(raw) <= {"variant_of", "vsc"}:
            vsc = raw.get("vsc")
            if isinstance(raw["variant_of"], str) and (vsc is None or isinstance(vsc, str)):
                return Variant(raw["variant_of"], vsc)
    raise ParseError(f"malformed role {raw!r}", where)


def element_to_dict(kind: str, el) -> dict:
    out: dict[str, Any] = {"id": el.id, "name": el.name, "role": role_to_json(el.role)}
    if kind == ACTIVITY:
        out["req_f"] = sorted(el.req_f)
        out["resource"] = el.resource
        out["data"] = sorted(el.data)
    elif kind == RESOURCE:
        out["r_f"] = sorted(el.r_f)
    else:
        out["data_type"] = el.data_type
    return out


_KIND_FIELDS = {
    ACTIVITY: {"id", "name", "role", "req_f", "resource", "data"},
    RESOURCE: {"id", "name", "role", "r_f"},
    DATA: {"id", "name", "role", "data_type"},
}


def _str(raw: Any, where: str, optional: bool = False) -> str | None:
    if raw is None and optional:
        return None
    if not isinstance(raw, str):
        raise ParseError(f"expected string, got {raw!r}", where)
    return raw


def _str_list(raw: Any, where: str) -> list[str]:
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        raise ParseError(f"expected list of strings, got {raw!r}", where)
    if len(set(raw)) != len(raw):
        raise ParseError("duplicate entries", where)
    return raw


def element_from_dict(kind: str, raw: Any, where: str = "element"):
    if not isinstance(raw, dict):
        raise ParseError("expected object", where)
    required = _KIND_FIELDS[kind]
    optional = {"resource"} if kind == ACTIVITY else set()
    unknown = set(raw) - required
    missing = required - optional - set(raw)
    if unknown or missing:
        raise ParseError(f"bad keys (unknown {sorted(unknown)}, missing {sorted(missing)})", where)
    common = dict(
        id=_str(raw["id"], f"{where}.id"),
        name=_str(raw["name"], f"{where}.name"),
        role=role_from_json(raw["role"], f"{where}.role"),
    )
    if kind == ACTIVITY:
        return Activity(
            req_f=frozenset(_str_list(raw["req_f"], f"{where}.req_f")),
            resource=_str(raw.get("resource"), f"{where}.resource", optional=True),
            data=frozenset(_str_list(raw["data"], f"{where}.data")),
            **common,
        )
    if kind == RESOURCE:
        return Resource(r_f=frozenset(_str_list(raw["r_f"], f"{where}.r_f")), **common)
    return DataObject(data_type=_str(raw["data_type"], f"{where}.data_type"), **common)


def flow_to_dict(flow: SequenceFlow) -> dict:
    return {"source": flow.source, "target": flow.target, "condition": flow.condition}


def flow_from_dict(raw: Any, where: str = "flow") -> SequenceFlow:
    if not isinstance(raw, dict) or not set(raw) <= {"source", "target", "condition"} \
            or not {"source", "target"} <= set(raw):
        raise ParseError(f"malformed flow {raw!r}", where)
    return SequenceFlow(
        _str(raw["source"], f"{where}.source"),
        _str(raw["target"], f"{where}.target"),
        _str(raw.get("condition"), f"{where}.condition", optional=True),
    )


def vcc_to_dict(vcc: VCC) -> dict:
    return {"subject": vcc.subject, "relation": vcc.relation, "object": vcc.object}


def vcc_from_dict(raw: Any, where: str = "vcc") -> VCC:
    if not isinstance(raw, dict) or set(raw) != {"subject", "relation", "object"}:
        raise ParseError(f"malformed constraint {raw!r}", where)
    return VCC(*(_str(raw[k], f"{where}.{k}") for k in ("subject", "relation", "object")))


# -- model <-> dict ----------------------------------------------------------------


def model_to_dict(model: ConfigurableProcessModel) -> dict:
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "id": model.id,
        "max_activities": model.max_activities,
        "start": model.start,
        "end": model.end,
    }
    for kind, key in _TABLE_KEYS.items():
        table = model.table(kind)
        doc[key] = [element_to_dict(kind, table[i]) for i in sorted(table)]
    doc["flows"] = [flow_to_dict(model.flows[k]) for k in sorted(model.flows)]
    doc["vccs"] = [vcc_to_dict(v) for v in sorted(model.vccs)]
    return doc


_MODEL_KEYS = {"format_version", "id", "max_activities", "start", "end",
               "activities", "resources", "data_objects", "flows", "vccs"}


def model_from_dict(doc: Any) -> ConfigurableProcessModel:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "$")
    version = doc.get("format_version", FORMAT_VERSION)
    if version not in SUPPORTED_VERSIONS:
        raise UnsupportedVersion(f"format_version {version!r} is not supported")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", "$")
    for key in ("id", "max_activities"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}", "$")
    max_a = doc["max_activities"]
    if not isinstance(max_a, int) or isinstance(max_a, bool):
        raise ParseError("max_activities must be an integer", "$.max_activities")

    def items(key: str) -> list:
        raw = doc.get(key, [])
        if not isinstance(raw, list):
            raise ParseError("expected array", f"$.{key}")
        return raw

    try:
        return ConfigurableProcessModel(
            id=_str(doc["id"], "$.id"),
            max_activities=max_a,
            start=_str(doc.get("start", "start"), "$.start"),
            end=_str(doc.get("end", "end"), "$.end"),
            activities=[element_from_dict(ACTIVITY, r, f"$.activities[{i}]")
                        for i, r in enumerate(items("activities"))],
            resources=[element_from_dict(RESOURCE, r, f"$.resources[{i}]")
                       for i, r in enumerate(items("resources"))],
            data_objects=[element_from_dict(DATA, r, f"$.data_objects[{i}]")
                          for i, r in enumerate(items("data_objects"))],
            flows=[flow_from_dict(r, f"$.flows[{i}]") for i, r in enumerate(items("flows"))],
            vccs=[vcc_from_dict(r, f"$.vccs[{i}]") for i, r in enumerate(items("vccs"))],
        )
    except DuplicateId as exc:
        raise ParseError(exc.message, "$") from exc


# -- bytes ------------------------------------------------------------------------


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_model(model: ConfigurableProcessModel) -> bytes:
    """Canonical UTF-8 bytes: sorted arrays and keys, two-space indent, LF endings."""
    return dumps_canonical(model_to_dict(model)).encode("utf-8")


def load_model(data: bytes | str) -> ConfigurableProcessModel:
    """Parse a model document. Well-formedness is not checked here."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8: {exc.reason}", f"byte {exc.start}") from exc
    if not data.strip():
        raise ParseError("empty document", "line 1 column 1")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    return model_from_dict(doc)


def canonical_hash(model: ConfigurableProcessModel) -> str:
    """SHA-256 of :func:`save_model` output. Sensitive to element ids."""
    return hashlib.sha256(save_model(model)).hexdigest()


# -- DOT ---------------------------------------------------------------------------


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(el) -> str:
    ann = el.annotation
    name = el.name or el.id
    return f"{ann}\\n{name}" if ann else name


def export_dot(model: ConfigurableProcessModel) -> str:
    """Graphviz digraph of the model.

    Sequence flows are solid edges, variants hang off their variation point
    on dashed edges, VCCs are dotted labelled edges and resources/data
    objects appear as note-shaped nodes.
    """
    lines = [f"digraph {_q(model.id)} {{", "  rankdir=LR;"]
    lines.append(f"  {_q(model.start)} [shape=circle, label={_q(model.start)}];")
    lines.append(f"  {_q(model.end)} [shape=doublecircle, label={_q(model.end)}];")
    for aid in sorted(model.activities):
        act = model.activities[aid]
        lines.append(f"  {_q(aid)} [shape=box, style=rounded, label={_q(_label(act))}];")
    for table, shape in ((model.resources, "note"), (model.data_objects, "folder")):
        for eid in sorted(table):
            lines.append(f"  {_q(eid)} [shape={shape}, label={_q(_label(table[eid]))}];")
    for key in sorted(model.flows):
        flow = model.flows[key]
        attrs = f" [label={_q(flow.condition)}]" if flow.condition else ""
        lines.append(f"  {_q(flow.source)} -> {_q(flow.target)}{attrs};")
    for _, el in model.elements():
        if el.parent is not None:
            lines.append(f"  {_q(el.parent)} -> {_q(el.id)} [style=dashed, arrowhead=none];")
    for aid in sorted(model.activities):
        act = model.activities[aid]
        if act.resource:
            lines.append(f"  {_q(act.resource)} -> {_q(aid)} [style=dotted, arrowhead=none, color=gray];")
        for ref in sorted(act.data):
            lines.append(f"  {_q(aid)} -> {_q(ref)} [style=dotted, arrowhead=none, color=gray];")
    for vcc in sorted(model.vccs):
        lines.append(f"  {_q(vcc.subject)} -> {_q(vcc.object)} [style=dotted, label={_q(vcc.relation)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
