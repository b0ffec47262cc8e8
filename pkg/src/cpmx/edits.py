"""Primitive edits between models: diff, application and inversion.

Edits are the unit stored in evolution traces. Each kind has an exact
inverse, and application is strict: an edit whose recorded "before" state
does not match the model is rejected rather than silently re-interpreted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Union

from .errors import CpmError, EditApplicationFailed
from .io import element_from_dict, element_to_dict
from .model import KINDS, VCC, ConfigurableProcessModel, SequenceFlow

MODEL = "model"
_MODEL_ATTRS = ("id", "max_activities", "start", "end")


@dataclass(frozen=True)
class AddNode:
    kind: str
    element: dict


@dataclass(frozen=True)
class RemoveNode:
    kind: str
    element: dict


@dataclass(frozen=True)
class SetAttribute:
    kind: str
    id: str | None
    attr: str
    old: Any
    new: Any


@dataclass(frozen=True)
class AddFlow:
    source: str
    target: str
    condition: str | None = None


@dataclass(frozen=True)
class RemoveFlow:
    source: str
    target: str
    condition: str | None = None


@dataclass(frozen=True)
class AddConstraint:
    subject: str
    relation: str
    object: str


@dataclass(frozen=True)
class RemoveConstraint:
    subject: str
    relation: str
    object: str


Edit = Union[AddNode, RemoveNode, SetAttribute, AddFlow, RemoveFlow, AddConstraint, RemoveConstraint]
EDIT_TYPES = {cls.__name__: cls for cls in
              (AddNode, RemoveNode, SetAttribute, AddFlow, RemoveFlow, AddConstraint, RemoveConstraint)}


def edit_to_dict(edit: Edit) -> dict:
    out = {"op": type(edit).__name__}
    out.update(edit.__dict__)
    return out


def edit_from_dict(raw: Any) -> Edit:
    if not isinstance(raw, dict) or raw.get("op") not in EDIT_TYPES:
        raise EditApplicationFailed(f"unrecognised edit {raw!r}")
    cls = EDIT_TYPES[raw["op"]]
    fields = {k: v for k, v in raw.items() if k != "op"}
    expected = set(cls.__dataclass_fields__)
    if set(fields) != expected:
        raise EditApplicationFailed(f"{raw['op']} expects fields {sorted(expected)}")
    return cls(**fields)


def invert(edit: Edit) -> Edit:
    if isinstance(edit, AddNode):
        return RemoveNode(edit.kind, edit.element)
    if isinstance(edit, RemoveNode):
        return AddNode(edit.kind, edit.element)
    if isinstance(edit, SetAttribute):
        return SetAttribute(edit.kind, edit.id, edit.attr, edit.new, edit.old)
    if isinstance(edit, AddFlow):
        return RemoveFlow(edit.source, edit.target, edit.condition)
    if isinstance(edit, RemoveFlow):
        return AddFlow(edit.source, edit.target, edit.condition)
    if isinstance(edit, AddConstraint):
        return RemoveConstraint(edit.subject, edit.relation, edit.object)
    if isinstance(edit, RemoveConstraint):
        return AddConstraint(edit.subject, edit.relation, edit.object)
    raise TypeError(f"not an edit: {edit!r}")


def invert_all(edits: Iterable[Edit]) -> list[Edit]:
    return [invert(e) for e in reversed(list(edits))]


def model_diff(m1: ConfigurableProcessModel, m2: ConfigurableProcessModel) -> list[Edit]:
    """Edits turning ``m1`` into a model with the same canonical form as ``m2``.

    Order: constraints and flows are detached first, then nodes change, then
    flows and constraints are attached, so every prefix is applicable.
    """
    edits: list[Edit] = []
    for vcc in sorted(m1.vccs - m2.vccs):
        edits.append(RemoveConstraint(vcc.subject, vcc.relation, vcc.object))
    for key in sorted(m1.flows):
        f1, f2 = m1.flows[key], m2.flows.get(key)
        if f1 != f2:
            edits.append(RemoveFlow(f1.source, f1.target, f1.condition))

    removed: list[Edit] = []
    added: list[Edit] = []
    changed: list[Edit] = []
    for kind in KINDS:
        t1, t2 = m1.table(kind), m2.table(kind)
        for eid in sorted(set(t1) | set(t2)):
            if eid not in t2:
                removed.append(RemoveNode(kind, element_to_dict(kind, t1[eid])))
            elif eid not in t1:
                added.append(AddNode(kind, element_to_dict(kind, t2[eid])))
            elif t1[eid] != t2[eid]:
                d1, d2 = element_to_dict(kind, t1[eid]), element_to_dict(kind, t2[eid])
                for attr in d1:
                    if d1[attr] != d2[attr]:
                        changed.append(SetAttribute(kind, eid, attr, d1[attr], d2[attr]))
    edits += removed + changed + added

    for attr in _MODEL_ATTRS:
        a, b = getattr(m1, attr), getattr(m2, attr)
        if a != b:
            edits.append(SetAttribute(MODEL, None, attr, a, b))
    for key in sorted(m2.flows):
        f1, f2 = m1.flows.get(key), m2.flows[key]
        if f1 != f2:
            edits.append(AddFlow(f2.source, f2.target, f2.condition))
    for vcc in sorted(m2.vccs - m1.vccs):
        edits.append(AddConstraint(vcc.subject, vcc.relation, vcc.object))
    return edits


class _Workspace:
    def __init__(self, model: ConfigurableProcessModel):
        self.attrs = {a: getattr(model, a) for a in _MODEL_ATTRS}
        self.tables = {k: dict(model.table(k)) for k in KINDS}
        self.flows = dict(model.flows)
        self.vccs = set(model.vccs)

    def freeze(self) -> ConfigurableProcessModel:
        return ConfigurableProcessModel(
            **self.attrs,
            activities=self.tables["activity"],
            resources=self.tables["resource"],
            data_objects=self.tables["data"],
            flows=self.flows,
            vccs=self.vccs,
        )


def _fail(edit: Edit, why: str) -> EditApplicationFailed:
    return EditApplicationFailed(f"{type(edit).__name__}: {why}")


def _apply_one(ws: _Workspace, edit: Edit) -> None:
    if isinstance(edit, (AddNode, RemoveNode)):
        if edit.kind not in KINDS or not isinstance(edit.element, dict):
            raise _fail(edit, f"bad kind {edit.kind!r}")
        table = ws.tables[edit.kind]
        el = element_from_dict(edit.kind, edit.element)
        if element_to_dict(edit.kind, el) != edit.element:
            raise _fail(edit, "element is not in canonical form")
        if isinstance(edit, AddNode):
            if el.id in table:
                raise _fail(edit, f"{el.id!r} already present")
            table[el.id] = el
        else:
            if table.get(el.id) != el:
                raise _fail(edit, f"{el.id!r} absent or different")
            del table[el.id]
    elif isinstance(edit, SetAttribute):
        if edit.kind == MODEL:
            if edit.attr not in ws.attrs or edit.id is not None or ws.attrs[edit.attr] != edit.old:
                raise _fail(edit, f"model attribute {edit.attr!r} mismatch")
            if type(edit.new) is not type(edit.old):
                raise _fail(edit, f"model attribute {edit.attr!r} changes type")
            ws.attrs[edit.attr] = edit.new
            return
        if edit.kind not in KINDS:
            raise _fail(edit, f"bad kind {edit.kind!r}")
        table = ws.tables[edit.kind]
        if edit.id not in table:
            raise _fail(edit, f"{edit.id!r} absent")
        current = element_to_dict(edit.kind, table[edit.id])
        if edit.attr == "id" or edit.attr not in current or current[edit.attr] != edit.old:
            raise _fail(edit, f"{edit.id}.{edit.attr} mismatch")
        current[edit.attr] = edit.new
        updated = element_from_dict(edit.kind, current)
        if element_to_dict(edit.kind, updated) != current:
            raise _fail(edit, f"{edit.id}.{edit.attr} value is not canonical")
        table[edit.id] = updated
    elif isinstance(edit, (AddFlow, RemoveFlow)):
        flow = SequenceFlow(edit.source, edit.target, edit.condition)
        if not all(isinstance(x, str) for x in (flow.source, flow.target)) or \
                not (flow.condition is None or isinstance(flow.condition, str)):
            raise _fail(edit, "malformed flow")
        if isinstance(edit, AddFlow):
            if flow.key in ws.flows:
                raise _fail(edit, f"flow {flow.source}->{flow.target} already present")
            ws.flows[flow.key] = flow
        else:
            if ws.flows.get(flow.key) != flow:
                raise _fail(edit, f"flow {flow.source}->{flow.target} absent or different")
            del ws.flows[flow.key]
    elif isinstance(edit, (AddConstraint, RemoveConstraint)):
        vcc = VCC(edit.subject, edit.relation, edit.object)
        if isinstance(edit, AddConstraint):
            if vcc in ws.vccs:
                raise _fail(edit, "constraint already present")
            ws.vccs.add(vcc)
        else:
            if vcc not in ws.vccs:
                raise _fail(edit, "constraint absent")
            ws.vccs.remove(vcc)
    else:
        raise EditApplicationFailed(f"not an edit: {edit!r}")


def apply_edits(model: ConfigurableProcessModel, edits: Iterable[Edit]) -> ConfigurableProcessModel:
    ws = _Workspace(model)
    for edit in edits:
        try:
            _apply_one(ws, edit)
        except EditApplicationFailed:
            raise
        except (CpmError, TypeError, ValueError, KeyError) as exc:
            raise _fail(edit, str(exc)) from exc
    try:
        return ws.freeze()
    except CpmError as exc:
        raise EditApplicationFailed(str(exc)) from exc
