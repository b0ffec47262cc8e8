"""Evolution traces: a hash-chained, replayable and invertible log of pattern applications."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace as dc_replace
from datetime import datetime, timezone
from typing import Any, Iterable

from .edits import Edit, apply_edits, edit_from_dict, edit_to_dict, invert_all, model_diff
from .errors import EditApplicationFailed, EmptyTrace, HashChainBroken
from .io import canonical_hash
from .model import ConfigurableProcessModel


@dataclass(frozen=True)
class TraceEntry:
    seq: int
    pattern: str
    params: dict
    edits: tuple[Edit, ...]
    pre_hash: str
    post_hash: str
    timestamp: str
    steps: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "pattern": self.pattern,
            "params": self.params,
            "edits": [edit_to_dict(e) for e in self.edits],
            "pre_hash": self.pre_hash,
            "post_hash": self.post_hash,
            "timestamp": self.timestamp,
            "steps": list(self.steps),
        }

    @classmethod
    def from_dict(cls, raw: Any) -> "TraceEntry":
        keys = {"seq", "pattern", "params", "edits", "pre_hash", "post_hash", "timestamp", "steps"}
        if not isinstance(raw, dict) or not (keys - {"steps"}) <= set(raw) <= keys:
            raise EditApplicationFailed("malformed trace entry")
        if not isinstance(raw["edits"], list) or not isinstance(raw["seq"], int):
            raise EditApplicationFailed("malformed trace entry")
        return cls(
            seq=raw["seq"],
            pattern=raw["pattern"],
            params=raw["params"],
            edits=tuple(edit_from_dict(e) for e in raw["edits"]),
            pre_hash=raw["pre_hash"],
            post_hash=raw["post_hash"],
            timestamp=raw["timestamp"],
            steps=tuple(raw.get("steps", ())),
        )


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def make_entry(pattern: str, params: dict, before: ConfigurableProcessModel,
               after: ConfigurableProcessModel, steps: Iterable[str] = ()) -> TraceEntry:
    """Unnumbered entry (seq 0) describing the change ``before`` -> ``after``."""
    return TraceEntry(
        seq=0,
        pattern=pattern,
        params=params,
        edits=tuple(model_diff(before, after)),
        pre_hash=canonical_hash(before),
        post_hash=canonical_hash(after),
        timestamp=_now(),
        steps=tuple(steps),
    )


@dataclass(frozen=True)
class Trace:
    entries: tuple[TraceEntry, ...] = ()
    #: hash of the model the trace starts from, when known before the first entry
    base_hash: str | None = None

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def head_hash(self) -> str | None:
        return self.entries[-1].post_hash if self.entries else self.base_hash


def record(trace: Trace, entry: TraceEntry) -> Trace:
    """Append ``entry``, numbering it and checking the hash chain."""
    head = trace.head_hash
    if head is not None and entry.pre_hash != head:
        raise HashChainBroken(f"entry starts from {entry.pre_hash[:12]}, trace head is {head[:12]}")
    entry = dc_replace(entry, seq=len(trace.entries) + 1)
    return Trace(trace.entries + (entry,), trace.base_hash)


def replay(initial: ConfigurableProcessModel, trace: Trace) -> ConfigurableProcessModel:
    """Re-apply each entry's stored edits, verifying hashes before and after."""
    model = initial
    current = canonical_hash(model)
    for expected_seq, entry in enumerate(trace.entries, start=1):
        if entry.seq != expected_seq:
            raise HashChainBroken(f"entry {entry.seq} out of sequence (expected {expected_seq})")
        if entry.pre_hash != current:
            raise HashChainBroken(f"entry {entry.seq} does not start from the current model")
        model = apply_edits(model, entry.edits)
        current = canonical_hash(model)
        if current != entry.post_hash:
            raise HashChainBroken(f"entry {entry.seq} does not reproduce its recorded result")
    return model


def undo(model: ConfigurableProcessModel, trace: Trace) -> tuple[ConfigurableProcessModel, Trace]:
    if not trace.entries:
        raise EmptyTrace("nothing to undo")
    last = trace.entries[-1]
    if canonical_hash(model) != last.post_hash:
        raise HashChainBroken("model is not the result of the last trace entry")
    previous = apply_edits(model, invert_all(last.edits))
    if canonical_hash(previous) != last.pre_hash:
        raise HashChainBroken("inverse edits do not restore the recorded pre-state")
    return previous, Trace(trace.entries[:-1], trace.base_hash)


def dumps_trace(trace: Trace) -> str:
    """JSON Lines, one entry per line in sequence order."""
    return "".join(
        json.dumps(e.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"
        for e in trace.entries
    )


def loads_trace(text: str | bytes) -> Trace:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EditApplicationFailed(f"trace is not UTF-8: {exc.reason}") from exc
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EditApplicationFailed(f"line {lineno}: {exc.msg}") from exc
        entries.append(TraceEntry.from_dict(raw))
    base = entries[0].pre_hash if entries else None
    return Trace(tuple(entries), base)
