"""The explicit history model: ordered releases of recorded changes.

A change is either the application of a reusable coupled operation, a
primitive metamodel edit, or a custom-migration marker grouping the trailing
primitives of the same release under a named hook. Undo works by replaying
from the embedded initial metamodel rather than by inverses: histories are
desk-scale and replay is correct by construction.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import primitives as prim_rules
from .catalog import OperationApplication, apply_coupled, get_operation
from .errors import (
    BadSpanError,
    ConstraintViolationError,
    DuplicateLabelError,
    InvalidMetamodelError,
    NothingToUndoError,
    ParseError,
    PostConformanceError,
    ReleasedHistoryError,
    ReplayError,
    UnknownNsUriError,
)
from .metamodel import Metamodel, validate_metamodel
from .mm_io import canonical_json, metamodel_from_doc, metamodel_to_doc, write_text


@dataclass
class Primitive:
    kind: str  # create | delete | set | add | remove
    target: str
    payload: dict = field(default_factory=dict)


@dataclass
class CustomMigration:
    hook: str
    span: int  # number of immediately preceding primitives it covers


Change = OperationApplication | Primitive | CustomMigration


@dataclass
class Release:
    label: str
    released: bool = False
    changes: list[Change] = field(default_factory=list)


@dataclass
class History:
    initial: Metamodel
    releases: list[Release] = field(default_factory=list)
    # incrementally maintained head; reconstruct() stays the source of truth
    _head: Metamodel | None = field(default=None, compare=False, repr=False)


def _open_release(history: History) -> Release:
    last = history.releases[-1] if history.releases else None
    if last is None or last.released:
        raise ReleasedHistoryError("the history has no open release")
    return last


def create_history(mm: Metamodel) -> History:
    violations = validate_metamodel(mm)
    if violations:
        raise InvalidMetamodelError(violations)
    return History(copy.deepcopy(mm), [Release(label="0")])


def head_metamodel(history: History) -> Metamodel:
    if history._head is None:
        history._head = reconstruct(history, len(history.releases))
    return history._head


def replay_change(mm: Metamodel, change: Change) -> Metamodel:
    """Apply one recorded change to a metamodel (no instances involved)."""
    if isinstance(change, OperationApplication):
        adapted, _ = apply_coupled(change, mm)
        return adapted
    if isinstance(change, Primitive):
        adapted = copy.deepcopy(mm)
        prim_rules.apply_primitive(adapted, change)
        violations = validate_metamodel(adapted)
        if violations:
            raise InvalidMetamodelError(violations)
        return adapted
    if isinstance(change, CustomMigration):
        return mm
    raise ReplayError(f"unknown change record {change!r}")


def record_application(history: History, application: OperationApplication) -> History:
    release = _open_release(history)
    get_operation(application.op_name)  # UnknownOperationError before any state change
    new_head = replay_change(head_metamodel(history), application)
    release.changes.append(application)
    history._head = new_head
    return history


def record_primitive(history: History, primitive: Primitive) -> History:
    release = _open_release(history)
    new_head = replay_change(head_metamodel(history), primitive)
    release.changes.append(primitive)
    history._head = new_head
    return history


def attach_migration(history: History, hook: str, span: int) -> History:
    """Group the trailing `span` primitives of the open release under a hook."""
    release = _open_release(history)
    if span < 1:
        raise BadSpanError("a custom-migration span covers at least one primitive")
    if span > len(release.changes):
        raise BadSpanError(f"span {span} exceeds the open release's {len(release.changes)} changes")
    tail = release.changes[-span:]
    if not all(isinstance(c, Primitive) for c in tail):
        raise BadSpanError("the span must cover only trailing primitive edits")
    release.changes.append(CustomMigration(hook, span))
    return history


def release(history: History, label: str, force: bool = False) -> History:
    current = _open_release(history)
    if not current.changes and not force:
        raise ReleasedHistoryError("refusing to seal an empty release (use force)")
    if any(r.label == label for r in history.releases if r.released):
        raise DuplicateLabelError(f"release label {label!r} already used")
    current.label = label
    current.released = True
    history.releases.append(Release(label=str(len(history.releases))))
    return history


def reconstruct(history: History, point: int | str) -> Metamodel:
    """The metamodel after replaying the first `point` releases ("head" = all).

    reconstruct(0) is the initial metamodel; the sealed release with ordinal i
    ends at reconstruct(i + 1).
    """
    if point == "head":
        point = len(history.releases)
    if not isinstance(point, int) or not 0 <= point <= len(history.releases):
        raise ReplayError(f"reconstruction point {point!r} out of range")
    mm = copy.deepcopy(history.initial)
    for release_ in history.releases[:point]:
        for index, change in enumerate(release_.changes):
            try:
                mm = replay_change(mm, change)
            except (ConstraintViolationError, InvalidMetamodelError, ParseError,
                    PostConformanceError) as exc:
                raise ReplayError(
                    f"corrupt history: change {index} of release {release_.label!r} "
                    f"no longer applies: {exc}") from exc
    return mm


def undo_last(history: History) -> History:
    current = history.releases[-1] if history.releases else None
    if current is None or current.released or not current.changes:
        if any(r.changes for r in history.releases if r.released):
            raise ReleasedHistoryError("sealed releases are immutable; nothing open to undo")
        raise NothingToUndoError("the history has no undoable change")
    current.changes.pop()
    history._head = reconstruct(history, len(history.releases))
    return history


def sealed_ordinals(history: History) -> list[int]:
    return [i for i, r in enumerate(history.releases) if r.released]


def release_index(history: History) -> dict[str, int]:
    """nsUri -> earliest sealed release whose end state carries that URI."""
    index: dict[str, int] = {}
    mm = copy.deepcopy(history.initial)
    for ordinal, release_ in enumerate(history.releases):
        if not release_.released:
            break
        for change in release_.changes:
            mm = replay_change(mm, change)
        for uri in mm.ns_uris():
            index.setdefault(uri, ordinal)
    return index


def detect_release(history: History, ns_uri: str) -> int:
    if not sealed_ordinals(history):
        raise UnknownNsUriError(ns_uri, [])
    index = release_index(history)
    if ns_uri not in index:
        raise UnknownNsUriError(ns_uri, index.keys())
    return index[ns_uri]


def stats_table(history: History) -> list[tuple[str, str, int]]:
    """(name, kind, count) rows: reusable operations alphabetically, then the
    custom migrations by hook name; the shape of a release-notes table."""
    reusable: dict[str, int] = {}
    custom: dict[str, int] = {}
    for release_ in history.releases:
        for change in release_.changes:
            if isinstance(change, OperationApplication):
                reusable[change.op_name] = reusable.get(change.op_name, 0) + 1
            elif isinstance(change, CustomMigration):
                custom[change.hook] = custom.get(change.hook, 0) + 1
    rows = [(name, "Reusable", n) for name, n in sorted(reusable.items())]
    rows += [(name, "Custom", n) for name, n in sorted(custom.items())]
    return rows


def history_stats(history: History) -> dict[str, int]:
    """Application counts by operation name plus an aggregate "Custom" count."""
    out: dict[str, int] = {}
    custom = 0
    for name, kind, n in stats_table(history):
        if kind == "Custom":
            custom += n
        else:
            out[name] = n
    if custom:
        out["Custom"] = custom
    return out


# ---------------------------------------------------------------------------
# persistence (".history.json")


def _change_to_doc(change: Change) -> dict:
    if isinstance(change, OperationApplication):
        return {"kind": "op", "name": change.op_name, "args": change.args}
    if isinstance(change, Primitive):
        return {"kind": "primitive", "op": change.kind, "target": change.target,
                "payload": change.payload}
    return {"kind": "custom", "hook": change.hook, "span": change.span}


def _change_from_doc(doc, where: str) -> Change:
    kind = doc.get("kind")
    if kind == "op":
        name = doc.get("name")
        get_operation(name)  # fail fast on unknown operations
        args = doc.get("args", {})
        if not isinstance(args, dict):
            raise ParseError(f"{where}: op args must be an object")
        return OperationApplication(name, args)
    if kind == "primitive":
        op = doc.get("op")
        if op not in prim_rules.KINDS:
            raise ParseError(f"{where}: unknown primitive op {op!r}")
        return Primitive(op, str(doc.get("target", "")), doc.get("payload", {}))
    if kind == "custom":
        span = doc.get("span")
        if not isinstance(span, int) or span < 1:
            raise ParseError(f"{where}: custom change needs a positive span")
        return CustomMigration(str(doc.get("hook", "")), span)
    raise ParseError(f"{where}: unknown change kind {kind!r}")


def history_to_doc(history: History) -> dict:
    return {
        "initialMetamodel": metamodel_to_doc(history.initial),
        "releases": [
            {"label": r.label, "released": r.released,
             "changes": [_change_to_doc(c) for c in r.changes]}
            for r in history.releases
        ],
    }


def history_from_doc(doc, where="history") -> History:
    if not isinstance(doc, dict) or "initialMetamodel" not in doc:
        raise ParseError(f"{where}: history files need an 'initialMetamodel'")
    initial = metamodel_from_doc(doc["initialMetamodel"], f"{where}.initialMetamodel")
    releases = []
    for i, rdoc in enumerate(doc.get("releases", [])):
        rwhere = f"{where}.releases[{i}]"
        changes = [
            _change_from_doc(cdoc, f"{rwhere}.changes[{j}]")
            for j, cdoc in enumerate(rdoc.get("changes", []))
        ]
        releases.append(Release(str(rdoc.get("label", i)), bool(rdoc.get("released", False)), changes))
    open_ordinals = [i for i, r in enumerate(releases) if not r.released]
    if len(open_ordinals) > 1 or (open_ordinals and open_ordinals[0] != len(releases) - 1):
        raise ParseError(f"{where}: at most the last release may be open")
    return History(initial, releases)


def load_history(path: str | Path) -> History:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ParseError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return history_from_doc(doc, str(path))


def save_history(history: History, path: str | Path) -> Path:
    return write_text(path, canonical_json(history_to_doc(history)))
