"""Multi-file instance models: loading, saving, conformance, editing.

A ResourceSet holds one Resource per file. Objects carry slots keyed by
feature name; every slot is a list of values. Values are plain scalars
(primitive and enumeration literals share the string representation; the
feature's type decides how a string is read), Ref records for cross-object
references, or nested MObjects for containment children. In memory a Ref
always names its target resource explicitly, so objects can move between
files without invalidating references.

Wire format ".model.json": a header with the metamodel nsUri (plus optional
declared set members), then the root objects. Local references serialize as
"#id", cross-file references as "relative/path.model.json#id". A literal
string that contains "#" or starts with "%" is escaped with a leading "%".
"""

from __future__ import annotations

import json
import posixpath
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    MixedNsUriError,
    ParseError,
    UnknownClassError,
    UnknownObjectError,
    UnresolvedRefError,
)
from .metamodel import (
    UNBOUNDED,
    Attribute,
    Class,
    DataType,
    Enumeration,
    Metamodel,
    Reference,
    all_features,
    find_classifier,
    is_subtype,
)
from .mm_io import canonical_json, write_text


@dataclass(frozen=True)
class Ref:
    resource: str
    object_id: str

    def key(self) -> tuple[str, str]:
        return (self.resource, self.object_id)


@dataclass
class MObject:
    id: str
    class_name: str
    slots: dict[str, list] = field(default_factory=dict)


@dataclass
class Resource:
    uri: str
    roots: list[MObject] = field(default_factory=list)


@dataclass
class ResourceSet:
    ns_uri: str = ""
    resources: list[Resource] = field(default_factory=list)

    def resource(self, uri: str) -> Resource | None:
        for res in self.resources:
            if res.uri == uri:
                return res
        return None


@dataclass(frozen=True)
class Violation:
    object_id: str
    resource_uri: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} at {self.resource_uri}#{self.object_id}: {self.message}"


def walk(res: Resource):
    """All objects of a resource in document order (pre-order, slots by name)."""

    def rec(obj: MObject):
        yield obj
        for name in sorted(obj.slots):
            for value in obj.slots[name]:
                if isinstance(value, MObject):
                    yield from rec(value)

    for root in res.roots:
        yield from rec(root)


def iter_objects(rset: ResourceSet):
    for res in rset.resources:
        for obj in walk(res):
            yield res, obj


# ---------------------------------------------------------------------------
# wire format


def _encode_scalar(value):
    if isinstance(value, str) and ("#" in value or value.startswith("%")):
        return "%" + value
    return value


def _decode_string(text: str, owner_uri: str):
    if text.startswith("%"):
        return text[1:]
    if "#" in text:
        rel, _, obj_id = text.partition("#")
        if not obj_id:
            raise ParseError(f"{owner_uri}: reference {text!r} has no object id")
        if rel:
            target = posixpath.normpath(posixpath.join(posixpath.dirname(owner_uri), rel))
        else:
            target = owner_uri
        return Ref(target, obj_id)
    return text


def _value_to_doc(value, owner_uri: str):
    if isinstance(value, MObject):
        return _object_to_doc(value, owner_uri)
    if isinstance(value, Ref):
        if value.resource == owner_uri:
            return f"#{value.object_id}"
        rel = posixpath.relpath(value.resource, posixpath.dirname(owner_uri) or ".")
        return f"{rel}#{value.object_id}"
    return _encode_scalar(value)


def _object_to_doc(obj: MObject, owner_uri: str) -> dict:
    return {
        "id": obj.id,
        "class": obj.class_name,
        "slots": {
            name: [_value_to_doc(v, owner_uri) for v in values]
            for name, values in sorted(obj.slots.items())
            if values
        },
    }


def _value_from_doc(doc, owner_uri: str):
    if isinstance(doc, dict):
        return _object_from_doc(doc, owner_uri)
    if isinstance(doc, str):
        return _decode_string(doc, owner_uri)
    if isinstance(doc, (int, float, bool)):
        return doc
    raise ParseError(f"{owner_uri}: unsupported slot value {doc!r}")


def _object_from_doc(doc, owner_uri: str) -> MObject:
    if not isinstance(doc, dict):
        raise ParseError(f"{owner_uri}: object document is not a JSON object")
    try:
        obj_id = doc["id"]
        class_name = doc["class"]
    except KeyError as exc:
        raise ParseError(f"{owner_uri}: object lacks key {exc.args[0]!r}") from None
    slots_doc = doc.get("slots", {})
    if not isinstance(slots_doc, dict):
        raise ParseError(f"{owner_uri}#{obj_id}: slots is not an object")
    slots = {}
    for name, values in slots_doc.items():
        if not isinstance(values, list):
            raise ParseError(f"{owner_uri}#{obj_id}: slot {name!r} is not an array")
        slots[name] = [_value_from_doc(v, owner_uri) for v in values]
    return MObject(str(obj_id), str(class_name), slots)


def _resource_doc(res: Resource, rset: ResourceSet) -> dict:
    doc = {"nsUri": rset.ns_uri, "roots": [_object_to_doc(o, res.uri) for o in res.roots]}
    others = [r.uri for r in rset.resources if r.uri != res.uri]
    if others:
        doc["members"] = [
            posixpath.relpath(uri, posixpath.dirname(res.uri) or ".") for uri in others
        ]
    return doc


# ---------------------------------------------------------------------------
# loading


def _load_file(base: Path, uri: str) -> tuple[dict, str]:
    path = base / uri
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UnresolvedRefError(f"referenced model file {uri!r} not found under {base}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "nsUri" not in doc or "roots" not in doc:
        raise ParseError(f"{path}: model file needs 'nsUri' and 'roots'")
    return doc, str(doc["nsUri"])


def _collect_refs(res: Resource):
    for obj in walk(res):
        for values in obj.slots.values():
            for v in values:
                if isinstance(v, Ref):
                    yield obj, v


def load_resource_set(paths: list[str | Path], base_dir: str | Path | None = None) -> ResourceSet:
    """Load the listed files plus, on demand, any file they reference.

    Relative references resolve against the referencing file; every loaded
    file must stamp the same metamodel nsUri.
    """
    paths = [Path(p) for p in paths]
    if not paths:
        raise ParseError("no model files given")
    for p in paths:
        if not p.exists():
            raise ParseError(f"{p}: no such file")
    if base_dir is not None:
        base = Path(base_dir)
    elif len(paths) == 1:
        base = paths[0].parent
    else:
        import os.path

        base = Path(os.path.commonpath([p.parent for p in paths]))

    rset = ResourceSet()
    queue = [posixpath.normpath(str(p.relative_to(base).as_posix())) for p in paths]
    seen: set[str] = set()
    while queue:
        uri = queue.pop(0)
        if uri in seen:
            continue
        seen.add(uri)
        doc, ns_uri = _load_file(base, uri)
        if not rset.ns_uri:
            rset.ns_uri = ns_uri
        elif rset.ns_uri != ns_uri:
            raise MixedNsUriError(
                f"{uri} declares nsUri {ns_uri!r}, set already uses {rset.ns_uri!r}")
        roots = doc.get("roots", [])
        if not isinstance(roots, list):
            raise ParseError(f"{uri}: roots is not an array")
        res = Resource(uri, [_object_from_doc(o, uri) for o in roots])
        rset.resources.append(res)
        for member in doc.get("members", []):
            queue.append(posixpath.normpath(posixpath.join(posixpath.dirname(uri), str(member))))
        for _, ref in _collect_refs(res):
            if ref.resource not in seen:
                queue.append(ref.resource)

    index = {(res.uri, obj.id): obj for res, obj in iter_objects(rset)}
    for res in rset.resources:
        for obj, ref in _collect_refs(res):
            if ref.key() not in index:
                raise UnresolvedRefError(
                    f"{res.uri}#{obj.id}: reference target {ref.resource}#{ref.object_id} not found")
    return rset


def save_resource_set(rset: ResourceSet, out_dir: str | Path) -> list[Path]:
    """One file per resource, same relative names, canonical formatting."""
    out = Path(out_dir)
    written = []
    for res in rset.resources:
        written.append(write_text(out / res.uri, canonical_json(_resource_doc(res, rset))))
    return written


# ---------------------------------------------------------------------------
# conformance


def _classify_slot_owner(mm: Metamodel, class_name: str):
    cls = find_classifier(mm, class_name)
    return cls if isinstance(cls, Class) else None


def check_conformance(rset: ResourceSet, mm: Metamodel) -> list[Violation]:
    """All conformance violations of the set against the metamodel.

    Checks typing, multiplicity, containment shape, reference resolution,
    opposite symmetry, volatile slots and identifier uniqueness. Violations
    are data; this never raises.
    """
    out: list[Violation] = []
    index: dict[tuple[str, str], MObject] = {}
    homes: dict[int, str] = {}
    ids_per_resource: dict[str, set[str]] = {}

    if rset.ns_uri and rset.ns_uri not in mm.ns_uris():
        out.append(Violation("", "", "NsUriMismatch",
                             f"set nsUri {rset.ns_uri!r} not among {mm.ns_uris()}"))

    for res, obj in iter_objects(rset):
        homes[id(obj)] = res.uri
        known = ids_per_resource.setdefault(res.uri, set())
        if obj.id in known:
            out.append(Violation(obj.id, res.uri, "DuplicateId", "object id reused in resource"))
        known.add(obj.id)
        index[(res.uri, obj.id)] = obj

    for res, obj in iter_objects(rset):
        v = lambda rule, msg: out.append(Violation(obj.id, res.uri, rule, msg))  # noqa: E731
        cls = _classify_slot_owner(mm, obj.class_name)
        if cls is None:
            v("UnknownClass", f"no class {obj.class_name!r}")
            continue
        if cls.abstract:
            v("AbstractInstantiation", f"{obj.class_name} is abstract")
        features = {f.name: f for f in all_features(mm, obj.class_name)}
        for name in sorted(obj.slots):
            values = obj.slots[name]
            feat = features.get(name)
            if feat is None:
                v("UnknownFeature", f"class {obj.class_name} has no feature {name!r}")
                continue
            if feat.volatile:
                v("VolatileSlot", f"volatile feature {name!r} must not carry values")
                continue
            _check_values(mm, rset, index, res, obj, feat, values, out)
        for feat in features.values():
            if feat.volatile:
                continue
            n = len(obj.slots.get(feat.name, ()))
            if n < feat.lower_bound:
                v("MultiplicityLower", f"{feat.name}: {n} < lower bound {feat.lower_bound}")
            if feat.upper_bound != UNBOUNDED and n > feat.upper_bound:
                v("MultiplicityUpper", f"{feat.name}: {n} > upper bound {feat.upper_bound}")

    _check_containment_forest(rset, out)
    _check_identifiers(rset, mm, out)
    return out


def _check_values(mm, rset, index, res, obj, feat, values, out):
    v = lambda rule, msg: out.append(Violation(obj.id, res.uri, rule, msg))  # noqa: E731
    if isinstance(feat, Attribute):
        target = find_classifier(mm, feat.type)
        for value in values:
            if isinstance(value, (MObject, Ref)):
                v("TypeMismatch", f"{feat.name}: attribute slot holds a non-literal")
            elif isinstance(target, Enumeration):
                if not isinstance(value, str) or value not in target.literals:
                    v("UnknownLiteral", f"{feat.name}: {value!r} not in {target.literals}")
            elif isinstance(target, DataType):
                if not _fits_primitive(target.primitive, value):
                    v("TypeMismatch", f"{feat.name}: {value!r} is not a {target.primitive}")
        return
    assert isinstance(feat, Reference)
    for value in values:
        if feat.containment:
            if not isinstance(value, MObject):
                v("ContainmentMismatch", f"{feat.name}: containment slot holds a reference")
                continue
            target_obj = value
        else:
            if not isinstance(value, Ref):
                v("ContainmentMismatch", f"{feat.name}: non-containment slot holds an inline object")
                continue
            target_obj = index.get(value.key())
            if target_obj is None:
                v("DanglingRef", f"{feat.name}: no object {value.resource}#{value.object_id}")
                continue
        if not is_subtype(mm, target_obj.class_name, feat.type):
            v("TypeMismatch",
              f"{feat.name}: {target_obj.class_name} is not a subtype of {feat.type}")
        elif feat.opposite:
            opp_name = feat.opposite.rpartition(".")[2]
            back = target_obj.slots.get(opp_name, [])
            expected = Ref(res.uri, obj.id)
            if expected not in back:
                v("OppositeInconsistent",
                  f"{feat.name}: target {target_obj.id} lacks back-reference via {opp_name!r}")


def _fits_primitive(kind: str, value) -> bool:
    if isinstance(value, bool):
        return kind == "boolean"
    if isinstance(value, int):
        return kind in ("integer", "float")
    if isinstance(value, float):
        return kind == "float"
    if isinstance(value, str):
        return kind == "string"
    return False


def _check_containment_forest(rset: ResourceSet, out):
    seen: dict[int, str] = {}
    for res in rset.resources:
        for root in res.roots:
            stack = [(root, f"{res.uri} roots")]
            while stack:
                obj, where = stack.pop()
                if id(obj) in seen:
                    out.append(Violation(obj.id, res.uri, "ContainmentMismatch",
                                         f"object contained both in {seen[id(obj)]} and {where}"))
                    continue
                seen[id(obj)] = where
                for name in sorted(obj.slots):
                    for value in obj.slots[name]:
                        if isinstance(value, MObject):
                            stack.append((value, f"{res.uri}#{obj.id}.{name}"))


def _check_identifiers(rset: ResourceSet, mm: Metamodel, out):
    # one uniqueness group per identifier attribute: all instances of classes
    # that inherit it, across every resource of the set
    groups: dict[tuple[str, str], dict] = {}
    for res, obj in iter_objects(rset):
        cls = _classify_slot_owner(mm, obj.class_name)
        if cls is None:
            continue
        for feat in all_features(mm, obj.class_name):
            if not (isinstance(feat, Attribute) and feat.identifier):
                continue
            values = obj.slots.get(feat.name, [])
            if len(values) != 1:
                continue
            key = (feat.name, feat.type)
            holder = groups.setdefault(key, {})
            prev = holder.get(values[0])
            if prev is not None and prev[1] is not obj:
                out.append(Violation(obj.id, res.uri, "DuplicateIdentifier",
                                     f"{feat.name}={values[0]!r} already used by {prev[0]}#{prev[1].id}"))
            else:
                holder[values[0]] = (res.uri, obj)


# ---------------------------------------------------------------------------
# editing


def find_object(rset: ResourceSet, object_id: str) -> tuple[Resource, MObject]:
    """Look up by "uri#id" or by bare id when unique across the set."""
    if "#" in object_id:
        uri, _, bare = object_id.partition("#")
        res = rset.resource(uri)
        if res is not None:
            for obj in walk(res):
                if obj.id == bare:
                    return res, obj
        raise UnknownObjectError(f"no object {object_id!r}")
    hits = [(res, obj) for res, obj in iter_objects(rset) if obj.id == object_id]
    if not hits:
        raise UnknownObjectError(f"no object with id {object_id!r}")
    if len(hits) > 1:
        uris = ", ".join(res.uri for res, _ in hits)
        raise UnknownObjectError(f"object id {object_id!r} is ambiguous across {uris}")
    return hits[0]


def retype_object(rset: ResourceSet, object_id: str, new_class_name: str,
                  mm: Metamodel | None = None) -> ResourceSet:
    """Replace an object's class, leaving slots untouched. Conformance is
    re-established only at the enclosing transaction boundary."""
    _, obj = find_object(rset, object_id)
    if mm is not None and not isinstance(find_classifier(mm, new_class_name), Class):
        raise UnknownClassError(f"no class {new_class_name!r}")
    obj.class_name = new_class_name
    return rset


class ModelEditor:
    """Mutation surface over a (metamodel, resource set) pair.

    This is both what custom migration hooks receive and what the catalog's
    migration rules are written against: instance iteration by class, slot
    access, object creation/deletion/retyping and containment moves. Queries
    walk the set fresh each time, so direct slot edits stay visible.
    """

    def __init__(self, mm: Metamodel, rset: ResourceSet):
        self.mm = mm
        self.rset = rset

    # -- queries

    def objects(self, class_name: str | None = None, include_subtypes: bool = True):
        for res, obj in iter_objects(self.rset):
            if class_name is None:
                yield res, obj
            elif include_subtypes:
                if is_subtype(self.mm, obj.class_name, class_name):
                    yield res, obj
            elif obj.class_name == class_name:
                yield res, obj

    def deref(self, ref: Ref) -> MObject:
        res = self.rset.resource(ref.resource)
        if res is not None:
            for obj in walk(res):
                if obj.id == ref.object_id:
                    return obj
        raise UnresolvedRefError(f"no object {ref.resource}#{ref.object_id}")

    def resource_of(self, obj: MObject) -> Resource:
        for res, candidate in iter_objects(self.rset):
            if candidate is obj:
                return res
        raise UnknownObjectError(f"object {obj.id!r} is not part of the set")

    def container_of(self, obj: MObject) -> tuple[MObject, str] | None:
        for _, candidate in iter_objects(self.rset):
            for name, values in candidate.slots.items():
                for value in values:
                    if value is obj:
                        return candidate, name
        return None

    def root_of(self, obj: MObject) -> MObject:
        current = obj
        while True:
            parent = self.container_of(current)
            if parent is None:
                return current
            current = parent[0]

    def ref_to(self, obj: MObject) -> Ref:
        return Ref(self.resource_of(obj).uri, obj.id)

    def fresh_id(self, res: Resource, base: str) -> str:
        used = {o.id for o in walk(res)}
        if base not in used:
            return base
        n = 2
        while f"{base}_{n}" in used:
            n += 1
        return f"{base}_{n}"

    # -- slot access

    def get(self, obj: MObject, feature: str) -> list:
        return list(obj.slots.get(feature, ()))

    def set_slot(self, obj: MObject, feature: str, values: list) -> None:
        if values:
            obj.slots[feature] = list(values)
        else:
            obj.slots.pop(feature, None)

    def unset(self, obj: MObject, feature: str) -> None:
        obj.slots.pop(feature, None)

    # -- creation / deletion / moves

    def _new_object(self, class_name: str, res: Resource, obj_id: str | None,
                    base: str, fill_defaults: bool) -> MObject:
        obj = MObject(obj_id or self.fresh_id(res, base), class_name)
        if fill_defaults:
            for feat in all_features(self.mm, class_name):
                if (isinstance(feat, Attribute) and feat.lower_bound >= 1
                        and feat.default_value is not None):
                    obj.slots[feat.name] = [feat.default_value] * feat.lower_bound
        return obj

    def create_root(self, res: Resource, class_name: str, obj_id: str | None = None,
                    fill_defaults: bool = False) -> MObject:
        obj = self._new_object(class_name, res, obj_id,
                               class_name.rpartition(".")[2].lower(), fill_defaults)
        res.roots.append(obj)
        return obj

    def create_child(self, owner: MObject, feature: str, class_name: str,
                     obj_id: str | None = None, id_base: str | None = None,
                     fill_defaults: bool = False) -> MObject:
        res = self.resource_of(owner)
        obj = self._new_object(class_name, res, obj_id,
                               id_base or class_name.rpartition(".")[2].lower(), fill_defaults)
        owner.slots.setdefault(feature, []).append(obj)
        return obj

    def retype(self, obj: MObject, class_name: str) -> None:
        obj.class_name = class_name

    def detach(self, obj: MObject) -> None:
        """Remove from the parent slot or the root list; the object keeps its id."""
        res = self.resource_of(obj)
        parent = self.container_of(obj)
        if parent is None:
            res.roots.remove(obj)
        else:
            owner, name = parent
            owner.slots[name] = [v for v in owner.slots[name] if v is not obj]
            if not owner.slots[name]:
                del owner.slots[name]

    def delete(self, obj: MObject) -> None:
        """Delete the object and its whole containment subtree; every reference
        to a deleted object anywhere in the set is removed from its slot."""
        res = self.resource_of(obj)
        doomed = {(res.uri, victim.id) for victim in _subtree_objects(obj)}
        self.detach(obj)
        self.purge_refs(doomed)

    def purge_refs(self, keys: set[tuple[str, str]]) -> None:
        for _, obj in iter_objects(self.rset):
            for name in list(obj.slots):
                kept = [v for v in obj.slots[name]
                        if not (isinstance(v, Ref) and v.key() in keys)]
                if kept:
                    obj.slots[name] = kept
                else:
                    del obj.slots[name]

    def _rehome_detached(self, obj: MObject, source_uri: str, target_res: Resource) -> None:
        """Re-point references into a subtree that moves between resources,
        renaming moved ids that would clash in the target resource."""
        renames: dict[tuple[str, str], Ref] = {}
        used = {o.id for o in walk(target_res)}
        for victim in _subtree_objects(obj):
            new_id = victim.id
            if new_id in used:
                n = 2
                while f"{new_id}_{n}" in used:
                    n += 1
                new_id = f"{new_id}_{n}"
            used.add(new_id)
            renames[(source_uri, victim.id)] = Ref(target_res.uri, new_id)
            victim.id = new_id
        holders = [o for _, o in iter_objects(self.rset)] + list(_subtree_objects(obj))
        for holder in holders:
            for name, values in holder.slots.items():
                holder.slots[name] = [
                    renames.get(v.key(), v) if isinstance(v, Ref) else v for v in values
                ]

    def contain(self, obj: MObject, owner: MObject, feature: str,
                index: int | None = None) -> None:
        """Re-parent an object (possibly across files) under a containment slot."""
        source_res = self.resource_of(obj)
        self.detach(obj)
        target_res = self.resource_of(owner)
        if source_res is not target_res:
            self._rehome_detached(obj, source_res.uri, target_res)
        values = owner.slots.setdefault(feature, [])
        if index is None:
            values.append(obj)
        else:
            values.insert(index, obj)


def _subtree_objects(obj: MObject):
    yield obj
    for name in sorted(obj.slots):
        for value in obj.slots[name]:
            if isinstance(value, MObject):
                yield from _subtree_objects(value)
