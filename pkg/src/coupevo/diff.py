"""Structural difference computation.

Metamodels are matched by qualified name; models are matched by identifier
attribute value where a class declares one, otherwise structurally within
(container, containment feature, class) groups using position-independent
fingerprints. Reference order can be ignored; attribute value order is always
significant. Unmatched elements report as add + remove, never as heuristic
moves.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import MixedNsUriError
from .instance import MObject, Ref, Resource, ResourceSet
from .metamodel import (
    Attribute,
    Class,
    DataType,
    Enumeration,
    Metamodel,
    Reference,
    all_features,
    find_classifier,
)


@dataclass(frozen=True)
class DiffEntry:
    kind: str  # added | removed | changed | moved
    a: str | None
    b: str | None
    detail: str = ""

    def __str__(self) -> str:
        mark = {"added": "+", "removed": "-", "changed": "~", "moved": ">"}[self.kind]
        where = self.a if self.a is not None else self.b
        tail = f": {self.detail}" if self.detail else ""
        return f"{mark} {self.kind} {where}{tail}"


@dataclass
class DiffModel:
    entries: list[DiffEntry] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.entries

    def to_doc(self) -> dict:
        return {"entries": [
            {"kind": e.kind, "a": e.a, "b": e.b, "detail": e.detail} for e in self.entries
        ]}

    def to_text(self) -> str:
        if not self.entries:
            return "no differences\n"
        return "\n".join(str(e) for e in self.entries) + "\n"


@dataclass
class MatchPolicy:
    """How model objects pair up before comparison."""

    metamodel: Metamodel | None = None
    ignore_reference_order: bool = False


# ---------------------------------------------------------------------------
# metamodel diff


def diff_metamodels(a: Metamodel, b: Metamodel) -> DiffModel:
    entries: list[DiffEntry] = []
    _diff_named(entries, "", a.packages, b.packages, _diff_package)
    return DiffModel(entries)


def convergence(current: Metamodel, target: Metamodel) -> DiffModel:
    """The authoring oracle: the remaining difference to the target version."""
    return diff_metamodels(current, target)


def _diff_named(entries, prefix, items_a, items_b, on_pair, label=""):
    names_a = [i.name for i in items_a]
    names_b = [i.name for i in items_b]
    by_a = {i.name: i for i in items_a}
    by_b = {i.name: i for i in items_b}
    sep = "." if prefix else ""
    for name in names_a:
        if name not in by_b:
            entries.append(DiffEntry("removed", f"{prefix}{sep}{name}", None, label))
    for name in names_b:
        if name not in by_a:
            entries.append(DiffEntry("added", None, f"{prefix}{sep}{name}", label))
    common_a = [n for n in names_a if n in by_b]
    common_b = [n for n in names_b if n in by_a]
    flagged = set()
    for pos, (na, nb) in enumerate(zip(common_a, common_b)):
        if na != nb and na not in flagged:
            path = f"{prefix}{sep}{na}"
            entries.append(DiffEntry("moved", path, path, f"sibling position changed{label and ' ' + label}"))
            flagged.add(na)
    for name in common_a:
        on_pair(entries, f"{prefix}{sep}{name}", by_a[name], by_b[name])


def _prop(entries, path, label, va, vb):
    if va != vb:
        entries.append(DiffEntry("changed", path, path, f"{label}: {va!r} -> {vb!r}"))


def _diff_annotations(entries, path, anns_a, anns_b):
    by_a = {a.source: a for a in anns_a}
    by_b = {a.source: a for a in anns_b}
    for source in sorted(by_a.keys() | by_b.keys()):
        apath = f"{path}@{source}"
        if source not in by_b:
            entries.append(DiffEntry("removed", apath, None, "annotation"))
        elif source not in by_a:
            entries.append(DiffEntry("added", None, apath, "annotation"))
        else:
            _prop(entries, apath, "details", by_a[source].details, by_b[source].details)


def _diff_package(entries, path, a, b):
    _prop(entries, path, "nsUri", a.ns_uri, b.ns_uri)
    _diff_annotations(entries, path, a.annotations, b.annotations)
    _diff_named(entries, path, a.classifiers, b.classifiers, _diff_classifier)


def _diff_classifier(entries, path, a, b):
    kind_a, kind_b = type(a).__name__, type(b).__name__
    if kind_a != kind_b:
        entries.append(DiffEntry("changed", path, path, f"classifier kind: {kind_a} -> {kind_b}"))
        return
    _diff_annotations(entries, path, a.annotations, b.annotations)
    if isinstance(a, Enumeration):
        _prop(entries, path, "literals", a.literals, b.literals)
    elif isinstance(a, DataType):
        _prop(entries, path, "primitive", a.primitive, b.primitive)
    else:
        _prop(entries, path, "abstract", a.abstract, b.abstract)
        _prop(entries, path, "interface", a.interface, b.interface)
        _prop(entries, path, "supertypes", a.supertypes, b.supertypes)
        _diff_named(entries, path, a.features, b.features, _diff_feature, label="feature")
        _diff_named(entries, path, a.operations, b.operations, _diff_operation, label="operation")


def _diff_feature(entries, path, a, b):
    kind_a = "attribute" if isinstance(a, Attribute) else "reference"
    kind_b = "attribute" if isinstance(b, Attribute) else "reference"
    if kind_a != kind_b:
        entries.append(DiffEntry("changed", path, path, f"feature kind: {kind_a} -> {kind_b}"))
        return
    _prop(entries, path, "type", a.type, b.type)
    _prop(entries, path, "lowerBound", a.lower_bound, b.lower_bound)
    _prop(entries, path, "upperBound", a.upper_bound, b.upper_bound)
    _prop(entries, path, "changeable", a.changeable, b.changeable)
    _prop(entries, path, "volatile", a.volatile, b.volatile)
    _prop(entries, path, "ordered", a.ordered, b.ordered)
    if isinstance(a, Attribute):
        _prop(entries, path, "identifier", a.identifier, b.identifier)
        _prop(entries, path, "defaultValue", a.default_value, b.default_value)
    else:
        _prop(entries, path, "containment", a.containment, b.containment)
        _prop(entries, path, "opposite", a.opposite, b.opposite)
    _diff_annotations(entries, path, a.annotations, b.annotations)


def _diff_operation(entries, path, a, b):
    _prop(entries, path, "params", a.params, b.params)
    _diff_annotations(entries, path, a.annotations, b.annotations)


# ---------------------------------------------------------------------------
# model diff


def diff_models(a: ResourceSet, b: ResourceSet, policy: MatchPolicy | None = None) -> DiffModel:
    if a.ns_uri != b.ns_uri:
        raise MixedNsUriError(f"model sets stamp different nsUris: {a.ns_uri!r} vs {b.ns_uri!r}")
    return DiffModel(_ModelMatcher(a, b, policy or MatchPolicy()).run())


class _ModelMatcher:
    def __init__(self, set_a: ResourceSet, set_b: ResourceSet, policy: MatchPolicy):
        self.a = set_a
        self.b = set_b
        self.policy = policy
        self.entries: list[DiffEntry] = []
        self.pairs: dict[int, MObject] = {}  # id(obj in a) -> obj in b
        self.uri_of_a: dict[int, str] = {}
        self.uri_of_b: dict[int, str] = {}
        self.index_a = self._index(set_a, self.uri_of_a)
        self.index_b = self._index(set_b, self.uri_of_b)

    @staticmethod
    def _index(rset, uri_of):
        index = {}
        for res in rset.resources:
            stack = list(res.roots)
            while stack:
                obj = stack.pop()
                index[(res.uri, obj.id)] = obj
                uri_of[id(obj)] = res.uri
                for values in obj.slots.values():
                    stack.extend(v for v in values if isinstance(v, MObject))
        return index

    def run(self) -> list[DiffEntry]:
        uris_a = {r.uri: r for r in self.a.resources}
        uris_b = {r.uri: r for r in self.b.resources}
        for uri in uris_a:
            if uri not in uris_b:
                self.entries.append(DiffEntry("removed", uri, None, "resource"))
        for uri in uris_b:
            if uri not in uris_a:
                self.entries.append(DiffEntry("added", None, uri, "resource"))
        matched: list[tuple[MObject, MObject]] = []
        for uri, res_a in uris_a.items():
            res_b = uris_b.get(uri)
            if res_b is not None:
                self._match_group(res_a.roots, res_b.roots, matched)
        self.matched_b_ids = {id(b) for b in self.pairs.values()}
        for obj_a, obj_b in matched:
            self._compare(obj_a, obj_b)
        return self.entries

    # -- matching

    def _path(self, obj: MObject, side: str) -> str:
        uri_of = self.uri_of_a if side == "a" else self.uri_of_b
        return f"{uri_of.get(id(obj), '?')}#{obj.id}"

    def _identifier_attr(self, class_name: str):
        mm = self.policy.metamodel
        if mm is None or not isinstance(find_classifier(mm, class_name), Class):
            return None
        for feat in all_features(mm, class_name):
            if isinstance(feat, Attribute) and feat.identifier:
                return feat.name
        return None

    def _match_group(self, objs_a: list[MObject], objs_b: list[MObject], matched) -> None:
        """Match two sibling groups (shared container and containment feature)."""
        by_class_a: dict[str, list[MObject]] = {}
        by_class_b: dict[str, list[MObject]] = {}
        for o in objs_a:
            by_class_a.setdefault(o.class_name, []).append(o)
        for o in objs_b:
            by_class_b.setdefault(o.class_name, []).append(o)
        for class_name in sorted(by_class_a.keys() | by_class_b.keys()):
            group_a = by_class_a.get(class_name, [])
            group_b = by_class_b.get(class_name, [])
            id_attr = self._identifier_attr(class_name)
            if id_attr is not None:
                pairs, left_a, left_b = self._pair_by_identifier(group_a, group_b, id_attr)
            else:
                pairs, left_a, left_b = self._pair_by_fingerprint(group_a, group_b)
            for o in left_a:
                self.entries.append(DiffEntry("removed", self._path(o, "a"), None, class_name))
            for o in left_b:
                self.entries.append(DiffEntry("added", None, self._path(o, "b"), class_name))
            for obj_a, obj_b in pairs:
                self.pairs[id(obj_a)] = obj_b
                matched.append((obj_a, obj_b))
                names = sorted(obj_a.slots.keys() | obj_b.slots.keys())
                for name in names:
                    kids_a = [v for v in obj_a.slots.get(name, ()) if isinstance(v, MObject)]
                    kids_b = [v for v in obj_b.slots.get(name, ()) if isinstance(v, MObject)]
                    if kids_a or kids_b:
                        self._match_group(kids_a, kids_b, matched)

    def _pair_by_identifier(self, group_a, group_b, id_attr):
        def key(obj):
            values = obj.slots.get(id_attr, [])
            return values[0] if len(values) == 1 else None

        by_key_b = {}
        for o in group_b:
            k = key(o)
            if k is not None and k not in by_key_b:
                by_key_b[k] = o
        pairs, left_a = [], []
        used = set()
        for o in group_a:
            k = key(o)
            partner = by_key_b.get(k) if k is not None else None
            if partner is not None and id(partner) not in used:
                pairs.append((o, partner))
                used.add(id(partner))
            else:
                left_a.append(o)
        left_b = [o for o in group_b if id(o) not in used]
        return pairs, left_a, left_b

    def _pair_by_fingerprint(self, group_a, group_b):
        fps_a = [(self._fingerprint(o, self.index_a), o) for o in group_a]
        fps_b = [(self._fingerprint(o, self.index_b), o) for o in group_b]
        pool_b: dict[tuple, list[MObject]] = {}
        for fp, o in fps_b:
            pool_b.setdefault(fp, []).append(o)
        pairs, left_a = [], []
        for fp, o in fps_a:
            if pool_b.get(fp):
                pairs.append((o, pool_b[fp].pop(0)))
            else:
                left_a.append(o)
        left_b = [o for candidates in pool_b.values() for o in candidates]
        left_b.sort(key=lambda o: [id(x) for x in group_b].index(id(o)))
        # pair leftovers positionally so near-misses diff as changes, not add+remove
        paired = min(len(left_a), len(left_b))
        pairs.extend(zip(left_a[:paired], left_b[:paired]))
        return pairs, left_a[paired:], left_b[paired:]

    def _fingerprint(self, obj: MObject, index) -> tuple:
        items = []
        for name in sorted(obj.slots):
            values = obj.slots[name]
            encoded = []
            for v in values:
                if isinstance(v, MObject):
                    encoded.append(("child", self._fingerprint(v, index)))
                elif isinstance(v, Ref):
                    target = index.get(v.key())
                    encoded.append(("ref", target.class_name if target else "?"))
                else:
                    encoded.append(("value", type(v).__name__, v))
            if self.policy.ignore_reference_order and values and all(
                    isinstance(v, (Ref, MObject)) for v in values):
                encoded = sorted(encoded, key=repr)
            items.append((name, tuple(encoded)))
        return (obj.class_name, tuple(items))

    # -- comparison of matched pairs

    def _tokens(self, obj: MObject, name: str, side: str):
        index = self.index_a if side == "a" else self.index_b
        tokens = []
        all_refs = True
        for v in obj.slots.get(name, ()):
            if isinstance(v, MObject):
                if side == "a":
                    partner = self.pairs.get(id(v))
                    tokens.append(("child", id(partner)) if partner else ("child?", id(v)))
                else:
                    tokens.append(("child", id(v)) if id(v) in self.matched_b_ids else ("child?", id(v)))
            elif isinstance(v, Ref):
                target = index.get(v.key())
                if target is None:
                    tokens.append(("ref!", v.key()))
                elif side == "a":
                    partner = self.pairs.get(id(target))
                    tokens.append(("ref", id(partner)) if partner else ("ref!", v.key()))
                else:
                    tokens.append(("ref", id(target)))
            else:
                tokens.append(("value", type(v).__name__, v))
                all_refs = False
        return tokens, all_refs and bool(tokens)

    def _compare(self, obj_a: MObject, obj_b: MObject) -> None:
        for name in sorted(obj_a.slots.keys() | obj_b.slots.keys()):
            tokens_a, refs_a = self._tokens(obj_a, name, "a")
            tokens_b, refs_b = self._tokens(obj_b, name, "b")
            # unmatched children already reported as add/remove; keep order info
            filtered_a = [t for t in tokens_a if t[0] not in ("child?",)]
            filtered_b = [t for t in tokens_b if t[0] not in ("child?",)]
            if filtered_a == filtered_b:
                continue
            unordered = self.policy.ignore_reference_order and refs_a and refs_b
            if unordered and Counter(filtered_a) == Counter(filtered_b):
                continue
            self.entries.append(DiffEntry(
                "changed", self._path(obj_a, "a"), self._path(obj_b, "b"),
                f"slot {name!r} differs"))
