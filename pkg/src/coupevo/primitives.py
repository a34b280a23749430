"""Recorded primitive metamodel edits: create / delete / set / add / remove.

A primitive adapts the metamodel directly. When it is replayed over a model
without a custom migration hook attached, a conservative default rule keeps
instances in step: renames follow, deleted features drop their slots, and
anything that would need invented data (a new mandatory feature, a raised
lower bound, a narrowed type with nonconforming values) raises MigrationError
so the author is forced to attach a hook.
"""

from __future__ import annotations

from .errors import MigrationError, ParseError
from .instance import ModelEditor, Ref
from .metamodel import (
    UNBOUNDED,
    Attribute,
    Class,
    DataType,
    Enumeration,
    Feature,
    Metamodel,
    OperationSignature,
    Package,
    Reference,
    all_features,
    find_classifier,
    get_annotation,
    is_subtype,
    owner_class,
    resolve,
    subtree,
)
from .mm_io import (
    annotation_from_doc,
    classifier_from_doc,
    feature_from_doc,
    operation_from_doc,
    package_from_doc,
)

KINDS = ("create", "delete", "set", "add", "remove")

_LIST_PROPS = {"supertypes", "literals", "params"}


def _bad(prim, msg) -> ParseError:
    return ParseError(f"primitive {prim.kind} {prim.target!r}: {msg}")


# ---------------------------------------------------------------------------
# metamodel adaptation


def apply_primitive(mm: Metamodel, prim) -> None:
    """Adapt the metamodel in place; raises ParseError on a malformed edit."""
    if prim.kind == "create":
        _apply_create(mm, prim)
    elif prim.kind == "delete":
        _apply_delete(mm, prim)
    elif prim.kind == "set":
        _apply_set(mm, prim)
    elif prim.kind in ("add", "remove"):
        _apply_list_edit(mm, prim)
    else:
        raise _bad(prim, f"unknown primitive kind {prim.kind!r}")


def _apply_create(mm, prim):
    doc = prim.payload.get("element")
    if not isinstance(doc, dict):
        raise _bad(prim, "create needs an 'element' document")
    if prim.target == "":
        mm.packages.append(package_from_doc(doc))
        return
    parent = resolve(mm, prim.target)
    if isinstance(parent, Package):
        parent.classifiers.append(classifier_from_doc(doc))
    elif isinstance(parent, Class) and doc.get("kind") in ("attribute", "reference"):
        parent.features.append(feature_from_doc(doc))
    elif isinstance(parent, Class) and "params" in doc:
        parent.operations.append(operation_from_doc(doc))
    elif "source" in doc:
        parent.annotations.append(annotation_from_doc(doc))
    else:
        raise _bad(prim, f"cannot create {doc.get('kind', '?')!r} under {type(parent).__name__}")


def _apply_delete(mm, prim):
    element = resolve(mm, prim.target)
    ann_source = prim.payload.get("annotation") if prim.payload else None
    if ann_source is not None:
        ann = get_annotation(element, ann_source)
        if ann is None:
            raise _bad(prim, f"no annotation {ann_source!r}")
        element.annotations.remove(ann)
        return
    if isinstance(element, Package):
        mm.packages.remove(element)
    elif isinstance(element, (Class, Enumeration, DataType)):
        _package_of(mm, prim.target).classifiers.remove(element)
    elif isinstance(element, Feature):
        owner_class(mm, prim.target).features.remove(element)
    elif isinstance(element, OperationSignature):
        owner_class(mm, prim.target).operations.remove(element)
    else:
        raise _bad(prim, "cannot delete this element")


_SETTERS = {
    (Package, "name"): "name",
    (Package, "nsUri"): "ns_uri",
    (Class, "name"): "name",
    (Class, "abstract"): "abstract",
    (Class, "interface"): "interface",
    (Class, "supertypes"): "supertypes",
    (Enumeration, "name"): "name",
    (Enumeration, "literals"): "literals",
    (DataType, "name"): "name",
    (DataType, "primitive"): "primitive",
    (Feature, "name"): "name",
    (Feature, "type"): "type",
    (Feature, "lowerBound"): "lower_bound",
    (Feature, "upperBound"): "upper_bound",
    (Feature, "changeable"): "changeable",
    (Feature, "volatile"): "volatile",
    (Feature, "ordered"): "ordered",
    (Attribute, "identifier"): "identifier",
    (Attribute, "defaultValue"): "default_value",
    (Reference, "containment"): "containment",
    (Reference, "opposite"): "opposite",
    (OperationSignature, "name"): "name",
    (OperationSignature, "params"): "params",
}


def _attr_for(element, prop):
    for (etype, name), attr in _SETTERS.items():
        if name == prop and isinstance(element, etype):
            return attr
    return None


def _apply_set(mm, prim):
    prop = prim.payload.get("property")
    value = prim.payload.get("value")
    element = resolve(mm, prim.target)
    attr = _attr_for(element, prop)
    if attr is None:
        raise _bad(prim, f"{type(element).__name__} has no settable property {prop!r}")
    if prop == "name" and not isinstance(element, OperationSignature):
        _rename_element(mm, prim.target, str(value))
        return
    if prop in _LIST_PROPS:
        value = [str(v) for v in (value or [])]
    setattr(element, attr, value)


def _apply_list_edit(mm, prim):
    prop = prim.payload.get("property")
    value = prim.payload.get("value")
    element = resolve(mm, prim.target)
    attr = _attr_for(element, prop)
    if attr is None or prop not in _LIST_PROPS:
        raise _bad(prim, f"{type(element).__name__} has no list property {prop!r}")
    values = getattr(element, attr)
    if prim.kind == "add":
        values.append(value)
    else:
        if value not in values:
            raise _bad(prim, f"{value!r} not present in {prop}")
        values.remove(value)


def _package_of(mm, path):
    return mm.package(path.split(".", 1)[0])


def _rename_element(mm: Metamodel, path: str, new_name: str) -> None:
    """Rename and rewrite every qualified-name reference to the element."""
    element = resolve(mm, path)
    parts = path.split(".")
    new_path = ".".join(parts[:-1] + [new_name])
    element.name = new_name
    prefix = path + "."

    def fix(q: str) -> str:
        if q == path:
            return new_path
        if q.startswith(prefix):
            return new_path + q[len(path):]
        return q

    for pkg in mm.packages:
        for c in pkg.classifiers:
            if isinstance(c, Class):
                c.supertypes = [fix(s) for s in c.supertypes]
                for f in c.features:
                    f.type = fix(f.type)
                    if isinstance(f, Reference) and f.opposite:
                        f.opposite = fix(f.opposite)


def rename_paths(old_path: str, new_path: str):
    """Mapping function for instance-side renames (class and package names)."""
    prefix = old_path + "."

    def fix(q: str) -> str:
        if q == old_path:
            return new_path
        if q.startswith(prefix):
            return new_path + q[len(old_path):]
        return q

    return fix


# ---------------------------------------------------------------------------
# default instance migration (primitives outside a custom-migration span)


def migrate_primitive(before: Metamodel, after: Metamodel, editor: ModelEditor, prim) -> None:
    """Keep instances in step with one primitive, conservatively.

    `before`/`after` bracket exactly this primitive; `editor` works on the
    after-metamodel.
    """
    handler = {
        "create": _mig_create,
        "delete": _mig_delete,
        "set": _mig_set,
        "add": _mig_list_edit,
        "remove": _mig_list_edit,
    }[prim.kind]
    handler(before, after, editor, prim)


def _mig_create(before, after, editor, prim):
    doc = prim.payload.get("element", {})
    kind = doc.get("kind")
    if kind in ("attribute", "reference"):
        feat = resolve(after, f"{prim.target}.{doc['name']}")
        if feat.lower_bound >= 1:
            raise MigrationError(
                "MandatoryAddition",
                f"new feature {prim.target}.{doc['name']} is mandatory; attach a custom migration")


def _mig_delete(before, after, editor, prim):
    element = resolve(before, prim.target)
    if prim.payload and prim.payload.get("annotation"):
        return
    if isinstance(element, Class):
        doomed = [obj for _, obj in editor.objects() if obj.class_name == prim.target]
        if doomed:
            raise MigrationError(
                "InstancesExist",
                f"deleted class {prim.target} has instances: {[o.id for o in doomed]}")
        _drop_lost(before, after, editor)
    elif isinstance(element, Feature):
        _drop_lost(before, after, editor)


def _drop_lost(before, after, editor):
    """Drop slots for every feature name that left a class's closure."""
    from .operations import _drop_slot, _still_in_set  # shared cascade helper

    lost: dict[str, list[Feature]] = {}
    for pkg in before.packages:
        for c in pkg.classifiers:
            if not isinstance(c, Class):
                continue
            q = f"{pkg.name}.{c.name}"
            if find_classifier(after, q) is None:
                continue
            after_names = {f.name for f in all_features(after, q)}
            gone = [f for f in all_features(before, q) if f.name not in after_names]
            if gone:
                lost[q] = gone
    for _, obj in list(editor.objects()):
        if obj.class_name not in lost or not _still_in_set(editor, obj):
            continue
        for feat in lost[obj.class_name]:
            _drop_slot(editor, obj, feat)


def _mig_set(before, after, editor, prim):
    prop = prim.payload.get("property")
    value = prim.payload.get("value")
    element_before = resolve(before, prim.target)

    if prop == "name":
        _mig_rename(before, after, editor, prim, element_before, str(value))
    elif prop == "nsUri":
        if editor.rset.ns_uri == element_before.ns_uri:
            editor.rset.ns_uri = str(value)
    elif prop == "lowerBound":
        _check_lower(after, editor, prim, value)
    elif prop == "upperBound":
        _check_upper(after, editor, prim, value)
    elif prop == "type":
        _check_retype(after, editor, prim)
    elif prop == "volatile" and value:
        _drop_feature_everywhere(before, editor, prim.target)
    elif prop == "abstract" and value:
        direct = [obj.id for _, obj in editor.objects(prim.target, include_subtypes=False)]
        if direct:
            raise MigrationError("InstancesExist",
                                 f"{prim.target} made abstract but has instances: {direct}")
    elif prop == "containment":
        owner_q = prim.target.rpartition(".")[0]
        name = prim.target.rpartition(".")[2]
        holders = [obj.id for _, obj in editor.objects(owner_q) if obj.slots.get(name)]
        if holders:
            raise MigrationError(
                "ContainmentFlip",
                f"{prim.target} flips containment while instances hold values: {holders}")
    elif prop == "identifier" and value:
        _check_identifier_unique(after, editor, prim)
    elif prop == "literals":
        _check_literals(editor, prim, set(value or []))
    elif prop == "opposite" and value is not None:
        owner_q = prim.target.rpartition(".")[0]
        name = prim.target.rpartition(".")[2]
        if any(obj.slots.get(name) for _, obj in editor.objects(owner_q)):
            raise MigrationError(
                "OppositeIntroduced",
                f"{prim.target} gains an opposite while instances hold values")


def _mig_rename(before, after, editor, prim, element_before, new_name):
    parts = prim.target.split(".")
    new_path = ".".join(parts[:-1] + [new_name])
    if isinstance(element_before, (Package, Class)):
        fix = rename_paths(prim.target, new_path)
        for _, obj in editor.objects():
            obj.class_name = fix(obj.class_name)
    elif isinstance(element_before, Feature):
        owner_q = prim.target.rpartition(".")[0]
        old = prim.target.rpartition(".")[2]
        for _, obj in editor.objects(owner_q):
            if old in obj.slots:
                obj.slots[new_name] = obj.slots.pop(old)


def _check_lower(after, editor, prim, value):
    owner_q = prim.target.rpartition(".")[0]
    name = prim.target.rpartition(".")[2]
    low = [obj.id for _, obj in editor.objects(owner_q)
           if len(obj.slots.get(name, ())) < int(value)]
    if low:
        raise MigrationError(
            "MandatoryAddition",
            f"{prim.target} lower bound {value} unmet by instances {low}; attach a custom migration")


def _check_upper(after, editor, prim, value):
    if int(value) == UNBOUNDED:
        return
    owner_q = prim.target.rpartition(".")[0]
    name = prim.target.rpartition(".")[2]
    high = [obj.id for _, obj in editor.objects(owner_q)
            if len(obj.slots.get(name, ())) > int(value)]
    if high:
        raise MigrationError(
            "UpperBoundExceeded",
            f"{prim.target} upper bound {value} exceeded by instances {high}")


def _check_retype(after, editor, prim):
    feat = resolve(after, prim.target)
    owner_q = prim.target.rpartition(".")[0]
    offenders = []
    for _, obj in editor.objects(owner_q):
        for v in obj.slots.get(feat.name, ()):
            if isinstance(feat, Reference):
                target = v if not isinstance(v, Ref) else editor.deref(v)
                if not is_subtype(after, target.class_name, feat.type):
                    offenders.append(obj.id)
            else:
                t = find_classifier(after, feat.type)
                if isinstance(t, Enumeration) and v not in t.literals:
                    offenders.append(obj.id)
    if offenders:
        raise MigrationError(
            "TypeNarrowed",
            f"{prim.target} retyped but instances {offenders} hold nonconforming values")


def _drop_feature_everywhere(before, editor, feature_path):
    from .operations import _drop_slot, _still_in_set

    feat = resolve(before, feature_path)
    owner_q = feature_path.rpartition(".")[0]
    for _, obj in list(editor.objects(owner_q)):
        if _still_in_set(editor, obj):
            _drop_slot(editor, obj, feat)


def _check_identifier_unique(after, editor, prim):
    name = prim.target.rpartition(".")[2]
    owner_q = prim.target.rpartition(".")[0]
    seen = {}
    for _, obj in editor.objects(owner_q):
        values = obj.slots.get(name, [])
        if len(values) == 1:
            if values[0] in seen:
                raise MigrationError(
                    "DuplicateIdentifier",
                    f"{prim.target} made identifier but {values[0]!r} is shared by "
                    f"{seen[values[0]]} and {obj.id}")
            seen[values[0]] = obj.id


def _check_literals(editor, prim, allowed):
    owner = find_enum_attr_owners(editor.mm, prim.target)
    for owner_q, attr in owner:
        for _, obj in editor.objects(owner_q):
            for v in obj.slots.get(attr.name, ()):
                if v not in allowed:
                    raise MigrationError(
                        "UnmappedLiteral",
                        f"literal {v!r} of {owner_q}.{attr.name} no longer exists")


def _mig_list_edit(before, after, editor, prim):
    prop = prim.payload.get("property")
    if prop == "supertypes":
        if prim.kind == "remove":
            from .operations import _enforce_ref_compatibility

            _drop_lost(before, after, editor)
            _enforce_ref_compatibility(editor, after)
        else:
            cls_q = prim.target
            before_names = {f.name for f in all_features(before, cls_q)}
            for q in subtree(after, cls_q):
                for feat in all_features(after, q):
                    if feat.name not in before_names and feat.lower_bound >= 1:
                        raise MigrationError(
                            "MandatoryAddition",
                            f"{q} inherits mandatory {feat.name!r}; attach a custom migration")
    elif prop == "literals" and prim.kind == "remove":
        enum = resolve(after, prim.target)
        _check_literals(editor, prim, set(enum.literals))


def find_enum_attr_owners(mm: Metamodel, enum_path: str):
    out = []
    for pkg in mm.packages:
        for c in pkg.classifiers:
            if isinstance(c, Class):
                for f in c.features:
                    if isinstance(f, Attribute) and f.type == enum_path:
                        out.append((f"{pkg.name}.{c.name}", f))
    return out
