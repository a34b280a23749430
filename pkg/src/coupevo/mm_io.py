"""Reading and writing ".mm.json" metamodel files.

Documents are plain JSON with a "kind" discriminator on classifiers and
features; element-to-element references are qualified-name path strings.
Output is UTF-8 with lexicographically sorted keys so files diff cleanly.
Fields that hold their default value are omitted on output and restored on
input. The element codecs are shared with recorded primitive-change payloads.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import ParseError
from .metamodel import (
    Annotation,
    Attribute,
    Class,
    DataType,
    Enumeration,
    Feature,
    Metamodel,
    OperationSignature,
    Package,
    Reference,
)


def canonical_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    """Write via a temp file and rename, so failures never leave partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


# ---------------------------------------------------------------------------
# element -> document


def annotation_to_doc(ann: Annotation) -> dict:
    return {"source": ann.source, "details": dict(ann.details)}


def _common(doc: dict, annotations) -> dict:
    if annotations:
        doc["annotations"] = [annotation_to_doc(a) for a in annotations]
    return doc


def feature_to_doc(feat: Feature) -> dict:
    doc = {
        "kind": "attribute" if isinstance(feat, Attribute) else "reference",
        "name": feat.name,
        "type": feat.type,
        "lowerBound": feat.lower_bound,
        "upperBound": feat.upper_bound,
    }
    if not feat.changeable:
        doc["changeable"] = False
    if feat.volatile:
        doc["volatile"] = True
    if not feat.ordered:
        doc["ordered"] = False
    if isinstance(feat, Attribute):
        if feat.identifier:
            doc["identifier"] = True
        if feat.default_value is not None:
            doc["defaultValue"] = feat.default_value
    else:
        if feat.containment:
            doc["containment"] = True
        if feat.opposite is not None:
            doc["opposite"] = feat.opposite
    return _common(doc, feat.annotations)


def operation_to_doc(op: OperationSignature) -> dict:
    doc = {"name": op.name, "params": list(op.params)}
    return _common(doc, op.annotations)


def classifier_to_doc(c) -> dict:
    if isinstance(c, Class):
        doc = {"kind": "class", "name": c.name}
        if c.abstract:
            doc["abstract"] = True
        if c.interface:
            doc["interface"] = True
        if c.supertypes:
            doc["supertypes"] = list(c.supertypes)
        doc["features"] = [feature_to_doc(f) for f in c.features]
        if c.operations:
            doc["operations"] = [operation_to_doc(o) for o in c.operations]
    elif isinstance(c, Enumeration):
        doc = {"kind": "enum", "name": c.name, "literals": list(c.literals)}
    elif isinstance(c, DataType):
        doc = {"kind": "datatype", "name": c.name, "primitive": c.primitive}
    else:
        raise TypeError(f"not a classifier: {c!r}")
    return _common(doc, c.annotations)


def package_to_doc(pkg: Package) -> dict:
    doc = {
        "name": pkg.name,
        "nsUri": pkg.ns_uri,
        "classifiers": [classifier_to_doc(c) for c in pkg.classifiers],
    }
    return _common(doc, pkg.annotations)


def metamodel_to_doc(mm: Metamodel) -> dict:
    return {"packages": [package_to_doc(p) for p in mm.packages]}


# ---------------------------------------------------------------------------
# document -> element


def _ctx(where: str, msg: str) -> ParseError:
    return ParseError(f"{where}: {msg}")


def _take(doc, key, where, expect=None, default=...):
    if key not in doc:
        if default is not ...:
            return default
        raise _ctx(where, f"missing key {key!r}")
    value = doc[key]
    if expect is not None and not isinstance(value, expect):
        raise _ctx(where, f"key {key!r} has unexpected type {type(value).__name__}")
    return value


def annotation_from_doc(doc, where="annotation") -> Annotation:
    details = _take(doc, "details", where, dict, default={})
    return Annotation(_take(doc, "source", where, str), {str(k): str(v) for k, v in details.items()})


def _annotations(doc, where):
    return [annotation_from_doc(a, where) for a in _take(doc, "annotations", where, list, default=[])]


def feature_from_doc(doc, where="feature") -> Feature:
    kind = _take(doc, "kind", where, str)
    name = _take(doc, "name", where, str)
    where = f"{where}.{name}"
    common = dict(
        name=name,
        type=_take(doc, "type", where, str),
        lower_bound=_take(doc, "lowerBound", where, int, default=0),
        upper_bound=_take(doc, "upperBound", where, int, default=1),
        changeable=_take(doc, "changeable", where, bool, default=True),
        volatile=_take(doc, "volatile", where, bool, default=False),
        ordered=_take(doc, "ordered", where, bool, default=True),
        annotations=_annotations(doc, where),
    )
    if kind == "attribute":
        return Attribute(
            identifier=_take(doc, "identifier", where, bool, default=False),
            default_value=doc.get("defaultValue"),
            **common,
        )
    if kind == "reference":
        return Reference(
            containment=_take(doc, "containment", where, bool, default=False),
            opposite=doc.get("opposite"),
            **common,
        )
    raise _ctx(where, f"unknown feature kind {kind!r}")


def operation_from_doc(doc, where="operation") -> OperationSignature:
    name = _take(doc, "name", where, str)
    params = [str(p) for p in _take(doc, "params", where, list, default=[])]
    return OperationSignature(name, params, _annotations(doc, f"{where}.{name}"))


def classifier_from_doc(doc, where="classifier"):
    kind = _take(doc, "kind", where, str)
    name = _take(doc, "name", where, str)
    where = f"{where}.{name}"
    anns = _annotations(doc, where)
    if kind == "class":
        return Class(
            name,
            abstract=_take(doc, "abstract", where, bool, default=False),
            interface=_take(doc, "interface", where, bool, default=False),
            supertypes=[str(s) for s in _take(doc, "supertypes", where, list, default=[])],
            features=[feature_from_doc(f, where) for f in _take(doc, "features", where, list, default=[])],
            operations=[operation_from_doc(o, where) for o in _take(doc, "operations", where, list, default=[])],
            annotations=anns,
        )
    if kind == "enum":
        return Enumeration(name, [str(l) for l in _take(doc, "literals", where, list, default=[])], anns)
    if kind == "datatype":
        return DataType(name, _take(doc, "primitive", where, str, default="string"), anns)
    raise _ctx(where, f"unknown classifier kind {kind!r}")


def package_from_doc(doc, where="package") -> Package:
    name = _take(doc, "name", where, str)
    where = f"{where}.{name}"
    return Package(
        name,
        _take(doc, "nsUri", where, str),
        [classifier_from_doc(c, where) for c in _take(doc, "classifiers", where, list, default=[])],
        _annotations(doc, where),
    )


def metamodel_from_doc(doc, where="metamodel") -> Metamodel:
    if not isinstance(doc, dict):
        raise _ctx(where, "document is not an object")
    packages = _take(doc, "packages", where, list)
    return Metamodel([package_from_doc(p, where) for p in packages])


# ---------------------------------------------------------------------------
# files


def load_metamodel(path: str | Path) -> Metamodel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ParseError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return metamodel_from_doc(doc, str(path))


def save_metamodel(mm: Metamodel, path: str | Path) -> Path:
    return write_text(path, canonical_json(metamodel_to_doc(mm)))
