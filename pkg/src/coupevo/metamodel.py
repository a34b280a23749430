"""Metamodel core: the language evolving schemas are written in.

Cross-element references (supertypes, feature types, opposites) are stored as
qualified-name paths ("package.Class" / "package.Class.feature") and resolved
on demand, which keeps values plain data: structural equality and deep copy
come straight from the dataclasses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DanglingRefError

UNBOUNDED = -1

PRIMITIVE_KINDS = ("string", "boolean", "integer", "float")

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class Annotation:
    source: str
    details: dict[str, str] = field(default_factory=dict)


@dataclass
class OperationSignature:
    name: str
    params: list[str] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)


@dataclass
class Feature:
    name: str
    type: str
    lower_bound: int = 0
    upper_bound: int = 1
    changeable: bool = True
    volatile: bool = False
    ordered: bool = True
    annotations: list[Annotation] = field(default_factory=list)


@dataclass
class Attribute(Feature):
    identifier: bool = False
    default_value: object = None


@dataclass
class Reference(Feature):
    containment: bool = False
    opposite: str | None = None


@dataclass
class Class:
    name: str
    abstract: bool = False
    interface: bool = False
    supertypes: list[str] = field(default_factory=list)
    features: list[Feature] = field(default_factory=list)
    operations: list[OperationSignature] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)


@dataclass
class Enumeration:
    name: str
    literals: list[str] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)


@dataclass
class DataType:
    name: str
    primitive: str = "string"
    annotations: list[Annotation] = field(default_factory=list)


Classifier = Class | Enumeration | DataType


@dataclass
class Package:
    name: str
    ns_uri: str
    classifiers: list[Classifier] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)


@dataclass
class Metamodel:
    packages: list[Package] = field(default_factory=list)

    def package(self, name: str) -> Package | None:
        for pkg in self.packages:
            if pkg.name == name:
                return pkg
        return None

    def ns_uris(self) -> list[str]:
        return [pkg.ns_uri for pkg in self.packages]


@dataclass(frozen=True)
class MetaViolation:
    element: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} at {self.element}: {self.message}"


# ---------------------------------------------------------------------------
# navigation


def find_classifier(mm: Metamodel, qname: str) -> Classifier | None:
    pkg_name, _, cls_name = qname.rpartition(".")
    pkg = mm.package(pkg_name)
    if pkg is None:
        return None
    for c in pkg.classifiers:
        if c.name == cls_name:
            return c
    return None


def resolve(mm: Metamodel, path: str):
    """Resolve a qualified-name path to its package, classifier, feature or
    operation signature. Raises DanglingRefError when nothing is there."""
    parts = path.split(".")
    if not all(parts) or len(parts) > 3:
        raise DanglingRefError(f"malformed element path {path!r}")
    pkg = mm.package(parts[0])
    if pkg is None:
        raise DanglingRefError(f"no package {parts[0]!r}")
    if len(parts) == 1:
        return pkg
    classifier = find_classifier(mm, f"{parts[0]}.{parts[1]}")
    if classifier is None:
        raise DanglingRefError(f"no classifier {parts[0]}.{parts[1]}")
    if len(parts) == 2:
        return classifier
    if isinstance(classifier, Class):
        for f in classifier.features:
            if f.name == parts[2]:
                return f
        for op in classifier.operations:
            if op.name == parts[2]:
                return op
    raise DanglingRefError(f"no feature or operation {path!r}")


def try_resolve(mm: Metamodel, path: str):
    try:
        return resolve(mm, path)
    except DanglingRefError:
        return None


def path_of(mm: Metamodel, element) -> str:
    """Inverse of resolve: the qualified-name path of an element (by identity)."""
    for pkg in mm.packages:
        if element is pkg:
            return pkg.name
        for c in pkg.classifiers:
            if element is c:
                return f"{pkg.name}.{c.name}"
            if isinstance(c, Class):
                for part in list(c.features) + list(c.operations):
                    if element is part:
                        return f"{pkg.name}.{c.name}.{part.name}"
    raise DanglingRefError("element is not part of this metamodel")


def owner_class(mm: Metamodel, feature_path: str) -> Class:
    cls_path, _, _ = feature_path.rpartition(".")
    owner = resolve(mm, cls_path)
    if not isinstance(owner, Class):
        raise DanglingRefError(f"{cls_path!r} is not a class")
    return owner


def classes(mm: Metamodel):
    for pkg in mm.packages:
        for c in pkg.classifiers:
            if isinstance(c, Class):
                yield pkg, c


# ---------------------------------------------------------------------------
# inheritance


def supertype_closure(mm: Metamodel, qname: str) -> list[str]:
    """Reflexive transitive supertypes of a class, supertype-first, each once.

    Cycle-safe: on a (ill-formed) cyclic graph every class still appears once."""
    seen: list[str] = []
    visiting: set[str] = set()

    def visit(q: str) -> None:
        if q in visiting or q in seen:
            return
        cls = find_classifier(mm, q)
        if not isinstance(cls, Class):
            return
        visiting.add(q)
        for sup in cls.supertypes:
            visit(sup)
        visiting.discard(q)
        seen.append(q)

    visit(qname)
    return seen


def is_subtype(mm: Metamodel, sub: str, sup: str) -> bool:
    return sup in supertype_closure(mm, sub)


def all_features(mm: Metamodel, cls: Class | str) -> list[Feature]:
    """Own plus inherited features, supertype-first depth order, each class
    visited once (diamonds contribute a single copy)."""
    if isinstance(cls, Class):
        qname = path_of(mm, cls)
    else:
        qname = cls
    out: list[Feature] = []
    for q in supertype_closure(mm, qname):
        c = find_classifier(mm, q)
        if isinstance(c, Class):
            out.extend(c.features)
    return out


def subtree(mm: Metamodel, qname: str) -> list[str]:
    """The class and all its (transitive) subtypes, in package declaration order."""
    out = []
    for pkg, c in classes(mm):
        q = f"{pkg.name}.{c.name}"
        if is_subtype(mm, q, qname):
            out.append(q)
    return out


def direct_subclasses(mm: Metamodel, qname: str) -> list[str]:
    out = []
    for pkg, c in classes(mm):
        if qname in c.supertypes:
            out.append(f"{pkg.name}.{c.name}")
    return out


# ---------------------------------------------------------------------------
# validation


def _check_annotations(element_path, annotations, out):
    seen = set()
    for ann in annotations:
        if ann.source in seen:
            out.append(MetaViolation(element_path, "AnnotationSourceClash",
                                     f"duplicate annotation source {ann.source!r}"))
        seen.add(ann.source)


def _check_name(element_path, name, out):
    if not _NAME_RE.match(name or ""):
        out.append(MetaViolation(element_path, "BadName", f"{name!r} is not an identifier"))


def _scalar_fits(kind: str, value) -> bool:
    if kind == "string":
        return isinstance(value, str)
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "float":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return False


def default_value_fits(mm: Metamodel, attr: Attribute, value) -> bool:
    t = find_classifier(mm, attr.type)
    if isinstance(t, Enumeration):
        return isinstance(value, str) and value in t.literals
    if isinstance(t, DataType):
        return _scalar_fits(t.primitive, value)
    return False


def _check_feature(mm, pkg, cls, feat, out):
    fpath = f"{pkg.name}.{cls.name}.{feat.name}"
    _check_name(fpath, feat.name, out)
    _check_annotations(fpath, feat.annotations, out)
    if feat.lower_bound < 0 or feat.upper_bound == 0 or (
            feat.upper_bound != UNBOUNDED and feat.lower_bound > feat.upper_bound):
        out.append(MetaViolation(fpath, "BadBounds",
                                 f"[{feat.lower_bound}..{feat.upper_bound}]"))
    target = find_classifier(mm, feat.type)
    if isinstance(feat, Attribute):
        if not isinstance(target, (DataType, Enumeration)):
            out.append(MetaViolation(fpath, "BadTypeRef",
                                     f"attribute type {feat.type!r} is not a data type or enumeration"))
        else:
            if feat.identifier:
                single = feat.upper_bound == 1
                kinds_ok = isinstance(target, DataType) and target.primitive in ("string", "integer")
                if not (single and kinds_ok):
                    out.append(MetaViolation(fpath, "BadIdentifier",
                                             "identifier requires a single-valued string/integer attribute"))
            if feat.default_value is not None and not default_value_fits(mm, feat, feat.default_value):
                out.append(MetaViolation(fpath, "BadDefault",
                                         f"default {feat.default_value!r} does not fit {feat.type}"))
    elif isinstance(feat, Reference):
        if not isinstance(target, Class):
            out.append(MetaViolation(fpath, "BadTypeRef",
                                     f"reference type {feat.type!r} is not a class"))
        if feat.opposite is not None:
            opp = try_resolve(mm, feat.opposite)
            if not isinstance(opp, Reference):
                out.append(MetaViolation(fpath, "OppositeAsymmetric",
                                         f"opposite {feat.opposite!r} is not a reference"))
            else:
                if opp.opposite != fpath:
                    out.append(MetaViolation(fpath, "OppositeAsymmetric",
                                             f"opposite of {feat.opposite!r} does not point back"))
                if feat.containment or opp.containment:
                    out.append(MetaViolation(fpath, "OppositeContainment",
                                             "opposite pairs must be non-containment on both ends"))
                opp_owner = feat.opposite.rpartition(".")[0]
                if feat.type != opp_owner or opp.type != f"{pkg.name}.{cls.name}":
                    out.append(MetaViolation(fpath, "OppositeAsymmetric",
                                             "opposite ends do not type each other's owners"))


def validate_metamodel(mm: Metamodel) -> list[MetaViolation]:
    """All well-formedness violations; empty list means valid. Never raises."""
    out: list[MetaViolation] = []
    pkg_names = set()
    for pkg in mm.packages:
        _check_name(pkg.name, pkg.name, out)
        if pkg.name in pkg_names:
            out.append(MetaViolation(pkg.name, "PackageNameClash", "duplicate package name"))
        pkg_names.add(pkg.name)
        if not pkg.ns_uri:
            out.append(MetaViolation(pkg.name, "EmptyNsUri", "package needs a namespace URI"))
        _check_annotations(pkg.name, pkg.annotations, out)
        cls_names = set()
        for c in pkg.classifiers:
            cpath = f"{pkg.name}.{c.name}"
            _check_name(cpath, c.name, out)
            if c.name in cls_names:
                out.append(MetaViolation(cpath, "ClassifierNameClash", "duplicate classifier name"))
            cls_names.add(c.name)
            _check_annotations(cpath, c.annotations, out)
            if isinstance(c, Enumeration):
                if len(set(c.literals)) != len(c.literals):
                    out.append(MetaViolation(cpath, "DuplicateLiteral", f"{c.literals}"))
            elif isinstance(c, DataType):
                if c.primitive not in PRIMITIVE_KINDS:
                    out.append(MetaViolation(cpath, "BadPrimitive", f"{c.primitive!r}"))
            elif isinstance(c, Class):
                _validate_class(mm, pkg, c, out)
    return out


def _validate_class(mm, pkg, cls, out):
    cpath = f"{pkg.name}.{cls.name}"
    seen_sup = set()
    for sup in cls.supertypes:
        if sup in seen_sup:
            out.append(MetaViolation(cpath, "DuplicateSupertype", sup))
        seen_sup.add(sup)
        target = find_classifier(mm, sup)
        if not isinstance(target, Class):
            out.append(MetaViolation(cpath, "DanglingSupertype", f"{sup!r} is not a class"))

    if _in_cycle(mm, cpath):
        out.append(MetaViolation(cpath, "CyclicInheritance", "class inherits from itself"))
    else:
        names: dict[str, str] = {}
        for q in supertype_closure(mm, cpath):
            c = find_classifier(mm, q)
            if not isinstance(c, Class):
                continue
            for f in c.features:
                if f.name in names:
                    out.append(MetaViolation(cpath, "FeatureNameClash",
                                             f"{f.name!r} declared by {names[f.name]} and {q}"))
                else:
                    names[f.name] = q
        op_names = set()
        for op in cls.operations:
            oppath = f"{cpath}.{op.name}"
            _check_name(oppath, op.name, out)
            _check_annotations(oppath, op.annotations, out)
            if op.name in op_names or op.name in names:
                out.append(MetaViolation(cpath, "OperationNameClash", op.name))
            op_names.add(op.name)

    for feat in cls.features:
        _check_feature(mm, pkg, cls, feat, out)


def _in_cycle(mm: Metamodel, qname: str) -> bool:
    start = find_classifier(mm, qname)
    if not isinstance(start, Class):
        return False
    seen = set()
    stack = list(start.supertypes)
    while stack:
        q = stack.pop()
        if q == qname:
            return True
        if q in seen:
            continue
        seen.add(q)
        c = find_classifier(mm, q)
        if isinstance(c, Class):
            stack.extend(c.supertypes)
    return False


# ---------------------------------------------------------------------------
# shared annotation helpers (used by the operation catalog)


def get_annotation(element, source: str) -> Annotation | None:
    for ann in element.annotations:
        if ann.source == source:
            return ann
    return None


def set_annotation(element, source: str, details: dict[str, str]) -> Annotation:
    ann = get_annotation(element, source)
    if ann is None:
        ann = Annotation(source, dict(details))
        element.annotations.append(ann)
    else:
        ann.details = dict(details)
    return ann
