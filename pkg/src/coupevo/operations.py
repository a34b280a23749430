"""The coupled-operation catalog: 34 reusable operations.

Each entry fixes parameters, applicability constraints, the metamodel
adaptation and the instance migration. Importing this module fills the
catalog registry; the registration sequence is the catalog's stable order.
"""

from __future__ import annotations

import copy
from collections import Counter

from .catalog import MigrationContext, OperationSpec, ParamSpec, register
from .errors import MigrationError, UnresolvedRefError
from .instance import MObject, Ref
from .metamodel import (
    UNBOUNDED,
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
    all_features,
    default_value_fits,
    direct_subclasses,
    find_classifier,
    get_annotation,
    is_subtype,
    owner_class,
    resolve,
    set_annotation,
    subtree,
    supertype_closure,
    try_resolve,
    validate_metamodel,
)

# ---------------------------------------------------------------------------
# constraint building blocks


def _p(name, kind="ref", many=False, required=True):
    return ParamSpec(name, kind, many=many, required=required)


def _exists(param, expected, what):
    def fn(mm, args):
        el = try_resolve(mm, args[param])
        if el is None:
            return f"{args[param]!r} does not resolve"
        if not isinstance(el, expected):
            return f"{args[param]!r} is not {what}"
        return None

    label = what[0].upper() + what[1:].replace(" ", "")
    return (f"{label}Exists({param})", fn)


def _c(name, fn):
    return (name, fn)


def _feature_and_owner(mm, path):
    feat = resolve(mm, path)
    return owner_class(mm, path), feat


def _qname(pkg: Package, name: str) -> str:
    return f"{pkg.name}.{name}"


def _package_of(mm: Metamodel, qname: str) -> Package:
    return mm.package(qname.split(".", 1)[0])


def _fresh_feature_name(mm, class_q, name):
    """The name must be unused in the feature closure of the class and of
    every class below it (their closures grow too)."""
    for q in subtree(mm, class_q):
        if any(f.name == name for f in all_features(mm, q)):
            return f"{name!r} already present in the closure of {q}"
        cls = find_classifier(mm, q)
        if isinstance(cls, Class) and any(op.name == name for op in cls.operations):
            return f"{name!r} collides with an operation of {q}"
    return None


def _trial(mm, args, adapt_fn, rules):
    """Run the adaptation on a scratch copy and report violations of the
    given rules; used where a direct structural check would re-implement
    the validator."""
    scratch = copy.deepcopy(mm)
    try:
        adapt_fn(scratch, args)
    except Exception as exc:  # noqa: BLE001 - any failure means "not applicable"
        return f"adaptation not possible: {exc}"
    bad = [v for v in validate_metamodel(scratch) if v.rule in rules]
    if bad:
        return "; ".join(str(v) for v in bad)
    return None


def _feature_signature(feat: Feature) -> tuple:
    kind = "attribute" if isinstance(feat, Attribute) else "reference"
    sig = (kind, feat.name, feat.type, feat.lower_bound, feat.upper_bound,
           feat.changeable, feat.volatile, feat.ordered)
    if isinstance(feat, Attribute):
        return sig + (feat.identifier, feat.default_value)
    return sig + (feat.containment, feat.opposite)


def _parse_kv(entries, what):
    out = {}
    for entry in entries:
        key, eq, value = entry.partition("=")
        if not eq or not key:
            raise MigrationError("BadPair", f"{what} entry {entry!r} is not KEY=VALUE")
        out[key] = value
    return out


def _kv_wellformed(param, what):
    def fn(mm, args):
        for entry in args.get(param, []):
            if "=" not in entry or entry.startswith("="):
                return f"{what} entry {entry!r} is not KEY=VALUE"
        return None

    return (f"WellFormedPairs({param})", fn)


# ---------------------------------------------------------------------------
# migration building blocks


def _still_in_set(editor, obj) -> bool:
    try:
        editor.resource_of(obj)
        return True
    except Exception:  # noqa: BLE001
        return False


def _drop_slot(editor, obj, feat: Feature) -> None:
    """Remove one feature's slot; containment children are deleted with their
    subtrees, opposite back-references are cleaned up."""
    if isinstance(feat, Reference) and feat.containment:
        for child in list(obj.slots.get(feat.name, ())):
            if isinstance(child, MObject):
                editor.delete(child)
        obj.slots.pop(feat.name, None)
    elif isinstance(feat, Reference) and feat.opposite:
        opp_name = feat.opposite.rpartition(".")[2]
        me = editor.ref_to(obj)
        for value in obj.slots.pop(feat.name, ()):
            if isinstance(value, Ref):
                try:
                    target = editor.deref(value)
                except UnresolvedRefError:
                    continue
                editor.set_slot(target, opp_name, [b for b in target.slots.get(opp_name, ()) if b != me])
    else:
        obj.slots.pop(feat.name, None)


def _drop_lost_slots(ctx: MigrationContext, root_q: str) -> None:
    """Drop instance slots of every feature that left the closure of a class
    between the before and after metamodels (explicit, documented data loss)."""
    lost: dict[str, list[Feature]] = {}
    for q in subtree(ctx.before, root_q):
        after_names = {f.name for f in all_features(ctx.after, q)}
        gone = [f for f in all_features(ctx.before, q) if f.name not in after_names]
        if gone:
            lost[q] = gone
    for _, obj in list(ctx.editor.objects()):
        if obj.class_name not in lost or not _still_in_set(ctx.editor, obj):
            continue
        for feat in lost[obj.class_name]:
            _drop_slot(ctx.editor, obj, feat)


def _enforce_ref_compatibility(editor, after_mm, delegate_map=None) -> None:
    """After an inheritance change, reference values pointing at objects whose
    class left the feature's type are retargeted to their delegate (when one
    exists and fits) or dropped as documented data loss. Containment children
    and mandatory slots that cannot be preserved raise instead."""
    delegate_map = delegate_map or {}
    for _, obj in list(editor.objects()):
        feats = {f.name: f for f in all_features(after_mm, obj.class_name)}
        for name in sorted(obj.slots):
            feat = feats.get(name)
            if not isinstance(feat, Reference):
                continue
            values = obj.slots[name]
            kept = []
            for value in values:
                if isinstance(value, MObject):
                    if not is_subtype(after_mm, value.class_name, feat.type):
                        raise MigrationError(
                            "ValueWouldBeLost",
                            f"contained {value.id} is no longer a {feat.type}")
                    kept.append(value)
                elif isinstance(value, Ref):
                    target = editor.deref(value)
                    delegate = delegate_map.get(id(target))
                    if is_subtype(after_mm, target.class_name, feat.type):
                        kept.append(value)
                    elif delegate is not None and is_subtype(
                            after_mm, delegate.class_name, feat.type):
                        kept.append(editor.ref_to(delegate))
                else:
                    kept.append(value)
            if len(kept) < len(values) and len(kept) < feat.lower_bound:
                raise MigrationError(
                    "ValueWouldBeLost",
                    f"{obj.id}.{name} would drop below its lower bound")
            if kept != values:
                editor.set_slot(obj, name, kept)


def _fill_grown_defaults(ctx: MigrationContext, class_q: str) -> None:
    """After an inheritance change grows a closure, initialize newly mandatory
    attributes from their defaults so instances stay conforming."""
    for _, obj in list(ctx.editor.objects(class_q)):
        for feat in all_features(ctx.after, obj.class_name):
            if (isinstance(feat, Attribute) and feat.lower_bound >= 1
                    and feat.default_value is not None and feat.name not in obj.slots):
                obj.slots[feat.name] = [feat.default_value] * feat.lower_bound


def _no_mandatory_growth(mm, class_q, grown_features):
    for feat in grown_features:
        if feat.lower_bound >= 1 and not (
                isinstance(feat, Attribute) and feat.default_value is not None):
            return (f"inherited feature {feat.name!r} is mandatory without a default;"
                    " a custom migration is needed")
    return None


# ---------------------------------------------------------------------------
# 1. Add Super Type


def _ast_adapt(mm, args):
    resolve(mm, args["class"]).supertypes.append(args["supertype"])


def _ast_no_cycle(mm, args):
    if args["class"] == args["supertype"]:
        return "a class cannot be its own supertype"
    if is_subtype(mm, args["supertype"], args["class"]):
        return f"{args['supertype']} already inherits from {args['class']}"
    return None


def _ast_migrate(ctx):
    _fill_grown_defaults(ctx, ctx.args["class"])


register(OperationSpec(
    name="Add Super Type",
    doc="Append a supertype to a class; newly inherited mandatory attributes are initialized from their defaults.",
    params=(_p("class"), _p("supertype")),
    constraints=(
        _exists("class", Class, "class"),
        _exists("supertype", Class, "class"),
        _c("NotAlreadySupertype", lambda mm, args: (
            f"{args['supertype']} is already a supertype" if isinstance(
                try_resolve(mm, args["class"]), Class)
            and args["supertype"] in resolve(mm, args["class"]).supertypes else None)),
        _c("NoInheritanceCycle", _ast_no_cycle),
        _c("FeatureNameClash", lambda mm, args: _trial(
            mm, args, _ast_adapt, ("FeatureNameClash", "OperationNameClash"))),
        _c("MandatoryInheritedHasDefault", lambda mm, args: _no_mandatory_growth(
            mm, args["class"], all_features(mm, args["supertype"])
            if isinstance(try_resolve(mm, args["supertype"]), Class) else [])),
    ),
    adapt=_ast_adapt,
    migrate=_ast_migrate,
))


# ---------------------------------------------------------------------------
# 2. Remove Super Type


def _rst_adapt(mm, args):
    resolve(mm, args["class"]).supertypes.remove(args["supertype"])


def _rst_migrate(ctx):
    _drop_lost_slots(ctx, ctx.args["class"])
    _enforce_ref_compatibility(ctx.editor, ctx.after)


register(OperationSpec(
    name="Remove Super Type",
    doc="Remove a direct supertype; slots of features that leave the closure are deleted (documented data loss).",
    params=(_p("class"), _p("supertype")),
    constraints=(
        _exists("class", Class, "class"),
        _c("IsDirectSupertype", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["class"]), Class)
            and args["supertype"] in resolve(mm, args["class"]).supertypes
            else f"{args['supertype']} is not a direct supertype of {args['class']}")),
    ),
    adapt=_rst_adapt,
    migrate=_rst_migrate,
))


# ---------------------------------------------------------------------------
# 3. Create Attribute


def _ca_adapt(mm, args):
    cls = resolve(mm, args["class"])
    cls.features.append(Attribute(
        name=args["name"],
        type=args["type"],
        lower_bound=args.get("lower", 0),
        upper_bound=args.get("upper", 1),
        default_value=args.get("default"),
    ))


def _ca_bounds(mm, args):
    lower, upper = args.get("lower", 0), args.get("upper", 1)
    if lower < 0 or upper == 0 or (upper != UNBOUNDED and lower > upper):
        return f"bad bounds [{lower}..{upper}]"
    return None


def _ca_default(mm, args):
    default = args.get("default")
    if default is None:
        return None
    probe = Attribute(name=args["name"], type=args["type"])
    if not default_value_fits(mm, probe, default):
        return f"default {default!r} does not fit type {args['type']}"
    return None


def _ca_migrate(ctx):
    lower = ctx.args.get("lower", 0)
    if lower < 1:
        return
    default = ctx.args["default"]
    for _, obj in list(ctx.editor.objects(ctx.args["class"])):
        obj.slots[ctx.args["name"]] = [default] * lower


register(OperationSpec(
    name="Create Attribute",
    doc="Add an attribute to a class; a mandatory attribute needs a default, which every instance receives.",
    params=(_p("class"), _p("name", "string"), _p("type"),
            _p("lower", "literal", required=False), _p("upper", "literal", required=False),
            _p("default", "literal", required=False)),
    constraints=(
        _exists("class", Class, "class"),
        _exists("type", (DataType, Enumeration), "data type or enumeration"),
        _c("BoundsSane", _ca_bounds),
        _c("FreshFeatureName", lambda mm, args: _fresh_feature_name(mm, args["class"], args["name"])
            if isinstance(try_resolve(mm, args["class"]), Class) else "class missing"),
        _c("MandatoryNeedsDefault", lambda mm, args: (
            "a mandatory attribute needs a default value"
            if args.get("lower", 0) >= 1 and args.get("default") is None else None)),
        _c("DefaultMatchesType", _ca_default),
    ),
    adapt=_ca_adapt,
    migrate=_ca_migrate,
))


# ---------------------------------------------------------------------------
# 4. Create Class


def _cc_adapt(mm, args):
    pkg = resolve(mm, args["package"])
    pkg.classifiers.append(Class(
        name=args["name"],
        abstract=args.get("abstract", False),
        interface=args.get("interface", False),
        supertypes=list(args.get("supertypes", [])),
    ))


register(OperationSpec(
    name="Create Class",
    doc="Add a class to a package (metamodel-only: the new class has no instances yet).",
    params=(_p("package"), _p("name", "string"),
            _p("abstract", "flag", required=False), _p("interface", "flag", required=False),
            _p("supertypes", many=True, required=False)),
    constraints=(
        _exists("package", Package, "package"),
        _c("FreshClassifierName", lambda mm, args: (
            f"{args['name']!r} already names a classifier"
            if isinstance(try_resolve(mm, args["package"]), Package)
            and any(c.name == args["name"] for c in resolve(mm, args["package"]).classifiers)
            else None)),
        _c("SupertypesAreClasses", lambda mm, args: next(
            (f"{s!r} is not a class" for s in args.get("supertypes", [])
             if not isinstance(try_resolve(mm, s), Class)), None)),
        _c("FeatureNameClash", lambda mm, args: _trial(
            mm, args, _cc_adapt, ("FeatureNameClash", "DuplicateSupertype"))),
    ),
    adapt=_cc_adapt,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 5. Create Reference


def _cr_adapt(mm, args):
    cls = resolve(mm, args["class"])
    cls.features.append(Reference(
        name=args["name"],
        type=args["type"],
        lower_bound=args.get("lower", 0),
        upper_bound=args.get("upper", 1),
        containment=args.get("containment", False),
    ))


register(OperationSpec(
    name="Create Reference",
    doc="Add an optional reference to a class; a mandatory new reference would need a custom migration and is rejected.",
    params=(_p("class"), _p("name", "string"), _p("type"),
            _p("lower", "literal", required=False), _p("upper", "literal", required=False),
            _p("containment", "flag", required=False)),
    constraints=(
        _exists("class", Class, "class"),
        _exists("type", Class, "class"),
        _c("OptionalLowerBound", lambda mm, args: (
            "a new reference must have lower bound 0" if args.get("lower", 0) != 0 else None)),
        _c("BoundsSane", _ca_bounds),
        _c("FreshFeatureName", lambda mm, args: _fresh_feature_name(mm, args["class"], args["name"])
            if isinstance(try_resolve(mm, args["class"]), Class) else "class missing"),
    ),
    adapt=_cr_adapt,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 6. Delete Feature


def _df_adapt(mm, args):
    owner, feat = _feature_and_owner(mm, args["feature"])
    if isinstance(feat, Reference) and feat.opposite:
        partner = try_resolve(mm, feat.opposite)
        if isinstance(partner, Reference):
            partner.opposite = None
    owner.features.remove(feat)


def _df_migrate(ctx):
    owner_q = ctx.args["feature"].rpartition(".")[0]
    feat = resolve(ctx.before, ctx.args["feature"])
    for _, obj in list(ctx.editor.objects(owner_q)):
        if _still_in_set(ctx.editor, obj):
            _drop_slot(ctx.editor, obj, feat)


register(OperationSpec(
    name="Delete Feature",
    doc="Remove a feature from its class; all instance slots for it are dropped.",
    params=(_p("feature"),),
    constraints=(_exists("feature", Feature, "feature"),),
    adapt=_df_adapt,
    migrate=_df_migrate,
))


# ---------------------------------------------------------------------------
# 7. Delete Operation


def _do_adapt(mm, args):
    owner = owner_class(mm, args["operation"])
    sig = resolve(mm, args["operation"])
    owner.operations.remove(sig)


register(OperationSpec(
    name="Delete Operation",
    doc="Remove an operation signature from a class (metamodel-only).",
    params=(_p("operation"),),
    constraints=(_exists("operation", OperationSignature, "operation"),),
    adapt=_do_adapt,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 8. Document Metamodel Element


def _doc_adapt(mm, args):
    set_annotation(resolve(mm, args["element"]), "documentation", {"value": args["documentation"]})


register(OperationSpec(
    name="Document Metamodel Element",
    doc="Set or replace the documentation annotation on any metamodel element.",
    params=(_p("element"), _p("documentation", "string")),
    constraints=(
        _exists("element", (Package, Class, Enumeration, DataType, Feature, OperationSignature),
                "metamodel element"),
    ),
    adapt=_doc_adapt,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 9. Drop Attribute Identifier


register(OperationSpec(
    name="Drop Attribute Identifier",
    doc="Clear the identifier flag of an attribute (metamodel-only).",
    params=(_p("attribute"),),
    constraints=(
        _exists("attribute", Attribute, "attribute"),
        _c("IsIdentifier", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["attribute"]), Attribute)
            and resolve(mm, args["attribute"]).identifier
            else f"{args['attribute']} is not an identifier")),
    ),
    adapt=lambda mm, args: setattr(resolve(mm, args["attribute"]), "identifier", False),
    migrate=None,
))


# ---------------------------------------------------------------------------
# 10. Extract Super Class


def _esc_adapt(mm, args):
    paths = args["features"]
    owners = [owner_class(mm, p) for p in paths]
    feats = [resolve(mm, p) for p in paths]
    pkg = _package_of(mm, paths[0])
    new_cls = Class(args["name"], abstract=True)
    owners[0].features.remove(feats[0])
    new_cls.features.append(feats[0])
    for owner, feat in zip(owners[1:], feats[1:]):
        owner.features.remove(feat)
    pkg.classifiers.append(new_cls)
    new_q = _qname(pkg, args["name"])
    for owner in owners:
        owner.supertypes.append(new_q)


def _esc_equivalent(mm, args):
    feats = []
    for p in args["features"]:
        el = try_resolve(mm, p)
        if not isinstance(el, Feature):
            return f"{p!r} is not a feature"
        feats.append(el)
    signatures = {_feature_signature(f) for f in feats}
    if len(signatures) > 1:
        return "listed features differ in name, kind, type, bounds or flags"
    return None


def _esc_distinct_owners(mm, args):
    owners = []
    for p in args["features"]:
        if try_resolve(mm, p) is None:
            return f"{p!r} does not resolve"
        owners.append(p.rpartition(".")[0])
    if len(set(owners)) != len(owners):
        return "each listed feature must come from a different class"
    return None


register(OperationSpec(
    name="Extract Super Class",
    doc="Pull equal features of several classes up into a new abstract superclass.",
    params=(_p("name", "string"), _p("features", many=True)),
    constraints=(
        _c("AtLeastOneFeature", lambda mm, args: (
            "need at least one feature" if not args["features"] else None)),
        _c("FeaturesEquivalent", _esc_equivalent),
        _c("DistinctOwners", _esc_distinct_owners),
        _c("NoOpposites", lambda mm, args: next(
            (f"{p} has an opposite" for p in args["features"]
             if isinstance(try_resolve(mm, p), Reference) and resolve(mm, p).opposite), None)),
        _c("FreshClassifierName", lambda mm, args: (
            f"{args['name']!r} already names a classifier"
            if args["features"] and try_resolve(mm, args["features"][0]) is not None
            and any(c.name == args["name"]
                    for c in _package_of(mm, args["features"][0]).classifiers)
            else None)),
    ),
    adapt=_esc_adapt,
    migrate=None,  # slot keys already match by name
))


# ---------------------------------------------------------------------------
# 11. Extract Subclass


def _exs_adapt(mm, args):
    cls = resolve(mm, args["class"])
    pkg = _package_of(mm, args["class"])
    moved = [resolve(mm, p) for p in args["features"]]
    for feat in moved:
        cls.features.remove(feat)
    pkg.classifiers.append(Class(args["name"], supertypes=[args["class"]], features=moved))


def _exs_migrate(ctx):
    cls_q = ctx.args["class"]
    new_q = f"{_package_of(ctx.after, cls_q).name}.{ctx.args['name']}"
    moved_names = {p.rpartition(".")[2] for p in ctx.args["features"]}
    siblings = [q for q in subtree(ctx.before, cls_q) if q != cls_q]
    for _, obj in ctx.editor.objects():
        if obj.class_name in siblings:
            carried = sorted(moved_names & obj.slots.keys())
            if carried:
                raise MigrationError(
                    "ValueWouldBeLost",
                    f"instance {obj.id} of {obj.class_name} holds {carried}")
    for _, obj in list(ctx.editor.objects(cls_q, include_subtypes=False)):
        obj.class_name = new_q


register(OperationSpec(
    name="Extract Subclass",
    doc="Move features of a class into a new subclass; every direct instance is re-typed to it.",
    params=(_p("class"), _p("name", "string"), _p("features", many=True)),
    constraints=(
        _exists("class", Class, "class"),
        _c("AtLeastOneFeature", lambda mm, args: (
            "need at least one feature" if not args["features"] else None)),
        _c("FeaturesOwnedByClass", lambda mm, args: next(
            (f"{p!r} is not a feature of {args['class']}" for p in args["features"]
             if p.rpartition(".")[0] != args["class"] or not isinstance(try_resolve(mm, p), Feature)),
            None)),
        _c("FreshClassifierName", lambda mm, args: (
            f"{args['name']!r} already names a classifier"
            if isinstance(try_resolve(mm, args["class"]), Class)
            and any(c.name == args["name"] for c in _package_of(mm, args["class"]).classifiers)
            else None)),
    ),
    adapt=_exs_adapt,
    migrate=_exs_migrate,
))


# ---------------------------------------------------------------------------
# 12. Generalize Attribute / 13. Generalize Reference


def _widen_bounds(mm, args, feat):
    lower = args.get("lower", feat.lower_bound)
    upper = args.get("upper", feat.upper_bound)
    if lower > feat.lower_bound:
        return f"lower bound may only shrink ({feat.lower_bound} -> {lower})"
    if feat.upper_bound == UNBOUNDED and upper != UNBOUNDED:
        return "upper bound may only grow"
    if upper != UNBOUNDED and upper < feat.upper_bound:
        return f"upper bound may only grow ({feat.upper_bound} -> {upper})"
    if lower < 0:
        return "lower bound must be non-negative"
    return None


def _gen_apply(mm, args):
    feat = resolve(mm, args[_gen_key(args)])
    if "type" in args:
        feat.type = args["type"]
    if "lower" in args:
        feat.lower_bound = args["lower"]
    if "upper" in args:
        feat.upper_bound = args["upper"]


def _gen_key(args):
    return "attribute" if "attribute" in args else "reference"


def _ga_type_ok(mm, args):
    if "type" not in args:
        return None
    feat = try_resolve(mm, args["attribute"])
    if not isinstance(feat, Attribute):
        return "attribute missing"
    old, new = find_classifier(mm, feat.type), find_classifier(mm, args["type"])
    if isinstance(old, DataType) and isinstance(new, DataType) and old.primitive == new.primitive:
        return None
    if isinstance(old, Enumeration) and isinstance(new, Enumeration):
        if set(old.literals) <= set(new.literals):
            return None
        return f"{args['type']} does not cover the literals of {feat.type}"
    return f"{args['type']!r} does not generalize {feat.type!r}"


register(OperationSpec(
    name="Generalize Attribute",
    doc="Widen an attribute's bounds and/or move it to a literal-superset enumeration; all values stay valid.",
    params=(_p("attribute"), _p("type", required=False),
            _p("lower", "literal", required=False), _p("upper", "literal", required=False)),
    constraints=(
        _exists("attribute", Attribute, "attribute"),
        _c("SomethingToWiden", lambda mm, args: (
            None if any(k in args for k in ("type", "lower", "upper")) else "nothing to change")),
        _c("WidenedBounds", lambda mm, args: _widen_bounds(mm, args, resolve(mm, args["attribute"]))
            if isinstance(try_resolve(mm, args["attribute"]), Attribute) else "attribute missing"),
        _c("GeneralizedType", _ga_type_ok),
    ),
    adapt=_gen_apply,
    migrate=None,
))


def _gr_type_ok(mm, args):
    if "type" not in args:
        return None
    feat = try_resolve(mm, args["reference"])
    if not isinstance(feat, Reference):
        return "reference missing"
    if not isinstance(try_resolve(mm, args["type"]), Class):
        return f"{args['type']!r} is not a class"
    if not is_subtype(mm, feat.type, args["type"]):
        return f"{args['type']} is not a supertype of {feat.type}"
    return None


register(OperationSpec(
    name="Generalize Reference",
    doc="Widen a reference's bounds and/or retarget it to a superclass of its type.",
    params=(_p("reference"), _p("type", required=False),
            _p("lower", "literal", required=False), _p("upper", "literal", required=False)),
    constraints=(
        _exists("reference", Reference, "reference"),
        _c("SomethingToWiden", lambda mm, args: (
            None if any(k in args for k in ("type", "lower", "upper")) else "nothing to change")),
        _c("WidenedBounds", lambda mm, args: _widen_bounds(mm, args, resolve(mm, args["reference"]))
            if isinstance(try_resolve(mm, args["reference"]), Reference) else "reference missing"),
        _c("GeneralizedType", _gr_type_ok),
    ),
    adapt=_gen_apply,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 14. Inline Super Class


def _isc_adapt(mm, args):
    st_q = args["supertype"]
    st = resolve(mm, st_q)
    for sub_q in direct_subclasses(mm, st_q):
        sub = resolve(mm, sub_q)
        idx = sub.supertypes.index(st_q)
        spliced = [s for s in st.supertypes if s not in sub.supertypes]
        sub.supertypes[idx:idx + 1] = spliced
        sub.features[0:0] = [copy.deepcopy(f) for f in st.features]
    pkg = _package_of(mm, st_q)
    pkg.classifiers.remove(st)


def _isc_not_feature_type(mm, args):
    st_q = args["supertype"]
    for pkg in mm.packages:
        for c in pkg.classifiers:
            if isinstance(c, Class):
                for f in c.features:
                    if f.type == st_q:
                        return f"{pkg.name}.{c.name}.{f.name} is typed by {st_q}"
    return None


register(OperationSpec(
    name="Inline Super Class",
    doc="Copy an abstract superclass's own features into each direct subclass, splice its supertypes, delete it.",
    params=(_p("supertype"),),
    constraints=(
        _exists("supertype", Class, "class"),
        _c("IsAbstract", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["supertype"]), Class)
            and resolve(mm, args["supertype"]).abstract
            else f"{args['supertype']} is not abstract")),
        _c("NotAFeatureType", _isc_not_feature_type),
    ),
    adapt=_isc_adapt,
    migrate=None,  # closure names are preserved; the class had no instances
))


# ---------------------------------------------------------------------------
# 15. Make Class Abstract when Interface


def _mcai_migrate(ctx):
    offenders = [obj.id for _, obj in ctx.editor.objects(ctx.args["class"], include_subtypes=False)]
    if offenders:
        raise MigrationError("InstancesExist",
                             f"{ctx.args['class']} has direct instances: {offenders}")


register(OperationSpec(
    name="Make Class Abstract when Interface",
    doc="Mark an interface class abstract; fails at migration time if direct instances exist.",
    params=(_p("class"),),
    constraints=(
        _exists("class", Class, "class"),
        _c("IsInterface", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["class"]), Class)
            and resolve(mm, args["class"]).interface
            else f"{args['class']} is not an interface")),
        _c("NotAbstract", lambda mm, args: (
            f"{args['class']} is already abstract"
            if isinstance(try_resolve(mm, args["class"]), Class)
            and resolve(mm, args["class"]).abstract else None)),
    ),
    adapt=lambda mm, args: setattr(resolve(mm, args["class"]), "abstract", True),
    migrate=_mcai_migrate,
))


# ---------------------------------------------------------------------------
# 16. Make Reference Containment


def _mrc_migrate(ctx):
    path = ctx.args["reference"]
    owner_q = path.rpartition(".")[0]
    feat = resolve(ctx.after, path)
    editor = ctx.editor

    owners = [(res, obj) for res, obj in editor.objects(owner_q) if obj.slots.get(feat.name)]
    counts = Counter()
    for _, obj in owners:
        for value in obj.slots[feat.name]:
            if isinstance(value, Ref):
                counts[value.key()] += 1
    shared = sorted(f"{k[0]}#{k[1]}" for k, n in counts.items() if n > 1)
    if shared:
        raise MigrationError("SharedTarget",
                             f"targets referenced by several owners: {shared}")

    for _, obj in owners:
        i = 0
        while i < len(obj.slots.get(feat.name, [])):
            value = obj.slots[feat.name][i]
            if isinstance(value, MObject):
                i += 1
                continue
            target = editor.deref(value)
            ancestor = obj
            while ancestor is not None:
                if ancestor is target:
                    raise MigrationError(
                        "ContainmentCycle",
                        f"moving {target.id} under {obj.id} would close a containment cycle")
                parent = editor.container_of(ancestor)
                ancestor = parent[0] if parent else None
            source_res = editor.resource_of(target)
            editor.detach(target)
            target_res = editor.resource_of(obj)
            if source_res is not target_res:
                editor._rehome_detached(target, source_res.uri, target_res)
            obj.slots[feat.name][i] = target
            i += 1


register(OperationSpec(
    name="Make Reference Containment",
    doc="Turn a reference into a containment; referenced objects are re-parented under their single referrer.",
    params=(_p("reference"),),
    constraints=(
        _exists("reference", Reference, "reference"),
        _c("NotContainment", lambda mm, args: (
            f"{args['reference']} is already a containment"
            if isinstance(try_resolve(mm, args["reference"]), Reference)
            and resolve(mm, args["reference"]).containment else None)),
        _c("NoOpposite", lambda mm, args: (
            f"{args['reference']} has an opposite"
            if isinstance(try_resolve(mm, args["reference"]), Reference)
            and resolve(mm, args["reference"]).opposite else None)),
    ),
    adapt=lambda mm, args: setattr(resolve(mm, args["reference"]), "containment", True),
    migrate=_mrc_migrate,
))


# ---------------------------------------------------------------------------
# 17./18. Not Changeable <-> Suppressed Set Visibility

_GENMODEL = "genmodel"
_SSV_KEY = "suppressedSetVisibility"


def _ncssv_adapt(mm, args):
    feat = resolve(mm, args["feature"])
    feat.changeable = True
    ann = get_annotation(feat, _GENMODEL)
    if ann is None:
        feat.annotations.append(Annotation(_GENMODEL, {_SSV_KEY: "true"}))
    else:
        ann.details[_SSV_KEY] = "true"


def _ssvnc_adapt(mm, args):
    feat = resolve(mm, args["feature"])
    feat.changeable = False
    ann = get_annotation(feat, _GENMODEL)
    ann.details.pop(_SSV_KEY, None)
    if not ann.details:
        feat.annotations.remove(ann)


register(OperationSpec(
    name="Not Changeable to Suppressed Set Visibility",
    doc="Re-encode a non-changeable feature as changeable with suppressed set visibility (metamodel-only).",
    params=(_p("feature"),),
    constraints=(
        _exists("feature", Feature, "feature"),
        _c("NotChangeable", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["feature"]), Feature)
            and not resolve(mm, args["feature"]).changeable
            else f"{args['feature']} is changeable")),
    ),
    adapt=_ncssv_adapt,
    migrate=None,
))

register(OperationSpec(
    name="Suppressed Set Visibility to Not Changeable",
    doc="Exact inverse of the suppressed-set-visibility encoding (metamodel-only).",
    params=(_p("feature"),),
    constraints=(
        _exists("feature", Feature, "feature"),
        _c("IsChangeable", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["feature"]), Feature)
            and resolve(mm, args["feature"]).changeable
            else f"{args['feature']} is not changeable")),
        _c("HasSuppressedSetVisibility", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["feature"]), Feature)
            and (get_annotation(resolve(mm, args["feature"]), _GENMODEL) or Annotation("")).details.get(_SSV_KEY) == "true"
            else f"{args['feature']} does not suppress set visibility")),
    ),
    adapt=_ssvnc_adapt,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 19. Push Down Feature


def _pdf_adapt(mm, args):
    owner, feat = _feature_and_owner(mm, args["feature"])
    owner.features.remove(feat)
    for target_q in args["targets"]:
        resolve(mm, target_q).features.append(copy.deepcopy(feat))


def _pdf_migrate(ctx):
    owner_q = ctx.args["feature"].rpartition(".")[0]
    name = ctx.args["feature"].rpartition(".")[2]
    allowed = set()
    for target_q in ctx.args["targets"]:
        allowed.update(subtree(ctx.after, target_q))
    for _, obj in ctx.editor.objects(owner_q):
        # iteration uses the after-metamodel, where the owner subtree is unchanged
        if obj.class_name not in allowed and name in obj.slots:
            raise MigrationError(
                "ValueWouldBeLost",
                f"instance {obj.id} of {obj.class_name} holds {name!r} outside all targets")


register(OperationSpec(
    name="Push Down Feature",
    doc="Move a feature from a class into selected direct subclasses; values outside the targets must be unset.",
    params=(_p("feature"), _p("targets", many=True)),
    constraints=(
        _exists("feature", Feature, "feature"),
        _c("TargetsNonempty", lambda mm, args: "need at least one target" if not args["targets"] else None),
        _c("TargetsDistinct", lambda mm, args: (
            "duplicate targets" if len(set(args["targets"])) != len(args["targets"]) else None)),
        _c("TargetsAreDirectSubclasses", lambda mm, args: next(
            (f"{t} is not a direct subclass of the feature's owner" for t in args["targets"]
             if not isinstance(try_resolve(mm, t), Class)
             or args["feature"].rpartition(".")[0] not in resolve(mm, t).supertypes), None)),
        _c("NoOpposite", lambda mm, args: (
            f"{args['feature']} has an opposite"
            if isinstance(try_resolve(mm, args["feature"]), Reference)
            and resolve(mm, args["feature"]).opposite else None)),
    ),
    adapt=_pdf_adapt,
    migrate=_pdf_migrate,
))


# ---------------------------------------------------------------------------
# 20. Specialize Reference Type


def _srt_migrate(ctx):
    path = ctx.args["reference"]
    owner_q = path.rpartition(".")[0]
    name = path.rpartition(".")[2]
    new_type = ctx.args["type"]
    offenders = []
    for _, obj in ctx.editor.objects(owner_q):
        for value in obj.slots.get(name, ()):
            target = value if isinstance(value, MObject) else ctx.editor.deref(value)
            if not is_subtype(ctx.after, target.class_name, new_type):
                offenders.append(f"{obj.id}.{name} -> {target.id}:{target.class_name}")
    if offenders:
        raise MigrationError("TypeNotSpecialized",
                             f"values not instances of {new_type}: {offenders}")


register(OperationSpec(
    name="Specialize Reference Type",
    doc="Retarget a reference to a subclass of its type; every existing value must already be an instance of it.",
    params=(_p("reference"), _p("type")),
    constraints=(
        _exists("reference", Reference, "reference"),
        _exists("type", Class, "class"),
        _c("TypeNotSpecialized", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["reference"]), Reference)
            and isinstance(try_resolve(mm, args["type"]), Class)
            and args["type"] != resolve(mm, args["reference"]).type
            and is_subtype(mm, args["type"], resolve(mm, args["reference"]).type)
            else f"{args['type']} is not a proper subclass of the current type")),
    ),
    adapt=lambda mm, args: setattr(resolve(mm, args["reference"]), "type", args["type"]),
    migrate=_srt_migrate,
))


# ---------------------------------------------------------------------------
# 21. Specialize Super Type


def _sst_adapt(mm, args):
    cls = resolve(mm, args["class"])
    idx = cls.supertypes.index(args["old"])
    cls.supertypes[idx] = args["new"]


def _sst_growth(mm, args):
    old, new = try_resolve(mm, args.get("old", "")), try_resolve(mm, args.get("new", ""))
    if not isinstance(old, Class) or not isinstance(new, Class):
        return "old/new supertypes missing"
    old_names = {f.name for f in all_features(mm, args["old"])}
    grown = [f for f in all_features(mm, args["new"]) if f.name not in old_names]
    return _no_mandatory_growth(mm, args["class"], grown)


register(OperationSpec(
    name="Specialize Super Type",
    doc="Replace a direct supertype by one of its subclasses; the closure only grows.",
    params=(_p("class"), _p("old"), _p("new")),
    constraints=(
        _exists("class", Class, "class"),
        _exists("new", Class, "class"),
        _c("OldIsDirectSupertype", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["class"]), Class)
            and args["old"] in resolve(mm, args["class"]).supertypes
            else f"{args['old']} is not a direct supertype of {args['class']}")),
        _c("NewSpecializesOld", lambda mm, args: (
            None if args["new"] != args["old"] and is_subtype(mm, args["new"], args["old"])
            else f"{args['new']} is not a proper subclass of {args['old']}")),
        _c("NoInheritanceCycle", lambda mm, args: (
            f"{args['new']} inherits from {args['class']}"
            if is_subtype(mm, args["new"], args["class"]) else None)),
        _c("FeatureNameClash", lambda mm, args: _trial(
            mm, args, _sst_adapt, ("FeatureNameClash", "OperationNameClash", "DuplicateSupertype"))),
        _c("MandatoryInheritedHasDefault", _sst_growth),
    ),
    adapt=_sst_adapt,
    migrate=lambda ctx: _fill_grown_defaults(ctx, ctx.args["class"]),
))


# ---------------------------------------------------------------------------
# 22. Unfold Super Class


def _usc_adapt(mm, args):
    cls = resolve(mm, args["class"])
    copies = [copy.deepcopy(f) for f in all_features(mm, args["supertype"])]
    cls.supertypes.remove(args["supertype"])
    cls.features[0:0] = copies


def _usc_clash(mm, args):
    cls = try_resolve(mm, args["class"])
    if not isinstance(cls, Class) or args["supertype"] not in cls.supertypes:
        return "class/supertype missing"
    return _trial(mm, args, _usc_adapt, ("FeatureNameClash", "OperationNameClash"))


register(OperationSpec(
    name="Unfold Super Class",
    doc="Copy a supertype's full feature closure into the class and drop the inheritance link; the supertype survives.",
    params=(_p("class"), _p("supertype")),
    constraints=(
        _exists("class", Class, "class"),
        _c("IsDirectSupertype", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["class"]), Class)
            and args["supertype"] in resolve(mm, args["class"]).supertypes
            else f"{args['supertype']} is not a direct supertype of {args['class']}")),
        _c("NoOppositesInClosure", lambda mm, args: next(
            (f"{f.name} has an opposite" for f in (
                all_features(mm, args["supertype"])
                if isinstance(try_resolve(mm, args["supertype"]), Class) else [])
             if isinstance(f, Reference) and f.opposite), None)),
        _c("FeatureNameClash", _usc_clash),
    ),
    adapt=_usc_adapt,
    # slot keys are preserved by name, but instances stop being supertype
    # instances, so references typed by it must be swept
    migrate=lambda ctx: _enforce_ref_compatibility(ctx.editor, ctx.after),
))


# ---------------------------------------------------------------------------
# 23. Change Namespace URI


def _cnu_migrate(ctx):
    old = resolve(ctx.before, ctx.args["package"]).ns_uri
    if ctx.rset.ns_uri == old:
        ctx.rset.ns_uri = ctx.args["uri"]


register(OperationSpec(
    name="Change Namespace URI",
    doc="Stamp a new namespace URI on a package and on every model file header; defines a release boundary.",
    params=(_p("package"), _p("uri", "string")),
    constraints=(
        _exists("package", Package, "package"),
        _c("NonEmptyUri", lambda mm, args: "the new URI must not be empty" if not args["uri"] else None),
        _c("UriChanged", lambda mm, args: (
            "the new URI equals the current one"
            if isinstance(try_resolve(mm, args["package"]), Package)
            and resolve(mm, args["package"]).ns_uri == args["uri"] else None)),
        _c("UriFresh", lambda mm, args: next(
            (f"package {p.name} already uses {args['uri']!r}" for p in mm.packages
             if p.ns_uri == args["uri"] and p.name != args["package"]), None)),
    ),
    adapt=lambda mm, args: setattr(resolve(mm, args["package"]), "ns_uri", args["uri"]),
    migrate=_cnu_migrate,
))


# ---------------------------------------------------------------------------
# 24./25./26. Annotations


def _ann_target(mm, args, key="element"):
    return resolve(mm, args[key])


register(OperationSpec(
    name="Create Annotation",
    doc="Attach a new annotation source with details to any metamodel element.",
    params=(_p("element"), _p("source", "string"), _p("details", "string", many=True, required=False)),
    constraints=(
        _exists("element", (Package, Class, Enumeration, DataType, Feature, OperationSignature),
                "metamodel element"),
        _c("SourceFresh", lambda mm, args: (
            f"annotation {args['source']!r} already exists"
            if try_resolve(mm, args["element"]) is not None
            and get_annotation(resolve(mm, args["element"]), args["source"]) is not None
            else None)),
        _kv_wellformed("details", "details"),
    ),
    adapt=lambda mm, args: _ann_target(mm, args).annotations.append(
        Annotation(args["source"], _parse_kv(args.get("details", []), "details"))),
    migrate=None,
))

register(OperationSpec(
    name="Delete Annotation",
    doc="Remove an annotation source from an element.",
    params=(_p("element"), _p("source", "string")),
    constraints=(
        _exists("element", (Package, Class, Enumeration, DataType, Feature, OperationSignature),
                "metamodel element"),
        _c("AnnotationExists", lambda mm, args: (
            None if try_resolve(mm, args["element"]) is not None
            and get_annotation(resolve(mm, args["element"]), args["source"]) is not None
            else f"no annotation {args['source']!r}")),
    ),
    adapt=lambda mm, args: _ann_target(mm, args).annotations.remove(
        get_annotation(_ann_target(mm, args), args["source"])),
    migrate=None,
))


def _ma_adapt(mm, args):
    src = resolve(mm, args["from"])
    dst = resolve(mm, args["to"])
    ann = get_annotation(src, args["source"])
    src.annotations.remove(ann)
    dst.annotations.append(ann)


register(OperationSpec(
    name="Move Annotation",
    doc="Move an annotation from one element to another, preserving its details.",
    params=(_p("from"), _p("to"), _p("source", "string")),
    constraints=(
        _exists("from", (Package, Class, Enumeration, DataType, Feature, OperationSignature),
                "metamodel element"),
        _exists("to", (Package, Class, Enumeration, DataType, Feature, OperationSignature),
                "metamodel element"),
        _c("DistinctElements", lambda mm, args: (
            "source and target are the same element" if args["from"] == args["to"] else None)),
        _c("AnnotationExists", lambda mm, args: (
            None if try_resolve(mm, args["from"]) is not None
            and get_annotation(resolve(mm, args["from"]), args["source"]) is not None
            else f"no annotation {args['source']!r} at {args['from']}")),
        _c("SourceFreshAtTarget", lambda mm, args: (
            f"annotation {args['source']!r} already exists at {args['to']}"
            if try_resolve(mm, args["to"]) is not None
            and get_annotation(resolve(mm, args["to"]), args["source"]) is not None
            else None)),
    ),
    adapt=_ma_adapt,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 27. Create Enumeration


register(OperationSpec(
    name="Create Enumeration",
    doc="Add an enumeration with the given literals to a package (metamodel-only).",
    params=(_p("package"), _p("name", "string"), _p("literals", "string", many=True)),
    constraints=(
        _exists("package", Package, "package"),
        _c("FreshClassifierName", lambda mm, args: (
            f"{args['name']!r} already names a classifier"
            if isinstance(try_resolve(mm, args["package"]), Package)
            and any(c.name == args["name"] for c in resolve(mm, args["package"]).classifiers)
            else None)),
        _c("LiteralsUnique", lambda mm, args: (
            "duplicate literals" if len(set(args["literals"])) != len(args["literals"]) else None)),
    ),
    adapt=lambda mm, args: resolve(mm, args["package"]).classifiers.append(
        Enumeration(args["name"], list(args["literals"]))),
    migrate=None,
))


# ---------------------------------------------------------------------------
# 28./29. GMF Constraints

_GMF_SOURCE = "gmf.constraint"


register(OperationSpec(
    name="Create GMF Constraint",
    doc="Attach a constraint body annotation to an element (metamodel-only).",
    params=(_p("element"), _p("body", "string")),
    constraints=(
        _exists("element", (Package, Class, Enumeration, DataType, Feature, OperationSignature),
                "metamodel element"),
        _c("NoConstraintYet", lambda mm, args: (
            f"{args['element']} already carries a constraint"
            if try_resolve(mm, args["element"]) is not None
            and get_annotation(resolve(mm, args["element"]), _GMF_SOURCE) is not None
            else None)),
    ),
    adapt=lambda mm, args: _ann_target(mm, args).annotations.append(
        Annotation(_GMF_SOURCE, {"body": args["body"]})),
    migrate=None,
))

def _cgc_adapt(mm, args):
    get_annotation(_ann_target(mm, args), _GMF_SOURCE).details["body"] = args["body"]


register(OperationSpec(
    name="Change GMF Constraint",
    doc="Replace the body of an element's constraint annotation (metamodel-only).",
    params=(_p("element"), _p("body", "string")),
    constraints=(
        _exists("element", (Package, Class, Enumeration, DataType, Feature, OperationSignature),
                "metamodel element"),
        _c("ConstraintExists", lambda mm, args: (
            None if try_resolve(mm, args["element"]) is not None
            and get_annotation(resolve(mm, args["element"]), _GMF_SOURCE) is not None
            else f"{args['element']} carries no constraint")),
    ),
    adapt=_cgc_adapt,
    migrate=None,
))


# ---------------------------------------------------------------------------
# 30. Make Feature Volatile


def _mfv_adapt(mm, args):
    feat = resolve(mm, args["feature"])
    feat.volatile = True
    feat.changeable = False


def _mfv_migrate(ctx):
    owner_q = ctx.args["feature"].rpartition(".")[0]
    feat = resolve(ctx.before, ctx.args["feature"])
    for _, obj in list(ctx.editor.objects(owner_q)):
        if _still_in_set(ctx.editor, obj):
            _drop_slot(ctx.editor, obj, feat)


register(OperationSpec(
    name="Make Feature Volatile",
    doc="Mark a feature volatile (derived); stored instance values are deleted.",
    params=(_p("feature"),),
    constraints=(
        _exists("feature", Feature, "feature"),
        _c("NotVolatile", lambda mm, args: (
            f"{args['feature']} is already volatile"
            if isinstance(try_resolve(mm, args["feature"]), Feature)
            and resolve(mm, args["feature"]).volatile else None)),
    ),
    adapt=_mfv_adapt,
    migrate=_mfv_migrate,
))


# ---------------------------------------------------------------------------
# 31. Replace Enumeration


def _re_mapping(args):
    return _parse_kv(args["mapping"], "mapping")


def _re_valid(mm, args):
    attr = try_resolve(mm, args["attribute"])
    if not isinstance(attr, Attribute):
        return "attribute missing"
    old = find_classifier(mm, attr.type)
    new = try_resolve(mm, args["enum"])
    if not isinstance(old, Enumeration):
        return f"{args['attribute']} is not typed by an enumeration"
    if not isinstance(new, Enumeration):
        return f"{args['enum']} is not an enumeration"
    try:
        mapping = _re_mapping(args)
    except MigrationError as exc:
        return str(exc)
    for key, value in mapping.items():
        if key not in old.literals:
            return f"mapped literal {key!r} not in {attr.type}"
        if value not in new.literals:
            return f"target literal {value!r} not in {args['enum']}"
    return None


def _re_default_mapped(mm, args):
    attr = try_resolve(mm, args["attribute"])
    if not isinstance(attr, Attribute) or attr.default_value is None:
        return None
    try:
        mapping = _re_mapping(args)
    except MigrationError:
        return None  # reported by MappingValid
    if attr.default_value not in mapping:
        return f"default {attr.default_value!r} is not mapped"
    return None


def _re_adapt(mm, args):
    attr = resolve(mm, args["attribute"])
    mapping = _re_mapping(args)
    if attr.default_value is not None:
        attr.default_value = mapping[attr.default_value]
    attr.type = args["enum"]


def _re_migrate(ctx):
    owner_q = ctx.args["attribute"].rpartition(".")[0]
    name = ctx.args["attribute"].rpartition(".")[2]
    mapping = _re_mapping(ctx.args)
    for _, obj in ctx.editor.objects(owner_q):
        if name not in obj.slots:
            continue
        new_values = []
        for value in obj.slots[name]:
            if value not in mapping:
                raise MigrationError("UnmappedLiteral",
                                     f"instance {obj.id} holds unmapped literal {value!r}")
            new_values.append(mapping[value])
        obj.slots[name] = new_values


register(OperationSpec(
    name="Replace Enumeration",
    doc="Retype an enumeration attribute to another enumeration, mapping each literal.",
    params=(_p("attribute"), _p("enum"), _p("mapping", "string", many=True)),
    constraints=(
        _exists("attribute", Attribute, "attribute"),
        _exists("enum", Enumeration, "enumeration"),
        _c("MappingValid", _re_valid),
        _c("DefaultMapped", _re_default_mapped),
    ),
    adapt=_re_adapt,
    migrate=_re_migrate,
))


# ---------------------------------------------------------------------------
# 32. Enumeration to Sub Classes


def _e2s_enum(mm, args):
    attr = try_resolve(mm, args["attribute"])
    if isinstance(attr, Attribute):
        enum = find_classifier(mm, attr.type)
        if isinstance(enum, Enumeration):
            return enum
    return None


def _e2s_adapt(mm, args):
    cls = resolve(mm, args["class"])
    attr = resolve(mm, args["attribute"])
    enum = _e2s_enum(mm, args)
    pkg = _package_of(mm, args["class"])
    for literal in enum.literals:
        pkg.classifiers.append(Class(f"{cls.name}_{literal}", supertypes=[args["class"]]))
    cls.features.remove(attr)
    cls.abstract = True


def _e2s_migrate(ctx):
    cls_q = ctx.args["class"]
    name = ctx.args["attribute"].rpartition(".")[2]
    attr = resolve(ctx.before, ctx.args["attribute"])
    for _, obj in list(ctx.editor.objects(cls_q, include_subtypes=False)):
        values = obj.slots.get(name, [])
        literal = values[0] if values else attr.default_value
        if literal is None:
            raise MigrationError(
                "MissingValue",
                f"instance {obj.id} has no {name!r} value and the attribute has no default")
        obj.class_name = f"{cls_q}_{literal}"
        obj.slots.pop(name, None)


register(OperationSpec(
    name="Enumeration to Sub Classes",
    doc="Replace an enumeration attribute by one subclass per literal; instances are re-typed by their value.",
    params=(_p("class"), _p("attribute")),
    constraints=(
        _exists("class", Class, "class"),
        _exists("attribute", Attribute, "attribute"),
        _c("AttributeOwnedByClass", lambda mm, args: (
            None if args["attribute"].rpartition(".")[0] == args["class"]
            else f"{args['attribute']} is not owned by {args['class']}")),
        _c("SingleValued", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["attribute"]), Attribute)
            and resolve(mm, args["attribute"]).upper_bound == 1
            else f"{args['attribute']} is not single-valued")),
        _c("TypedByEnumeration", lambda mm, args: (
            None if _e2s_enum(mm, args) is not None
            else f"{args['attribute']} is not typed by an enumeration")),
        _c("EnumerationHasLiterals", lambda mm, args: (
            None if (_e2s_enum(mm, args) or Enumeration("")).literals
            else "the enumeration has no literals")),
        _c("FreshSubclassNames", lambda mm, args: next(
            (f"classifier {resolve(mm, args['class']).name}_{lit} already exists"
             for lit in (_e2s_enum(mm, args) or Enumeration("")).literals
             if isinstance(try_resolve(mm, args["class"]), Class)
             and try_resolve(mm, f"{args['class']}_{lit}") is not None), None)),
        _c("NoSubclasses", lambda mm, args: (
            f"{args['class']} already has subclasses: {direct_subclasses(mm, args['class'])}"
            if direct_subclasses(mm, args["class"]) else None)),
    ),
    adapt=_e2s_adapt,
    migrate=_e2s_migrate,
))


# ---------------------------------------------------------------------------
# 33. Sub Classes to Enumeration


def _s2e_literal(cls_name: str, sub_name: str) -> str:
    prefix = cls_name + "_"
    return sub_name[len(prefix):] if sub_name.startswith(prefix) else sub_name


def _s2e_literals(mm, args):
    cls = resolve(mm, args["class"])
    return [
        _s2e_literal(cls.name, sub_q.rpartition(".")[2])
        for sub_q in direct_subclasses(mm, args["class"])
    ]


def _s2e_pick_enum(mm, args):
    """An existing enumeration with exactly the derived literals is reused;
    otherwise a fresh one is created, which keeps inverse round trips exact."""
    pkg = _package_of(mm, args["class"])
    literals = _s2e_literals(mm, args)
    for c in pkg.classifiers:
        if isinstance(c, Enumeration) and c.literals == literals:
            return c, False
    cls = resolve(mm, args["class"])
    attr = args["attribute"]
    fresh = f"{cls.name}{attr[0].upper()}{attr[1:]}"
    return Enumeration(fresh, literals), True


def _s2e_adapt(mm, args):
    cls = resolve(mm, args["class"])
    pkg = _package_of(mm, args["class"])
    subs = direct_subclasses(mm, args["class"])
    enum, created = _s2e_pick_enum(mm, args)
    if created:
        pkg.classifiers.append(enum)
    cls.features.append(Attribute(
        name=args["attribute"], type=_qname(pkg, enum.name), lower_bound=1, upper_bound=1))
    cls.abstract = False
    for sub_q in subs:
        pkg.classifiers.remove(resolve(mm, sub_q))


def _s2e_migrate(ctx):
    cls_q = ctx.args["class"]
    cls = resolve(ctx.before, cls_q)
    for sub_q in direct_subclasses(ctx.before, cls_q):
        literal = _s2e_literal(cls.name, sub_q.rpartition(".")[2])
        for _, obj in list(ctx.editor.objects(sub_q, include_subtypes=False)):
            obj.class_name = cls_q
            obj.slots[ctx.args["attribute"]] = [literal]


def _s2e_subs_ok(mm, args):
    subs = direct_subclasses(mm, args["class"])
    if not subs:
        return f"{args['class']} has no direct subclasses"
    for sub_q in subs:
        sub = resolve(mm, sub_q)
        if direct_subclasses(mm, sub_q):
            return f"{sub_q} is not a leaf class"
        if sub.features:
            return f"{sub_q} declares its own features"
        if sub.supertypes != [args["class"]]:
            return f"{sub_q} has supertypes besides {args['class']}"
    return None


def _s2e_unreferenced(mm, args):
    subs = set(direct_subclasses(mm, args["class"]))
    for pkg in mm.packages:
        for c in pkg.classifiers:
            if isinstance(c, Class):
                for f in c.features:
                    if f.type in subs:
                        return f"{pkg.name}.{c.name}.{f.name} is typed by a subclass"
    return None


register(OperationSpec(
    name="Sub Classes to Enumeration",
    doc="Fold leaf subclasses of an abstract class back into an enumeration attribute; instances are re-typed.",
    params=(_p("class"), _p("attribute", "string")),
    constraints=(
        _exists("class", Class, "class"),
        _c("IsAbstract", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["class"]), Class)
            and resolve(mm, args["class"]).abstract
            else f"{args['class']} is not abstract")),
        _c("SubclassesAreFoldable", lambda mm, args: _s2e_subs_ok(mm, args)
            if isinstance(try_resolve(mm, args["class"]), Class) else "class missing"),
        _c("SubclassesUnreferenced", lambda mm, args: _s2e_unreferenced(mm, args)
            if isinstance(try_resolve(mm, args["class"]), Class) else "class missing"),
        _c("FreshAttributeName", lambda mm, args: _fresh_feature_name(mm, args["class"], args["attribute"])
            if isinstance(try_resolve(mm, args["class"]), Class) else "class missing"),
        _c("DerivedLiteralsUnique", lambda mm, args: (
            "derived literals collide" if isinstance(try_resolve(mm, args["class"]), Class)
            and len(set(_s2e_literals(mm, args))) != len(_s2e_literals(mm, args)) else None)),
        _c("EnumerationAvailable", lambda mm, args: (
            None if not isinstance(try_resolve(mm, args["class"]), Class)
            or _s2e_pick_enum(mm, args)[1] is False
            or try_resolve(mm, f"{_package_of(mm, args['class']).name}."
                               f"{_s2e_pick_enum(mm, args)[0].name}") is None
            else f"classifier {_s2e_pick_enum(mm, args)[0].name!r} already exists")),
    ),
    adapt=_s2e_adapt,
    migrate=_s2e_migrate,
))


# ---------------------------------------------------------------------------
# 34. Inheritance to Delegation


def _itd_adapt(mm, args):
    cls = resolve(mm, args["class"])
    cls.supertypes.remove(args["supertype"])
    cls.features.append(Reference(
        name=args["reference"], type=args["supertype"],
        lower_bound=1, upper_bound=1, containment=True))


def _itd_migrate(ctx):
    cls_q = ctx.args["class"]
    ref_name = ctx.args["reference"]
    st_q = ctx.args["supertype"]
    moved: dict[str, list[str]] = {}
    for q in subtree(ctx.before, cls_q):
        after_names = {f.name for f in all_features(ctx.after, q)}
        moved[q] = sorted(f.name for f in all_features(ctx.before, q)
                          if f.name not in after_names)
    delegates: dict[int, MObject] = {}
    for res, obj in list(ctx.editor.objects(cls_q)):
        delegate = MObject(ctx.editor.fresh_id(res, f"{obj.id}_{ref_name}"), st_q)
        for name in moved.get(obj.class_name, ()):
            if name in obj.slots:
                delegate.slots[name] = obj.slots.pop(name)
        obj.slots[ref_name] = [delegate]
        delegates[id(obj)] = delegate
    # references that expected the supertype facet now go to the delegate
    _enforce_ref_compatibility(ctx.editor, ctx.after, delegates)


def _itd_moved_no_opposites(mm, args):
    cls = try_resolve(mm, args["class"])
    if not isinstance(cls, Class) or args["supertype"] not in cls.supertypes:
        return "class/supertype missing"
    for f in all_features(mm, args["supertype"]):
        if isinstance(f, Reference) and f.opposite:
            return f"inherited feature {f.name!r} has an opposite"
    return None


register(OperationSpec(
    name="Inheritance to Delegation",
    doc="Replace inheritance by a mandatory containment reference; inherited slots move into a fresh delegate object.",
    params=(_p("class"), _p("supertype"), _p("reference", "string")),
    constraints=(
        _exists("class", Class, "class"),
        _c("IsDirectSupertype", lambda mm, args: (
            None if isinstance(try_resolve(mm, args["class"]), Class)
            and args["supertype"] in resolve(mm, args["class"]).supertypes
            else f"{args['supertype']} is not a direct supertype of {args['class']}")),
        _c("SupertypeConcrete", lambda mm, args: (
            f"{args['supertype']} is abstract and cannot be instantiated as a delegate"
            if isinstance(try_resolve(mm, args["supertype"]), Class)
            and resolve(mm, args["supertype"]).abstract else None)),
        _c("FreshFeatureName", lambda mm, args: _fresh_feature_name(mm, args["class"], args["reference"])
            if isinstance(try_resolve(mm, args["class"]), Class) else "class missing"),
        _c("MovedFeaturesNoOpposites", _itd_moved_no_opposites),
    ),
    adapt=_itd_adapt,
    migrate=_itd_migrate,
))
