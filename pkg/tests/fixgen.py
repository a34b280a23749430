"""Randomized small fixtures for the per-operation transaction suite.

For every catalog operation this module can produce, from a seeded RNG,
a (metamodel, model set, arguments) triple whose constraints all pass and
whose migration succeeds, plus a companion triple violating one constraint.
The suite then asserts the transaction contract: applicable operations leave
a conforming result, failing ones leave the inputs untouched.
"""

from __future__ import annotations

import copy
import random

from coupevo.catalog import (
    OperationApplication,
    apply_coupled,
    check_applicability,
    get_operation,
)
from coupevo.errors import ConstraintViolationError, MigrationError
from coupevo.instance import (
    MObject,
    ModelEditor,
    Ref,
    Resource,
    ResourceSet,
    check_conformance,
)
from coupevo.metamodel import (
    UNBOUNDED,
    Annotation,
    Attribute,
    Class,
    DataType,
    Enumeration,
    Metamodel,
    OperationSignature,
    Package,
    Reference,
    all_features,
    direct_subclasses,
    find_classifier,
    is_subtype,
    resolve,
    subtree,
    validate_metamodel,
)

NS = "urn:fix/1.0"


class Unsatisfiable(Exception):
    """This particular random draw cannot host the operation; try another."""


class Fixture:
    def __init__(self, seed: str):
        self.rng = random.Random(seed)
        self.fresh_counter = 0
        self.mm = self._gen_metamodel()
        self.rset = self._gen_model()

    # -- naming

    def fresh(self, prefix: str = "x") -> str:
        self.fresh_counter += 1
        return f"{prefix}{self.fresh_counter}"

    # -- metamodel generation

    def _gen_metamodel(self) -> Metamodel:
        rng = self.rng
        pkg = Package("m", NS, [
            DataType("Str", "string"),
            DataType("Int", "integer"),
            DataType("Bool", "boolean"),
            Enumeration("Palette", ["E1", "E2", "E3"][: rng.randint(2, 3)]),
        ])
        mm = Metamodel([pkg])
        classes: list[Class] = []
        for i in range(rng.randint(2, 6)):
            cls = Class(f"C{i}")
            if classes and rng.random() < 0.4:
                cls.supertypes = [f"m.{rng.choice(classes).name}"]
            if rng.random() < 0.2:
                cls.abstract = True
            if rng.random() < 0.15:
                cls.interface = True
            pkg.classifiers.append(cls)
            classes.append(cls)
        # every abstract class needs a concrete descendant, else flip it
        for cls in classes:
            if cls.abstract and not any(
                    not c.abstract and c is not cls
                    and is_subtype(mm, f"m.{c.name}", f"m.{cls.name}") for c in classes):
                cls.abstract = False
        for cls in classes:
            for _ in range(rng.randint(0, 3)):
                self._add_random_feature(mm, cls)
            if rng.random() < 0.2:
                cls.operations.append(OperationSignature(self.fresh("op"), []))
        assert validate_metamodel(mm) == []
        return mm

    def _add_random_feature(self, mm: Metamodel, cls: Class) -> None:
        rng = self.rng
        name = self.fresh("f")
        if rng.random() < 0.6:
            type_ = rng.choice(["m.Str", "m.Int", "m.Bool", "m.Palette"])
            lower, upper = rng.choice([(0, 1), (0, 1), (1, 1), (0, UNBOUNDED)])
            default = self._literal_for(type_) if lower >= 1 else None
            cls.features.append(Attribute(name, type_, lower, upper, default_value=default))
        else:
            target = rng.choice([c for c in self._classes(mm)])
            containment = rng.random() < 0.35
            if not containment and rng.random() < 0.15:
                lower, upper = 1, 1
            else:
                lower, upper = 0, rng.choice([1, UNBOUNDED])
            cls.features.append(Reference(name, target, lower, upper, containment=containment))

    def _literal_for(self, type_: str):
        rng = self.rng
        if type_ == "m.Str":
            return f"s{rng.randint(0, 9)}"
        if type_ == "m.Int":
            return rng.randint(0, 99)
        if type_ == "m.Bool":
            return rng.random() < 0.5
        enum = find_classifier(self.mm, type_) if hasattr(self, "mm") else None
        if enum is None:
            return "E1"
        return rng.choice(enum.literals)

    def _classes(self, mm=None) -> list[str]:
        mm = mm or self.mm
        return [f"{p.name}.{c.name}" for p in mm.packages
                for c in p.classifiers if isinstance(c, Class)]

    def concrete_classes(self) -> list[str]:
        return [q for q in self._classes()
                if not resolve(self.mm, q).abstract]

    # -- model generation

    def _gen_model(self) -> ResourceSet:
        rng = self.rng
        rset = ResourceSet(NS, [Resource("a.model.json"), Resource("b.model.json")])
        self._obj_counter = 0
        concrete = self.concrete_classes()
        if concrete:
            for _ in range(rng.randint(1, 5)):
                self._new_root(rset, rng.choice(concrete))
        queue = [obj for res in rset.resources for obj in res.roots]
        filled: set[int] = set()
        while queue:
            obj = queue.pop(0)
            if id(obj) in filled:
                continue
            filled.add(id(obj))
            queue.extend(self._fill_slots(rset, obj))
        violations = check_conformance(rset, self.mm)
        assert violations == [], violations
        return rset

    def _new_root(self, rset: ResourceSet, class_name: str) -> MObject:
        self._obj_counter += 1
        obj = MObject(f"o{self._obj_counter}", class_name)
        self.rng.choice(rset.resources).roots.append(obj)
        return obj

    def _new_child(self, owner: MObject, feature: str, class_name: str) -> MObject:
        self._obj_counter += 1
        obj = MObject(f"o{self._obj_counter}", class_name)
        owner.slots.setdefault(feature, []).append(obj)
        return obj

    def _concrete_subtypes(self, type_: str) -> list[str]:
        return [q for q in subtree(self.mm, type_) if not resolve(self.mm, q).abstract]

    def _fill_slots(self, rset: ResourceSet, obj: MObject) -> list[MObject]:
        rng = self.rng
        created: list[MObject] = []
        id_counter = 0
        for feat in all_features(self.mm, obj.class_name):
            if feat.volatile:
                continue
            cap = 2 if feat.upper_bound == UNBOUNDED else feat.upper_bound
            want = feat.lower_bound
            # optional fills stop once the set reaches criterion scale
            if want < cap and self._obj_counter < 16 and rng.random() < 0.5:
                want += rng.randint(0, cap - want)
            if want == 0:
                continue
            if isinstance(feat, Attribute):
                if feat.identifier:
                    id_counter += 1
                    obj.slots[feat.name] = [f"id_{obj.id}_{id_counter}"]
                else:
                    obj.slots[feat.name] = [self._literal_for(feat.type) for _ in range(want)]
            elif feat.containment:
                options = self._concrete_subtypes(feat.type)
                if not options:
                    if feat.lower_bound > 0:
                        raise Unsatisfiable(f"no concrete subtype of {feat.type}")
                    continue
                for _ in range(want):
                    created.append(self._new_child(obj, feat.name, rng.choice(options)))
            else:
                values = []
                for _ in range(want):
                    target = self._pick_or_create_instance(rset, feat.type, created)
                    values.append(self._ref_to(rset, target))
                obj.slots[feat.name] = values
        return created

    def _pick_or_create_instance(self, rset, type_, created) -> MObject:
        candidates = [obj for _, obj in self._objects(rset)
                      if is_subtype(self.mm, obj.class_name, type_)]
        if candidates:
            return self.rng.choice(candidates)
        options = self._concrete_subtypes(type_)
        if not options:
            raise Unsatisfiable(f"no concrete subtype of {type_}")
        obj = self._new_root(rset, self.rng.choice(options))
        created.append(obj)
        return obj

    def _objects(self, rset=None):
        from coupevo.instance import iter_objects

        return list(iter_objects(rset or self.rset))

    def _ref_to(self, rset, obj) -> Ref:
        for res in rset.resources:
            from coupevo.instance import walk

            for candidate in walk(res):
                if candidate is obj:
                    return Ref(res.uri, obj.id)
        raise Unsatisfiable("referenced object left the set")

    # -- editing helpers used by per-operation installers

    @property
    def editor(self) -> ModelEditor:
        return ModelEditor(self.mm, self.rset)

    def pkg(self) -> Package:
        return self.mm.packages[0]

    def pick(self, seq):
        seq = list(seq)
        if not seq:
            raise Unsatisfiable("nothing to pick from")
        return self.rng.choice(seq)

    def any_class(self) -> str:
        return self.pick(self._classes())

    def features(self, predicate=lambda owner, f: True):
        out = []
        for q in self._classes():
            cls = resolve(self.mm, q)
            for f in cls.features:
                if predicate(q, f):
                    out.append((q, f))
        return out

    def install_class(self, abstract=False, interface=False, supertypes=(),
                      features=()) -> str:
        name = self.fresh("K")
        cls = Class(name, abstract=abstract, interface=interface,
                    supertypes=list(supertypes), features=list(features))
        self.pkg().classifiers.append(cls)
        return f"m.{name}"

    def install_attr(self, class_q, type_="m.Str", lower=0, upper=1, default=None,
                     identifier=False, changeable=True, volatile=False) -> str:
        name = self.fresh("g")
        cls = resolve(self.mm, class_q)
        cls.features.append(Attribute(
            name, type_, lower, upper, changeable=changeable, volatile=volatile,
            identifier=identifier, default_value=default))
        if lower >= 1 and not volatile:
            for _, obj in self.editor.objects(class_q):
                obj.slots[name] = [default] * lower
        return f"{class_q}.{name}"

    def set_values(self, class_q, feature_name, value_fn, exact=False):
        for _, obj in self.editor.objects(class_q, include_subtypes=not exact):
            obj.slots[feature_name] = [value_fn(obj)]

    def assert_ok(self):
        assert validate_metamodel(self.mm) == []
        violations = check_conformance(self.rset, self.mm)
        assert violations == [], violations

    def safe_to_drop(self, owner_q: str, feat) -> bool:
        """True when dropping this feature's slots cannot break other objects:
        attributes always; references when purging the values (and, for
        containment, deleting the children) leaves every remaining mandatory
        slot satisfied."""
        if isinstance(feat, Attribute):
            return True
        if feat.opposite:
            return False
        if not feat.containment:
            return True
        doomed: set[int] = set()
        for _, obj in self.editor.objects(owner_q):
            for value in obj.slots.get(feat.name, ()):
                if isinstance(value, MObject):
                    stack = [value]
                    while stack:
                        node = stack.pop()
                        doomed.add(id(node))
                        for vs in node.slots.values():
                            stack.extend(v for v in vs if isinstance(v, MObject))
        if not doomed:
            return True
        index = {}
        for res, obj in self._objects():
            index[(res.uri, obj.id)] = obj
        for _, obj in self._objects():
            if id(obj) in doomed:
                continue
            for feat2 in all_features(self.mm, obj.class_name):
                if not isinstance(feat2, Reference) or feat2.containment or feat2.lower_bound == 0:
                    continue
                values = obj.slots.get(feat2.name, ())
                kept = [v for v in values
                        if not (isinstance(v, Ref) and id(index.get(v.key())) in doomed)]
                if len(kept) < feat2.lower_bound:
                    return False
        return True


# ---------------------------------------------------------------------------
# per-operation installers: return args whose constraints pass and whose
# migration succeeds on the fixture, mutating the fixture to set things up


def ok_add_super_type(fx: Fixture):
    options = []
    for c in fx._classes():
        for s in fx._classes():
            if c == s or is_subtype(fx.mm, c, s) or is_subtype(fx.mm, s, c):
                continue
            grown = all_features(fx.mm, s)
            if any(f.lower_bound >= 1 and not (isinstance(f, Attribute) and f.default_value is not None)
                   for f in grown):
                continue
            options.append((c, s))
    if not options:
        s = fx.install_class()
        c = fx.pick([q for q in fx._classes() if q != s])
        return {"class": c, "supertype": s}
    c, s = fx.pick(options)
    return {"class": c, "supertype": s}


def fail_add_super_type(fx: Fixture):
    c = fx.any_class()
    return {"class": c, "supertype": c}  # NoInheritanceCycle


def ok_remove_super_type(fx: Fixture):
    options = []
    for c in fx._classes():
        cls = resolve(fx.mm, c)
        for s in cls.supertypes:
            removed = {f.name for f in all_features(fx.mm, c)}
            trial = copy.deepcopy(fx.mm)
            resolve(trial, c).supertypes.remove(s)
            removed -= {f.name for f in all_features(trial, c)}
            feats = [f for f in all_features(fx.mm, c) if f.name in removed]
            if all(fx.safe_to_drop(c, f) for f in feats):
                options.append((c, s))
    if options:
        c, s = fx.pick(options)
        return {"class": c, "supertype": s}
    s = fx.install_class(features=[Attribute(fx.fresh("g"), "m.Str")])
    c = fx.pick([q for q in fx._classes() if q != s])
    resolve(fx.mm, c).supertypes.append(s)
    name = resolve(fx.mm, s).features[0].name
    for _, obj in fx.editor.objects(c):
        if fx.rng.random() < 0.7:
            obj.slots[name] = [f"v{obj.id}"]
    return {"class": c, "supertype": s}


def fail_remove_super_type(fx: Fixture):
    classes = fx._classes()
    c = fx.pick(classes)
    unrelated = [s for s in classes if s not in resolve(fx.mm, c).supertypes]
    return {"class": c, "supertype": fx.pick(unrelated) if unrelated else "m.Nope"}


def ok_create_attribute(fx: Fixture):
    cls = fx.any_class()
    type_ = fx.pick(["m.Str", "m.Int", "m.Bool", "m.Palette"])
    lower, upper = fx.pick([(0, 1), (1, 1), (0, UNBOUNDED), (2, 3)])
    args = {"class": cls, "name": fx.fresh("n"), "type": type_,
            "lower": lower, "upper": upper}
    if lower >= 1:
        args["default"] = fx._literal_for(type_)
    return args


def fail_create_attribute(fx: Fixture):
    return {"class": fx.any_class(), "name": fx.fresh("n"), "type": "m.Str",
            "lower": 1, "upper": 1}  # MandatoryNeedsDefault


def ok_create_class(fx: Fixture):
    args = {"package": "m", "name": fx.fresh("K")}
    if fx.rng.random() < 0.5:
        args["supertypes"] = [fx.any_class()]
    if fx.rng.random() < 0.3:
        args["abstract"] = True
    return args


def fail_create_class(fx: Fixture):
    existing = fx.any_class().rpartition(".")[2]
    return {"package": "m", "name": existing}  # FreshClassifierName


def ok_create_reference(fx: Fixture):
    return {"class": fx.any_class(), "name": fx.fresh("n"), "type": fx.any_class(),
            "upper": fx.pick([1, UNBOUNDED]), "containment": fx.rng.random() < 0.3}


def fail_create_reference(fx: Fixture):
    return {"class": fx.any_class(), "name": fx.fresh("n"), "type": fx.any_class(),
            "lower": 1}  # OptionalLowerBound


def ok_delete_feature(fx: Fixture):
    options = [(q, f) for q, f in fx.features() if fx.safe_to_drop(q, f)]
    if options:
        q, f = fx.pick(options)
        return {"feature": f"{q}.{f.name}"}
    return {"feature": fx.install_attr(fx.any_class())}


def fail_delete_feature(fx: Fixture):
    return {"feature": "m.Nope.nothing"}


def ok_delete_operation(fx: Fixture):
    cls_q = fx.any_class()
    cls = resolve(fx.mm, cls_q)
    if not cls.operations:
        cls.operations.append(OperationSignature(fx.fresh("op"), []))
    return {"operation": f"{cls_q}.{cls.operations[0].name}"}


def fail_delete_operation(fx: Fixture):
    return {"operation": f"{fx.any_class()}.missing_op"}


def ok_document(fx: Fixture):
    return {"element": fx.pick(["m"] + fx._classes()),
            "documentation": f"doc {fx.fresh()}"}


def fail_document(fx: Fixture):
    return {"element": "m.Nope", "documentation": "x"}


def ok_drop_identifier(fx: Fixture):
    path = fx.install_attr(fx.any_class(), "m.Str", identifier=True)
    owner = path.rpartition(".")[0]
    name = path.rpartition(".")[2]
    n = [0]

    def unique(obj):
        n[0] += 1
        return f"uid{n[0]}"

    fx.set_values(owner, name, unique)
    return {"attribute": path}


def fail_drop_identifier(fx: Fixture):
    attrs = [(q, f) for q, f in fx.features()
             if isinstance(f, Attribute) and not f.identifier]
    if not attrs:
        raise Unsatisfiable("no plain attribute")
    q, f = fx.pick(attrs)
    return {"attribute": f"{q}.{f.name}"}  # IsIdentifier


def ok_extract_super_class(fx: Fixture):
    classes = fx._classes()
    pairs = [(a, b) for a in classes for b in classes
             if a < b and not is_subtype(fx.mm, a, b) and not is_subtype(fx.mm, b, a)]
    if not pairs:
        a = fx.install_class()
        b = fx.install_class()
    else:
        a, b = fx.pick(pairs)
    name = fx.fresh("g")
    for q in (a, b):
        resolve(fx.mm, q).features.append(Attribute(name, "m.Int"))
    return {"name": fx.fresh("K"), "features": [f"{a}.{name}", f"{b}.{name}"]}


def fail_extract_super_class(fx: Fixture):
    return {"name": fx.fresh("K"), "features": []}  # AtLeastOneFeature


def ok_extract_subclass(fx: Fixture):
    leaves = [q for q in fx._classes()
              if not direct_subclasses(fx.mm, q) and resolve(fx.mm, q).features]
    if leaves:
        q = fx.pick(leaves)
    else:
        q = fx.install_class(features=[Attribute(fx.fresh("g"), "m.Str")])
    cls = resolve(fx.mm, q)
    moved = fx.rng.sample(cls.features, fx.rng.randint(1, len(cls.features)))
    return {"class": q, "name": fx.fresh("K"),
            "features": [f"{q}.{f.name}" for f in moved]}


def fail_extract_subclass(fx: Fixture):
    q = fx.any_class()
    return {"class": q, "name": fx.fresh("K"),
            "features": [f"{q}.not_a_feature"]}  # FeaturesOwnedByClass


def ok_generalize_attribute(fx: Fixture):
    candidates = [(q, f) for q, f in fx.features()
                  if isinstance(f, Attribute) and (f.lower_bound > 0 or f.upper_bound != UNBOUNDED)]
    if not candidates:
        path = fx.install_attr(fx.any_class(), "m.Int", lower=1, default=3)
        return {"attribute": path, "lower": 0}
    q, f = fx.pick(candidates)
    args = {"attribute": f"{q}.{f.name}"}
    if f.lower_bound > 0:
        args["lower"] = 0
    if f.upper_bound != UNBOUNDED:
        args["upper"] = UNBOUNDED
    return args


def fail_generalize_attribute(fx: Fixture):
    candidates = [(q, f) for q, f in fx.features()
                  if isinstance(f, Attribute) and f.lower_bound == 0]
    if not candidates:
        raise Unsatisfiable("no optional attribute")
    q, f = fx.pick(candidates)
    return {"attribute": f"{q}.{f.name}", "lower": f.upper_bound if f.upper_bound != UNBOUNDED else 5}


def ok_generalize_reference(fx: Fixture):
    for q, f in fx.rng.sample(fx.features(), len(fx.features())) if fx.features() else []:
        if not isinstance(f, Reference):
            continue
        supers = [s for s in subtree_of_supers(fx.mm, f.type) if s != f.type]
        if supers:
            return {"reference": f"{q}.{f.name}", "type": fx.pick(supers)}
        if f.upper_bound != UNBOUNDED:
            return {"reference": f"{q}.{f.name}", "upper": UNBOUNDED}
    cls = fx.any_class()
    name = fx.fresh("n")
    resolve(fx.mm, cls).features.append(Reference(name, fx.any_class(), 0, 1))
    return {"reference": f"{cls}.{name}", "upper": UNBOUNDED}


def subtree_of_supers(mm, q):
    from coupevo.metamodel import supertype_closure

    return supertype_closure(mm, q)


def fail_generalize_reference(fx: Fixture):
    refs = [(q, f) for q, f in fx.features() if isinstance(f, Reference)]
    if not refs:
        raise Unsatisfiable("no reference")
    q, f = fx.pick(refs)
    others = [c for c in fx._classes() if not is_subtype(fx.mm, f.type, c)]
    if not others:
        raise Unsatisfiable("no non-supertype class")
    return {"reference": f"{q}.{f.name}", "type": fx.pick(others)}


def ok_inline_super_class(fx: Fixture):
    features = [Attribute(fx.fresh("g"), "m.Str") for _ in range(fx.rng.randint(0, 2))]
    s = fx.install_class(abstract=True, features=features)
    for q in fx.rng.sample(fx._classes(), fx.rng.randint(1, 2)):
        if q != s and s not in resolve(fx.mm, q).supertypes:
            resolve(fx.mm, q).supertypes.append(s)
    return {"supertype": s}


def fail_inline_super_class(fx: Fixture):
    concrete = fx.concrete_classes()
    if not concrete:
        raise Unsatisfiable("no concrete class")
    return {"supertype": fx.pick(concrete)}  # IsAbstract


def ok_make_abstract(fx: Fixture):
    free = [q for q in fx._classes()
            if not any(True for _, o in fx.editor.objects(q, include_subtypes=False))
            and not resolve(fx.mm, q).abstract]
    q = fx.pick(free) if free else fx.install_class()
    resolve(fx.mm, q).interface = True
    return {"class": q}


def fail_make_abstract(fx: Fixture):
    plain = [q for q in fx._classes() if not resolve(fx.mm, q).interface]
    if not plain:
        raise Unsatisfiable("all classes are interfaces")
    return {"class": fx.pick(plain)}  # IsInterface


def ok_make_containment(fx: Fixture):
    candidates = [(q, f) for q, f in fx.features()
                  if isinstance(f, Reference) and not f.containment and f.lower_bound == 0]
    if not candidates:
        cls = fx.any_class()
        name = fx.fresh("n")
        resolve(fx.mm, cls).features.append(Reference(name, fx.any_class(), 0, UNBOUNDED))
        return {"reference": f"{cls}.{name}"}
    q, f = fx.pick(candidates)
    editor = fx.editor
    seen: set[int] = set()
    for _, obj in editor.objects(q):
        values = obj.slots.get(f.name)
        if not values:
            continue
        kept = []
        for v in values:
            if not isinstance(v, Ref):
                continue
            target = editor.deref(v)
            if id(target) in seen:
                continue
            ancestor, cyclic = obj, False
            while ancestor is not None:
                if ancestor is target:
                    cyclic = True
                    break
                parent = editor.container_of(ancestor)
                ancestor = parent[0] if parent else None
            if cyclic:
                continue
            seen.add(id(target))
            kept.append(v)
        editor.set_slot(obj, f.name, kept)
    return {"reference": f"{q}.{f.name}"}


def fail_make_containment(fx: Fixture):
    candidates = [(q, f) for q, f in fx.features()
                  if isinstance(f, Reference) and f.containment]
    if not candidates:
        raise Unsatisfiable("no containment reference")
    q, f = fx.pick(candidates)
    return {"reference": f"{q}.{f.name}"}  # NotContainment


def ok_nc_to_ssv(fx: Fixture):
    q, f = fx.pick(fx.features()) if fx.features() else (None, None)
    if f is None:
        path = fx.install_attr(fx.any_class(), changeable=False)
        return {"feature": path}
    f.changeable = False
    return {"feature": f"{q}.{f.name}"}


def fail_nc_to_ssv(fx: Fixture):
    changeable = [(q, f) for q, f in fx.features() if f.changeable]
    if not changeable:
        raise Unsatisfiable("no changeable feature")
    q, f = fx.pick(changeable)
    return {"feature": f"{q}.{f.name}"}  # NotChangeable


def ok_ssv_to_nc(fx: Fixture):
    path = fx.install_attr(fx.any_class())
    feat = resolve(fx.mm, path)
    feat.annotations.append(Annotation("genmodel", {"suppressedSetVisibility": "true"}))
    return {"feature": path}


def fail_ssv_to_nc(fx: Fixture):
    path = fx.install_attr(fx.any_class())
    return {"feature": path}  # HasSuppressedSetVisibility


def ok_push_down(fx: Fixture):
    options = []
    for q in fx._classes():
        cls = resolve(fx.mm, q)
        subs = direct_subclasses(fx.mm, q)
        own_optional = [f for f in cls.features
                        if f.lower_bound == 0 and not (isinstance(f, Reference) and f.opposite)]
        if subs and own_optional:
            options.append((q, fx.pick(own_optional), subs))
    if options:
        q, feat, subs = fx.pick(options)
    else:
        q = fx.any_class()
        name = fx.fresh("g")
        resolve(fx.mm, q).features.append(Attribute(name, "m.Str"))
        feat = resolve(fx.mm, f"{q}.{name}")
        subs = direct_subclasses(fx.mm, q) or [fx.install_class(supertypes=[q])]
    for _, obj in fx.editor.objects(q, include_subtypes=False):
        obj.slots.pop(feat.name, None)  # exact instances sit outside every target
    return {"feature": f"{q}.{feat.name}", "targets": subs}


def fail_push_down(fx: Fixture):
    q, f = fx.pick(fx.features())
    return {"feature": f"{q}.{f.name}", "targets": []}  # TargetsNonempty


def ok_specialize_reference(fx: Fixture):
    candidates = []
    for q, f in fx.features():
        if isinstance(f, Reference) and not f.containment and f.lower_bound == 0:
            subs = [s for s in subtree(fx.mm, f.type) if s != f.type]
            if subs:
                candidates.append((q, f, subs))
    if not candidates:
        base = fx.any_class()
        sub = fx.install_class(supertypes=[base])
        cls = fx.any_class()
        name = fx.fresh("n")
        resolve(fx.mm, cls).features.append(Reference(name, base, 0, 1))
        return {"reference": f"{cls}.{name}", "type": sub}
    q, f, subs = fx.pick(candidates)
    new_type = fx.pick(subs)
    editor = fx.editor
    retargets = [obj for _, obj in editor.objects()
                 if is_subtype(fx.mm, obj.class_name, new_type)]
    for _, obj in editor.objects(q):
        values = obj.slots.get(f.name)
        if not values:
            continue
        kept = []
        for v in values:
            target = editor.deref(v)
            if is_subtype(fx.mm, target.class_name, new_type):
                kept.append(v)
            elif retargets:
                kept.append(editor.ref_to(fx.rng.choice(retargets)))
        editor.set_slot(obj, f.name, kept)
    return {"reference": f"{q}.{f.name}", "type": new_type}


def fail_specialize_reference(fx: Fixture):
    refs = [(q, f) for q, f in fx.features() if isinstance(f, Reference)]
    if not refs:
        raise Unsatisfiable("no reference")
    q, f = fx.pick(refs)
    return {"reference": f"{q}.{f.name}", "type": f.type}  # TypeNotSpecialized


def ok_specialize_super_type(fx: Fixture):
    for q in fx.rng.sample(fx._classes(), len(fx._classes())):
        cls = resolve(fx.mm, q)
        for old in cls.supertypes:
            new = fx.install_class(supertypes=[old])
            return {"class": q, "old": old, "new": new}
    base = fx.install_class()
    q = fx.pick([c for c in fx._classes() if c != base and not is_subtype(fx.mm, base, c)])
    resolve(fx.mm, q).supertypes.append(base)
    new = fx.install_class(supertypes=[base])
    return {"class": q, "old": base, "new": new}


def fail_specialize_super_type(fx: Fixture):
    for q in fx._classes():
        cls = resolve(fx.mm, q)
        if cls.supertypes:
            return {"class": q, "old": cls.supertypes[0], "new": cls.supertypes[0]}
    raise Unsatisfiable("no inheritance")  # NewSpecializesOld


def ok_unfold_super_class(fx: Fixture):
    options = []
    for q in fx._classes():
        cls = resolve(fx.mm, q)
        for s in cls.supertypes:
            trial = copy.deepcopy(fx.mm)
            resolve(trial, q).supertypes.remove(s)
            left = {f.name for f in all_features(trial, q)}
            copied = {f.name for f in all_features(fx.mm, s)}
            if not (left & copied):
                options.append((q, s))
    if options:
        q, s = fx.pick(options)
        return {"class": q, "supertype": s}
    s = fx.install_class(features=[Attribute(fx.fresh("g"), "m.Str")])
    q = fx.pick([c for c in fx._classes() if c != s])
    resolve(fx.mm, q).supertypes.append(s)
    return {"class": q, "supertype": s}


def fail_unfold_super_class(fx: Fixture):
    classes = fx._classes()
    q = fx.pick(classes)
    non_direct = [s for s in classes if s not in resolve(fx.mm, q).supertypes]
    if not non_direct:
        raise Unsatisfiable("everything is a supertype")
    return {"class": q, "supertype": fx.pick(non_direct)}  # IsDirectSupertype


def ok_change_ns_uri(fx: Fixture):
    return {"package": "m", "uri": f"urn:fix/{fx.fresh('v')}"}


def fail_change_ns_uri(fx: Fixture):
    return {"package": "m", "uri": NS}  # UriChanged


def ok_create_annotation(fx: Fixture):
    return {"element": fx.pick(["m"] + fx._classes()), "source": fx.fresh("src"),
            "details": [f"k{fx.fresh()}=v"]}


def fail_create_annotation(fx: Fixture):
    el = fx.any_class()
    source = fx.fresh("src")
    resolve(fx.mm, el).annotations.append(Annotation(source, {}))
    return {"element": el, "source": source}  # SourceFresh


def ok_delete_annotation(fx: Fixture):
    el = fx.any_class()
    source = fx.fresh("src")
    resolve(fx.mm, el).annotations.append(Annotation(source, {"a": "b"}))
    return {"element": el, "source": source}


def fail_delete_annotation(fx: Fixture):
    return {"element": fx.any_class(), "source": "never_there"}


def ok_move_annotation(fx: Fixture):
    classes = fx._classes()
    src = fx.pick(classes)
    dst = fx.pick([q for q in classes if q != src] or [fx.install_class()])
    source = fx.fresh("src")
    resolve(fx.mm, src).annotations.append(Annotation(source, {"k": "v"}))
    return {"from": src, "to": dst, "source": source}


def fail_move_annotation(fx: Fixture):
    q = fx.any_class()
    return {"from": q, "to": q, "source": "x"}  # DistinctElements


def ok_create_enumeration(fx: Fixture):
    n = fx.rng.randint(1, 4)
    return {"package": "m", "name": fx.fresh("E"),
            "literals": [fx.fresh("L") for _ in range(n)]}


def fail_create_enumeration(fx: Fixture):
    return {"package": "m", "name": fx.fresh("E"), "literals": ["A", "A"]}


def ok_create_gmf_constraint(fx: Fixture):
    return {"element": fx.any_class(), "body": "self.size > 0"}


def fail_create_gmf_constraint(fx: Fixture):
    el = fx.any_class()
    resolve(fx.mm, el).annotations.append(Annotation("gmf.constraint", {"body": "x"}))
    return {"element": el, "body": "y"}  # NoConstraintYet


def ok_change_gmf_constraint(fx: Fixture):
    el = fx.any_class()
    resolve(fx.mm, el).annotations.append(Annotation("gmf.constraint", {"body": "old"}))
    return {"element": el, "body": "new"}


def fail_change_gmf_constraint(fx: Fixture):
    return {"element": fx.any_class(), "body": "x"}  # ConstraintExists


def ok_make_volatile(fx: Fixture):
    options = [(q, f) for q, f in fx.features()
               if not f.volatile and fx.safe_to_drop(q, f)]
    if options:
        q, f = fx.pick(options)
        return {"feature": f"{q}.{f.name}"}
    return {"feature": fx.install_attr(fx.any_class())}


def fail_make_volatile(fx: Fixture):
    path = fx.install_attr(fx.any_class(), volatile=True, changeable=False)
    return {"feature": path}  # NotVolatile


def ok_replace_enumeration(fx: Fixture):
    attrs = [(q, f) for q, f in fx.features()
             if isinstance(f, Attribute) and f.type == "m.Palette"]
    if attrs:
        q, f = fx.pick(attrs)
        path = f"{q}.{f.name}"
    else:
        owner = fx.any_class()
        path = fx.install_attr(owner, "m.Palette")
        name = path.rpartition(".")[2]
        for _, obj in fx.editor.objects(owner):
            if fx.rng.random() < 0.7:
                obj.slots[name] = [fx.pick(resolve(fx.mm, "m.Palette").literals)]
    src_enum = find_classifier(fx.mm, resolve(fx.mm, path).type)
    target_name = fx.fresh("E")
    fx.pkg().classifiers.append(
        Enumeration(target_name, [f"{lit}X" for lit in src_enum.literals]))
    mapping = [f"{lit}={lit}X" for lit in src_enum.literals]
    return {"attribute": path, "enum": f"m.{target_name}", "mapping": mapping}


def fail_replace_enumeration(fx: Fixture):
    path = fx.install_attr(fx.any_class(), "m.Palette")
    target = fx.fresh("E")
    fx.pkg().classifiers.append(Enumeration(target, ["Z"]))
    return {"attribute": path, "enum": f"m.{target}",
            "mapping": ["MISSING=Z"]}  # MappingValid


def ok_enum_to_subclasses(fx: Fixture):
    leaves = [q for q in fx._classes() if not direct_subclasses(fx.mm, q)]
    q = fx.pick(leaves) if leaves else fx.install_class()
    path = fx.install_attr(q, "m.Palette", lower=1, default="E1")
    name = path.rpartition(".")[2]
    for _, obj in fx.editor.objects(q, include_subtypes=False):
        obj.slots[name] = [fx.pick(resolve(fx.mm, "m.Palette").literals)]
    return {"class": q, "attribute": path}


def fail_enum_to_subclasses(fx: Fixture):
    q = fx.install_class()
    path = fx.install_attr(q, "m.Str")
    return {"class": q, "attribute": path}  # TypedByEnumeration


def ok_subclasses_to_enum(fx: Fixture):
    base = fx.install_class(abstract=True)
    name = base.rpartition(".")[2]
    for lit in ("RED", "BLUE")[: fx.rng.randint(1, 2)]:
        sub = fx.install_class(supertypes=[base])
        sub_cls = resolve(fx.mm, sub)
        sub_cls.name = f"{name}_{lit}"
        for _ in range(fx.rng.randint(0, 2)):
            fx._new_root(fx.rset, f"m.{sub_cls.name}")
    return {"class": base, "attribute": fx.fresh("kindof")}


def fail_subclasses_to_enum(fx: Fixture):
    q = fx.pick(fx.concrete_classes())
    return {"class": q, "attribute": fx.fresh("a")}  # IsAbstract


def ok_inheritance_to_delegation(fx: Fixture):
    options = []
    for q in fx._classes():
        for s in resolve(fx.mm, q).supertypes:
            sup = resolve(fx.mm, s)
            if sup.abstract:
                continue
            if any(isinstance(f, Reference) and f.opposite for f in all_features(fx.mm, s)):
                continue
            options.append((q, s))
    if options:
        q, s = fx.pick(options)
    else:
        s = fx.install_class(features=[Attribute(fx.fresh("g"), "m.Str")])
        q = fx.pick([c for c in fx._classes() if c != s and not is_subtype(fx.mm, s, c)])
        resolve(fx.mm, q).supertypes.append(s)
    return {"class": q, "supertype": s, "reference": fx.fresh("delegate")}


def fail_inheritance_to_delegation(fx: Fixture):
    s = fx.install_class(abstract=True)
    q = fx.pick([c for c in fx._classes() if c != s])
    resolve(fx.mm, q).supertypes.append(s)
    return {"class": q, "supertype": s, "reference": fx.fresh("delegate")}  # SupertypeConcrete


CASES = {
    "Add Super Type": (ok_add_super_type, fail_add_super_type),
    "Remove Super Type": (ok_remove_super_type, fail_remove_super_type),
    "Create Attribute": (ok_create_attribute, fail_create_attribute),
    "Create Class": (ok_create_class, fail_create_class),
    "Create Reference": (ok_create_reference, fail_create_reference),
    "Delete Feature": (ok_delete_feature, fail_delete_feature),
    "Delete Operation": (ok_delete_operation, fail_delete_operation),
    "Document Metamodel Element": (ok_document, fail_document),
    "Drop Attribute Identifier": (ok_drop_identifier, fail_drop_identifier),
    "Extract Super Class": (ok_extract_super_class, fail_extract_super_class),
    "Extract Subclass": (ok_extract_subclass, fail_extract_subclass),
    "Generalize Attribute": (ok_generalize_attribute, fail_generalize_attribute),
    "Generalize Reference": (ok_generalize_reference, fail_generalize_reference),
    "Inline Super Class": (ok_inline_super_class, fail_inline_super_class),
    "Make Class Abstract when Interface": (ok_make_abstract, fail_make_abstract),
    "Make Reference Containment": (ok_make_containment, fail_make_containment),
    "Not Changeable to Suppressed Set Visibility": (ok_nc_to_ssv, fail_nc_to_ssv),
    "Suppressed Set Visibility to Not Changeable": (ok_ssv_to_nc, fail_ssv_to_nc),
    "Push Down Feature": (ok_push_down, fail_push_down),
    "Specialize Reference Type": (ok_specialize_reference, fail_specialize_reference),
    "Specialize Super Type": (ok_specialize_super_type, fail_specialize_super_type),
    "Unfold Super Class": (ok_unfold_super_class, fail_unfold_super_class),
    "Change Namespace URI": (ok_change_ns_uri, fail_change_ns_uri),
    "Create Annotation": (ok_create_annotation, fail_create_annotation),
    "Delete Annotation": (ok_delete_annotation, fail_delete_annotation),
    "Move Annotation": (ok_move_annotation, fail_move_annotation),
    "Create Enumeration": (ok_create_enumeration, fail_create_enumeration),
    "Create GMF Constraint": (ok_create_gmf_constraint, fail_create_gmf_constraint),
    "Change GMF Constraint": (ok_change_gmf_constraint, fail_change_gmf_constraint),
    "Make Feature Volatile": (ok_make_volatile, fail_make_volatile),
    "Replace Enumeration": (ok_replace_enumeration, fail_replace_enumeration),
    "Enumeration to Sub Classes": (ok_enum_to_subclasses, fail_enum_to_subclasses),
    "Sub Classes to Enumeration": (ok_subclasses_to_enum, fail_subclasses_to_enum),
    "Inheritance to Delegation": (ok_inheritance_to_delegation, fail_inheritance_to_delegation),
}


def run_op_fixture(op_name: str, seed: str) -> bool:
    """One randomized round for one operation. Returns True when the round
    produced a usable fixture (False = unsatisfiable draw, try another seed)."""
    ok_setup, fail_setup = CASES[op_name]
    spec = get_operation(op_name)

    try:
        fx = Fixture(f"{op_name}/{seed}/ok")
        args = ok_setup(fx)
        fx.assert_ok()
    except Unsatisfiable:
        return False
    pre_mm = copy.deepcopy(fx.mm)
    pre_set = copy.deepcopy(fx.rset)
    results = check_applicability(spec, args, fx.mm)
    assert all(r.satisfied for r in results), (
        f"{op_name} seed {seed}: expected applicable, got "
        f"{[str(r) for r in results if not r.satisfied]} with args {args}")
    try:
        adapted, migrated = apply_coupled(OperationApplication(op_name, args), fx.mm, fx.rset)
    except MigrationError:
        # a documented instance-level guard fired (data-loss protection);
        # the inputs must be untouched, then this draw does not count
        assert fx.mm == pre_mm and fx.rset == pre_set, f"{op_name}: failed apply mutated inputs"
        return False
    assert validate_metamodel(adapted) == []
    assert check_conformance(migrated, adapted) == []
    assert fx.mm == pre_mm and fx.rset == pre_set, f"{op_name}: inputs were mutated"

    try:
        fx2 = Fixture(f"{op_name}/{seed}/fail")
        fail_args = fail_setup(fx2)
        fx2.assert_ok()
    except Unsatisfiable:
        return True
    pre_mm2 = copy.deepcopy(fx2.mm)
    pre_set2 = copy.deepcopy(fx2.rset)
    results = check_applicability(spec, fail_args, fx2.mm)
    assert not all(r.satisfied for r in results), (
        f"{op_name} seed {seed}: expected a constraint failure with args {fail_args}")
    try:
        apply_coupled(OperationApplication(op_name, fail_args), fx2.mm, fx2.rset)
        raise AssertionError(f"{op_name}: apply succeeded despite failing constraints")
    except ConstraintViolationError:
        pass
    assert fx2.mm == pre_mm2 and fx2.rset == pre_set2, f"{op_name}: failing apply mutated inputs"
    return True


def run_transaction_suite(rounds: int = 25, max_attempts_factor: int = 8) -> dict[str, int]:
    """The transaction property over every operation; returns rounds per op."""
    from coupevo.catalog import list_operations

    done: dict[str, int] = {}
    for spec in list_operations():
        completed = 0
        attempt = 0
        while completed < rounds:
            attempt += 1
            assert attempt <= rounds * max_attempts_factor, (
                f"{spec.name}: too many unsatisfiable draws")
            if run_op_fixture(spec.name, str(attempt)):
                completed += 1
        done[spec.name] = completed
    return done
