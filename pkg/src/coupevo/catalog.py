"""Reusable coupled operations: parameter schemas, applicability constraints,
and the transactional apply step (adapt the metamodel, migrate the instances,
verify conformance at the boundary).

The operation definitions themselves live in `operations`; this module holds
the framework and the registry access functions.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    ArgTypeError,
    ConstraintViolationError,
    PostConformanceError,
    UnknownOperationError,
)
from .instance import ModelEditor, ResourceSet, check_conformance
from .metamodel import Metamodel, validate_metamodel

SCALARS = (str, int, float, bool)


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str  # "ref" | "string" | "literal" | "flag"
    many: bool = False
    required: bool = True


@dataclass(frozen=True)
class ConstraintResult:
    constraint: str
    satisfied: bool
    message: str = ""

    def __str__(self) -> str:
        state = "ok" if self.satisfied else "FAILED"
        tail = f" ({self.message})" if self.message and not self.satisfied else ""
        return f"{self.constraint}: {state}{tail}"


# a constraint callable returns None when satisfied, else a failure message
ConstraintFn = Callable[[Metamodel, dict], "str | None"]


@dataclass
class MigrationContext:
    """What an operation's migration rule sees: the metamodel before and after
    adaptation, the bound arguments, and an editor over the working set."""

    before: Metamodel
    after: Metamodel
    args: dict
    editor: ModelEditor

    @property
    def rset(self) -> ResourceSet:
        return self.editor.rset


@dataclass(frozen=True)
class OperationSpec:
    name: str
    doc: str
    params: tuple[ParamSpec, ...]
    constraints: tuple[tuple[str, ConstraintFn], ...]
    adapt: Callable[[Metamodel, dict], None]
    migrate: Callable[[MigrationContext], None] | None = None


@dataclass
class OperationApplication:
    op_name: str
    args: dict = field(default_factory=dict)


_REGISTRY: dict[str, OperationSpec] = {}
_ORDER: list[str] = []


def register(spec: OperationSpec) -> OperationSpec:
    if spec.name in _REGISTRY:
        raise ValueError(f"operation {spec.name!r} registered twice")
    _REGISTRY[spec.name] = spec
    _ORDER.append(spec.name)
    return spec


def list_operations() -> list[OperationSpec]:
    """The full catalog in stable registration order."""
    _ensure_loaded()
    return [_REGISTRY[name] for name in _ORDER]


def get_operation(name: str) -> OperationSpec:
    _ensure_loaded()
    spec = _REGISTRY.get(name)
    if spec is None:
        raise UnknownOperationError(f"no operation named {name!r}")
    return spec


def _ensure_loaded() -> None:
    if not _REGISTRY:
        from . import operations  # noqa: F401  (registers the catalog)


def coerce_args(spec: OperationSpec, args: dict) -> dict:
    """Validate and normalize an argument map against the parameter schema."""
    known = {p.name: p for p in spec.params}
    for key in args:
        if key not in known:
            raise ArgTypeError(f"{spec.name}: unknown parameter {key!r}")
    out: dict = {}
    for param in spec.params:
        if param.name not in args or args[param.name] is None:
            if param.required:
                raise ArgTypeError(f"{spec.name}: missing parameter {param.name!r}")
            continue
        value = args[param.name]
        if param.many:
            if not isinstance(value, list):
                raise ArgTypeError(f"{spec.name}: parameter {param.name!r} takes a list")
            out[param.name] = [_coerce_one(spec, param, v) for v in value]
        else:
            out[param.name] = _coerce_one(spec, param, value)
    return out


def _coerce_one(spec, param, value):
    if param.kind in ("ref", "string"):
        if not isinstance(value, str):
            raise ArgTypeError(f"{spec.name}: parameter {param.name!r} takes a string")
        return value
    if param.kind == "flag":
        if not isinstance(value, bool):
            raise ArgTypeError(f"{spec.name}: parameter {param.name!r} takes a flag")
        return value
    if param.kind == "literal":
        if not isinstance(value, SCALARS):
            raise ArgTypeError(f"{spec.name}: parameter {param.name!r} takes a literal")
        return value
    raise ArgTypeError(f"{spec.name}: broken parameter kind {param.kind!r}")


def check_applicability(spec: OperationSpec, args: dict, mm: Metamodel) -> list[ConstraintResult]:
    """Evaluate every constraint; the operation is applicable iff all hold."""
    args = coerce_args(spec, args)
    results = []
    for name, fn in spec.constraints:
        message = fn(mm, args)
        results.append(ConstraintResult(name, message is None, message or ""))
    return results


def applicable(spec: OperationSpec, args: dict, mm: Metamodel) -> bool:
    return all(r.satisfied for r in check_applicability(spec, args, mm))


def apply_coupled(application: OperationApplication, mm: Metamodel,
                  rset: ResourceSet | None = None) -> tuple[Metamodel, ResourceSet | None]:
    """Apply one coupled operation transactionally.

    The inputs are never mutated: adaptation and migration run on deep copies
    which are returned on success. Constraint failures raise before any work;
    a non-conforming result raises PostConformanceError (a catalog bug, never
    swallowed).
    """
    spec = get_operation(application.op_name)
    args = coerce_args(spec, application.args)
    results = check_applicability(spec, args, mm)
    if not all(r.satisfied for r in results):
        raise ConstraintViolationError(spec.name, results)

    adapted = copy.deepcopy(mm)
    spec.adapt(adapted, args)
    meta_violations = validate_metamodel(adapted)
    if meta_violations:
        raise PostConformanceError(
            f"{spec.name}: adaptation broke the metamodel", meta_violations)

    migrated = None
    if rset is not None:
        migrated = copy.deepcopy(rset)
        ctx = MigrationContext(before=mm, after=adapted, args=args,
                               editor=ModelEditor(adapted, migrated))
        if spec.migrate is not None:
            spec.migrate(ctx)
        violations = check_conformance(migrated, adapted)
        if violations:
            raise PostConformanceError(
                f"{spec.name}: migrated model does not conform", violations)
    return adapted, migrated
