"""The migration executor.

Detects which release a model set comes from via its namespace URI, then
replays every later change of the history up to the newest release:
reusable operations run their own coupled migration, primitive runs use the
conservative default rules, and custom-migration spans adapt the metamodel
first and then hand the instances to a registered hook. Conformance is
enforced at every transaction boundary; within a span it is softened, but
reference resolution and the containment forest survive by construction of
the editing surface.
"""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field
from typing import Callable

from . import primitives as prim_rules
from .catalog import OperationApplication, apply_coupled
from .errors import (
    ConstraintViolationError,
    DuplicateHookError,
    InitialNonConformanceError,
    InvalidMetamodelError,
    MigrationError,
    MissingHookError,
    PostConformanceError,
)
from .history import (
    CustomMigration,
    History,
    Primitive,
    detect_release,
    reconstruct,
    sealed_ordinals,
)
from .instance import ModelEditor, ResourceSet, check_conformance
from .metamodel import Metamodel, validate_metamodel


@dataclass
class HookContext:
    """What a custom migration hook receives: the metamodel before and after
    its primitive span, and an editor over the working model set."""

    before: Metamodel
    after: Metamodel
    editor: ModelEditor

    @property
    def rset(self) -> ResourceSet:
        return self.editor.rset


Hook = Callable[[HookContext], None]


@dataclass
class HookRegistry:
    hooks: dict[str, Hook] = field(default_factory=dict)

    def get(self, name: str) -> Hook:
        return self.hooks[name]


def register_hook(registry: HookRegistry, name: str, hook: Hook) -> HookRegistry:
    if name in registry.hooks:
        raise DuplicateHookError(f"hook {name!r} is already registered")
    registry.hooks[name] = hook
    return registry


@dataclass
class AppliedChange:
    release: str
    index: int
    kind: str  # op | primitive | custom
    description: str


@dataclass
class MigrationReport:
    source: int
    applied: list[AppliedChange] = field(default_factory=list)
    boundaries_checked: int = 0
    duration_seconds: float = 0.0

    def to_text(self) -> str:
        lines = [f"source release ordinal: {self.source}",
                 f"changes applied: {len(self.applied)}"]
        lines += [f"  [{c.release}/{c.index}] {c.kind}: {c.description}" for c in self.applied]
        lines.append(f"conformance boundaries checked: {self.boundaries_checked}")
        lines.append(f"duration: {self.duration_seconds:.3f}s")
        return "\n".join(lines) + "\n"


def _describe(change) -> str:
    if isinstance(change, OperationApplication):
        return change.op_name
    if isinstance(change, Primitive):
        return f"{change.kind} {change.target}"
    return f"hook {change.hook} (span {change.span})"


def _hooks_needed(history: History) -> set[str]:
    return {
        change.hook
        for release_ in history.releases
        for change in release_.changes
        if isinstance(change, CustomMigration)
    }


def migrate(rset: ResourceSet, history: History,
            registry: HookRegistry | None = None) -> tuple[ResourceSet, MigrationReport]:
    """Carry a model set from its detected source release to the newest
    sealed release. The input set is never mutated; on success a migrated
    copy is returned together with a report.
    """
    started = time.perf_counter()
    registry = registry or HookRegistry()

    missing = _hooks_needed(history) - registry.hooks.keys()
    if missing:
        raise MissingHookError(missing)

    source = detect_release(history, rset.ns_uri)
    last_sealed = sealed_ordinals(history)[-1]
    working_mm = reconstruct(history, source + 1)
    working_set = copy.deepcopy(rset)

    violations = check_conformance(working_set, working_mm)
    if violations:
        raise InitialNonConformanceError(violations)

    report = MigrationReport(source=source)

    for ordinal in range(source + 1, last_sealed + 1):
        release_ = history.releases[ordinal]
        covered = _covered_indices(release_)
        pending_defaults = False

        def boundary(index: int) -> None:
            nonlocal pending_defaults
            if not pending_defaults:
                return
            pending_defaults = False
            found = check_conformance(working_set, working_mm)
            if found:
                raise PostConformanceError(
                    f"primitive run before change {index} of release {release_.label!r} "
                    "left a nonconforming model", found)
            report.boundaries_checked += 1

        for index, change in enumerate(release_.changes):
            where = f"change {index} of release {release_.label!r}"
            if isinstance(change, OperationApplication):
                boundary(index)
                try:
                    working_mm, working_set = apply_coupled(change, working_mm, working_set)
                except (ConstraintViolationError, MigrationError, PostConformanceError) as exc:
                    raise _with_context(exc, where)
                report.boundaries_checked += 1
            elif isinstance(change, Primitive):
                before = copy.deepcopy(working_mm)
                prim_rules.apply_primitive(working_mm, change)
                bad_meta = validate_metamodel(working_mm)
                if bad_meta:
                    raise InvalidMetamodelError(bad_meta)
                if index not in covered:
                    editor = ModelEditor(working_mm, working_set)
                    try:
                        prim_rules.migrate_primitive(before, working_mm, editor, change)
                    except MigrationError as exc:
                        raise _with_context(exc, where)
                    pending_defaults = True
            elif isinstance(change, CustomMigration):
                span_start = index - change.span
                before = reconstruct_at(history, ordinal, span_start)
                hook = registry.get(change.hook)
                ctx = HookContext(before=before, after=working_mm,
                                  editor=ModelEditor(working_mm, working_set))
                try:
                    hook(ctx)
                except MigrationError as exc:
                    raise _with_context(exc, where)
                found = check_conformance(working_set, working_mm)
                if found:
                    raise PostConformanceError(
                        f"custom migration {change.hook!r} ({where}) left a "
                        "nonconforming model", found)
                report.boundaries_checked += 1
            report.applied.append(AppliedChange(
                release_.label, index, _change_kind(change), _describe(change)))
        boundary(len(release_.changes))

    final = check_conformance(working_set, working_mm)
    if final:
        raise PostConformanceError("migration finished nonconforming", final)
    report.boundaries_checked += 1
    report.duration_seconds = time.perf_counter() - started
    return working_set, report


def _change_kind(change) -> str:
    if isinstance(change, OperationApplication):
        return "op"
    if isinstance(change, Primitive):
        return "primitive"
    return "custom"


def _covered_indices(release_) -> set[int]:
    covered: set[int] = set()
    for index, change in enumerate(release_.changes):
        if isinstance(change, CustomMigration):
            covered.update(range(index - change.span, index))
    return covered


def reconstruct_at(history: History, release_ordinal: int, change_index: int) -> Metamodel:
    """The metamodel right before a given change of a given release."""
    from .history import replay_change

    mm = reconstruct(history, release_ordinal)
    for change in history.releases[release_ordinal].changes[:change_index]:
        mm = replay_change(mm, change)
    return mm


def _with_context(exc, where: str):
    exc.args = (f"{where}: {exc.args[0]}",) + exc.args[1:]
    return exc
