"""Exception hierarchy. Every domain failure derives from CoupevoError (CLI exit 1)."""

from __future__ import annotations


class CoupevoError(Exception):
    """Base class for all domain errors."""


class ParseError(CoupevoError):
    """A file could not be parsed; message carries the location."""


class DanglingRefError(CoupevoError):
    """A qualified-name path does not resolve to a metamodel element."""


class InvalidMetamodelError(CoupevoError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"metamodel is not well-formed: {lines}")


class UnresolvedRefError(CoupevoError):
    """A model reference has no target object after demand-loading."""


class MixedNsUriError(CoupevoError):
    """Resources in one set declare different metamodel namespace URIs."""


class UnknownObjectError(CoupevoError):
    pass


class UnknownClassError(CoupevoError):
    pass


class UnknownOperationError(CoupevoError):
    pass


class ArgTypeError(CoupevoError):
    """Operation arguments do not fit the parameter schema."""


class ConstraintViolationError(CoupevoError):
    """One or more applicability constraints are unsatisfied."""

    def __init__(self, operation, results):
        self.operation = operation
        self.results = list(results)
        failed = ", ".join(r.constraint for r in self.results if not r.satisfied)
        super().__init__(f"{operation}: constraints not satisfied: {failed}")


class MigrationError(CoupevoError):
    """An instance-level migration precondition failed.

    `reason` is a short machine-checkable code such as SharedTarget,
    ValueWouldBeLost, UnmappedLiteral, MissingValue or InstancesExist.
    """

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(f"{reason}: {message}")


class PostConformanceError(CoupevoError):
    """The result of a coupled operation violates conformance (a catalog bug)."""

    def __init__(self, message, violations=()):
        self.violations = list(violations)
        detail = "; ".join(str(v) for v in self.violations)
        super().__init__(message + (f": {detail}" if detail else ""))


class ReleasedHistoryError(CoupevoError):
    """Attempt to change a sealed (released) part of the history."""


class BadSpanError(CoupevoError):
    """A custom-migration span does not cover a trailing run of primitives."""


class DuplicateLabelError(CoupevoError):
    pass


class NothingToUndoError(CoupevoError):
    pass


class ReplayError(CoupevoError):
    """The history is corrupt: a recorded change no longer applies."""


class UnknownNsUriError(CoupevoError):
    def __init__(self, ns_uri, known):
        self.ns_uri = ns_uri
        self.known = sorted(known)
        hint = ", ".join(self.known) if self.known else "none"
        super().__init__(f"unknown release namespace URI {ns_uri!r} (known: {hint})")


class DuplicateHookError(CoupevoError):
    pass


class MissingHookError(CoupevoError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"history needs unregistered migration hooks: {', '.join(self.names)}")


class InitialNonConformanceError(CoupevoError):
    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(str(v) for v in self.violations)
        super().__init__(f"model does not conform to its source release: {detail}")
