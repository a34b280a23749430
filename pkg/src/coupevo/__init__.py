"""coupevo: coupled metamodel/model evolution.

Record metamodel changes as a release-partitioned history of coupled
operations, then migrate instance model sets from any recorded release to
the newest one.
"""

from .catalog import (
    ConstraintResult,
    OperationApplication,
    OperationSpec,
    ParamSpec,
    apply_coupled,
    check_applicability,
    get_operation,
    list_operations,
)
from .errors import CoupevoError
from .instance import (
    MObject,
    ModelEditor,
    Ref,
    Resource,
    ResourceSet,
    Violation,
    check_conformance,
    load_resource_set,
    retype_object,
    save_resource_set,
)
from .metamodel import (
    UNBOUNDED,
    Annotation,
    Attribute,
    Class,
    DataType,
    Enumeration,
    Feature,
    Metamodel,
    MetaViolation,
    OperationSignature,
    Package,
    Reference,
    all_features,
    is_subtype,
    resolve,
    validate_metamodel,
)
from .mm_io import load_metamodel, save_metamodel

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
