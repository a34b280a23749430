"""The bundled "mini-gmf" scenario: a miniature diagram-description language
whose metamodel evolves over releases 1.0 -> 2.0 -> 2.1.

The evolution is recorded with eighteen distinct reusable operations plus two
custom migrations: `init_typed_figure` fills in a reference that release 2.0
makes mandatory, and `decouple_figures` introduces descriptor objects between
diagram elements and the figures they share. Fixture files (the recorded
history, release-1.0 model files, hand-derived expected 2.1 outputs and
metamodel snapshots) ship under data/.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..catalog import OperationApplication
from ..history import History, Primitive, attach_migration, create_history
from ..history import record_application as _record
from ..history import record_primitive, release
from ..metamodel import (
    Attribute,
    Class,
    DataType,
    Enumeration,
    Metamodel,
    OperationSignature,
    Package,
    Reference,
)
from ..migrate import HookContext, HookRegistry, register_hook

SCENARIO_NAME = "mini-gmf"

NS_V1 = "urn:mini:graph/1.0"
NS_V2 = "urn:mini:graph/2.0"
NS_V21 = "urn:mini:graph/2.1"


def data_dir() -> Path:
    return Path(resources.files(__package__) / "data")


def metamodel_v1() -> Metamodel:
    """The release-1.0 metamodel of the miniature diagram language."""
    string = "minigraph.String"
    integer = "minigraph.Integer"
    figure = "minigraph.Figure"
    node = "minigraph.Node"
    return Metamodel([Package("minigraph", NS_V1, [
        DataType("String", "string"),
        DataType("Integer", "integer"),
        Enumeration("LineKind", ["SOLID", "DASH"]),
        Class("Canvas", features=[
            Attribute("name", string),
            Reference("figures", figure, upper_bound=-1, containment=True),
            Reference("elements", "minigraph.DiagramElement", upper_bound=-1, containment=True),
            Reference("accessors", "minigraph.FigureAccessor", upper_bound=-1, containment=True),
        ]),
        Class("Figure", features=[
            Attribute("name", string, identifier=True),
            Attribute("kind", "minigraph.LineKind", lower_bound=1, default_value="SOLID"),
            Attribute("legacyPadding", integer),
            Reference("children", figure, upper_bound=-1, containment=True),
        ], operations=[OperationSignature("layout")]),
        Class("FigureAccessor", features=[
            Reference("typedFigure", figure, containment=True),
        ]),
        Class("Resizable", interface=True),
        Class("DiagramElement", abstract=True, features=[
            Reference("figure", figure, lower_bound=1),
            Attribute("tooltip", string),
        ]),
        Class("Node", supertypes=["minigraph.DiagramElement"], features=[
            Attribute("name", string),
        ]),
        Class("Connection", supertypes=["minigraph.DiagramElement"], features=[
            Attribute("routerKind", string, changeable=False),
            Reference("source", node),
            Reference("target", node),
        ]),
    ])])


def build_history() -> History:
    """Record the 1.0 -> 2.0 -> 2.1 evolution and return the sealed history."""
    h = create_history(metamodel_v1())
    release(h, "1.0", force=True)  # release 1.0 is the starting point

    def op(op_name, /, **args):
        _record(h, OperationApplication(op_name, {k.rstrip("_"): v for k, v in args.items()}))

    # towards 2.0
    op("Create Class", package="minigraph", name="CustomFigure",
       supertypes=["minigraph.Figure"])
    op("Create Attribute", class_="minigraph.Figure", name="lineWidth",
       type="minigraph.Integer", lower=1, upper=1, default=1)
    op("Create Reference", class_="minigraph.Canvas", name="activeFigure",
       type="minigraph.Figure", upper=1)
    op("Document Metamodel Element", element="minigraph.CustomFigure",
       documentation="A user-defined figure.")
    op("Drop Attribute Identifier", attribute="minigraph.Figure.name")
    op("Delete Operation", operation="minigraph.Figure.layout")
    op("Add Super Type", class_="minigraph.Node", supertype="minigraph.Resizable")
    op("Make Class Abstract when Interface", class_="minigraph.Resizable")
    record_primitive(h, Primitive("set", "minigraph.FigureAccessor.typedFigure",
                                  {"property": "lowerBound", "value": 1}))
    attach_migration(h, "init_typed_figure", 1)
    op("Specialize Reference Type", reference="minigraph.FigureAccessor.typedFigure",
       type="minigraph.CustomFigure")
    op("Create Annotation", element="minigraph", source="author", details=["name=mini"])
    op("Change Namespace URI", package="minigraph", uri=NS_V2)
    release(h, "2.0")

    # towards 2.1
    op("Create Enumeration", package="minigraph", name="LineStyle",
       literals=["SOLID", "DASHED", "DOTTED"])
    op("Replace Enumeration", attribute="minigraph.Figure.kind",
       enum="minigraph.LineStyle", mapping=["SOLID=SOLID", "DASH=DASHED"])
    op("Push Down Feature", feature="minigraph.DiagramElement.tooltip",
       targets=["minigraph.Node", "minigraph.Connection"])
    op("Extract Super Class", name="NamedElement",
       features=["minigraph.Figure.name", "minigraph.Node.name"])
    op("Not Changeable to Suppressed Set Visibility",
       feature="minigraph.Connection.routerKind")
    op("Generalize Attribute", attribute="minigraph.Figure.lineWidth", lower=0)
    op("Delete Feature", feature="minigraph.Figure.legacyPadding")
    record_primitive(h, Primitive("create", "minigraph", {"element": {
        "kind": "class", "name": "FigureDescriptor", "features": []}}))
    record_primitive(h, Primitive("create", "minigraph.FigureDescriptor", {"element": {
        "kind": "reference", "name": "figure", "type": "minigraph.Figure",
        "lowerBound": 1, "upperBound": 1}}))
    record_primitive(h, Primitive("create", "minigraph.Canvas", {"element": {
        "kind": "reference", "name": "descriptors", "type": "minigraph.FigureDescriptor",
        "lowerBound": 0, "upperBound": -1, "containment": True}}))
    record_primitive(h, Primitive("set", "minigraph.DiagramElement.figure",
                                  {"property": "type", "value": "minigraph.FigureDescriptor"}))
    attach_migration(h, "decouple_figures", 4)
    op("Change Namespace URI", package="minigraph", uri=NS_V21)
    release(h, "2.1")
    return h


# ---------------------------------------------------------------------------
# custom migration hooks


def init_typed_figure(ctx: HookContext) -> None:
    """Release 2.0 makes FigureAccessor.typedFigure mandatory: every accessor
    without a value receives a fresh CustomFigure child."""
    for _, accessor in list(ctx.editor.objects("minigraph.FigureAccessor")):
        if not accessor.slots.get("typedFigure"):
            ctx.editor.create_child(
                accessor, "typedFigure", "minigraph.CustomFigure",
                id_base=f"{accessor.id}_typedFigure", fill_defaults=True)


def decouple_figures(ctx: HookContext) -> None:
    """Release 2.1 decouples diagram elements from figures: every directly
    referenced figure gets one FigureDescriptor (in the canvas of the figure's
    own file), and element references are retargeted to the descriptors."""
    descriptors: dict[int, object] = {}
    for _, element in list(ctx.editor.objects("minigraph.DiagramElement")):
        old_refs = element.slots.get("figure")
        if not old_refs:
            continue
        new_refs = []
        for ref in old_refs:
            fig = ctx.editor.deref(ref)
            descriptor = descriptors.get(id(fig))
            if descriptor is None:
                canvas = ctx.editor.root_of(fig)
                descriptor = ctx.editor.create_child(
                    canvas, "descriptors", "minigraph.FigureDescriptor",
                    id_base=f"{fig.id}Descriptor")
                descriptor.slots["figure"] = [ctx.editor.ref_to(fig)]
                descriptors[id(fig)] = descriptor
            new_refs.append(ctx.editor.ref_to(descriptor))
        element.slots["figure"] = new_refs


def hook_registry() -> HookRegistry:
    registry = HookRegistry()
    register_hook(registry, "init_typed_figure", init_typed_figure)
    register_hook(registry, "decouple_figures", decouple_figures)
    return registry


SCENARIOS = {SCENARIO_NAME: hook_registry}
