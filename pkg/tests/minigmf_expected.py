"""Hand-derived expectation documents for the bundled mini-gmf scenario.

The model documents below were produced by applying each recorded change of
the bundled history to the release-1.0 fixture on paper, change by change;
the metamodel snapshots are the same exercise for the schema side. They are
the oracle the engine is checked against, and the committed fixture files
under src/coupevo/minigmf/data are generated from these literals (see
regen_minigmf.py).
"""

NS_V1 = "urn:mini:graph/1.0"
NS_V2 = "urn:mini:graph/2.0"
NS_V21 = "urn:mini:graph/2.1"

# --------------------------------------------------------------------------
# release-1.0 input model (authored fixture)

GALLERY_V1 = {
    "nsUri": NS_V1,
    "roots": [
        {"class": "minigraph.Canvas", "id": "gallery", "slots": {
            "accessors": [
                {"class": "minigraph.FigureAccessor", "id": "acc1", "slots": {}},
                {"class": "minigraph.FigureAccessor", "id": "acc2", "slots": {}},
            ],
            "figures": [
                {"class": "minigraph.Figure", "id": "rect", "slots": {
                    "children": [
                        {"class": "minigraph.Figure", "id": "rectLabel", "slots": {
                            "kind": ["DASH"], "name": ["RectLabel"]}},
                    ],
                    "kind": ["SOLID"], "legacyPadding": [2], "name": ["Rect"]}},
                {"class": "minigraph.Figure", "id": "circle", "slots": {
                    "kind": ["DASH"], "legacyPadding": [1], "name": ["Circle"]}},
                {"class": "minigraph.Figure", "id": "diamond", "slots": {
                    "kind": ["SOLID"], "name": ["Diamond"]}},
            ],
            "name": ["Gallery"]}},
    ],
}

DIAGRAM_V1 = {
    "nsUri": NS_V1,
    "roots": [
        {"class": "minigraph.Canvas", "id": "diagram", "slots": {
            "elements": [
                {"class": "minigraph.Node", "id": "n1", "slots": {
                    "figure": ["gallery.model.json#rect"],
                    "name": ["Start"], "tooltip": ["start node"]}},
                {"class": "minigraph.Node", "id": "n2", "slots": {
                    "figure": ["gallery.model.json#circle"], "name": ["End"]}},
                {"class": "minigraph.Connection", "id": "c1", "slots": {
                    "figure": ["gallery.model.json#rect"],
                    "routerKind": ["manhattan"],
                    "source": ["#n1"], "target": ["#n2"]}},
            ],
            "name": ["Main"]}},
    ],
}

# --------------------------------------------------------------------------
# a small conforming release-2.0 model (for release detection)

SAMPLE_V2 = {
    "nsUri": NS_V2,
    "roots": [
        {"class": "minigraph.Canvas", "id": "c", "slots": {
            "accessors": [
                {"class": "minigraph.FigureAccessor", "id": "a1", "slots": {
                    "typedFigure": [
                        {"class": "minigraph.CustomFigure", "id": "cf1", "slots": {
                            "kind": ["SOLID"], "lineWidth": [1]}},
                    ]}},
            ],
            "elements": [
                {"class": "minigraph.Node", "id": "n", "slots": {
                    "figure": ["#f1"], "name": ["N"], "tooltip": ["hi"]}},
            ],
            "figures": [
                {"class": "minigraph.Figure", "id": "f1", "slots": {
                    "kind": ["SOLID"], "lineWidth": [2], "name": ["F"]}},
            ],
            "name": ["Sample"]}},
    ],
}

# --------------------------------------------------------------------------
# expected release-2.1 output for the v1.0 fixture
#
# Derivation per change: Create Attribute lineWidth [1..1] default 1 fills
# every live figure; the init_typed_figure hook creates default-filled
# CustomFigure children for acc1/acc2; Replace Enumeration maps DASH->DASHED;
# Delete Feature removes the legacyPadding values; the decouple_figures hook
# wraps rect and circle (diamond is unreferenced) in descriptors placed in
# the gallery canvas, in first-reference order n1->rect, n2->circle; both
# namespace-URI changes restamp the headers.

GALLERY_V21 = {
    "members": ["diagram.model.json"],
    "nsUri": NS_V21,
    "roots": [
        {"class": "minigraph.Canvas", "id": "gallery", "slots": {
            "accessors": [
                {"class": "minigraph.FigureAccessor", "id": "acc1", "slots": {
                    "typedFigure": [
                        {"class": "minigraph.CustomFigure", "id": "acc1_typedFigure",
                         "slots": {"kind": ["SOLID"], "lineWidth": [1]}},
                    ]}},
                {"class": "minigraph.FigureAccessor", "id": "acc2", "slots": {
                    "typedFigure": [
                        {"class": "minigraph.CustomFigure", "id": "acc2_typedFigure",
                         "slots": {"kind": ["SOLID"], "lineWidth": [1]}},
                    ]}},
            ],
            "descriptors": [
                {"class": "minigraph.FigureDescriptor", "id": "rectDescriptor",
                 "slots": {"figure": ["#rect"]}},
                {"class": "minigraph.FigureDescriptor", "id": "circleDescriptor",
                 "slots": {"figure": ["#circle"]}},
            ],
            "figures": [
                {"class": "minigraph.Figure", "id": "rect", "slots": {
                    "children": [
                        {"class": "minigraph.Figure", "id": "rectLabel", "slots": {
                            "kind": ["DASHED"], "lineWidth": [1], "name": ["RectLabel"]}},
                    ],
                    "kind": ["SOLID"], "lineWidth": [1], "name": ["Rect"]}},
                {"class": "minigraph.Figure", "id": "circle", "slots": {
                    "kind": ["DASHED"], "lineWidth": [1], "name": ["Circle"]}},
                {"class": "minigraph.Figure", "id": "diamond", "slots": {
                    "kind": ["SOLID"], "lineWidth": [1], "name": ["Diamond"]}},
            ],
            "name": ["Gallery"]}},
    ],
}

DIAGRAM_V21 = {
    "members": ["gallery.model.json"],
    "nsUri": NS_V21,
    "roots": [
        {"class": "minigraph.Canvas", "id": "diagram", "slots": {
            "elements": [
                {"class": "minigraph.Node", "id": "n1", "slots": {
                    "figure": ["gallery.model.json#rectDescriptor"],
                    "name": ["Start"], "tooltip": ["start node"]}},
                {"class": "minigraph.Node", "id": "n2", "slots": {
                    "figure": ["gallery.model.json#circleDescriptor"], "name": ["End"]}},
                {"class": "minigraph.Connection", "id": "c1", "slots": {
                    "figure": ["gallery.model.json#rectDescriptor"],
                    "routerKind": ["manhattan"],
                    "source": ["#n1"], "target": ["#n2"]}},
            ],
            "name": ["Main"]}},
    ],
}

# --------------------------------------------------------------------------
# metamodel snapshots (hand-applied adaptations)


def _attr(name, type_, lower=0, upper=1, **extra):
    doc = {"kind": "attribute", "name": name, "type": type_,
           "lowerBound": lower, "upperBound": upper}
    doc.update(extra)
    return doc


def _ref(name, type_, lower=0, upper=1, **extra):
    doc = {"kind": "reference", "name": name, "type": type_,
           "lowerBound": lower, "upperBound": upper}
    doc.update(extra)
    return doc


_STRING = {"kind": "datatype", "name": "String", "primitive": "string"}
_INTEGER = {"kind": "datatype", "name": "Integer", "primitive": "integer"}
_LINEKIND = {"kind": "enum", "name": "LineKind", "literals": ["SOLID", "DASH"]}

METAMODEL_V2 = {"packages": [{
    "name": "minigraph",
    "nsUri": NS_V2,
    "annotations": [{"source": "author", "details": {"name": "mini"}}],
    "classifiers": [
        _STRING,
        _INTEGER,
        _LINEKIND,
        {"kind": "class", "name": "Canvas", "features": [
            _attr("name", "minigraph.String"),
            _ref("figures", "minigraph.Figure", upper=-1, containment=True),
            _ref("elements", "minigraph.DiagramElement", upper=-1, containment=True),
            _ref("accessors", "minigraph.FigureAccessor", upper=-1, containment=True),
            _ref("activeFigure", "minigraph.Figure"),
        ]},
        {"kind": "class", "name": "Figure", "features": [
            _attr("name", "minigraph.String"),
            _attr("kind", "minigraph.LineKind", lower=1, defaultValue="SOLID"),
            _attr("legacyPadding", "minigraph.Integer"),
            _ref("children", "minigraph.Figure", upper=-1, containment=True),
            _attr("lineWidth", "minigraph.Integer", lower=1, defaultValue=1),
        ]},
        {"kind": "class", "name": "FigureAccessor", "features": [
            _ref("typedFigure", "minigraph.CustomFigure", lower=1, containment=True),
        ]},
        {"kind": "class", "name": "Resizable", "abstract": True, "interface": True,
         "features": []},
        {"kind": "class", "name": "DiagramElement", "abstract": True, "features": [
            _ref("figure", "minigraph.Figure", lower=1),
            _attr("tooltip", "minigraph.String"),
        ]},
        {"kind": "class", "name": "Node",
         "supertypes": ["minigraph.DiagramElement", "minigraph.Resizable"],
         "features": [_attr("name", "minigraph.String")]},
        {"kind": "class", "name": "Connection",
         "supertypes": ["minigraph.DiagramElement"],
         "features": [
             _attr("routerKind", "minigraph.String", changeable=False),
             _ref("source", "minigraph.Node"),
             _ref("target", "minigraph.Node"),
         ]},
        {"kind": "class", "name": "CustomFigure", "supertypes": ["minigraph.Figure"],
         "features": [],
         "annotations": [{"source": "documentation",
                          "details": {"value": "A user-defined figure."}}]},
    ],
}]}

METAMODEL_V21 = {"packages": [{
    "name": "minigraph",
    "nsUri": NS_V21,
    "annotations": [{"source": "author", "details": {"name": "mini"}}],
    "classifiers": [
        _STRING,
        _INTEGER,
        _LINEKIND,
        {"kind": "class", "name": "Canvas", "features": [
            _attr("name", "minigraph.String"),
            _ref("figures", "minigraph.Figure", upper=-1, containment=True),
            _ref("elements", "minigraph.DiagramElement", upper=-1, containment=True),
            _ref("accessors", "minigraph.FigureAccessor", upper=-1, containment=True),
            _ref("activeFigure", "minigraph.Figure"),
            _ref("descriptors", "minigraph.FigureDescriptor", upper=-1, containment=True),
        ]},
        {"kind": "class", "name": "Figure", "supertypes": ["minigraph.NamedElement"],
         "features": [
             _attr("kind", "minigraph.LineStyle", lower=1, defaultValue="SOLID"),
             _ref("children", "minigraph.Figure", upper=-1, containment=True),
             _attr("lineWidth", "minigraph.Integer", defaultValue=1),
         ]},
        {"kind": "class", "name": "FigureAccessor", "features": [
            _ref("typedFigure", "minigraph.CustomFigure", lower=1, containment=True),
        ]},
        {"kind": "class", "name": "Resizable", "abstract": True, "interface": True,
         "features": []},
        {"kind": "class", "name": "DiagramElement", "abstract": True, "features": [
            _ref("figure", "minigraph.FigureDescriptor", lower=1),
        ]},
        {"kind": "class", "name": "Node",
         "supertypes": ["minigraph.DiagramElement", "minigraph.Resizable",
                        "minigraph.NamedElement"],
         "features": [_attr("tooltip", "minigraph.String")]},
        {"kind": "class", "name": "Connection",
         "supertypes": ["minigraph.DiagramElement"],
         "features": [
             _attr("routerKind", "minigraph.String",
                   annotations=[{"source": "genmodel",
                                 "details": {"suppressedSetVisibility": "true"}}]),
             _ref("source", "minigraph.Node"),
             _ref("target", "minigraph.Node"),
             _attr("tooltip", "minigraph.String"),
         ]},
        {"kind": "class", "name": "CustomFigure", "supertypes": ["minigraph.Figure"],
         "features": [],
         "annotations": [{"source": "documentation",
                          "details": {"value": "A user-defined figure."}}]},
        {"kind": "enum", "name": "LineStyle", "literals": ["SOLID", "DASHED", "DOTTED"]},
        {"kind": "class", "name": "NamedElement", "abstract": True, "features": [
            _attr("name", "minigraph.String"),
        ]},
        {"kind": "class", "name": "FigureDescriptor", "features": [
            _ref("figure", "minigraph.Figure", lower=1),
        ]},
    ],
}]}

# --------------------------------------------------------------------------
# expected stats table rows (operation, kind, count)

STATS_ROWS = [
    ("Add Super Type", "Reusable", 1),
    ("Change Namespace URI", "Reusable", 2),
    ("Create Annotation", "Reusable", 1),
    ("Create Attribute", "Reusable", 1),
    ("Create Class", "Reusable", 1),
    ("Create Enumeration", "Reusable", 1),
    ("Create Reference", "Reusable", 1),
    ("Delete Feature", "Reusable", 1),
    ("Delete Operation", "Reusable", 1),
    ("Document Metamodel Element", "Reusable", 1),
    ("Drop Attribute Identifier", "Reusable", 1),
    ("Extract Super Class", "Reusable", 1),
    ("Generalize Attribute", "Reusable", 1),
    ("Make Class Abstract when Interface", "Reusable", 1),
    ("Not Changeable to Suppressed Set Visibility", "Reusable", 1),
    ("Push Down Feature", "Reusable", 1),
    ("Replace Enumeration", "Reusable", 1),
    ("Specialize Reference Type", "Reusable", 1),
    ("decouple_figures", "Custom", 1),
    ("init_typed_figure", "Custom", 1),
]

# the catalog, in registry order: the 22 distinct operation names of the
# graph-evolution table, the 10 additional map-evolution names, and the two
# enumeration/subclass conversions
OPERATION_NAMES = [
    "Add Super Type",
    "Remove Super Type",
    "Create Attribute",
    "Create Class",
    "Create Reference",
    "Delete Feature",
    "Delete Operation",
    "Document Metamodel Element",
    "Drop Attribute Identifier",
    "Extract Super Class",
    "Extract Subclass",
    "Generalize Attribute",
    "Generalize Reference",
    "Inline Super Class",
    "Make Class Abstract when Interface",
    "Make Reference Containment",
    "Not Changeable to Suppressed Set Visibility",
    "Suppressed Set Visibility to Not Changeable",
    "Push Down Feature",
    "Specialize Reference Type",
    "Specialize Super Type",
    "Unfold Super Class",
    "Change Namespace URI",
    "Create Annotation",
    "Delete Annotation",
    "Move Annotation",
    "Create Enumeration",
    "Create GMF Constraint",
    "Change GMF Constraint",
    "Make Feature Volatile",
    "Replace Enumeration",
    "Enumeration to Sub Classes",
    "Sub Classes to Enumeration",
    "Inheritance to Delegation",
]
