from __future__ import annotations

import pytest

from coupevo.instance import MObject, Ref, Resource, ResourceSet
from coupevo.metamodel import (
    Attribute,
    Class,
    DataType,
    Enumeration,
    Metamodel,
    Package,
    Reference,
)


def shapes_metamodel() -> Metamodel:
    """A small drawing language used across the unit tests."""
    return Metamodel([Package("shapes", "urn:shapes/1.0", [
        DataType("String", "string"),
        DataType("Integer", "integer"),
        Enumeration("Color", ["RED", "BLUE"]),
        Class("Drawing", features=[
            Attribute("title", "shapes.String"),
            Reference("shapes", "shapes.Shape", upper_bound=-1, containment=True),
        ]),
        Class("Shape", features=[
            Attribute("name", "shapes.String"),
            Attribute("color", "shapes.Color", lower_bound=1),
        ]),
    ])])


def shapes_model() -> ResourceSet:
    return ResourceSet("urn:shapes/1.0", [Resource("d.model.json", [
        MObject("d", "shapes.Drawing", {
            "title": ["demo"],
            "shapes": [
                MObject("s1", "shapes.Shape", {"name": ["one"], "color": ["RED"]}),
                MObject("s2", "shapes.Shape", {"name": ["two"], "color": ["BLUE"]}),
            ],
        }),
    ])])


@pytest.fixture
def shapes_mm() -> Metamodel:
    return shapes_metamodel()


@pytest.fixture
def shapes_set() -> ResourceSet:
    return shapes_model()


def ref(uri: str, object_id: str) -> Ref:
    return Ref(uri, object_id)
