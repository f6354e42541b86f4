"""Constrained Theta6 / half-Theta6 graphs and 1-local routing on them."""
from .errors import (
    DegenerateDirection,
    DomainError,
    InvalidInstance,
    InvalidParams,
    NoCandidateEdge,
    NotInPositiveCone,
    NotVisible,
    PreconditionViolated,
    StuckAtAnchor,
    Unreachable,
)
from .geom import P, Point
from .pslg import Instance, make_instance, validate, visible, visibility_graph

__version__ = "0.1.0"

__all__ = [
    "DegenerateDirection",
    "DomainError",
    "Instance",
    "InvalidInstance",
    "InvalidParams",
    "NoCandidateEdge",
    "NotInPositiveCone",
    "NotVisible",
    "P",
    "Point",
    "PreconditionViolated",
    "StuckAtAnchor",
    "Unreachable",
    "make_instance",
    "validate",
    "visibility_graph",
    "visible",
]
