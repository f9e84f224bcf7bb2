"""Graceful difference labelings of disjoint unions of directed circuits."""

from .core import (
    Certificate,
    CircuitFamily,
    ConstructionError,
    GdlError,
    Labeling,
    StructureError,
    UnsupportedError,
    VerificationReport,
    flip_circuit,
    flip_triangle,
    is_gdl,
    verify_gdl,
)
from .constructions import label_single_circuit, plan_and_construct, plan_construction
from .search import MagnitudeProfile, SearchBudget, search_gdl
from .triangles import label_c4_plus_n_c3, label_n_c3

__all__ = [
    "Certificate", "CircuitFamily", "ConstructionError", "GdlError", "Labeling",
    "StructureError", "UnsupportedError", "VerificationReport", "flip_circuit",
    "flip_triangle", "is_gdl", "verify_gdl", "label_single_circuit",
    "plan_and_construct", "plan_construction", "MagnitudeProfile", "SearchBudget",
    "search_gdl", "label_c4_plus_n_c3", "label_n_c3",
]
