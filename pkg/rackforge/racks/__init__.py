"""Rack structures, their standard constructions and tangent bracket recovery."""

from .structures import (
    AugmentedRackStructure,
    Carrier,
    GroupOps,
    RackStructure,
    augmented_invariants,
    check_rack_axioms,
    conjugation_rack,
    from_augmented,
    gauge,
    kinyon_augmented,
    kinyon_rack,
    matrix_group,
    trivial_rack,
)
from .tangent import BracketEstimate, tangent_leibniz, tangent_leibniz_check

__all__ = [
    "AugmentedRackStructure", "Carrier", "GroupOps", "RackStructure", "augmented_invariants",
    "check_rack_axioms", "conjugation_rack", "from_augmented", "gauge", "kinyon_augmented",
    "kinyon_rack", "matrix_group", "trivial_rack", "BracketEstimate", "tangent_leibniz",
    "tangent_leibniz_check",
]
