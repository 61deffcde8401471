"""Dirty integration of augmented Leibniz algebras over simply connected group models."""

from .checks import exp_chart_check, group_model_check, verify_nilradical_translation
from .cutoff import cutoff_from_char_poly, invariant_cutoff, plateau
from .dirty import (
    DirtyRack,
    RackPoint,
    build_pullback_rack,
    fiber_dimension_check,
    integration_report,
    lie_case_reduction,
    membership_preservation_check,
    rack_product_M,
    section_equivariance_check,
    section_identity_check,
    section_s,
    tangent_check,
)
from .groups import MODELS, E2CoverModel, GroupModel, MatrixLocalModel, NilpotentBCHModel, load_model

__all__ = [
    "exp_chart_check", "group_model_check", "verify_nilradical_translation", "cutoff_from_char_poly",
    "invariant_cutoff", "plateau", "DirtyRack", "RackPoint", "build_pullback_rack",
    "fiber_dimension_check", "integration_report", "lie_case_reduction",
    "membership_preservation_check", "rack_product_M", "section_equivariance_check",
    "section_identity_check", "section_s", "tangent_check", "MODELS", "E2CoverModel", "GroupModel",
    "MatrixLocalModel", "NilpotentBCHModel", "load_model",
]
