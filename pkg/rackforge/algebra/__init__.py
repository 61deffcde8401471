"""Leibniz algebras, augmentations and the exact linear algebra behind them."""

from .augmented import (
    AugmentedLeibnizAlgebra,
    canonical_augmentation,
    derived_algebra,
    derived_bracket,
    verify_augmented,
)
from .leibniz import (
    LeibnizAlgebra,
    adjoint_map,
    center_quotient,
    ideal_check,
    left_center,
    quotient_by_ideal,
    squares_ideal,
    verify_leibniz,
    verify_lie,
)
from .linalg import LinearMap, Subspace
from .scalars import ScalarMode

__all__ = [
    "AugmentedLeibnizAlgebra", "canonical_augmentation", "derived_algebra", "derived_bracket",
    "verify_augmented", "LeibnizAlgebra", "adjoint_map", "center_quotient", "ideal_check",
    "left_center", "quotient_by_ideal", "squares_ideal", "verify_leibniz", "verify_lie",
    "LinearMap", "Subspace", "ScalarMode",
]
