"""Characteristic polynomials, matrix exponentials, strips and Jordan-Chevalley parts."""

from .exponential import (
    exp_injectivity_probe,
    h_series,
    is_nilpotent,
    mat_exp,
    spectral_beta,
    strip_membership,
    unipotent_log,
)
from .jordan import JordanPair, functional_jordan_parts, jordan_chevalley, squarefree_part
from .polynomials import ComplexMultiset, MonicPolynomial, char_poly, from_roots, root_bound, roots

__all__ = [
    "exp_injectivity_probe", "h_series", "is_nilpotent", "mat_exp", "spectral_beta",
    "strip_membership", "unipotent_log", "JordanPair", "functional_jordan_parts",
    "jordan_chevalley", "squarefree_part", "ComplexMultiset", "MonicPolynomial", "char_poly",
    "from_roots", "root_bound", "roots",
]
