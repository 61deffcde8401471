"""
Monic polynomials, characteristic polynomials and root multisets.

A monic polynomial of degree n is stored by (a_1, ..., a_n) with
f(l) = l^n + a_1 l^(n-1) + ... + a_n. Exact matrices give exact (Fraction)
coefficients; roots are always computed in floating point.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
import sympy
from scipy.optimize import linear_sum_assignment

from ..algebra.scalars import ScalarMode, identity, jsonable, to_float
from ..exceptions import InputError, NumericError

logger = logging.getLogger(__name__)

ROOT_TOL = 1e-7
CLUSTER_RADIUS = 1e-7

_LAMBDA = sympy.Symbol("lam")


@dataclass(frozen=True, eq=False)
class MonicPolynomial:
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def norm(self) -> float:
        """Sum of |a_j|."""
        if not self.degree:
            return 0.0
        return float(np.sum(np.abs(np.asarray(to_float(self.coeffs), dtype=complex))))

    def full_coefficients(self) -> np.ndarray:
        """Highest degree first, leading 1 included."""
        lead = np.array([Fraction(1)], dtype=object) if self.exact else np.ones(1)
        return np.concatenate([lead, self.coeffs])

    def __call__(self, z):
        value = 1
        for a in self.coeffs:
            value = value * z + a
        return value

    def same_as(self, other: "MonicPolynomial", tol: float = 0.0) -> bool:
        if self.degree != other.degree:
            return False
        if self.exact and other.exact:
            return all(a == b for a, b in zip(self.coeffs, other.coeffs))
        diff = np.asarray(to_float(self.coeffs), dtype=complex) - np.asarray(to_float(other.coeffs), dtype=complex)
        return bool(np.all(np.abs(diff) <= tol))

    def to_sympy(self) -> sympy.Poly:
        """Exact polynomial over QQ in the variable lam."""
        if not self.exact:
            raise InputError("only exact polynomials convert to sympy")
        coeffs = [sympy.Rational(c.numerator, c.denominator) for c in self.full_coefficients()]
        return sympy.Poly(coeffs, _LAMBDA, domain=sympy.QQ)

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "MonicPolynomial":
        poly = poly.monic()
        coeffs = [Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs()[1:]]
        return cls(np.array(coeffs, dtype=object))

    def as_json(self):
        return jsonable(self.coeffs)

    def __repr__(self) -> str:
        return f"MonicPolynomial(degree={self.degree}, coeffs={jsonable(self.coeffs)})"


@dataclass(frozen=True, eq=False)
class ComplexMultiset:
    """Roots with multiplicity, stored repeated and sorted by (real, imag)."""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).ravel()
        order = np.lexsort((values.imag, values.real))
        object.__setattr__(self, "values", values[order])

    def __len__(self) -> int:
        return len(self.values)

    def clusters(self, radius: float = CLUSTER_RADIUS) -> List[Tuple[complex, int]]:
        """Distinct values (cluster means) and their multiplicities."""
        out: List[Tuple[complex, int]] = []
        members: List[List[complex]] = []
        for z in self.values:
            for k, group in enumerate(members):
                if abs(z - out[k][0]) <= radius:
                    group.append(z)
                    out[k] = (complex(np.mean(group)), len(group))
                    break
            else:
                members.append([z])
                out.append((complex(z), 1))
        return out

    def max_abs_imag(self) -> float:
        return float(np.max(np.abs(self.values.imag))) if len(self) else 0.0

    def distance(self, other: "ComplexMultiset") -> float:
        """Largest |z - w| under the pairing that minimizes the total distance."""
        if len(self) != len(other):
            raise InputError(f"multisets of sizes {len(self)} and {len(other)}")
        if not len(self):
            return 0.0
        cost = np.abs(self.values[:, None] - other.values[None, :])
        rows, cols = linear_sum_assignment(cost)
        return float(np.max(cost[rows, cols]))

    def as_json(self):
        return jsonable(self.values)


def char_poly(matrix: np.ndarray) -> MonicPolynomial:
    """det(l I - X) by Faddeev-LeVerrier (exact for Fraction matrices)."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise InputError(f"char_poly expects a square matrix, got shape {matrix.shape}")
    exact = matrix.dtype == object
    a = matrix if exact else matrix.astype(np.float64)
    eye = identity(n, ScalarMode.RATIONAL if exact else ScalarMode.FLOAT64)
    m = a * 0
    coeffs = []
    previous = Fraction(1) if exact else 1.0
    for k in range(1, n + 1):
        m = a @ m + previous * eye
        am = a @ m
        trace = sum(am[i, i] for i in range(n))
        previous = -trace / k
        coeffs.append(previous)
    return MonicPolynomial(np.array(coeffs, dtype=object if exact else np.float64))


def from_roots(roots: ComplexMultiset) -> MonicPolynomial:
    """Coefficients (-1)^r e_r(z) of prod (l - z_i)."""
    if not len(roots):
        return MonicPolynomial(np.zeros(0))
    full = np.poly(roots.values)
    return MonicPolynomial(np.asarray(full[1:]))


def root_bound(poly: MonicPolynomial) -> float:
    """Every root mu satisfies |mu| <= max(1, ||a||)."""
    return max(1.0, poly.norm)


def roots(poly: MonicPolynomial, tol: float = ROOT_TOL) -> ComplexMultiset:
    """All roots with multiplicity from the companion-matrix eigenvalues.

    Roots closer than CLUSTER_RADIUS * max(1, ||a||) are merged to their mean.
    """
    if not poly.degree:
        return ComplexMultiset(np.zeros(0, dtype=complex))
    full = np.asarray(to_float(poly.full_coefficients()), dtype=complex)
    if np.allclose(full.imag, 0):
        full = full.real
    try:
        values = np.roots(full)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"eigenvalue solver failed on companion matrix: {e}") from e
    if len(values) != poly.degree:
        raise NumericError(f"found {len(values)} roots for a degree-{poly.degree} polynomial")

    scale = root_bound(poly)
    merged = []
    for center, mult in ComplexMultiset(values).clusters(CLUSTER_RADIUS * scale):
        merged.extend([center] * mult)
    result = ComplexMultiset(np.array(merged))

    residual = max(abs(poly(complex(z))) for z in result.values)
    if residual >= tol * scale ** poly.degree:
        raise NumericError(f"root residual {residual:.3e} exceeds {tol * scale ** poly.degree:.3e}")
    return result


def eval_at_matrix(coefficients: Sequence, matrix: np.ndarray) -> np.ndarray:
    """Horner evaluation of a polynomial (highest degree first) at a square matrix."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    exact = matrix.dtype == object
    result = identity(n, ScalarMode.RATIONAL if exact else ScalarMode.FLOAT64) * 0
    eye = identity(n, ScalarMode.RATIONAL if exact else ScalarMode.FLOAT64)
    for c in coefficients:
        result = result @ matrix + c * eye
    return result
