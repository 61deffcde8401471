"""
Matrix exponential, the h-series h(X) = (I - exp(-X)) / X, unipotent logarithms
and eigenvalue strip tests.

Exact nilpotent input is handled by finite sums in Fraction arithmetic; every
other input goes through float64 scaling and squaring with a Taylor core.
"""

import logging
import math
from fractions import Fraction
from typing import List, Optional

import numpy as np

from ..algebra.scalars import FLOAT_TOL, ScalarMode, identity, max_abs, nonzero_mask, to_float, zeros
from ..exceptions import InputError, PreconditionError
from ..models.report_models import ProbeVerdict, StripVerdict
from .polynomials import char_poly, roots

logger = logging.getLogger(__name__)

EXP_TOL = 1e-13
SCALED_NORM = 0.5
MIN_TAYLOR_DEGREE = 16
MAX_TAYLOR_DEGREE = 60
BOUNDARY_REL = 1e-10
NEAR_BOUNDARY_REL = 1e-6


def _square(matrix: np.ndarray) -> int:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InputError(f"expected a square matrix, got shape {matrix.shape}")
    return matrix.shape[0]


def nilpotent_powers(matrix: np.ndarray, tol: float = FLOAT_TOL) -> Optional[List[np.ndarray]]:
    """[I, X, X^2, ..., X^k] with X^(k+1) = 0, or None if X^n != 0."""
    n = _square(matrix)
    exact = matrix.dtype == object
    mode = ScalarMode.RATIONAL if exact else ScalarMode.FLOAT64
    powers = [identity(n, mode)]
    if n == 0:
        return powers
    current = powers[0]
    scale = max(1.0, max_abs(matrix))
    for k in range(1, n + 1):
        current = current @ matrix
        if not nonzero_mask(current, tol * scale ** k).any():
            return powers
        powers.append(current)
    return None


def is_nilpotent(matrix: np.ndarray, tol: float = FLOAT_TOL) -> bool:
    return nilpotent_powers(np.asarray(matrix), tol) is not None


def _taylor_degree(norm: float, tol: float) -> int:
    degree = MIN_TAYLOR_DEGREE
    # remainder of the exponential series is below 2 * norm^(d+1) / (d+1)! for norm <= 1
    while degree < MAX_TAYLOR_DEGREE and 2 * norm ** (degree + 1) / math.factorial(degree + 1) >= tol:
        degree += 1
    return degree


def _expm_float(a: np.ndarray, tol: float) -> np.ndarray:
    n = a.shape[0]
    norm = float(np.linalg.norm(a, np.inf)) if n else 0.0
    squarings = max(0, math.ceil(math.log2(norm / SCALED_NORM))) if norm > SCALED_NORM else 0
    b = a / 2.0 ** squarings
    degree = _taylor_degree(min(norm, SCALED_NORM), tol)
    result = np.eye(n, dtype=a.dtype)
    term = np.eye(n, dtype=a.dtype)
    for k in range(1, degree + 1):
        term = term @ b / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def mat_exp(matrix: np.ndarray, tol: float = EXP_TOL) -> np.ndarray:
    """exp(X); exact for exact nilpotent X."""
    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}")
    matrix = np.asarray(matrix)
    _square(matrix)
    if matrix.dtype == object:
        powers = nilpotent_powers(matrix)
        if powers is not None:
            result = powers[0]
            for r, power in enumerate(powers[1:], start=1):
                result = result + power * Fraction(1, math.factorial(r))
            return result
    a = to_float(matrix)
    if np.iscomplexobj(a):
        return _expm_float(a.astype(complex), tol)
    return _expm_float(a.astype(np.float64), tol)


def h_series(matrix: np.ndarray, tol: float = EXP_TOL) -> np.ndarray:
    """h(X) = sum_r (-1)^r X^r / (r+1)!; exact for exact nilpotent X."""
    matrix = np.asarray(matrix)
    n = _square(matrix)
    if matrix.dtype == object:
        powers = nilpotent_powers(matrix)
        if powers is not None:
            result = zeros((n, n), ScalarMode.RATIONAL)
            for r, power in enumerate(powers):
                result = result + power * Fraction((-1) ** r, math.factorial(r + 1))
            return result
    # upper-right block of exp([[-X, I], [0, 0]])
    a = to_float(matrix).astype(np.float64)
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -a
    block[:n, n:] = np.eye(n)
    return mat_exp(block, tol)[:n, n:]


def unipotent_log(matrix: np.ndarray, tol: float = FLOAT_TOL) -> np.ndarray:
    """log(U) = sum_{r>=1} (-1)^(r+1) (U - I)^r / r for unipotent U."""
    matrix = np.asarray(matrix)
    n = _square(matrix)
    exact = matrix.dtype == object
    mode = ScalarMode.RATIONAL if exact else ScalarMode.FLOAT64
    nilpotent = matrix - identity(n, mode)
    powers = nilpotent_powers(nilpotent, tol)
    if powers is None:
        raise PreconditionError("U - I is not nilpotent")
    result = zeros((n, n), mode)
    for r, power in enumerate(powers[1:], start=1):
        coeff = Fraction((-1) ** (r + 1), r) if exact else (-1) ** (r + 1) / r
        result = result + power * coeff
    return result


def spectral_beta(matrix: np.ndarray) -> float:
    """max |Im mu| over the eigenvalues of X, from its characteristic polynomial."""
    return roots(char_poly(matrix)).max_abs_imag()


def strip_membership(matrix: np.ndarray, tau: float) -> StripVerdict:
    """All eigenvalues in the open strip |Im mu| < tau.

    Margins within BOUNDARY_REL * max(1, tau) of zero count as the boundary.
    """
    if tau <= 0:
        raise InputError(f"tau must be positive, got {tau}")
    beta = spectral_beta(np.asarray(matrix))
    margin = tau - beta
    boundary = BOUNDARY_REL * max(1.0, tau)
    member = margin > boundary
    if abs(margin) <= NEAR_BOUNDARY_REL * max(1.0, tau):
        logger.warning(f"Strip verdict near the boundary: beta={beta:.12g}, tau={tau:.12g}")
    return StripVerdict(member=member, margin=margin, beta=beta, tau=tau)


def exp_injectivity_probe(x: np.ndarray, y: np.ndarray, tol: float = FLOAT_TOL) -> ProbeVerdict:
    """Flags exp(X) ~ exp(Y) with X far from Y, for X, Y in the pi-strip."""
    for label, m in (("X", x), ("Y", y)):
        verdict = strip_membership(m, math.pi)
        if not verdict.member:
            raise PreconditionError(f"{label} is outside the pi-strip (beta={verdict.beta:.6g})")
    exp_distance = max_abs(mat_exp(x) - mat_exp(y))
    distance = max_abs(to_float(x) - to_float(y))
    violation = exp_distance < tol and distance > 1000 * tol
    if violation:
        logger.warning(f"Injectivity probe violated: |exp X - exp Y|={exp_distance:.3e}, |X - Y|={distance:.3e}")
    return ProbeVerdict(violation=violation, exp_distance=exp_distance, distance=distance)
