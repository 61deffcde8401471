"""
Jordan-Chevalley decomposition X = S + N.

Exact input uses Chevalley's Newton iteration S <- S - q(S) q'(S)^(-1), where q
is the squarefree part of the characteristic polynomial; S and N come out as
polynomials in X. Float input falls back to the same iteration driven by
clustered eigenvalues and warns about conditioning.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from ..algebra.linalg import inverse
from ..algebra.scalars import FLOAT_TOL, max_abs, nonzero_mask, to_float
from ..exceptions import ConditioningWarning, ConsistencyError, InputError, NumericError
from ..models.report_models import CheckRecord, VerificationReport
from .exponential import h_series, mat_exp, nilpotent_powers
from .polynomials import MonicPolynomial, char_poly, eval_at_matrix, roots

logger = logging.getLogger(__name__)

SEPARATION_REL = 1e-3
FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {"exp": mat_exp, "h": h_series}


def squarefree_part(poly: MonicPolynomial) -> MonicPolynomial:
    """f / gcd(f, f') over the rationals."""
    f = poly.to_sympy()
    if f.degree() <= 0:
        return poly
    return MonicPolynomial.from_sympy(f.quo(f.gcd(f.diff())))


def _float_squarefree(matrix: np.ndarray) -> np.ndarray:
    """Real coefficients of prod (l - mu) over distinct clustered eigenvalues mu."""
    poly = char_poly(matrix)
    scale = max(1.0, max_abs(matrix))
    clusters = roots(poly).clusters(1e-6 * scale)
    centers = [c for c, _ in clusters]
    for i, a in enumerate(centers):
        for b in centers[i + 1:]:
            if abs(a - b) < SEPARATION_REL * scale:
                warnings.warn(
                    f"eigenvalues {a:.6g} and {b:.6g} are poorly separated; Jordan parts are approximate",
                    ConditioningWarning,
                    stacklevel=3,
                )
    return np.real(np.poly(centers)) if centers else np.ones(1)


def _newton(matrix: np.ndarray, coefficients: np.ndarray, tol: float) -> np.ndarray:
    n = matrix.shape[0]
    exact = matrix.dtype == object
    derivative = np.polyder(coefficients) if len(coefficients) > 1 else np.zeros(1, dtype=coefficients.dtype)
    s = matrix.copy()
    max_iter = max(1, math.ceil(math.log2(max(n, 2)))) + 3
    for _ in range(max_iter + (0 if exact else 20)):
        q = eval_at_matrix(coefficients, s)
        if not nonzero_mask(q, tol * max(1.0, max_abs(matrix)) ** max(1, len(coefficients) - 1)).any():
            return s
        dq = eval_at_matrix(derivative, s)
        # q(S) and q'(S) commute, so either side of the solve works
        s = s - (q @ inverse(dq) if exact else np.linalg.solve(dq, q))
    if exact:
        raise NumericError("Newton iteration for the semisimple part did not terminate")
    return s


@dataclass(frozen=True, eq=False)
class JordanPair:
    S: np.ndarray
    N: np.ndarray

    @property
    def exact(self) -> bool:
        return self.S.dtype == object and self.N.dtype == object

    def verify(self, matrix: np.ndarray, tol: float = FLOAT_TOL) -> VerificationReport:
        """S + N = X, SN = NS, N nilpotent, S annihilated by a squarefree polynomial."""
        matrix = np.asarray(matrix)
        exact = self.exact and matrix.dtype == object
        s, n_part, x = (self.S, self.N, matrix) if exact else (to_float(self.S), to_float(self.N), to_float(matrix))
        scale = max(1.0, max_abs(x))
        rel = tol * scale
        report = VerificationReport(subject="jordan_pair")

        total = s + n_part - x
        report.add(CheckRecord.build("sum", not nonzero_mask(total, rel).any(), max_abs(total)))
        commutator = s @ n_part - n_part @ s
        report.add(CheckRecord.build(
            "commute", not nonzero_mask(commutator, rel * scale).any(), max_abs(commutator)
        ))
        report.add(CheckRecord.build("nilpotent", nilpotent_powers(n_part, tol) is not None))

        if exact:
            q = squarefree_part(char_poly(s))
            residual = eval_at_matrix(q.full_coefficients(), s)
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConditioningWarning)
                coefficients = _float_squarefree(s)
            residual = eval_at_matrix(coefficients, s)
        report.add(CheckRecord.build(
            "semisimple",
            not nonzero_mask(residual, math.sqrt(tol) * scale ** max(1, s.shape[0])).any(),
            max_abs(residual),
        ))
        return report


def jordan_chevalley(matrix: np.ndarray, tol: float = FLOAT_TOL) -> JordanPair:
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise InputError(f"jordan_chevalley expects a square matrix, got shape {matrix.shape}")
    if matrix.dtype == object:
        q = squarefree_part(char_poly(matrix))
        s = _newton(matrix, q.full_coefficients(), tol)
    else:
        logger.debug("Float Jordan-Chevalley fallback")
        s = _newton(matrix.astype(np.float64), _float_squarefree(matrix), tol)
    return JordanPair(s, matrix - s)


def functional_jordan_parts(matrix: np.ndarray, func: str = "exp", tol: float = FLOAT_TOL) -> JordanPair:
    """Jordan parts of g(X) for g = exp or h: g(X)_S = g(X_S), g(X)_N = g(X) - g(X_S)."""
    if func not in FUNCTIONS:
        raise InputError(f"unknown function {func!r}; expected one of {sorted(FUNCTIONS)}")
    g = FUNCTIONS[func]
    matrix = np.asarray(matrix)
    pair = jordan_chevalley(matrix, tol)
    value = g(matrix)
    semisimple = g(pair.S)
    if value.dtype != semisimple.dtype:
        value, semisimple = to_float(value), to_float(semisimple)
    result = JordanPair(semisimple, value - semisimple)
    report = result.verify(value, tol=max(tol, 1e-8))
    if not report.passed:
        failure = report.first_failure()
        raise ConsistencyError(f"{func}(X) parts fail {failure.name} (defect {failure.max_defect:.3e})")
    return result

