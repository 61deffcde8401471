"""
Numeric recovery of the tangent Leibniz bracket of a rack.

The bracket [e_i, e_j] is the mixed second derivative of
(t, s) -> coords(chart(t e_i) > chart(s e_j)) at the origin, estimated by the
4-point central difference and checked against half the step.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..algebra.leibniz import LeibnizAlgebra, leibniz_defects
from ..exceptions import InputError
from ..models.report_models import CheckRecord, VerificationReport
from .structures import RackStructure, require_chart_point

logger = logging.getLogger(__name__)

ROUNDOFF_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class BracketEstimate:
    """Recovered structure constants with a Richardson-style error estimate."""
    table: np.ndarray
    error: float
    error_table: np.ndarray

    def as_algebra(self, name: str = "tangent") -> LeibnizAlgebra:
        return LeibnizAlgebra(self.table, (), name)

    def relative_error(self, expected: np.ndarray) -> float:
        expected = np.asarray(expected, dtype=float)
        return float(np.max(np.abs(self.table - expected), initial=0.0) / max(1.0, np.max(np.abs(expected), initial=0.0)))


def _mixed_difference(rack: RackStructure, dim: int, i: int, j: int, t: float, eps: float) -> np.ndarray:
    def value(a: float, b: float) -> np.ndarray:
        x = np.zeros(dim)
        y = np.zeros(dim)
        x[i] = a
        y[j] = b
        px = require_chart_point(rack, rack.chart(x), f"t*e{i + 1}, t={a:g}")
        py = require_chart_point(rack, rack.chart(y), f"s*e{j + 1}, s={b:g}")
        return np.asarray(rack.coords(rack.product(px, py)), dtype=float)

    return (value(t, eps) - value(-t, eps) - value(t, -eps) + value(-t, -eps)) / (4 * t * eps)


def _table(rack: RackStructure, dim: int, t: float, eps: float) -> np.ndarray:
    table = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            table[i, j] = _mixed_difference(rack, dim, i, j, t, eps)
    return table


def tangent_leibniz(rack: RackStructure, dim: int, t: float = 1e-3, eps: float = 1e-3) -> BracketEstimate:
    """Structure constants of the tangent bracket at the unit, in chart coordinates."""
    if t <= 0 or eps <= 0:
        raise InputError(f"finite-difference steps must be positive, got t={t}, eps={eps}")
    coarse = _table(rack, dim, t, eps)
    fine = _table(rack, dim, t / 2, eps / 2)
    error_table = np.abs(coarse - fine)
    error = float(np.max(error_table, initial=0.0))
    logger.info(f"Tangent bracket of {rack.name}: finite-difference error estimate {error:.3e}")
    return BracketEstimate(coarse, error, error_table)


def tangent_leibniz_check(estimate: BracketEstimate, factor: float = 10.0) -> VerificationReport:
    """The recovered table satisfies the Leibniz identity within factor * estimate error."""
    defects = leibniz_defects(estimate.as_algebra())
    scale = max(1.0, float(np.max(np.abs(estimate.table), initial=0.0)))
    worst = float(np.max(np.abs(defects), initial=0.0))
    bound = factor * max(estimate.error, ROUNDOFF_FLOOR) * scale
    report = VerificationReport(subject="tangent_bracket")
    report.add(CheckRecord.build("tangent_leibniz_identity", worst <= bound, worst, {"bound": bound}, bound=bound))
    return report
