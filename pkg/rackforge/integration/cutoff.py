"""
Aut-invariant cutoff on a Lie algebra.

gamma(xi) = psi(beta(xi)) where beta(xi) is the largest |Im mu| over the
eigenvalues of ad_xi and psi is the plateau function built from exp(-1/t):
psi = 1 on [0, tau'] and psi = 0 on [tau, inf).
"""

import logging
import math

import numpy as np

from ..algebra.leibniz import LeibnizAlgebra
from ..matrix.polynomials import MonicPolynomial, char_poly, roots
from ..models.integration_models import IntegrationConfig

logger = logging.getLogger(__name__)


def _bump(t: float) -> float:
    return math.exp(-1.0 / t) if t > 0 else 0.0


def plateau(beta: float, tau_prime: float, tau: float) -> float:
    """Smooth step from 1 (beta <= tau') down to 0 (beta >= tau)."""
    if beta <= tau_prime:
        return 1.0
    if beta >= tau:
        return 0.0
    u = (beta - tau_prime) / (tau - tau_prime)
    rising = _bump(u)
    falling = _bump(1.0 - u)
    return falling / (falling + rising)


def cutoff_from_char_poly(poly: MonicPolynomial, cfg: IntegrationConfig) -> float:
    """gamma as a function of the characteristic polynomial of ad_xi alone."""
    beta = roots(poly).max_abs_imag()
    return plateau(beta, cfg.tau_prime, cfg.tau)


def invariant_cutoff(alg: LeibnizAlgebra, xi: np.ndarray, cfg: IntegrationConfig) -> float:
    return cutoff_from_char_poly(char_poly(alg.ad(xi)), cfg)
