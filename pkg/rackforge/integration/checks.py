"""
Checks on group models and on the spectral ingredients of the cutoff.
"""

import logging
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from ..algebra.leibniz import LeibnizAlgebra, ideal_check
from ..algebra.linalg import Subspace
from ..algebra.scalars import as_array, coerce_pair, max_abs, sample_array, to_float
from ..exceptions import PreconditionError
from ..matrix.exponential import h_series, mat_exp, strip_membership
from ..matrix.polynomials import char_poly
from ..models.integration_models import IntegrationConfig
from ..models.report_models import CheckRecord, VerificationReport
from ..racks.structures import DefectTracker
from .groups import GroupModel

logger = logging.getLogger(__name__)

DERIVATIVE_TOL = 1e-4
H_DET_FLOOR = 1e-12


def _nilpotent_ideal(g: LeibnizAlgebra, span: Subspace, tol: float) -> bool:
    current = span
    for _ in range(g.dim + 1):
        if current.dim == 0:
            return True
        images = [g.bracket(n, v) for n in span.basis for v in current.basis]
        current = Subspace.span(images, g.dim, g.mode, tol)
    return current.dim == 0


def verify_nilradical_translation(
    g: LeibnizAlgebra,
    nilbasis: Sequence[np.ndarray],
    cfg: IntegrationConfig,
    n_samples: int = 100,
    seed: Optional[int] = None,
) -> VerificationReport:
    """char_poly(ad_{xi + eta}) = char_poly(ad_xi) for eta in a nilpotent ideal."""
    tol = 0.0 if g.exact else cfg.tol
    vectors = [as_array(v, g.mode) for v in nilbasis]
    span = Subspace.span(vectors, g.dim, g.mode, cfg.tol)
    if not ideal_check(g, span, cfg.tol).passed:
        raise PreconditionError("declared nilradical is not an ideal")
    if not _nilpotent_ideal(g, span, cfg.tol):
        raise PreconditionError("declared nilradical is not nilpotent")

    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    polys = DefectTracker(tol)
    traces = DefectTracker(tol)
    for k in range(n_samples):
        xi = sample_array(rng, (g.dim,), cfg.sample_scale, g.mode)
        coeffs = sample_array(rng, (span.dim,), cfg.sample_scale, g.mode)
        eta = coeffs @ span.basis if span.dim else np.zeros_like(xi)
        ad_xi = g.ad(xi)
        ad_shifted = g.ad(xi + eta)
        before, after = char_poly(ad_xi), char_poly(ad_shifted)
        polys.update(0.0 if after.same_as(before, tol) else max_abs(to_float(after.coeffs) - to_float(before.coeffs)),
                     sample=k, xi=xi, eta=eta)
        power_a, power_b = ad_xi, ad_shifted
        worst_trace = 0.0
        for _ in range(g.dim):
            a, b = coerce_pair(np.trace(power_a), np.trace(power_b))
            worst_trace = max(worst_trace, abs(float(a - b)))
            power_a, power_b = power_a @ ad_xi, power_b @ ad_shifted
        traces.update(worst_trace, sample=k)

    report = VerificationReport(subject=f"nilradical({g.name or 'algebra'})")
    report.add(CheckRecord.build("nilpotent_ideal", True, 0.0, None, dim=span.dim))
    report.add(polys.record("char_poly_translation", samples=n_samples, exact=g.exact))
    report.add(traces.record("trace_powers_translation", samples=n_samples))
    return report


def exp_chart_check(
    model: GroupModel,
    cfg: IntegrationConfig,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    """Round trip log(exp xi) = xi, the h-series derivative formula for exp and invertibility of h(ad_xi).

    Samples outside the tau-strip are excluded and counted.
    """
    n_samples = n_samples or cfg.samples
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    roundtrip = DefectTracker(0.0 if model.exact else cfg.tol)
    derivative = DefectTracker(DERIVATIVE_TOL)
    invertible = DefectTracker(0.0)
    excluded = 0
    s = cfg.fd_step
    for k in range(n_samples):
        xi = model.sample_algebra(rng, cfg.sample_scale)
        ad = model.ad(xi)
        if not strip_membership(ad, cfg.tau).member:
            excluded += 1
            continue
        back, in_domain = model.log(model.exp(xi))
        xi_c, back = coerce_pair(xi, back)
        roundtrip.update(max_abs(back - xi_c) if in_domain else float("inf"), sample=k, xi=xi)

        xf = to_float(xi)
        eta = rng.uniform(-1.0, 1.0, size=model.dim)
        base_inv = model.inverse(model.exp(xf))
        plus, _ = model.log(model.multiply(base_inv, model.exp(xf + s * eta)))
        minus, _ = model.log(model.multiply(base_inv, model.exp(xf - s * eta)))
        finite = (to_float(plus) - to_float(minus)) / (2 * s)
        h = to_float(h_series(ad))
        formula = h @ eta
        derivative.update(max_abs(finite - formula) / max(1.0, max_abs(formula)), sample=k, xi=xi, eta=eta)

        det = abs(float(np.linalg.det(h)))
        invertible.update(1.0 if det <= H_DET_FLOOR else 0.0, sample=k, det=det)

    report = VerificationReport(subject=f"exp_chart({model.name})")
    tested = n_samples - excluded
    report.add(roundtrip.record("log_exp_roundtrip", tested=tested, excluded=excluded))
    report.add(derivative.record("exp_derivative", tested=tested, bound=DERIVATIVE_TOL))
    report.add(invertible.record("h_series_invertible", tested=tested))
    logger.info(f"Exp chart of {model.name}: {tested} samples tested, {excluded} outside the strip")
    return report


def group_model_check(
    model: GroupModel,
    cfg: IntegrationConfig,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    """Model contract: exp(0) = e, group axioms, Ad(exp xi) = exp(ad_xi) and the word factorization."""
    n_samples = n_samples or cfg.samples
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    e = model.identity
    zero = np.zeros(model.dim)
    report = VerificationReport(subject=model.name)
    unit_defect = model.distance(model.exp(zero), e)
    report.add(CheckRecord.build("exp_of_zero", unit_defect <= cfg.tol, unit_defect))

    assoc, inv, adjoint, words = (DefectTracker(cfg.tol) for _ in range(4))
    for k in range(n_samples):
        xi = model.sample_algebra(rng, cfg.sample_scale)
        g, h, f = model.exp(xi), model.sample(rng, cfg.sample_scale), model.sample(rng, cfg.sample_scale)
        scale = max(1.0, max_abs(model.flatten(g)), max_abs(model.flatten(h)), max_abs(model.flatten(f)))
        left = model.multiply(model.multiply(g, h), f)
        right = model.multiply(g, model.multiply(h, f))
        assoc.update(model.distance(left, right) / scale ** 3, sample=k)
        inv.update(model.distance(model.multiply(g, model.inverse(g)), e) / scale ** 2, sample=k)
        expected = mat_exp(model.ad(xi))
        ad_g, expected = coerce_pair(model.Ad(g), expected)
        adjoint.update(max_abs(ad_g - expected) / max(1.0, max_abs(expected)), sample=k, xi=xi)
        product = reduce(model.multiply, [model.exp(v) for v in model.exp_word_factor(g)], e)
        words.update(model.distance(product, g) / scale, sample=k)

    report.add(assoc.record("associativity", samples=n_samples))
    report.add(inv.record("inverse", samples=n_samples))
    report.add(adjoint.record("adjoint_is_exp_ad", samples=n_samples))
    report.add(words.record("word_factorization", samples=n_samples))
    return report
