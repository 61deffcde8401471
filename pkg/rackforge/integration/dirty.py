"""
Pullback integration of an augmented Leibniz algebra into an augmented Lie rack.

Given p: h -> g' and a group model G' for g', the carrier is
M = {(x, g') : p(x) = s(g')} where s is the cutoff-weighted logarithm. The
group acts by (x, g') -> (rho_g x, g g' g^-1) and the rack product is
m > m' = ell_{phi(m)}(m') with phi(x, g') = g'.
"""

import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Any, Optional

import numpy as np

from ..algebra.augmented import AugmentedLeibnizAlgebra, canonical_augmentation, derived_algebra, verify_augmented
from ..algebra.leibniz import LeibnizAlgebra, verify_lie
from ..algebra.linalg import kernel, rank, right_inverse_columns, solve
from ..algebra.scalars import (
    ScalarMode,
    coerce_pair,
    infer_mode,
    is_zero,
    jsonable,
    matvec,
    max_abs,
    sample_array,
    to_float,
    unit_vector,
    zeros,
)
from ..exceptions import CarrierError, ConfigError, InputError, ModelError, PreconditionError
from ..matrix.exponential import mat_exp, spectral_beta, strip_membership
from ..models.integration_models import IntegrationConfig
from ..models.report_models import CheckRecord, VerificationReport
from ..racks.structures import (
    AugmentedRackStructure,
    Carrier,
    DefectTracker,
    RackStructure,
    augmented_invariants,
    check_rack_axioms,
)
from ..racks.tangent import tangent_leibniz
from .cutoff import plateau
from .groups import GroupModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RackPoint:
    """Point (x, g') of the pullback carrier."""
    x: np.ndarray
    gp: Any

    def __repr__(self) -> str:
        return f"RackPoint(x={jsonable(self.x)}, gp={jsonable(self.gp)})"


def section_s(model: GroupModel, gp: Any, cfg: IntegrationConfig) -> np.ndarray:
    """gamma(log g') log g' on the log domain, 0 elsewhere."""
    xi, in_domain = model.log(gp)
    mode = infer_mode(np.asarray(xi))
    if not in_domain:
        return zeros((model.dim,), mode)
    ad = model.ad(xi)
    verdict = strip_membership(ad, cfg.tau)
    if not verdict.member:
        if verdict.beta > math.pi * (1 + 1e-9):
            raise ModelError(
                f"{model.name}: log reported in-domain but beta={verdict.beta:.6g} is outside the pi-strip"
            )
        return zeros((model.dim,), mode)
    gamma = plateau(verdict.beta, cfg.tau_prime, cfg.tau)
    if gamma == 1.0:
        return xi
    if gamma == 0.0:
        return zeros((model.dim,), mode)
    return gamma * to_float(xi)


def section_identity_check(model: GroupModel, cfg: IntegrationConfig) -> VerificationReport:
    """s(e) = 0 exactly and the central-difference derivative of s at e is the identity."""
    report = VerificationReport(subject=f"section({model.name})")
    at_unit = section_s(model, model.identity, cfg)
    report.add(CheckRecord.build("section_at_unit", is_zero(at_unit, 0.0), max_abs(at_unit), jsonable(at_unit)))

    h = cfg.fd_step
    derivative = np.zeros((model.dim, model.dim))
    for a in range(model.dim):
        step = h * unit_vector(model.dim, a, ScalarMode.FLOAT64)
        plus = to_float(section_s(model, model.exp(step), cfg))
        minus = to_float(section_s(model, model.exp(-step), cfg))
        derivative[:, a] = (plus - minus) / (2 * h)
    defect = max_abs(derivative - np.eye(model.dim))
    report.add(CheckRecord.build("section_tangent_identity", defect <= 1e-6, defect,
                                 {"derivative": derivative}, step=h))
    return report


def section_equivariance_check(
    model: GroupModel,
    cfg: IntegrationConfig,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    """s(g g' g^-1) = Ad(g) s(g') on seeded pairs."""
    n_samples = n_samples or cfg.samples
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    worst = DefectTracker(cfg.tol)
    for k in range(n_samples):
        g, gp = model.sample(rng, cfg.sample_scale), model.sample(rng, cfg.sample_scale)
        lhs = section_s(model, model.conj(g, gp), cfg)
        rhs = matvec(model.Ad(g), section_s(model, gp, cfg))
        lhs, rhs = coerce_pair(lhs, rhs)
        worst.update(max_abs(lhs - rhs), sample=k, g=model.flatten(g), gp=model.flatten(gp))
    report = VerificationReport(subject=f"section({model.name})")
    report.add(worst.record("section_equivariance", samples=n_samples))
    logger.info(f"Section equivariance on {model.name}: max defect {worst.value:.3e}")
    return report


class DirtyRack:
    """Augmented Lie rack M = s*h over a group model."""

    def __init__(self, aug: AugmentedLeibnizAlgebra, model: GroupModel, cfg: IntegrationConfig):
        self.aug = aug
        self.model = model
        self.config = cfg
        self.pivots = right_inverse_columns(aug.p, cfg.tol)
        if self.pivots is None:
            raise ConfigError(f"p is not surjective onto {model.name} (rank {rank(aug.p, cfg.tol)} < {aug.dim_g})")
        self.kernel_basis = kernel(aug.p, cfg.tol)
        self.unit = RackPoint(zeros((aug.dim_h,), aug.mode), model.identity)

    @property
    def name(self) -> str:
        return f"dirty({self.aug.name or 'aug'}, {self.model.name})"

    @property
    def fiber_dim(self) -> int:
        return len(self.kernel_basis)

    def lift(self, v: np.ndarray) -> np.ndarray:
        """x with p(x) = v, supported on the pivot columns of p."""
        v = np.asarray(v)
        p = self.aug.p if v.dtype == object else to_float(self.aug.p)
        x = zeros((self.aug.dim_h,), infer_mode(v) if p.dtype == object else ScalarMode.FLOAT64)
        if not self.pivots:
            return x
        x[self.pivots] = solve(p[:, self.pivots], v)
        return x

    def membership_defect(self, m: RackPoint) -> float:
        px, target = coerce_pair(self.aug.project(m.x), section_s(self.model, m.gp, self.config))
        return max_abs(px - target)

    def contains(self, m: Any) -> bool:
        if not isinstance(m, RackPoint) or np.shape(m.x) != (self.aug.dim_h,) or not self.model.contains(m.gp):
            return False
        px, target = coerce_pair(self.aug.project(m.x), section_s(self.model, m.gp, self.config))
        return is_zero(px - target, self.config.tol)

    def fiber_point(self, gp: Any, coefficients: Optional[np.ndarray] = None) -> RackPoint:
        """lift(s(g')) plus a combination of the kernel basis of p."""
        x = self.lift(section_s(self.model, gp, self.config))
        if coefficients is not None and self.fiber_dim:
            x, coefficients = coerce_pair(x, coefficients)
            basis = self.kernel_basis if coefficients.dtype == object else to_float(self.kernel_basis)
            x = x + coefficients @ basis
        return RackPoint(x, gp)

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> RackPoint:
        gp = self.model.sample(rng, scale)
        mode = ScalarMode.RATIONAL if self.model.exact and self.aug.mode == ScalarMode.RATIONAL else ScalarMode.FLOAT64
        return self.fiber_point(gp, sample_array(rng, (self.fiber_dim,), scale, mode))

    def rho(self, g: Any) -> np.ndarray:
        """rho_g as the product of exp(rho-dot xi_i) over the model's word factorization of g."""
        factors = [mat_exp(self.aug.rho(xi)) for xi in self.model.exp_word_factor(g)]
        if not factors:
            return mat_exp(zeros((self.aug.dim_h, self.aug.dim_h), self.aug.mode))
        return reduce(lambda a, b: a @ b if a.dtype == b.dtype else to_float(a) @ to_float(b), factors)

    def ell(self, g: Any, m: RackPoint) -> RackPoint:
        return RackPoint(matvec(self.rho(g), m.x), self.model.conj(g, m.gp))

    def phi(self, m: RackPoint) -> Any:
        return m.gp

    def product(self, m: RackPoint, mp: RackPoint) -> RackPoint:
        return self.ell(m.gp, mp)

    def chart(self, coords: np.ndarray) -> RackPoint:
        """theta_h: x -> (x, exp p(x)), inside M while p(x) stays on the cutoff plateau."""
        x = np.asarray(coords)
        return RackPoint(x, self.model.exp(self.aug.project(x)))

    def coords(self, m: RackPoint) -> np.ndarray:
        return to_float(m.x)

    def flatten(self, m: RackPoint) -> np.ndarray:
        return np.concatenate([to_float(np.asarray(m.x)).ravel(), self.model.flatten(m.gp)])

    def distance(self, a: RackPoint, b: RackPoint) -> float:
        return max_abs(self.flatten(a) - self.flatten(b))

    def augmented_structure(self) -> AugmentedRackStructure:
        return AugmentedRackStructure(
            name=self.name,
            carrier=Carrier(self.aug.dim_h, self.contains, "p(x) = s(g')"),
            unit=self.unit,
            phi=self.phi,
            group=self.model.group_ops(),
            ell=self.ell,
            sampler=self.sample,
            chart=self.chart,
            coords=self.coords,
            flatten=self.flatten,
        )

    def rack_structure(self) -> RackStructure:
        return RackStructure(
            name=self.name,
            carrier=Carrier(self.aug.dim_h, self.contains, "p(x) = s(g')"),
            unit=self.unit,
            product=self.product,
            sampler=self.sample,
            chart=self.chart,
            coords=self.coords,
            flatten=self.flatten,
        )

    def __repr__(self) -> str:
        return f"DirtyRack(aug={self.aug.name!r}, model={self.model.name!r}, fiber_dim={self.fiber_dim})"


def build_pullback_rack(aug: AugmentedLeibnizAlgebra, model: GroupModel, cfg: IntegrationConfig) -> DirtyRack:
    """Pullback carrier of p: h -> g' along the section s of the model."""
    if model.dim != aug.dim_g:
        raise InputError(f"model {model.name} has dimension {model.dim}, augmentation expects {aug.dim_g}")
    report = verify_augmented(aug)
    if not report.passed:
        failure = report.first_failure()
        raise PreconditionError(f"{aug.name or 'augmentation'}: {failure.name} fails")
    if max_abs(to_float(aug.g.structure) - to_float(model.algebra.structure)) > cfg.tol:
        raise ConfigError(f"model {model.name} integrates a different Lie algebra than g")
    rack = DirtyRack(aug, model, cfg)
    logger.info(f"Built {rack!r}")
    return rack


def _require_member(rack: DirtyRack, m: RackPoint, what: str):
    if not rack.contains(m):
        defect = rack.membership_defect(m) if isinstance(m, RackPoint) else float("inf")
        raise CarrierError(f"{what} is not in {rack.name} (membership defect {defect:.3e})")


def rack_product_M(rack: DirtyRack, m: RackPoint, mp: RackPoint) -> RackPoint:
    """m > m' with membership checked on both inputs and the output."""
    _require_member(rack, m, "left operand")
    _require_member(rack, mp, "right operand")
    out = rack.product(m, mp)
    _require_member(rack, out, "product")
    return out


def membership_preservation_check(
    rack: DirtyRack,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    cfg = rack.config
    n_samples = n_samples or cfg.samples
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    worst = DefectTracker(cfg.tol)
    for k in range(n_samples):
        m, mp = rack.sample(rng, cfg.sample_scale), rack.sample(rng, cfg.sample_scale)
        worst.update(rack.membership_defect(rack.product(m, mp)), sample=k,
                     m=rack.flatten(m), mp=rack.flatten(mp))
    report = VerificationReport(subject=rack.name)
    report.add(worst.record("membership_preserved", samples=n_samples))
    return report


def fiber_dimension_check(
    rack: DirtyRack,
    n_base: int = 32,
    seed: Optional[int] = None,
) -> VerificationReport:
    """Every sampled g' has a fibre: an affine space of dimension dim Ker(p)."""
    cfg = rack.config
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    expected = rack.fiber_dim
    dims = DefectTracker(0.0)
    members = DefectTracker(cfg.tol)
    for k in range(n_base):
        gp = rack.model.sample(rng, cfg.sample_scale)
        points = [rack.fiber_point(gp, sample_array(rng, (expected,), cfg.sample_scale, ScalarMode.FLOAT64))
                  for _ in range(expected + 1)]
        for m in points:
            members.update(rack.membership_defect(m), base=k)
        if expected:
            spread = np.stack([to_float(m.x) - to_float(points[0].x) for m in points[1:]])
            found = rank(spread, 1e-8)
        else:
            found = 0
        dims.update(float(abs(found - expected)), base=k, found=found)
    report = VerificationReport(subject=rack.name)
    report.add(members.record("fiber_nonempty", base_points=n_base))
    report.add(dims.record("fiber_dimension", base_points=n_base, expected=expected))
    return report


def tangent_check(rack: DirtyRack) -> VerificationReport:
    """Mixed finite differences of the product along x -> (x, exp p(x)) against the derived bracket."""
    cfg = rack.config
    step = cfg.fd_step
    aug = rack.aug
    for i in range(aug.dim_h):
        direction = aug.project(step * unit_vector(aug.dim_h, i, ScalarMode.FLOAT64))
        beta = spectral_beta(rack.model.ad(direction))
        if beta > cfg.tau_prime:
            raise ConfigError(f"fd_step {step} leaves the cutoff plateau along e{i + 1} (beta={beta:.3g})")

    estimate = tangent_leibniz(rack.rack_structure(), aug.dim_h, step, step)
    expected = to_float(derived_algebra(aug).structure)
    error = estimate.relative_error(expected)
    report = VerificationReport(subject=rack.name)
    report.add(CheckRecord.build(
        "tangent_bracket",
        error < cfg.bracket_tol,
        error,
        {"table": estimate.table, "expected": expected},
        fd_error=estimate.error,
        bound=cfg.bracket_tol,
        table=np.round(estimate.table, 8),
    ))
    logger.info(f"Tangent bracket of {rack.name}: relative error {error:.3e}")
    return report


def lie_case_reduction(
    lie: LeibnizAlgebra,
    model: GroupModel,
    cfg: IntegrationConfig,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> VerificationReport:
    """For a Lie algebra the dirty rack is the conjugation rack of the group, transported along (x, g') -> g'."""
    if not verify_lie(lie).passed:
        raise PreconditionError(f"{lie.name or 'algebra'} is not a Lie algebra")
    aug = canonical_augmentation(lie)
    rack = build_pullback_rack(aug, model, cfg)
    n_samples = n_samples or cfg.samples
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    surjective = DefectTracker(cfg.tol)
    transport = DefectTracker(cfg.tol)
    for k in range(n_samples):
        g, gp = model.sample(rng, cfg.sample_scale), model.sample(rng, cfg.sample_scale)
        m, mp = rack.fiber_point(g), rack.fiber_point(gp)
        surjective.update(max(rack.membership_defect(m), rack.membership_defect(mp)), sample=k)
        out = rack.product(m, mp)
        expected = model.conj(g, gp)
        # the fibre is a single point, so the product must sit over g g' g^-1 at lift(s(g g' g^-1))
        over = model.distance(out.gp, expected)
        at = max_abs(to_float(out.x) - to_float(rack.fiber_point(expected).x))
        transport.update(max(over, at), sample=k, g=model.flatten(g), gp=model.flatten(gp))
    report = VerificationReport(subject=rack.name)
    report.add(CheckRecord.build("projection_injective", rack.fiber_dim == 0, float(rack.fiber_dim),
                                 {"fiber_dim": rack.fiber_dim}))
    report.add(surjective.record("projection_surjective", samples=n_samples))
    report.add(transport.record("conjugation_transport", samples=n_samples))
    logger.info(f"Lie-case reduction for {lie.name or 'algebra'}: {'pass' if report.passed else 'fail'}")
    return report


def integration_report(rack: DirtyRack, n_base: int = 32) -> VerificationReport:
    """Axioms, membership, fibres and tangent bracket of a dirty rack."""
    cfg = rack.config
    report = VerificationReport(subject=rack.name)
    report.extend(augmented_invariants(rack.augmented_structure(), min(cfg.samples, 64), cfg.seed, cfg.tol,
                                       cfg.sample_scale))
    report.extend(check_rack_axioms(rack.rack_structure(), cfg.samples, cfg.seed, cfg.tol, cfg.sample_scale))
    report.extend(membership_preservation_check(rack))
    report.extend(fiber_dimension_check(rack, n_base))
    report.extend(tangent_check(rack))
    return report
