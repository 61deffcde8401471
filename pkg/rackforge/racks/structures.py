"""
Rack structures: pointed carriers with a self-distributive product.

A RackStructure bundles the carrier predicate, the unit, the product, a seeded
sampler and a coordinate chart at the unit. Every constructor here returns one,
and check_rack_axioms evaluates the rack laws on seeded samples.
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy import linalg

from ..algebra.leibniz import LeibnizAlgebra, verify_leibniz
from ..algebra.linalg import inverse, least_squares
from ..algebra.scalars import (
    FLOAT_TOL,
    ScalarMode,
    identity,
    infer_mode,
    jsonable,
    matvec,
    max_abs,
    sample_array,
    to_float,
    zeros,
)
from ..exceptions import ChartError, PreconditionError, SamplerError
from ..matrix.exponential import is_nilpotent, mat_exp, unipotent_log
from ..models.report_models import CheckRecord, VerificationReport

logger = logging.getLogger(__name__)

Point = Any
Sampler = Callable[[np.random.Generator, float], Point]


def _flat(point: Point) -> np.ndarray:
    return to_float(np.asarray(point)).ravel()


def _always(_: Point) -> bool:
    return True


@dataclass(frozen=True)
class Carrier:
    """Coordinate dimension plus membership predicate."""
    dim: int
    contains: Callable[[Point], bool] = _always
    description: str = ""


@dataclass(frozen=True)
class GroupOps:
    """Group operations with a sampler near the identity and an exponential chart."""
    name: str
    dim: int
    multiply: Callable[[Point, Point], Point]
    inverse: Callable[[Point], Point]
    identity: Point
    sampler: Sampler
    chart: Callable[[np.ndarray], Point]
    coords: Callable[[Point], np.ndarray]
    contains: Callable[[Point], bool] = _always
    flatten: Callable[[Point], np.ndarray] = _flat

    def conj(self, g: Point, h: Point) -> Point:
        """g h g^-1"""
        return self.multiply(self.multiply(g, h), self.inverse(g))

    def distance(self, a: Point, b: Point) -> float:
        return max_abs(self.flatten(a) - self.flatten(b))


@dataclass(frozen=True)
class RackStructure:
    name: str
    carrier: Carrier
    unit: Point
    product: Callable[[Point, Point], Point]
    sampler: Sampler
    chart: Callable[[np.ndarray], Point]
    coords: Callable[[Point], np.ndarray]
    flatten: Callable[[Point], np.ndarray] = _flat

    def distance(self, a: Point, b: Point) -> float:
        return max_abs(self.flatten(a) - self.flatten(b))

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> Point:
        point = self.sampler(rng, scale)
        if not self.carrier.contains(point):
            raise SamplerError(f"{self.name}: sampler produced a point outside the carrier")
        return point


@dataclass(frozen=True)
class AugmentedRackStructure:
    """Carrier M with phi: M -> G and a G-action ell fixing the unit."""
    name: str
    carrier: Carrier
    unit: Point
    phi: Callable[[Point], Point]
    group: GroupOps
    ell: Callable[[Point, Point], Point]
    sampler: Sampler
    chart: Callable[[np.ndarray], Point]
    coords: Callable[[Point], np.ndarray]
    flatten: Callable[[Point], np.ndarray] = _flat

    def distance(self, a: Point, b: Point) -> float:
        return max_abs(self.flatten(a) - self.flatten(b))

    def product(self, x: Point, y: Point) -> Point:
        return self.ell(self.phi(x), y)

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> Point:
        point = self.sampler(rng, scale)
        if not self.carrier.contains(point):
            raise SamplerError(f"{self.name}: sampler produced a point outside the carrier")
        return point


@dataclass
class DefectTracker:
    """Running maximum of a defect with the first counterexample past tol."""
    tol: float
    value: float = 0.0
    counterexample: Optional[dict] = None
    failures: int = 0

    def update(self, defect: float, **where: Any):
        self.value = max(self.value, defect)
        if defect > self.tol:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = {"defect": defect, **where}

    def record(self, name: str, **details: Any) -> CheckRecord:
        return CheckRecord.build(name, self.counterexample is None, self.value, self.counterexample,
                                 failures=self.failures, **details)


def check_rack_axioms(
    rack: RackStructure,
    n_samples: int = 256,
    seed: int = 0,
    tol: float = FLOAT_TOL,
    scale: float = 1.0,
) -> VerificationReport:
    """Unit laws, self-distributivity and sampled left-injectivity on seeded triples."""
    if n_samples < 1:
        raise PreconditionError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    e = rack.unit
    left_unit, right_unit, distributive, injective = (DefectTracker(tol) for _ in range(4))

    for k in range(n_samples):
        x, y, z = (rack.sample(rng, scale) for _ in range(3))
        where = {"sample": k, "x": jsonable(rack.flatten(x))}
        left_unit.update(rack.distance(rack.product(e, x), x), **where)
        right_unit.update(rack.distance(rack.product(x, e), e), **where)
        lhs = rack.product(x, rack.product(y, z))
        rhs = rack.product(rack.product(x, y), rack.product(x, z))
        distributive.update(rack.distance(lhs, rhs), **where,
                            y=jsonable(rack.flatten(y)), z=jsonable(rack.flatten(z)))
        # distinct y, z must stay distinct under x > -
        gap = rack.distance(y, z)
        if gap > 1e3 * tol:
            image_gap = rack.distance(rack.product(x, y), rack.product(x, z))
            injective.update(gap if image_gap <= tol else 0.0, **where)

    report = VerificationReport(subject=rack.name)
    report.add(left_unit.record("left_unit", samples=n_samples))
    report.add(right_unit.record("right_unit", samples=n_samples))
    report.add(distributive.record("self_distributivity", samples=n_samples))
    report.add(injective.record("left_injectivity", samples=n_samples))
    logger.info(f"Rack axioms for {rack.name}: max defect {report.max_defect:.3e} over {n_samples} samples")
    return report


def _vector_chart(coords: np.ndarray) -> np.ndarray:
    return np.asarray(coords)


def _vector_coords(point: Point) -> np.ndarray:
    return to_float(np.asarray(point))


def trivial_rack(dim: int, mode: ScalarMode = ScalarMode.FLOAT64) -> RackStructure:
    """x > y = y on K^dim."""
    if dim < 0:
        raise PreconditionError(f"dimension must be non-negative, got {dim}")
    return RackStructure(
        name=f"trivial_dim{dim}",
        carrier=Carrier(dim, lambda x: np.shape(x) == (dim,), f"K^{dim}"),
        unit=zeros((dim,), mode),
        product=lambda x, y: y,
        sampler=lambda rng, scale: sample_array(rng, (dim,), scale, mode),
        chart=_vector_chart,
        coords=_vector_coords,
    )


def conjugation_rack(group: GroupOps) -> RackStructure:
    """g > h = g h g^-1 with unit the group identity."""
    return RackStructure(
        name=f"conjugation({group.name})",
        carrier=Carrier(group.dim, group.contains, group.name),
        unit=group.identity,
        product=group.conj,
        sampler=group.sampler,
        chart=group.chart,
        coords=group.coords,
        flatten=group.flatten,
    )


def matrix_group(
    basis: Sequence[np.ndarray],
    mode: ScalarMode = ScalarMode.FLOAT64,
    name: str = "matrix_group",
    unipotent: bool = False,
) -> GroupOps:
    """Matrix group generated by exp of the span of a basis.

    Unipotent groups sample exp(sum c_a B_a) with rational c in rational mode
    (exact, since the exponent is nilpotent) and use the exact unipotent
    logarithm as chart inverse. Otherwise samples are I + small perturbations
    along the basis and coordinates come from the principal logarithm.
    """
    basis = [np.asarray(b) for b in basis]
    n = basis[0].shape[0]
    columns = np.stack([b.ravel() for b in basis], axis=1)
    eye = identity(n, mode)

    def combine(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords)
        total = zeros((n, n), infer_mode(coords))
        for c, b in zip(coords, basis):
            total = total + c * (b if coords.dtype == object else to_float(b))
        return total

    def chart(coords: np.ndarray) -> np.ndarray:
        return mat_exp(combine(coords))

    def coords(g: np.ndarray) -> np.ndarray:
        g = np.asarray(g)
        log = unipotent_log(g) if unipotent else linalg.logm(to_float(g)).real
        return least_squares(columns if log.dtype == object else to_float(columns), log.ravel())

    def sampler(rng: np.random.Generator, scale: float) -> np.ndarray:
        if unipotent:
            return chart(sample_array(rng, (len(basis),), scale, mode))
        return eye + combine(sample_array(rng, (len(basis),), 0.1 * scale, mode))

    def contains(g: np.ndarray) -> bool:
        g = np.asarray(g)
        if g.shape != (n, n):
            return False
        if unipotent:
            return is_nilpotent(g - identity(n, infer_mode(g)))
        return abs(np.linalg.det(to_float(g))) > 1e-12

    return GroupOps(
        name=name,
        dim=len(basis),
        multiply=lambda a, b: a @ b if a.dtype == b.dtype else to_float(a) @ to_float(b),
        inverse=inverse,
        identity=eye,
        sampler=sampler,
        chart=chart,
        coords=coords,
        contains=contains,
    )


def kinyon_rack(alg: LeibnizAlgebra, strict: bool = True) -> RackStructure:
    """X > Y = exp(ad_X) Y on the underlying space of a Leibniz algebra.

    strict=False skips the Leibniz precondition so that broken tables can be
    exercised by check_rack_axioms.
    """
    if strict and not verify_leibniz(alg).passed:
        raise PreconditionError(f"{alg.name or 'algebra'} is not a Leibniz algebra")
    dim = alg.dim

    def product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return matvec(mat_exp(alg.ad(x)), y)

    return RackStructure(
        name=f"kinyon({alg.name or 'algebra'})",
        carrier=Carrier(dim, lambda x: np.shape(x) == (dim,), f"K^{dim}"),
        unit=zeros((dim,), alg.mode),
        product=product,
        sampler=lambda rng, scale: sample_array(rng, (dim,), scale, alg.mode),
        chart=_vector_chart,
        coords=_vector_coords,
    )


def gauge(
    rack: RackStructure,
    f: Callable[[Point], Point],
    n_check: int = 64,
    seed: int = 0,
    tol: float = FLOAT_TOL,
    scale: float = 1.0,
) -> RackStructure:
    """x >_f y = f(x) > y for a pointed map f with f(x > y) = x > f(y)."""
    if rack.distance(f(rack.unit), rack.unit) > tol:
        raise PreconditionError("gauge map does not fix the unit")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_check):
        x, y = rack.sample(rng, scale), rack.sample(rng, scale)
        worst = max(worst, rack.distance(f(rack.product(x, y)), rack.product(x, f(y))))
    if worst > tol:
        raise PreconditionError(f"gauge map is not equivariant: defect {worst:.3e}")
    return replace(rack, name=f"gauged({rack.name})", product=lambda x, y: rack.product(f(x), y))


def augmented_invariants(
    aug: AugmentedRackStructure,
    n_samples: int = 64,
    seed: int = 0,
    tol: float = FLOAT_TOL,
    scale: float = 1.0,
) -> VerificationReport:
    """ell_g(e) = e, phi(ell_g x) = g phi(x) g^-1 and phi(x > y) = phi(x) phi(y) phi(x)^-1."""
    rng = np.random.default_rng(seed)
    group = aug.group
    fixes_unit, equivariant, morphism = DefectTracker(tol), DefectTracker(tol), DefectTracker(tol)
    for k in range(n_samples):
        g = group.sampler(rng, scale)
        x, y = aug.sample(rng, scale), aug.sample(rng, scale)
        fixes_unit.update(aug.distance(aug.ell(g, aug.unit), aug.unit), sample=k)
        equivariant.update(group.distance(aug.phi(aug.ell(g, x)), group.conj(g, aug.phi(x))), sample=k)
        morphism.update(group.distance(aug.phi(aug.product(x, y)), group.conj(aug.phi(x), aug.phi(y))), sample=k)
    report = VerificationReport(subject=aug.name)
    report.add(fixes_unit.record("action_fixes_unit", samples=n_samples))
    report.add(equivariant.record("phi_equivariant", samples=n_samples))
    report.add(morphism.record("phi_rack_morphism", samples=n_samples))
    return report


def from_augmented(
    aug: AugmentedRackStructure,
    n_check: int = 64,
    seed: int = 0,
    tol: float = FLOAT_TOL,
    scale: float = 1.0,
) -> RackStructure:
    """x > y = ell_{phi(x)}(y)."""
    report = augmented_invariants(aug, n_check, seed, tol, scale)
    if not report.passed:
        failure = report.first_failure()
        raise PreconditionError(f"{aug.name}: {failure.name} fails (defect {failure.max_defect:.3e})")
    return RackStructure(
        name=aug.name,
        carrier=aug.carrier,
        unit=aug.unit,
        product=aug.product,
        sampler=aug.sampler,
        chart=aug.chart,
        coords=aug.coords,
        flatten=aug.flatten,
    )


def kinyon_augmented(alg: LeibnizAlgebra) -> AugmentedRackStructure:
    """Kinyon rack as an augmented rack over inner automorphisms: phi(x) = exp(ad_x), ell_A(y) = A y."""
    if not verify_leibniz(alg).passed:
        raise PreconditionError(f"{alg.name or 'algebra'} is not a Leibniz algebra")
    dim = alg.dim

    def phi(x: np.ndarray) -> np.ndarray:
        return mat_exp(alg.ad(x))

    def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a @ b if a.dtype == b.dtype else to_float(a) @ to_float(b)

    def group_coords(a: np.ndarray) -> np.ndarray:
        return linalg.logm(to_float(a)).real.ravel()

    group = GroupOps(
        name=f"Inn({alg.name or 'algebra'})",
        dim=dim * dim,
        multiply=multiply,
        inverse=inverse,
        identity=identity(dim, alg.mode),
        sampler=lambda rng, scale: phi(sample_array(rng, (dim,), scale, alg.mode)),
        chart=lambda c: mat_exp(np.asarray(c, dtype=float).reshape(dim, dim)),
        coords=group_coords,
    )
    return AugmentedRackStructure(
        name=f"kinyon_augmented({alg.name or 'algebra'})",
        carrier=Carrier(dim, lambda x: np.shape(x) == (dim,), f"K^{dim}"),
        unit=zeros((dim,), alg.mode),
        phi=phi,
        group=group,
        ell=matvec,
        sampler=lambda rng, scale: sample_array(rng, (dim,), scale, alg.mode),
        chart=_vector_chart,
        coords=_vector_coords,
    )


def require_chart_point(rack, point: Point, where: str) -> Point:
    if not rack.carrier.contains(point):
        raise ChartError(f"{rack.name}: chart left the carrier at {where}")
    return point

