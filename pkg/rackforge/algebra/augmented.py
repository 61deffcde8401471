"""
Augmented Leibniz algebras (h, p, g, [,]_g, action).

A Lie algebra g acts linearly on h and p: h -> g intertwines the action with
ad on g. The derived bracket [x, y] = p(x).y makes h a Leibniz algebra.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConsistencyError, InputError
from ..models.report_models import CheckRecord, VerificationReport
from .leibniz import (
    LeibnizAlgebra,
    default_labels,
    left_center,
    quotient_by_ideal,
    square_generators,
    squares_ideal,
    verify_leibniz,
    verify_lie,
)
from .linalg import LinearMap, Subspace, kernel
from .scalars import FLOAT_TOL, ScalarMode, as_array, infer_mode, jsonable, max_abs, nonzero_mask, to_float, zeros

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AugmentedLeibnizAlgebra:
    """Lie algebra g, module h, equivariant map p: h -> g and the action matrices of the g-basis."""
    g: LeibnizAlgebra
    p: np.ndarray
    action: np.ndarray
    h_labels: Tuple[str, ...] = field(default=())
    name: str = ""

    def __post_init__(self):
        dim_g = self.g.dim
        if self.p.ndim != 2 or self.p.shape[0] != dim_g:
            raise InputError(f"p must be {dim_g} x dim_h, got shape {self.p.shape}")
        dim_h = self.p.shape[1]
        if self.action.shape != (dim_g, dim_h, dim_h):
            raise InputError(f"action must have shape {(dim_g, dim_h, dim_h)}, got {self.action.shape}")
        if not self.h_labels:
            object.__setattr__(self, "h_labels", default_labels(dim_h))

    @classmethod
    def from_tables(
        cls,
        g_bracket,
        p,
        action,
        mode: ScalarMode = ScalarMode.RATIONAL,
        g_dim: Optional[int] = None,
        h_dim: Optional[int] = None,
        g_labels: Optional[Sequence[str]] = None,
        h_labels: Optional[Sequence[str]] = None,
        name: str = "",
    ) -> "AugmentedLeibnizAlgebra":
        g = LeibnizAlgebra.from_table(g_bracket, mode, g_labels or default_labels(g_dim or 0, "g"), f"{name}.g", g_dim)
        dim_g = g.dim
        p_arr = as_array(p, mode) if dim_g else zeros((0, h_dim or 0), mode)
        dim_h = p_arr.shape[1] if p_arr.ndim == 2 else (h_dim or 0)
        action_arr = as_array(action, mode) if dim_g else zeros((0, dim_h, dim_h), mode)
        return cls(g, p_arr.reshape(dim_g, dim_h), action_arr.reshape(dim_g, dim_h, dim_h),
                   tuple(h_labels or ()), name)

    @property
    def dim_h(self) -> int:
        return self.p.shape[1]

    @property
    def dim_g(self) -> int:
        return self.g.dim

    @property
    def mode(self) -> ScalarMode:
        return infer_mode(self.p)

    def rho(self, xi: np.ndarray) -> np.ndarray:
        """Action matrix of a g-vector: sum of xi_a times the a-th action matrix."""
        xi = np.asarray(xi)
        action = self.action
        if xi.dtype != object or action.dtype != object:
            xi, action = to_float(xi), to_float(action)
        if self.dim_g == 0:
            return zeros((self.dim_h, self.dim_h), infer_mode(action))
        return np.tensordot(xi, action, axes=(0, 0))

    def project(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        p = self.p if x.dtype == object else to_float(self.p)
        return p @ x

    @property
    def projection(self) -> LinearMap:
        return LinearMap(self.p)

    def kernel_of_p(self, tol: float = FLOAT_TOL) -> Subspace:
        if self.dim_g == 0:
            return Subspace.full(self.dim_h, self.mode)
        return Subspace.span(list(kernel(self.p, tol)), self.dim_h, self.mode, tol)

    def __repr__(self) -> str:
        return f"AugmentedLeibnizAlgebra(name={self.name!r}, dim_h={self.dim_h}, dim_g={self.dim_g})"


def derived_bracket(aug: AugmentedLeibnizAlgebra, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """[x, y] = p(x).y"""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != (aug.dim_h,) or y.shape != (aug.dim_h,):
        raise InputError(f"derived_bracket expects vectors of length {aug.dim_h}, got {x.shape} and {y.shape}")
    rho = aug.rho(aug.project(x))
    if rho.dtype != y.dtype:
        rho, y = to_float(rho), to_float(y)
    return rho @ y


def derived_algebra(aug: AugmentedLeibnizAlgebra) -> LeibnizAlgebra:
    """The Leibniz algebra (h, [,]) with c[i, j] = p(e_i).e_j."""
    n = aug.dim_h
    if aug.dim_g == 0:
        structure = zeros((n, n, n), aug.mode)
    else:
        structure = np.tensordot(aug.p, aug.action, axes=(0, 0)).transpose(0, 2, 1)
    return LeibnizAlgebra(structure, aug.h_labels, aug.name or "h")


def verify_augmented(aug: AugmentedLeibnizAlgebra, tol: float = FLOAT_TOL) -> VerificationReport:
    report = VerificationReport(subject=aug.name or "augmented")
    g = aug.g
    report.extend(verify_lie(g, tol), prefix="g_")

    # representation: rho([e_a, e_b]) = [rho(e_a), rho(e_b)]
    worst, counterexample = 0.0, None
    for a in range(aug.dim_g):
        for b in range(aug.dim_g):
            lhs = aug.rho(g.structure[a, b])
            ra, rb = aug.action[a], aug.action[b]
            defect = lhs - (ra @ rb - rb @ ra)
            worst = max(worst, max_abs(defect))
            if counterexample is None and nonzero_mask(defect, tol).any():
                counterexample = {"pair": [a + 1, b + 1], "defect": jsonable(defect)}
    report.add(CheckRecord.build("representation", counterexample is None, worst, counterexample))

    # equivariance: p rho(e_a) = ad_{e_a} p
    worst, counterexample = 0.0, None
    for a in range(aug.dim_g):
        defect = aug.p @ aug.action[a] - g.ad(g.basis_vector(a)) @ aug.p
        worst = max(worst, max_abs(defect))
        if counterexample is None and nonzero_mask(defect, tol).any():
            column = int(np.argwhere(nonzero_mask(defect, tol))[0][1])
            counterexample = {"g_basis": a + 1, "h_basis": column + 1, "defect": jsonable(defect[:, column])}
    report.add(CheckRecord.build("equivariance", counterexample is None, worst, counterexample))

    h = derived_algebra(aug)
    report.extend(verify_leibniz(h, tol), prefix="derived_")

    # each rho(e_a) is a derivation of the derived bracket
    worst, counterexample = 0.0, None
    for a in range(aug.dim_g):
        r = aug.action[a]
        for i in range(aug.dim_h):
            for j in range(aug.dim_h):
                x, y = h.basis_vector(i), h.basis_vector(j)
                defect = r @ h.bracket(x, y) - h.bracket(r @ x, y) - h.bracket(x, r @ y)
                worst = max(worst, max_abs(defect))
                if counterexample is None and nonzero_mask(defect, tol).any():
                    counterexample = {"g_basis": a + 1, "pair": [i + 1, j + 1], "defect": jsonable(defect)}
    report.add(CheckRecord.build("action_by_derivations", counterexample is None, worst, counterexample))

    ker = aug.kernel_of_p(tol)
    squares = Subspace.span(square_generators(h), aug.dim_h, aug.mode, tol)
    center = left_center(h, tol)
    squares_ok = ker.contains(squares, tol)
    report.add(CheckRecord.build(
        "squares_in_kernel", squares_ok, 0.0 if squares_ok else 1.0, squares_dim=squares.dim, kernel_dim=ker.dim,
    ))
    center_ok = center.contains(ker, tol)
    report.add(CheckRecord.build(
        "kernel_in_left_center", center_ok, 0.0 if center_ok else 1.0, kernel_dim=ker.dim, center_dim=center.dim,
    ))
    invariant = all(ker.contains_vector(aug.action[a] @ v, tol) for a in range(aug.dim_g) for v in ker.basis)
    report.add(CheckRecord.build("kernel_invariant", invariant, 0.0 if invariant else 1.0))

    image = Subspace.span(list(aug.p.T), aug.dim_g, aug.mode, tol) if aug.dim_h else Subspace.zero(aug.dim_g, aug.mode)
    image_ideal = all(
        image.contains_vector(g.bracket(g.basis_vector(a), v), tol)
        for a in range(aug.dim_g) for v in image.basis
    )
    report.add(CheckRecord.build("image_ideal", image_ideal, 0.0 if image_ideal else 1.0, image_dim=image.dim))

    if not report.passed:
        failure = report.first_failure()
        logger.info(f"Augmentation {report.subject} fails {failure.name}")
    return report


def canonical_augmentation(alg: LeibnizAlgebra, tol: float = FLOAT_TOL) -> AugmentedLeibnizAlgebra:
    """(h, p, h/Q(h), bracket, ad): the coset of e_i acts by ad_{e_i}."""
    squares = squares_ideal(alg, tol)
    g, projection = quotient_by_ideal(alg, squares, tol)
    if not verify_lie(g, tol).passed:
        raise ConsistencyError(f"{alg.name or 'h'}/Q is not a Lie algebra")

    # Well defined iff ad vanishes on Q(h).
    for v in squares.basis:
        if nonzero_mask(alg.ad(v), tol).any():
            raise ConsistencyError(f"ad does not vanish on Q({alg.name or 'h'})")

    n = alg.dim
    action = zeros((g.dim, n, n), alg.mode)
    for a, i in enumerate(squares.complement_indices):
        action[a] = alg.ad(alg.basis_vector(i))
    aug = AugmentedLeibnizAlgebra(g, projection.matrix, action, alg.labels, alg.name or "h")
    logger.info(f"Canonical augmentation of {alg.name or 'algebra'}: dim h = {n}, dim g = {g.dim}")
    return aug
