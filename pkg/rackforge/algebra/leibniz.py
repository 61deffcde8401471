"""
Leibniz algebras given by structure constants.

c[i][j][k] is the coefficient of e_k in [e_i, e_j]. All checks run on basis
elements: exactly for rational tables, with absolute tolerance for float tables.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ConsistencyError, InputError, PreconditionError
from ..models.report_models import CheckRecord, VerificationReport
from .linalg import LinearMap, Subspace, kernel
from .scalars import (
    FLOAT_TOL,
    ScalarMode,
    as_array,
    identity,
    infer_mode,
    jsonable,
    max_abs,
    nonzero_mask,
    to_float,
    unit_vector,
    zeros,
)

logger = logging.getLogger(__name__)


def default_labels(dim: int, prefix: str = "e") -> Tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(dim))


@dataclass(frozen=True, eq=False)
class LeibnizAlgebra:
    """Bracket table of a finite-dimensional algebra (Leibniz identity checked, not assumed)."""
    structure: np.ndarray
    labels: Tuple[str, ...] = field(default=())
    name: str = ""

    def __post_init__(self):
        c = self.structure
        if c.ndim != 3 or len(set(c.shape)) > 1:
            raise InputError(f"structure table must be dim x dim x dim, got shape {c.shape}")
        if not self.labels:
            object.__setattr__(self, "labels", default_labels(c.shape[0]))
        elif len(self.labels) != c.shape[0]:
            raise InputError(f"{len(self.labels)} labels for dimension {c.shape[0]}")

    @classmethod
    def from_table(
        cls,
        table,
        mode: ScalarMode = ScalarMode.RATIONAL,
        labels: Optional[Sequence[str]] = None,
        name: str = "",
        dim: Optional[int] = None,
    ) -> "LeibnizAlgebra":
        if dim == 0 or (dim is None and len(table) == 0):
            return cls(zeros((0, 0, 0), mode), tuple(labels or ()), name)
        return cls(as_array(table, mode), tuple(labels or ()), name)

    @classmethod
    def abelian(cls, dim: int, mode: ScalarMode = ScalarMode.RATIONAL, name: str = "") -> "LeibnizAlgebra":
        return cls(zeros((dim, dim, dim), mode), (), name or f"abelian_dim{dim}")

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    @property
    def mode(self) -> ScalarMode:
        return infer_mode(self.structure)

    @property
    def exact(self) -> bool:
        return self.mode == ScalarMode.RATIONAL

    def basis_vector(self, i: int) -> np.ndarray:
        return unit_vector(self.dim, i, self.mode)

    def _operands(self, *vectors: np.ndarray):
        out = [np.asarray(v) for v in vectors]
        for v in out:
            if v.shape != (self.dim,):
                raise InputError(f"expected a vector of length {self.dim}, got shape {v.shape}")
        if self.exact and all(v.dtype == object for v in out):
            return self.structure, out
        return to_float(self.structure), [to_float(v) for v in out]

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        c, (x, y) = self._operands(x, y)
        if self.dim == 0:
            return np.array(x, copy=True)
        return np.tensordot(y, np.tensordot(x, c, axes=(0, 0)), axes=(0, 0))

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> [x, y]."""
        c, (x,) = self._operands(x)
        if self.dim == 0:
            return zeros((0, 0), infer_mode(c))
        return np.tensordot(x, c, axes=(0, 0)).T

    @cached_property
    def is_lie(self) -> bool:
        return verify_lie(self).passed

    def __repr__(self) -> str:
        return f"LeibnizAlgebra(name={self.name!r}, dim={self.dim}, mode={self.mode.value})"


def leibniz_defects(alg: LeibnizAlgebra) -> np.ndarray:
    """D[i,j,k] = [[e_i,e_j],e_k] + [e_j,[e_i,e_k]] - [e_i,[e_j,e_k]]."""
    c = alg.structure
    outer = np.tensordot(c, c, axes=([2], [0]))
    inner = np.tensordot(c, c, axes=([1], [2])).transpose(0, 2, 3, 1)
    return outer + inner.transpose(1, 0, 2, 3) - inner


def verify_leibniz(alg: LeibnizAlgebra, tol: float = FLOAT_TOL) -> VerificationReport:
    report = VerificationReport(subject=alg.name or "algebra")
    if alg.dim == 0:
        report.add(CheckRecord.build("leibniz_identity", True))
        return report
    defects = leibniz_defects(alg)
    bad = np.any(nonzero_mask(defects, tol), axis=3)
    violations = [tuple(int(v) + 1 for v in idx) for idx in np.argwhere(bad)]
    counterexample = None
    if violations:
        i, j, k = violations[0]
        counterexample = {"triple": list(violations[0]), "defect": jsonable(defects[i - 1, j - 1, k - 1])}
        logger.info(f"Leibniz identity fails on {len(violations)} basis triples of {report.subject}")
    report.add(CheckRecord.build(
        "leibniz_identity",
        not violations,
        max_abs(defects),
        counterexample,
        violations=[list(t) for t in violations],
    ))
    return report


def verify_lie(alg: LeibnizAlgebra, tol: float = FLOAT_TOL) -> VerificationReport:
    """Antisymmetry plus the Leibniz identity (which is Jacobi once antisymmetry holds)."""
    report = VerificationReport(subject=alg.name or "algebra")
    c = alg.structure
    sym = c + c.transpose(1, 0, 2)
    bad = np.argwhere(np.any(nonzero_mask(sym, tol), axis=2)) if alg.dim else []
    counterexample = None
    if len(bad):
        i, j = (int(v) for v in bad[0])
        counterexample = {"pair": [i + 1, j + 1], "defect": jsonable(sym[i, j])}
    report.add(CheckRecord.build("antisymmetry", not len(bad), max_abs(sym), counterexample))
    report.extend(verify_leibniz(alg, tol))
    return report


def adjoint_map(alg: LeibnizAlgebra, x: np.ndarray) -> LinearMap:
    return LinearMap(alg.ad(x))


def _span_of_images(alg: LeibnizAlgebra, vectors, tol: float) -> Subspace:
    return Subspace.span(vectors, alg.dim, alg.mode, tol)


def square_generators(alg: LeibnizAlgebra):
    """[e_i,e_i] and [e_i,e_j] + [e_j,e_i]; by polarization these span all squares."""
    c = alg.structure
    gens = [c[i, i] for i in range(alg.dim)]
    gens += [c[i, j] + c[j, i] for i in range(alg.dim) for j in range(i + 1, alg.dim)]
    return gens


def ideal_check(alg: LeibnizAlgebra, ideal: Subspace, tol: float = FLOAT_TOL) -> VerificationReport:
    """[I, h] and [h, I] both land in I."""
    report = VerificationReport(subject=alg.name or "algebra")
    worst = 0.0
    counterexample = None
    for r, v in enumerate(ideal.basis):
        for j in range(alg.dim):
            e = alg.basis_vector(j)
            for side, w in (("left", alg.bracket(v, e)), ("right", alg.bracket(e, v))):
                if ideal.contains_vector(w, tol):
                    continue
                residual = ideal.reduce(w)
                worst = max(worst, max_abs(residual))
                if counterexample is None:
                    counterexample = {"ideal_vector": r + 1, "basis": j + 1, "side": side,
                                      "bracket": jsonable(w)}
    report.add(CheckRecord.build("two_sided_ideal", counterexample is None, worst, counterexample))
    return report


def squares_ideal(alg: LeibnizAlgebra, tol: float = FLOAT_TOL) -> Subspace:
    """Q(h): the span of all squares [x, x]."""
    q = _span_of_images(alg, square_generators(alg), tol)
    if not ideal_check(alg, q, tol).passed:
        raise PreconditionError(f"squares of {alg.name or 'algebra'} do not span an ideal; is it Leibniz?")
    logger.debug(f"Q({alg.name or 'h'}) has dimension {q.dim}")
    return q


def left_center(alg: LeibnizAlgebra, tol: float = FLOAT_TOL) -> Subspace:
    """z(h) = {x : [x, y] = 0 for all y}."""
    n = alg.dim
    if n == 0:
        return Subspace.zero(0, alg.mode)
    rows = alg.structure.reshape(n, n * n).T
    z = Subspace.span(list(kernel(rows, tol)), n, alg.mode, tol)
    q = _span_of_images(alg, square_generators(alg), tol)
    if not z.contains(q, tol):
        logger.warning(f"Q is not contained in z for {alg.name or 'algebra'}; input is not Leibniz")
    return z


def quotient_by_ideal(
    alg: LeibnizAlgebra, ideal: Subspace, tol: float = FLOAT_TOL
) -> Tuple[LeibnizAlgebra, LinearMap]:
    """Quotient algebra on the non-pivot coordinates of the ideal, plus the projection."""
    if ideal.ambient_dim != alg.dim:
        raise InputError(f"ideal lives in dimension {ideal.ambient_dim}, algebra has {alg.dim}")
    check = ideal_check(alg, ideal, tol)
    if not check.passed:
        raise PreconditionError(f"not a two-sided ideal: {check.checks[0].counterexample}")

    comp = ideal.complement_indices
    m = len(comp)
    projection = zeros((m, alg.dim), alg.mode)
    projection[:, list(comp)] = identity(m, alg.mode)
    for row, pc in zip(ideal.basis, ideal.pivots):
        projection[:, pc] = -row[list(comp)]

    structure = zeros((m, m, m), alg.mode)
    for a, ia in enumerate(comp):
        for b, ib in enumerate(comp):
            structure[a, b] = projection @ alg.structure[ia, ib]
    labels = tuple(alg.labels[i] for i in comp)
    name = f"{alg.name or 'h'}/I" if ideal.dim else alg.name
    quotient = LeibnizAlgebra(structure, labels, name)
    logger.debug(f"Quotient of {alg.name or 'algebra'} by a {ideal.dim}-dim ideal has dimension {m}")
    return quotient, LinearMap(projection)


def center_quotient(alg: LeibnizAlgebra, tol: float = FLOAT_TOL) -> Tuple[LeibnizAlgebra, LinearMap]:
    """h / z(h), a Lie algebra for every Leibniz algebra h."""
    return quotient_by_ideal(alg, left_center(alg, tol), tol)


def lie_quotient(alg: LeibnizAlgebra, tol: float = FLOAT_TOL) -> Tuple[LeibnizAlgebra, LinearMap]:
    """h / Q(h) with a consistency check that the result is Lie."""
    quotient, projection = quotient_by_ideal(alg, squares_ideal(alg, tol), tol)
    if not verify_lie(quotient, tol).passed:
        raise ConsistencyError(f"{quotient.name} is not a Lie algebra")
    return quotient, projection
