"""
Simply connected group models for the image Lie algebra g'.

A model fixes how group elements are represented and supplies exp, log (with
an in-domain flag), conjugation, Ad and a factorization of every element into
exponentials. Bundled models are addressed by name through load_model.
"""

import logging
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from scipy import linalg

from ..algebra.leibniz import LeibnizAlgebra
from ..algebra.linalg import Subspace, inverse, least_squares, rank
from ..algebra.scalars import (
    FLOAT_TOL,
    ScalarMode,
    as_array,
    coerce_pair,
    identity,
    infer_mode,
    max_abs,
    sample_array,
    to_float,
    zeros,
)
from ..exceptions import ConfigError, InputError, ModelError, PreconditionError
from ..matrix.exponential import mat_exp, strip_membership, unipotent_log
from ..models.input_models import MatrixLocalParameters
from ..racks.structures import GroupOps

logger = logging.getLogger(__name__)

Element = Any


class GroupModel(ABC):
    """Connected, simply connected Lie group with Lie algebra `algebra`."""

    name: str = "group"

    def __init__(self, algebra: LeibnizAlgebra):
        if not algebra.is_lie:
            raise ConfigError(f"{algebra.name or 'algebra'} is not a Lie algebra; no group model applies")
        self.algebra = algebra

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def exact(self) -> bool:
        """Whether products, exp and log stay in rational arithmetic."""
        return False

    @property
    @abstractmethod
    def identity(self) -> Element:
        ...

    @abstractmethod
    def multiply(self, g: Element, h: Element) -> Element:
        ...

    @abstractmethod
    def inverse(self, g: Element) -> Element:
        ...

    @abstractmethod
    def exp(self, xi: np.ndarray) -> Element:
        ...

    @abstractmethod
    def log(self, g: Element) -> Tuple[np.ndarray, bool]:
        """(xi, in_domain); xi is meaningful only when in_domain is True."""

    @abstractmethod
    def Ad(self, g: Element) -> np.ndarray:
        ...

    @abstractmethod
    def exp_word_factor(self, g: Element) -> List[np.ndarray]:
        """Algebra vectors xi_1..xi_k with g = exp(xi_1) ... exp(xi_k)."""

    def conj(self, g: Element, h: Element) -> Element:
        return self.multiply(self.multiply(g, h), self.inverse(g))

    def ad(self, xi: np.ndarray) -> np.ndarray:
        return self.algebra.ad(xi)

    def contains(self, g: Element) -> bool:
        return np.shape(g) == np.shape(self.identity)

    def flatten(self, g: Element) -> np.ndarray:
        return to_float(np.asarray(g)).ravel()

    def distance(self, a: Element, b: Element) -> float:
        return max_abs(self.flatten(a) - self.flatten(b))

    def sample_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        mode = ScalarMode.RATIONAL if self.exact else ScalarMode.FLOAT64
        return sample_array(rng, (self.dim,), scale, mode)

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> Element:
        return self.exp(self.sample_algebra(rng, scale))

    def coords(self, g: Element) -> np.ndarray:
        xi, in_domain = self.log(g)
        if not in_domain:
            raise ModelError(f"{self.name}: element outside the logarithm domain")
        return to_float(xi)

    def group_ops(self) -> GroupOps:
        return GroupOps(
            name=self.name,
            dim=self.dim,
            multiply=self.multiply,
            inverse=self.inverse,
            identity=self.identity,
            sampler=self.sample,
            chart=self.exp,
            coords=self.coords,
            contains=self.contains,
            flatten=self.flatten,
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}(algebra={self.algebra.name!r}, dim={self.dim})"


def _scaled(vector: np.ndarray, num: int, den: int) -> np.ndarray:
    if vector.dtype == object:
        return vector * Fraction(num, den)
    return vector * (num / den)


def lower_central_series(alg: LeibnizAlgebra, max_steps: int, tol: float = FLOAT_TOL) -> List[Subspace]:
    """[C^1 = g, C^2 = [g, g], ...] until the zero space or max_steps brackets."""
    current = Subspace.full(alg.dim, alg.mode)
    series = [current]
    for _ in range(max_steps):
        if current.dim == 0:
            break
        images = [alg.bracket(alg.basis_vector(i), v) for i in range(alg.dim) for v in current.basis]
        current = Subspace.span(images, alg.dim, alg.mode, tol)
        series.append(current)
    return series


class NilpotentBCHModel(GroupModel):
    """Nilpotent group in exponential coordinates; elements are algebra vectors.

    Multiplication is the Baker-Campbell-Hausdorff series through degree 4,
    which is exact for nilpotency class at most 4.
    """

    name = "nilpotent-bch"
    MAX_CLASS = 4

    def __init__(self, algebra: LeibnizAlgebra):
        super().__init__(algebra)
        series = lower_central_series(algebra, self.MAX_CLASS)
        if series[-1].dim != 0:
            raise ConfigError(
                f"{algebra.name or 'algebra'} is not nilpotent of class <= {self.MAX_CLASS}; "
                f"BCH through degree 4 would be truncated"
            )
        self.nilpotency_class = len(series) - 1

    @property
    def exact(self) -> bool:
        return self.algebra.exact

    @property
    def identity(self) -> np.ndarray:
        return zeros((self.dim,), self.algebra.mode)

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x, y = coerce_pair(x, y)
        br = self.algebra.bracket
        xy = br(x, y)
        x_xy = br(x, xy)
        y_xy = br(y, xy)
        y_x_xy = br(y, x_xy)
        return (x + y + _scaled(xy, 1, 2) + _scaled(x_xy, 1, 12) - _scaled(y_xy, 1, 12)
                - _scaled(y_x_xy, 1, 24))

    def inverse(self, g: np.ndarray) -> np.ndarray:
        return -np.asarray(g)

    def exp(self, xi: np.ndarray) -> np.ndarray:
        return np.array(xi, copy=True)

    def log(self, g: np.ndarray) -> Tuple[np.ndarray, bool]:
        return np.array(g, copy=True), True

    def Ad(self, g: np.ndarray) -> np.ndarray:
        return mat_exp(self.ad(g))

    def exp_word_factor(self, g: np.ndarray) -> List[np.ndarray]:
        return [np.array(g, copy=True)]


def _e2_structure() -> np.ndarray:
    c = np.zeros((3, 3, 3))
    # basis r, x, y with [r, x] = y and [r, y] = -x
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    c[0, 2, 1], c[2, 0, 1] = -1.0, 1.0
    return c


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _v_matrix(alpha: float) -> np.ndarray:
    """V(a) = int_0^1 R(t a) dt."""
    sin_term = np.sinc(alpha / math.pi)
    cos_term = 0.5 * alpha * np.sinc(alpha / (2 * math.pi)) ** 2
    return np.array([[sin_term, -cos_term], [cos_term, sin_term]])


class E2CoverModel(GroupModel):
    """Universal cover of the rigid motions of the plane, R x| R^2.

    Elements are (theta, w_x, w_y) with (t1, w1)(t2, w2) = (t1 + t2, w1 + R(t1) w2).
    The logarithm is defined on |theta| < pi.
    """

    name = "e2-cover"
    THETA_RANGE = 1.25 * math.pi

    def __init__(self, algebra: LeibnizAlgebra, tol: float = FLOAT_TOL):
        super().__init__(algebra)
        if algebra.dim != 3 or max_abs(to_float(algebra.structure) - _e2_structure()) > tol:
            raise ConfigError(
                f"{algebra.name or 'algebra'} does not match the basis r, x, y with [r,x]=y, [r,y]=-x"
            )

    @property
    def identity(self) -> np.ndarray:
        return np.zeros(3)

    def multiply(self, g: np.ndarray, h: np.ndarray) -> np.ndarray:
        g, h = to_float(g), to_float(h)
        return np.concatenate([[g[0] + h[0]], g[1:] + _rotation(g[0]) @ h[1:]])

    def inverse(self, g: np.ndarray) -> np.ndarray:
        g = to_float(g)
        return np.concatenate([[-g[0]], -(_rotation(-g[0]) @ g[1:])])

    def exp(self, xi: np.ndarray) -> np.ndarray:
        xi = to_float(xi)
        return np.concatenate([[xi[0]], _v_matrix(xi[0]) @ xi[1:]])

    def log(self, g: np.ndarray) -> Tuple[np.ndarray, bool]:
        g = to_float(g)
        if abs(g[0]) >= math.pi:
            return np.zeros(3), False
        return np.concatenate([[g[0]], np.linalg.solve(_v_matrix(g[0]), g[1:])]), True

    def Ad(self, g: np.ndarray) -> np.ndarray:
        theta, wx, wy = to_float(g)
        c, s = math.cos(theta), math.sin(theta)
        return np.array([[1.0, 0.0, 0.0], [wy, c, -s], [-wx, s, c]])

    def exp_word_factor(self, g: np.ndarray) -> List[np.ndarray]:
        theta, wx, wy = to_float(g)
        return [np.array([0.0, wx, wy]), np.array([theta, 0.0, 0.0])]

    def sample_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        theta = rng.uniform(-self.THETA_RANGE, self.THETA_RANGE)
        return np.concatenate([[theta], rng.uniform(-scale, scale, size=2)])


class MatrixLocalModel(GroupModel):
    """Matrix group generated by basis matrices B_a with [B_a, B_b] = sum_k c_abk B_k.

    A strictly upper triangular basis gives a unipotent group with a global,
    exact logarithm. Any other basis is a local chart around the identity
    through the principal logarithm; elements whose logarithm leaves the span
    of the basis or the pi-strip are outside the chart.
    """

    name = "matrix-local"

    def __init__(self, algebra: LeibnizAlgebra, basis_matrices: Sequence[Any], tol: float = FLOAT_TOL):
        super().__init__(algebra)
        if not isinstance(basis_matrices, (list, tuple, np.ndarray)):
            raise InputError(f"matrix-local: basis_matrices must be a list, got {type(basis_matrices).__name__}")
        if len(basis_matrices) != algebra.dim:
            raise InputError(f"matrix-local: {len(basis_matrices)} basis matrices for dimension {algebra.dim}")
        if len(basis_matrices) == 0:
            raise InputError("matrix-local: empty basis")
        self.tol = tol
        self.basis = [as_array(b, algebra.mode) for b in basis_matrices]
        self.size = self.basis[0].shape[0]
        for a, b in enumerate(self.basis):
            if b.shape != (self.size, self.size):
                raise InputError(f"matrix-local: basis_matrices[{a}] has shape {b.shape}")
        self.unipotent = all(not np.any(np.tril(to_float(b)) != 0) for b in self.basis)
        self.columns = np.stack([b.ravel() for b in self.basis], axis=1)
        if rank(self.columns, tol) != algebra.dim:
            raise ConfigError("matrix-local: basis matrices are linearly dependent")
        self._check_commutators()
        logger.info(f"Matrix-local model of size {self.size}, unipotent={self.unipotent}")

    def _check_commutators(self):
        c = self.algebra.structure
        for a, ba in enumerate(self.basis):
            for b, bb in enumerate(self.basis):
                commutator = ba @ bb - bb @ ba
                expected = self.combine(c[a, b])
                if max_abs(to_float(commutator) - to_float(expected)) > self.tol:
                    raise ConfigError(
                        f"matrix-local: [B{a + 1}, B{b + 1}] does not match the structure constants"
                    )

    @property
    def exact(self) -> bool:
        return self.unipotent and self.algebra.exact

    @property
    def identity(self) -> np.ndarray:
        return identity(self.size, self.algebra.mode if self.exact else ScalarMode.FLOAT64)

    def combine(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi)
        exact = xi.dtype == object and self.algebra.exact
        total = zeros((self.size, self.size), ScalarMode.RATIONAL if exact else ScalarMode.FLOAT64)
        for coeff, b in zip(xi if exact else to_float(xi), self.basis):
            total = total + coeff * (b if exact else to_float(b))
        return total

    def _coords(self, matrix: np.ndarray) -> np.ndarray:
        columns = self.columns if matrix.dtype == object else to_float(self.columns)
        return least_squares(columns, matrix.ravel())

    def multiply(self, g: np.ndarray, h: np.ndarray) -> np.ndarray:
        g, h = coerce_pair(g, h)
        return g @ h

    def inverse(self, g: np.ndarray) -> np.ndarray:
        return inverse(np.asarray(g))

    def exp(self, xi: np.ndarray) -> np.ndarray:
        return mat_exp(self.combine(xi))

    def log(self, g: np.ndarray) -> Tuple[np.ndarray, bool]:
        g = np.asarray(g)
        if self.unipotent:
            try:
                return self._coords(unipotent_log(g, self.tol)), True
            except PreconditionError:
                return zeros((self.dim,), infer_mode(g)), False
        log = linalg.logm(to_float(g))
        if not np.all(np.isfinite(log)) or max_abs(np.imag(log)) > self.tol:
            return np.zeros(self.dim), False
        log = np.real(log)
        xi = self._coords(log)
        if max_abs(to_float(self.combine(xi)) - log) > 1e-8 * max(1.0, max_abs(log)):
            return np.zeros(self.dim), False
        if not strip_membership(self.ad(xi), math.pi).member:
            return np.zeros(self.dim), False
        return xi, True

    def Ad(self, g: np.ndarray) -> np.ndarray:
        g = np.asarray(g)
        g_inv = self.inverse(g)
        columns = []
        for b in self.basis:
            b = b if g.dtype == object else to_float(b)
            columns.append(self._coords(g @ b @ g_inv))
        return np.stack(columns, axis=1)

    def exp_word_factor(self, g: np.ndarray) -> List[np.ndarray]:
        xi, in_domain = self.log(g)
        if not in_domain:
            raise ModelError(f"{self.name}: element outside the local chart")
        return [xi]

    def contains(self, g: np.ndarray) -> bool:
        if np.shape(g) != (self.size, self.size):
            return False
        return abs(np.linalg.det(to_float(g))) > 1e-12

    def flatten(self, g: np.ndarray) -> np.ndarray:
        return to_float(np.asarray(g)).ravel()


MODELS = {
    NilpotentBCHModel.name: NilpotentBCHModel,
    E2CoverModel.name: E2CoverModel,
    MatrixLocalModel.name: MatrixLocalModel,
}


def load_model(name: str, algebra: LeibnizAlgebra, parameters: Optional[Dict[str, Any]] = None) -> GroupModel:
    """Instantiate a bundled model by name."""
    parameters = dict(parameters or {})
    if name not in MODELS:
        raise ConfigError(f"unknown group model {name!r}; choose from {sorted(MODELS)}")
    if name == MatrixLocalModel.name:
        if "basis_matrices" not in parameters:
            raise ConfigError("matrix-local model needs parameters.basis_matrices")
        try:
            checked = MatrixLocalParameters.model_validate({"basis_matrices": parameters.pop("basis_matrices")})
        except ValidationError as e:
            raise InputError(f"matrix-local parameters: {e}") from e
        model = MatrixLocalModel(algebra, checked.basis_matrices)
    else:
        model = MODELS[name](algebra)
    if parameters:
        logger.warning(f"Ignoring unknown parameters for {name}: {sorted(parameters)}")
    logger.info(f"Loaded group model {model!r}")
    return model
