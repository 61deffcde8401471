"""
Dense linear algebra over the rationals (exact) or float64 (tolerance-based).

Gaussian elimination is written once and runs on numpy object arrays of
Fraction as well as on float arrays.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from ..exceptions import InputError, NumericError
from .scalars import FLOAT_TOL, ScalarMode, as_array, identity, infer_mode, max_abs, to_float, zeros

logger = logging.getLogger(__name__)


def row_reduce(matrix: np.ndarray, tol: float = FLOAT_TOL) -> Tuple[np.ndarray, List[int]]:
    """Reduced row-echelon form and pivot columns.

    Exact arrays pick the first nonzero entry as pivot; float arrays use
    partial pivoting and treat entries below tol*max(1, |M|) as zero.
    """
    a = np.array(matrix, copy=True)
    exact = a.dtype == object
    if not exact:
        a = a.astype(np.float64)
    if a.ndim != 2:
        raise InputError(f"row_reduce expects a 2-d array, got shape {a.shape}")
    rows, cols = a.shape
    threshold = 0.0 if exact else tol * max(1.0, max_abs(a))
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        if exact:
            p = next((i for i in range(r, rows) if a[i, c] != 0), None)
            if p is None:
                continue
        else:
            p = r + int(np.argmax(np.abs(a[r:, c])))
            if abs(a[p, c]) <= threshold:
                a[r:, c] = 0.0
                continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    if not exact:
        a[np.abs(a) <= threshold] = 0.0
    return a, pivots


def rank(matrix: np.ndarray, tol: float = FLOAT_TOL) -> int:
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    return len(row_reduce(matrix, tol)[1])


def kernel(matrix: np.ndarray, tol: float = FLOAT_TOL) -> np.ndarray:
    """Basis (as rows) of {v : M v = 0}."""
    matrix = np.asarray(matrix)
    mode = infer_mode(matrix)
    rows, cols = matrix.shape
    if rows == 0:
        return identity(cols, mode)
    reduced, pivots = row_reduce(matrix, tol)
    free = [c for c in range(cols) if c not in pivots]
    basis = zeros((len(free), cols), mode)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = -reduced[r, f]
    return basis


def solve(a: np.ndarray, b: np.ndarray, tol: float = FLOAT_TOL) -> np.ndarray:
    """Solve a x = b for square invertible a; b may be a vector or a matrix."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InputError(f"solve expects a square matrix, got {a.shape}")
    if a.dtype != object or b.dtype != object:
        try:
            return np.linalg.solve(to_float(a), to_float(b))
        except np.linalg.LinAlgError as e:
            raise NumericError(f"singular system: {e}") from e
    vector = b.ndim == 1
    rhs = b.reshape(n, -1)
    augmented = np.concatenate([a, rhs], axis=1)
    reduced, pivots = row_reduce(augmented)
    if pivots[:n] != list(range(n)):
        raise NumericError("singular system in exact arithmetic")
    x = reduced[:, n:]
    return x[:, 0] if vector else x


def inverse(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    return solve(a, identity(a.shape[0], infer_mode(a)))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of K^n held by its reduced row-echelon basis (one row per vector)."""
    ambient_dim: int
    basis: np.ndarray
    pivots: Tuple[int, ...] = ()

    @classmethod
    def span(
        cls,
        vectors: Iterable[np.ndarray],
        ambient_dim: int,
        mode: ScalarMode,
        tol: float = FLOAT_TOL,
    ) -> "Subspace":
        rows = [np.asarray(v) for v in vectors]
        if not rows:
            return cls.zero(ambient_dim, mode)
        stacked = as_array(np.stack(rows), mode) if mode == ScalarMode.FLOAT64 else np.stack(rows)
        if stacked.shape[1] != ambient_dim:
            raise InputError(f"vectors of length {stacked.shape[1]} in ambient dimension {ambient_dim}")
        if mode == ScalarMode.RATIONAL:
            stacked = as_array(stacked, mode)
        reduced, pivots = row_reduce(stacked, tol)
        return cls(ambient_dim, reduced[: len(pivots)], tuple(pivots))

    @classmethod
    def zero(cls, ambient_dim: int, mode: ScalarMode) -> "Subspace":
        return cls(ambient_dim, zeros((0, ambient_dim), mode), ())

    @classmethod
    def full(cls, ambient_dim: int, mode: ScalarMode) -> "Subspace":
        return cls(ambient_dim, identity(ambient_dim, mode), tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def mode(self) -> ScalarMode:
        return infer_mode(self.basis)

    @property
    def complement_indices(self) -> Tuple[int, ...]:
        """Coordinates not used as pivots; their unit vectors span a complement."""
        return tuple(c for c in range(self.ambient_dim) if c not in self.pivots)

    def contains_vector(self, vector: np.ndarray, tol: float = FLOAT_TOL) -> bool:
        residual = self.reduce(vector)
        if residual.dtype == object:
            return all(v == 0 for v in residual)
        return max_abs(residual) <= tol * max(1.0, max_abs(vector))

    def contains(self, other: "Subspace", tol: float = FLOAT_TOL) -> bool:
        return all(self.contains_vector(v, tol) for v in other.basis)

    def reduce(self, vector: np.ndarray) -> np.ndarray:
        """Remainder of a vector after subtracting its pivot components."""
        out = np.array(vector, copy=True)
        if self.basis.dtype != object and out.dtype == object:
            out = to_float(out)
        for row, pc in zip(self.basis, self.pivots):
            coeff = out[pc]
            if coeff != 0:
                out = out - coeff * row
        return out

    def same_as(self, other: "Subspace", tol: float = FLOAT_TOL) -> bool:
        return self.dim == other.dim and self.contains(other, tol)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Matrix of a linear map K^cols -> K^rows."""
    matrix: np.ndarray

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def mode(self) -> ScalarMode:
        return infer_mode(self.matrix)

    def __call__(self, vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector)
        if vector.shape[0] != self.cols:
            raise InputError(f"map expects vectors of length {self.cols}, got {vector.shape[0]}")
        return self.matrix @ vector

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self after other."""
        if other.rows != self.cols:
            raise InputError(f"cannot compose {self.rows}x{self.cols} after {other.rows}x{other.cols}")
        return LinearMap(self.matrix @ other.matrix)

    def kernel(self, tol: float = FLOAT_TOL) -> Subspace:
        return Subspace.span(list(kernel(self.matrix, tol)), self.cols, self.mode, tol)

    def rank(self, tol: float = FLOAT_TOL) -> int:
        return rank(self.matrix, tol)


def right_inverse_columns(matrix: np.ndarray, tol: float = FLOAT_TOL) -> Optional[List[int]]:
    """Pivot columns of a full-row-rank matrix (None if rank deficient)."""
    matrix = np.asarray(matrix)
    _, pivots = row_reduce(matrix, tol)
    if len(pivots) != matrix.shape[0]:
        return None
    return pivots


def least_squares(columns: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Coefficients c minimizing |A c - b| for A of full column rank (exact normal equations)."""
    columns = np.asarray(columns)
    target = np.asarray(target)
    if columns.dtype == object and target.dtype == object:
        return solve(columns.T @ columns, columns.T @ target)
    solution, *_ = np.linalg.lstsq(to_float(columns), to_float(target), rcond=None)
    return solution
