"""
Scalar fields used by rackforge: exact rationals or double-precision floats.

Exact mode stores numpy object arrays of fractions.Fraction; float mode stores
float64 arrays. The mode is fixed per algebra instance.
"""

from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Union

import numpy as np

from ..exceptions import InputError

FLOAT_TOL = 1e-9

Scalar = Union[Fraction, float]


class ScalarMode(str, Enum):
    RATIONAL = "rational"
    FLOAT64 = "float64"


def parse_scalar(value: Any, mode: ScalarMode) -> Scalar:
    """Parse a file entry: int, float or "num/den" string."""
    if isinstance(value, bool):
        raise InputError(f"boolean {value!r} is not a scalar")
    if mode == ScalarMode.RATIONAL:
        if isinstance(value, float):
            raise InputError(f"float {value!r} in rational mode; write it as a \"num/den\" string")
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError, TypeError) as e:
            raise InputError(f"cannot parse {value!r} as a rational: {e}") from e
    try:
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise InputError(f"cannot parse {value!r} as a float: {e}") from e


def as_array(data: Any, mode: ScalarMode) -> np.ndarray:
    """Convert nested lists (or an array) to an array of the requested mode."""
    if mode == ScalarMode.RATIONAL:
        raw = np.array(data, dtype=object)
        out = np.empty(raw.shape, dtype=object)
        for idx, value in np.ndenumerate(raw):
            if isinstance(value, Fraction):
                out[idx] = value
            elif isinstance(value, (Rational, str)):
                out[idx] = parse_scalar(value, mode)
            elif isinstance(value, (float, np.floating)) and float(value).is_integer():
                out[idx] = Fraction(int(value))
            else:
                out[idx] = parse_scalar(value, mode)
        return out
    if isinstance(data, np.ndarray) and data.dtype == object:
        return np.vectorize(float, otypes=[np.float64])(data) if data.size else data.astype(np.float64)
    raw = np.array(data, dtype=object)
    if raw.size == 0:
        return np.zeros(raw.shape, dtype=np.float64)
    return np.vectorize(lambda v: parse_scalar(v, mode), otypes=[np.float64])(raw)


def infer_mode(array: np.ndarray) -> ScalarMode:
    return ScalarMode.RATIONAL if array.dtype == object else ScalarMode.FLOAT64


def zeros(shape, mode: ScalarMode) -> np.ndarray:
    if mode == ScalarMode.RATIONAL:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=np.float64)


def identity(n: int, mode: ScalarMode) -> np.ndarray:
    out = zeros((n, n), mode)
    for i in range(n):
        out[i, i] = Fraction(1) if mode == ScalarMode.RATIONAL else 1.0
    return out


def unit_vector(n: int, i: int, mode: ScalarMode) -> np.ndarray:
    out = zeros((n,), mode)
    out[i] = Fraction(1) if mode == ScalarMode.RATIONAL else 1.0
    return out


def to_float(array: np.ndarray) -> np.ndarray:
    """Float view of an exact or float array (complex arrays are kept complex)."""
    array = np.asarray(array)
    if array.dtype == object:
        if array.size == 0:
            return np.zeros(array.shape, dtype=np.float64)
        return np.vectorize(float, otypes=[np.float64])(array)
    return array


def max_abs(array: Any) -> float:
    array = to_float(np.asarray(array))
    return float(np.max(np.abs(array))) if array.size else 0.0


def is_zero(array: Any, tol: float = FLOAT_TOL) -> bool:
    """Exact zero test in rational mode, absolute tolerance test otherwise."""
    array = np.asarray(array)
    if array.dtype == object:
        return all(v == 0 for v in array.flat)
    return max_abs(array) <= tol


def nonzero_mask(array: Any, tol: float = FLOAT_TOL) -> np.ndarray:
    """Boolean mask of entries that count as nonzero in the array's own mode."""
    array = np.asarray(array)
    if array.dtype == object:
        if not array.size:
            return np.zeros(array.shape, dtype=bool)
        return np.vectorize(lambda v: v != 0, otypes=[bool])(array)
    return np.abs(array) > tol


def coerce_pair(a: np.ndarray, b: np.ndarray):
    """Bring two operands to a common mode (float wins)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if (a.dtype == object) == (b.dtype == object):
        return a, b
    return to_float(a), to_float(b)


def mixed_mode(*arrays: np.ndarray) -> ScalarMode:
    """Rational only if every operand is exact."""
    if all(np.asarray(a).dtype == object for a in arrays):
        return ScalarMode.RATIONAL
    return ScalarMode.FLOAT64


def jsonable(value: Any) -> Any:
    """Render scalars and arrays for JSON reports (fractions as "num/den" strings)."""
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value]
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def format_vector(values: Iterable[Any]) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


def sample_array(rng: np.random.Generator, shape, scale: float, mode: ScalarMode, denominator: int = 16) -> np.ndarray:
    """Uniform samples in [-scale, scale]; rational mode draws multiples of 1/denominator."""
    if mode == ScalarMode.RATIONAL:
        bound = max(1, int(round(scale * denominator)))
        numerators = rng.integers(-bound, bound + 1, size=shape)
        out = np.empty(numerators.shape, dtype=object)
        for idx, k in np.ndenumerate(numerators):
            out[idx] = Fraction(int(k), denominator)
        return out
    return rng.uniform(-scale, scale, size=shape)


def matvec(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    matrix, vector = coerce_pair(matrix, vector)
    return matrix @ vector
