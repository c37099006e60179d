"""Dual float/rational number handling.

Tables are numpy arrays of either dtype float64 or dtype object holding
``fractions.Fraction``. Most numpy reductions work on both, which lets the
checkers run one code path for exact and approximate data.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np

FLOAT = "float64"
RATIONAL = "rational"
DEFAULT_FLOAT_TOL = 1e-9


def is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def encoding_of(arr: np.ndarray) -> str:
    return RATIONAL if is_exact(arr) else FLOAT


def default_tol(arr: np.ndarray) -> float:
    return 0 if is_exact(arr) else DEFAULT_FLOAT_TOL


def _all_rational(values) -> bool:
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in values)


def as_array(data, encoding: str | None = None) -> np.ndarray:
    """Coerce nested sequences into a float64 or Fraction-object array.

    With ``encoding=None`` the encoding is rational iff every entry is an int
    or Fraction (or a "p/q" string).
    """
    if isinstance(data, np.ndarray) and data.dtype != object:
        raw = data
    else:
        raw = np.array(data, dtype=object)
        flat = [parse_number(v) if isinstance(v, str) else v for v in raw.flat]
        raw = np.array(flat, dtype=object).reshape(raw.shape)
    if encoding is None:
        encoding = RATIONAL if raw.dtype == object and _all_rational(raw.flat) else FLOAT
    if encoding == RATIONAL:
        return to_rational(raw)
    if encoding == FLOAT:
        return np.asarray(raw, dtype=np.float64).copy()
    raise ValueError(f"unknown encoding {encoding!r}")


def to_rational(arr: np.ndarray, max_denominator: int | None = None) -> np.ndarray:
    """Entrywise exact conversion; floats convert to their exact binary value
    unless ``max_denominator`` is given."""
    arr = np.asarray(arr, dtype=object) if not isinstance(arr, np.ndarray) else arr
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        f = Fraction(v) if not isinstance(v, Fraction) else v
        if max_denominator is not None:
            f = f.limit_denominator(max_denominator)
        out[idx] = f
    return out


def to_float(arr: np.ndarray) -> np.ndarray:
    return np.asarray(arr, dtype=np.float64).copy() if is_exact(arr) else arr.astype(np.float64)


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def parse_number(text):
    """Parse "p/q", "p", or a decimal string. Decimals parse to Fraction exactly."""
    if not isinstance(text, str):
        return text
    return Fraction(text.strip())


def format_number(x, encoding: str):
    if encoding == RATIONAL:
        f = Fraction(x)
        return f"{f.numerator}/{f.denominator}"
    return float(x)


def encode_array(arr: np.ndarray):
    """Nested lists for JSON: floats as numbers, Fractions as "p/q" strings."""
    if not is_exact(arr):
        return arr.tolist()
    flat = [format_number(v, RATIONAL) for v in arr.flat]
    return np.array(flat, dtype=object).reshape(arr.shape).tolist()


def is_extreme(x, tol) -> bool:
    return x <= tol or x >= 1 - tol


def extreme_value(x, tol):
    """Return 0 or 1 if ``x`` is within ``tol`` of it, else None."""
    if x <= tol:
        return 0
    if x >= 1 - tol:
        return 1
    return None


def to_scalar(x):
    """Plain Python number for reporting (Fractions stay exact)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, np.generic):
        return x.item()
    return x
