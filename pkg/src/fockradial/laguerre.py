"""Laguerre polynomials: stable evaluation, exact coefficients, exponential moments.

The degree-m Laguerre polynomial has the explicit form

    L_m(x) = sum_{k=0}^{m} (-1)^k binom(m, k) x^k / k!

and satisfies the three-term recurrence

    (k + 1) L_{k+1}(x) = (2k + 1 - x) L_k(x) - k L_{k-1}(x),
    L_0(x) = 1,  L_1(x) = 1 - x.

Floating-point evaluation goes through the recurrence, which stays well
behaved on [0, oo); the explicit sum cancels catastrophically for large
arguments.  Exact rational coefficients and moments are retained alongside
the float paths and serve as test oracles for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, lgamma

import numpy as np

__all__ = [
    "DEFAULT_DEGREE_CAP",
    "DegreeCapError",
    "LaguerrePoly",
    "laguerre_coeffs",
    "laguerre_eval",
    "laguerre_eval_all",
    "laguerre_moment",
    "laguerre_moment_signed_log",
]

DEFAULT_DEGREE_CAP = 64


class DegreeCapError(ValueError):
    """Raised when a requested degree exceeds the configured cap."""


def _check_index(m, name: str = "m") -> int:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {m!r}")
    if m < 0:
        raise ValueError(f"{name} must be nonnegative, got {m}")
    return int(m)


def _as_float_array(x) -> np.ndarray:
    # keep extended-precision floats as they are; everything else becomes float64
    arr = np.asarray(x)
    if arr.dtype.kind != "f":
        arr = arr.astype(float)
    return arr


def laguerre_eval(m: int, x):
    """Evaluate L_m at x (scalar or array) via the three-term recurrence.

    The float dtype of `x` is preserved, so extended-precision input yields
    extended-precision output.
    """
    m = _check_index(m)
    arr = _as_float_array(x)
    if not np.all(np.isfinite(arr)):
        raise ValueError("x must be finite")
    prev = np.ones_like(arr)
    if m == 0:
        return float(prev) if arr.ndim == 0 else prev
    cur = 1.0 - arr
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 - arr) * cur - k * prev) / (k + 1)
    return float(cur) if arr.ndim == 0 else cur


def laguerre_eval_all(m_max: int, x) -> np.ndarray:
    """Evaluate L_0, ..., L_{m_max} at x in one recurrence sweep.

    Returns an array of shape (m_max + 1,) + shape(atleast_1d(x)).
    """
    m_max = _check_index(m_max, "m_max")
    arr = np.atleast_1d(_as_float_array(x))
    if not np.all(np.isfinite(arr)):
        raise ValueError("x must be finite")
    out = np.empty((m_max + 1,) + arr.shape, dtype=arr.dtype)
    out[0] = 1.0
    if m_max >= 1:
        out[1] = 1.0 - arr
    for k in range(1, m_max):
        out[k + 1] = ((2 * k + 1 - arr) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def laguerre_coeffs(m: int, max_degree: int = DEFAULT_DEGREE_CAP) -> list[Fraction]:
    """Exact coefficients [c_0, ..., c_m] of L_m, with c_k = (-1)^k binom(m, k) / k!."""
    m = _check_index(m)
    if m > max_degree:
        raise DegreeCapError(f"degree {m} exceeds the configured cap {max_degree}")
    return [Fraction((-1) ** k * comb(m, k), factorial(k)) for k in range(m + 1)]


@dataclass(frozen=True)
class LaguerrePoly:
    """A Laguerre polynomial held as exact rational coefficients.

    `eval_exact` is free of rounding and cancellation, which makes it the
    oracle against which the recurrence path is checked.
    """

    degree: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.degree + 1:
            raise ValueError("coefficient count must be degree + 1")
        if self.coefficients[0] != 1:
            raise ValueError("constant coefficient of every Laguerre polynomial is 1")

    @classmethod
    def of_degree(cls, m: int, max_degree: int = DEFAULT_DEGREE_CAP) -> "LaguerrePoly":
        return cls(m, tuple(laguerre_coeffs(m, max_degree)))

    def eval_exact(self, x) -> Fraction:
        """Horner evaluation in exact rational arithmetic.

        Floats are converted through Fraction, which is exact (binary floats
        are dyadic rationals).
        """
        if isinstance(x, float):
            x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __call__(self, x) -> float:
        return float(self.eval_exact(x))


def laguerre_moment(m: int, n: int) -> Fraction:
    """Exact weighted power moment of L_m against r^n with weight e^{-r} on [0, oo).

    Vanishes for m > n; equals (-1)^m (n!)^2 / ((n - m)! m!) otherwise.
    """
    m = _check_index(m)
    n = _check_index(n, "n")
    if m > n:
        return Fraction(0)
    return Fraction((-1) ** m * factorial(n) ** 2, factorial(n - m) * factorial(m))


def laguerre_moment_signed_log(m: int, n: int) -> tuple[int, float]:
    """Float-safe variant of `laguerre_moment`: (sign, log magnitude).

    Returns (0, -inf) when the moment vanishes.  The log magnitude is computed
    through lgamma so that values far beyond the float range stay usable.
    """
    m = _check_index(m)
    n = _check_index(n, "n")
    if m > n:
        return 0, float("-inf")
    sign = -1 if m % 2 else 1
    return sign, 2.0 * lgamma(n + 1) - lgamma(n - m + 1) - lgamma(m + 1)
