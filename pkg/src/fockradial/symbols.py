"""Radial defining symbols on [0, oo).

The central family is the Laguerre-Gaussian symbol of degree m and integer
scale xi >= 2,

    a(x) = (-1)^m xi^(m+1) exp(-(xi - 1) x^2) L_m(xi x^2),

together with finite linear combinations sharing one scale, an optional
constant offset, plain constants, and user-supplied callables.  Evaluation
combines the scale power, the Gaussian factor and the polynomial magnitude in
log space with explicit sign tracking, so large m and xi neither overflow the
power nor lose the underflowing Gaussian prematurely.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .laguerre import _check_index, laguerre_eval, laguerre_eval_all
from .seqspace import scalar_from_json, scalar_to_json

__all__ = [
    "CallableSymbol",
    "ComboSymbol",
    "ConstantSymbol",
    "LaguerreGaussianSymbol",
    "OffsetComboSymbol",
    "Symbol",
    "basic_symbol",
    "combo_symbol",
    "describe_symbol",
    "eval_symbol",
    "sup_estimate",
    "symbol_from_json",
    "symbol_to_json",
    "with_limit_offset",
]


def _check_scale(xi) -> int:
    if isinstance(xi, bool) or not isinstance(xi, (int, np.integer)):
        raise ValueError(f"scale xi must be an integer, got {xi!r}")
    if xi < 2:
        raise ValueError(f"scale xi must be >= 2, got {xi}")
    return int(xi)


@dataclass(frozen=True)
class ConstantSymbol:
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True)
class LaguerreGaussianSymbol:
    m: int
    xi: int

    def __post_init__(self):
        object.__setattr__(self, "m", _check_index(self.m))
        object.__setattr__(self, "xi", _check_scale(self.xi))


@dataclass(frozen=True)
class ComboSymbol:
    xi: int
    coefficients: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "xi", _check_scale(self.xi))
        coeffs = tuple(complex(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("combo needs at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)


@dataclass(frozen=True)
class OffsetComboSymbol:
    combo: ComboSymbol
    p: complex

    def __post_init__(self):
        if not isinstance(self.combo, ComboSymbol):
            raise ValueError("offset applies to a combo symbol")
        object.__setattr__(self, "p", complex(self.p))


@dataclass(frozen=True)
class CallableSymbol:
    """A user-supplied bounded evaluator x -> value.

    `sup_bound` is declared by the caller and used only for diagnostics and
    integration tail budgets; it is not verified.
    """

    evaluator: Callable
    sup_bound: float = 1.0


Symbol = Union[
    ConstantSymbol,
    LaguerreGaussianSymbol,
    ComboSymbol,
    OffsetComboSymbol,
    CallableSymbol,
]


def basic_symbol(m: int, xi: int) -> LaguerreGaussianSymbol:
    """The degree-m, scale-xi Laguerre-Gaussian symbol."""
    return LaguerreGaussianSymbol(m, xi)


def combo_symbol(coeffs, xi: int) -> ComboSymbol:
    """Linear combination sum_k coeffs[k] * basic_symbol(k, xi)."""
    return ComboSymbol(xi, tuple(coeffs))


def with_limit_offset(u: ComboSymbol, p) -> OffsetComboSymbol:
    """u plus the constant p; the result tends to p at infinity."""
    return OffsetComboSymbol(u, p)


# ---------------------------------------------------------------------------
# Evaluation

def _eval_basic(m: int, xi: int, x: np.ndarray) -> np.ndarray:
    t = xi * x * x
    lag = np.atleast_1d(laguerre_eval(m, t))
    abs_lag = np.abs(lag)
    log_xi = np.log(x.dtype.type(xi))
    with np.errstate(divide="ignore"):
        log_mag = (
            (m + 1) * log_xi
            - (xi - 1) * x * x
            + np.where(abs_lag > 0.0, np.log(np.where(abs_lag > 0.0, abs_lag, 1.0)), -np.inf)
        )
    sign = np.where(lag >= 0.0, 1.0, -1.0) * (-1.0 if m % 2 else 1.0)
    with np.errstate(over="ignore"):
        return sign * np.exp(log_mag)


def _eval_combo(sym: ComboSymbol, x: np.ndarray) -> np.ndarray:
    xi = sym.xi
    coeffs = np.asarray(sym.coefficients, dtype=complex)
    n_terms = len(coeffs)
    t = xi * x * x
    lag = laguerre_eval_all(n_terms - 1, t)  # (n_terms, len(x))
    abs_lag = np.abs(lag)
    log_xi = np.log(x.dtype.type(xi))
    gains = (np.arange(1, n_terms + 1, dtype=x.dtype) * log_xi)[:, None]
    with np.errstate(divide="ignore"):
        log_terms = gains + np.where(
            abs_lag > 0.0, np.log(np.where(abs_lag > 0.0, abs_lag, 1.0)), -np.inf
        )
    # factor the largest term magnitude out per point, then apply the shared
    # Gaussian once; keeps xi^(k+1) representable for any admissible k
    peak = np.max(log_terms, axis=0)
    peak_ok = np.isfinite(peak)
    safe_peak = np.where(peak_ok, peak, 0.0)
    scaled = np.exp(log_terms - safe_peak[None, :])
    signs = np.where(lag >= 0.0, 1.0, -1.0) * ((-1.0) ** np.arange(n_terms))[:, None]
    mix = np.sum(coeffs[:, None] * signs * scaled, axis=0)
    with np.errstate(over="ignore"):
        envelope = np.exp(safe_peak - (xi - 1) * x * x)
    return np.where(peak_ok, mix * envelope, 0.0)


def _eval_callable(sym: CallableSymbol, x: np.ndarray) -> np.ndarray:
    try:
        with warnings.catch_warnings():
            # scalar-only evaluators (math.*) trip numpy's array-to-scalar
            # deprecation on size-1 input; treat that as "not vectorized"
            warnings.simplefilter("error", DeprecationWarning)
            out = np.asarray(sym.evaluator(x))
        if out.shape != x.shape:
            raise TypeError("shape mismatch")
        return out
    except (TypeError, ValueError, DeprecationWarning):
        return np.asarray([sym.evaluator(float(t)) for t in x])


def eval_symbol(sym: Symbol, x):
    """Pointwise value of the symbol at x >= 0 (scalar or array).

    Extended-precision float input is honored throughout the structured
    variants, which the quadrature engine uses for cancellation-critical
    integrals.
    """
    arr = np.asarray(x)
    if arr.dtype.kind != "f":
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("x must be finite")
    if np.any(arr < 0.0):
        raise ValueError("x must be nonnegative")
    pts = np.atleast_1d(arr)
    if isinstance(sym, ConstantSymbol):
        out = np.full(pts.shape, sym.value)
    elif isinstance(sym, LaguerreGaussianSymbol):
        out = _eval_basic(sym.m, sym.xi, pts)
    elif isinstance(sym, ComboSymbol):
        out = _eval_combo(sym, pts)
    elif isinstance(sym, OffsetComboSymbol):
        out = _eval_combo(sym.combo, pts) + sym.p
    elif isinstance(sym, CallableSymbol):
        out = _eval_callable(sym, pts)
    else:
        raise TypeError(f"not a symbol: {sym!r}")
    if arr.ndim == 0:
        return out[()] if out.ndim == 0 else out[0]
    return out


# ---------------------------------------------------------------------------
# Diagnostics

def _gaussian_reach(top_log: float, xi: int) -> float:
    # x beyond which exp(top_log - (xi-1) x^2) is below the double underflow floor
    return math.sqrt((top_log + 760.0) / (xi - 1))


def sup_estimate(sym: Symbol, n_grid: int = 4001) -> float:
    """Grid estimate of sup |sym| over [0, oo).

    A lower bound (up to grid resolution) used for diagnostics and for
    integration tail budgets.  Callables report their declared bound.
    """
    if isinstance(sym, ConstantSymbol):
        return abs(sym.value)
    if isinstance(sym, CallableSymbol):
        return float(sym.sup_bound)
    if isinstance(sym, LaguerreGaussianSymbol):
        reach = _gaussian_reach((sym.m + 1) * math.log(sym.xi), sym.xi)
        grid = np.linspace(0.0, reach, n_grid)
        return float(np.max(np.abs(eval_symbol(sym, grid))))
    if isinstance(sym, ComboSymbol):
        reach = _gaussian_reach(len(sym.coefficients) * math.log(sym.xi), sym.xi)
        grid = np.linspace(0.0, reach, n_grid)
        return float(np.max(np.abs(eval_symbol(sym, grid))))
    if isinstance(sym, OffsetComboSymbol):
        return sup_estimate(sym.combo, n_grid) + abs(sym.p)
    raise TypeError(f"not a symbol: {sym!r}")


def describe_symbol(sym: Symbol) -> str:
    if isinstance(sym, ConstantSymbol):
        return f"constant({sym.value})"
    if isinstance(sym, LaguerreGaussianSymbol):
        return f"laguerre_basic(m={sym.m}, xi={sym.xi})"
    if isinstance(sym, ComboSymbol):
        return f"combo(xi={sym.xi}, n_terms={len(sym.coefficients)})"
    if isinstance(sym, OffsetComboSymbol):
        return f"combo(xi={sym.combo.xi}, n_terms={len(sym.combo.coefficients)}, offset={sym.p})"
    return "callable"


# ---------------------------------------------------------------------------
# JSON symbol schema

def symbol_from_json(obj) -> Symbol:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("symbol must be an object with a 'type'")
    kind = obj["type"]
    if kind == "constant":
        if "value" not in obj:
            raise ValueError("constant symbol needs a 'value'")
        return ConstantSymbol(scalar_from_json(obj["value"]))
    if kind == "laguerre_basic":
        try:
            return basic_symbol(obj["m"], obj["xi"])
        except KeyError as exc:
            raise ValueError(f"laguerre_basic symbol needs {exc}") from None
    if kind == "combo":
        if "xi" not in obj or "coefficients" not in obj:
            raise ValueError("combo symbol needs 'xi' and 'coefficients'")
        coeffs = [scalar_from_json(c) for c in obj["coefficients"]]
        combo = combo_symbol(coeffs, obj["xi"])
        if "offset" in obj:
            return with_limit_offset(combo, scalar_from_json(obj["offset"]))
        return combo
    raise ValueError(f"unknown symbol type {kind!r}")


def symbol_to_json(sym: Symbol) -> dict:
    if isinstance(sym, ConstantSymbol):
        return {"type": "constant", "value": scalar_to_json(sym.value)}
    if isinstance(sym, LaguerreGaussianSymbol):
        return {"type": "laguerre_basic", "m": sym.m, "xi": sym.xi}
    if isinstance(sym, ComboSymbol):
        return {
            "type": "combo",
            "xi": sym.xi,
            "coefficients": [scalar_to_json(c) for c in sym.coefficients],
        }
    if isinstance(sym, OffsetComboSymbol):
        out = symbol_to_json(sym.combo)
        out["offset"] = scalar_to_json(sym.p)
        return out
    raise ValueError("callable symbols cannot be serialized")
