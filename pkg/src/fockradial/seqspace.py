"""Sequence toolkit for the sqrt-distance rho(j, k) = |sqrt(j) - sqrt(k)| on indices.

All sequences live on the nonnegative integers but are handled through finite
windows.  A `SeqWindow` stores a prefix of values plus a tail descriptor
saying what happens past the prefix: exactly zero (`ZeroTail`), convergent to
a constant (`LimitTail`), or unasserted (`UnknownTail`).

Quantities whose definitions range over all indices (modulus of continuity,
Lipschitz seminorm, sup norms) are computed over the window, completed with
descriptor values where those are defined.  The results are therefore
certified lower bounds of the untruncated quantities, never claims of
equality.  Operations that must read past the window (Vallee-Poussin
smoothing near the right edge) consume the descriptor; with an unknown tail
they fall back to the largest prefix they can smooth honestly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "LimitTail",
    "SeqGenerator",
    "SeqWindow",
    "Tail",
    "UnknownTail",
    "ZeroTail",
    "lipschitz_seminorm",
    "min_index_lower_bound",
    "modulus_of_continuity",
    "scalar_from_json",
    "scalar_to_json",
    "shift_difference_sup",
    "shift_left",
    "shift_right",
    "sqrt_dist",
    "target_from_json",
    "target_to_json",
    "vp_smooth",
]


@dataclass(frozen=True)
class ZeroTail:
    """All entries past the window are exactly zero."""


@dataclass(frozen=True)
class LimitTail:
    """Entries past the window converge to the constant p."""

    p: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))


@dataclass(frozen=True)
class UnknownTail:
    """Nothing is asserted past the window."""


Tail = Union[ZeroTail, LimitTail, UnknownTail]


@dataclass(frozen=True)
class SeqWindow:
    """A finite prefix of a complex sequence plus a tail descriptor."""

    values: tuple[complex, ...]
    tail: Tail = UnknownTail()

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("window must hold at least one value")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
            raise ValueError("window values must be finite")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def tail_known(self) -> bool:
        return not isinstance(self.tail, UnknownTail)

    def tail_value(self) -> complex:
        """The constant completing the sequence past the window."""
        if isinstance(self.tail, ZeroTail):
            return 0j
        if isinstance(self.tail, LimitTail):
            return self.tail.p
        raise ValueError("tail is unknown; this operation needs a tail descriptor")

    def value_at(self, n: int) -> complex:
        if n < 0:
            raise ValueError("index must be nonnegative")
        if n < len(self.values):
            return self.values[n]
        return self.tail_value()

    @property
    def sup_norm(self) -> float:
        """Sup of |values|, including the tail constant when the tail is known."""
        s = max(abs(v) for v in self.values)
        if self.tail_known:
            s = max(s, abs(self.tail_value()))
        return s

    def as_array(self, upto: int | None = None) -> np.ndarray:
        """Values for indices 0..upto-1, completed from the tail when needed."""
        n = len(self.values) if upto is None else upto
        if n <= len(self.values):
            return np.asarray(self.values[:n], dtype=complex)
        out = np.full(n, self.tail_value(), dtype=complex)
        out[: len(self.values)] = self.values
        return out


# ---------------------------------------------------------------------------
# JSON target schema: {"values": [...], "tail": {"kind": ..., "p": ...}}

def scalar_from_json(v) -> complex:
    if isinstance(v, bool):
        raise ValueError(f"cannot parse scalar {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if (
        isinstance(v, list)
        and len(v) == 2
        and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)
    ):
        return complex(v[0], v[1])
    raise ValueError(f"cannot parse scalar {v!r}; expected a number or an [re, im] pair")


def scalar_to_json(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else [z.real, z.imag]


def target_from_json(obj) -> SeqWindow:
    if not isinstance(obj, dict) or "values" not in obj:
        raise ValueError("target must be an object with a 'values' list")
    values = obj["values"]
    if not isinstance(values, list) or not values:
        raise ValueError("target 'values' must be a nonempty list")
    vals = tuple(scalar_from_json(v) for v in values)
    tail_obj = obj.get("tail", {"kind": "unknown"})
    if not isinstance(tail_obj, dict) or "kind" not in tail_obj:
        raise ValueError("target 'tail' must be an object with a 'kind'")
    kind = tail_obj["kind"]
    if kind == "zero":
        tail: Tail = ZeroTail()
    elif kind == "limit":
        if "p" not in tail_obj:
            raise ValueError("limit tail needs a 'p' value")
        tail = LimitTail(scalar_from_json(tail_obj["p"]))
    elif kind == "unknown":
        tail = UnknownTail()
    else:
        raise ValueError(f"unknown tail kind {kind!r}")
    return SeqWindow(vals, tail)


def target_to_json(window: SeqWindow) -> dict:
    if isinstance(window.tail, ZeroTail):
        tail = {"kind": "zero"}
    elif isinstance(window.tail, LimitTail):
        tail = {"kind": "limit", "p": scalar_to_json(window.tail.p)}
    else:
        tail = {"kind": "unknown"}
    return {"values": [scalar_to_json(v) for v in window.values], "tail": tail}


# ---------------------------------------------------------------------------
# The sqrt-distance and its elementary bounds

def sqrt_dist(j: int, k: int) -> float:
    """rho(j, k) = |sqrt(j) - sqrt(k)|."""
    if j < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    return abs(math.sqrt(j) - math.sqrt(k))


def min_index_lower_bound(rho_val: float) -> float:
    """Lower bound for min{j, k} given that distinct j, k satisfy rho(j, k) = rho_val.

    Only meaningful for 0 < rho_val < 1/2: small nonzero sqrt-distances force
    both indices to be large, at least 1 / (2 rho)^2 - 1.
    """
    if not 0.0 < rho_val < 0.5:
        raise ValueError("rho_val must lie in (0, 1/2)")
    return 1.0 / (2.0 * rho_val) ** 2 - 1.0


# ---------------------------------------------------------------------------
# Windowed moduli and seminorms

def modulus_of_continuity(sigma: SeqWindow, delta: float) -> float:
    """Windowed modulus of continuity of sigma with respect to the sqrt-distance.

    Scans every index pair at sqrt-distance <= delta whose values are defined,
    i.e. both inside the window, or one inside and one in the descriptor-defined
    tail neighborhood just past it.  The result is monotone nondecreasing in
    delta and is a certified lower bound of the full modulus.
    """
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    n = len(sigma)
    if sigma.tail_known:
        top = math.sqrt(n - 1) + delta
        k_hi = max(int(math.floor(top * top + 1e-12)), n - 1)
    else:
        k_hi = n - 1
    vals = sigma.as_array(k_hi + 1)
    sq = np.sqrt(np.arange(k_hi + 1, dtype=float))
    best = 0.0
    for j in range(n):
        top = sq[j] + delta
        hi = min(k_hi, int(math.floor(top * top + 1e-12)))
        if hi <= j:
            continue
        seg = sq[j + 1 : hi + 1] - sq[j]
        mask = seg <= delta
        if mask.any():
            d = np.abs(vals[j + 1 : hi + 1][mask] - vals[j])
            best = max(best, float(d.max()))
    return best


def lipschitz_seminorm(sigma: SeqWindow) -> float:
    """Windowed sup of sqrt(n + 1) |sigma(n + 1) - sigma(n)|.

    Finite for every window; the sequence is Lipschitz for the sqrt-distance
    exactly when the untruncated sup stays bounded.
    """
    n = len(sigma)
    if n < 2:
        raise ValueError("window too short; need at least two values")
    v = sigma.as_array()
    steps = np.abs(np.diff(v))
    return float(np.max(np.sqrt(np.arange(1, n, dtype=float)) * steps))


# ---------------------------------------------------------------------------
# Shifts

def shift_left(sigma: SeqWindow) -> SeqWindow:
    """Drop sigma(0); the window shrinks by one, the tail is preserved."""
    if len(sigma) < 2:
        raise ValueError("window too short to shift left")
    return SeqWindow(sigma.values[1:], sigma.tail)


def shift_right(sigma: SeqWindow) -> SeqWindow:
    """Prepend a zero; the window grows by one, the tail is preserved."""
    return SeqWindow((0j,) + sigma.values, sigma.tail)


def shift_difference_sup(sigma: SeqWindow, k: int, n_from: int = 0) -> float:
    """Max of |sigma(n) - sigma(n + k)| over n in [n_from, len - k).

    For sequences uniformly continuous in the sqrt-distance this decays as
    n_from grows; the function exposes that decay windowed.
    """
    if k < 1:
        raise ValueError("shift count k must be >= 1")
    n = len(sigma)
    if n_from < 0 or n_from + k >= n:
        raise ValueError("window too short for the requested range")
    v = sigma.as_array()
    return float(np.max(np.abs(v[n_from : n - k] - v[n_from + k : n])))


# ---------------------------------------------------------------------------
# Vallee-Poussin smoothing

def vp_smooth(sigma: SeqWindow, delta: float) -> SeqWindow:
    """Average sigma over [j, j + floor(delta sqrt(j))].

    The output stays within the delta-modulus of sigma in sup norm and has
    Lipschitz seminorm at most 4 sqrt(2) ||sigma|| / delta.  Indices near the
    right window edge need values past the window: with a known tail these
    come from the descriptor and the output has the same length as the input;
    with an unknown tail the output is the largest prefix whose averaging
    windows stay inside the data.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    n = len(sigma)
    radii = np.floor(delta * np.sqrt(np.arange(n, dtype=float))).astype(int)
    if sigma.tail_known:
        usable = n
    else:
        # j + r_j is strictly increasing, so the indices whose averaging
        # window fits inside the data form a prefix; r_0 = 0 makes it nonempty.
        fits = np.arange(n) + radii <= n - 1
        usable = n if fits.all() else int(np.argmin(fits))
    need = (usable - 1) + int(radii[usable - 1]) + 1
    vals = sigma.as_array(max(need, usable))
    csum = np.concatenate([[0j], np.cumsum(vals)])
    j = np.arange(usable)
    r = radii[:usable]
    y = (csum[j + r + 1] - csum[j]) / (r + 1)
    return SeqWindow(tuple(y), sigma.tail)


# ---------------------------------------------------------------------------
# Builtin test-sequence generators

_GENERATOR_KINDS = (
    "cos_sqrt",
    "sqrt_abs_sin_pi_sqrt",
    "geometric",
    "inverse_plus_one",
    "finite_support",
)


@dataclass(frozen=True)
class SeqGenerator:
    """Index-to-value rules for the builtin families.

    cos_sqrt:             j -> cos(sqrt(j))                (bounded, no limit)
    sqrt_abs_sin_pi_sqrt: j -> sqrt(|sin(pi sqrt(j))|)     (bounded, no limit)
    geometric:            j -> q^j with |q| < 1            (limit 0)
    inverse_plus_one:     j -> 1 / (j + 1)                 (limit 0)
    finite_support:       j -> support[j], 0 past the end  (zero tail)
    """

    kind: str
    q: complex | None = None
    support: tuple[complex, ...] | None = None

    def __post_init__(self):
        if self.kind not in _GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "geometric":
            if self.q is None:
                raise ValueError("geometric generator needs a ratio q")
            object.__setattr__(self, "q", complex(self.q))
            if not abs(self.q) < 1.0:
                raise ValueError("geometric ratio must satisfy |q| < 1")
        if self.kind == "finite_support":
            if not self.support:
                raise ValueError("finite_support generator needs values")
            object.__setattr__(self, "support", tuple(complex(v) for v in self.support))

    def value_at(self, j: int) -> complex:
        if j < 0:
            raise ValueError("index must be nonnegative")
        if self.kind == "cos_sqrt":
            return complex(math.cos(math.sqrt(j)))
        if self.kind == "sqrt_abs_sin_pi_sqrt":
            return complex(math.sqrt(abs(math.sin(math.pi * math.sqrt(j)))))
        if self.kind == "geometric":
            return self.q**j
        if self.kind == "inverse_plus_one":
            return complex(1.0 / (j + 1))
        return self.support[j] if j < len(self.support) else 0j

    def tail(self) -> Tail:
        if self.kind in ("geometric", "inverse_plus_one"):
            return LimitTail(0j)
        if self.kind == "finite_support":
            return ZeroTail()
        return UnknownTail()

    def window(self, n_win: int) -> SeqWindow:
        if n_win < 1:
            raise ValueError("window length must be >= 1")
        if self.kind == "finite_support" and n_win < len(self.support):
            raise ValueError("window must cover the full support")
        j = np.arange(n_win, dtype=float)
        if self.kind == "cos_sqrt":
            vals = np.cos(np.sqrt(j)).astype(complex)
        elif self.kind == "sqrt_abs_sin_pi_sqrt":
            vals = np.sqrt(np.abs(np.sin(np.pi * np.sqrt(j)))).astype(complex)
        elif self.kind == "geometric":
            vals = np.power(self.q, np.arange(n_win))
        elif self.kind == "inverse_plus_one":
            vals = (1.0 / (j + 1.0)).astype(complex)
        else:
            vals = np.zeros(n_win, dtype=complex)
            vals[: len(self.support)] = self.support
        return SeqWindow(tuple(vals), self.tail())
