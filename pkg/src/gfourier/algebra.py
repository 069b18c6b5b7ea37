"""The convolution *-algebra of complex functions on a finite groupoid.

An arrow function is a complex vector with one entry per arrow.  Integrals
against the Haar system become weighted sums over range fibers; the weight of
the integration variable's arrow is used throughout.
"""

from __future__ import annotations

import numpy as np

from .groupoid import Bisection, FiniteGroupoid, source_permutation


def arrow_function(g: FiniteGroupoid, values) -> np.ndarray:
    """Validate and return values as a complex vector indexed by arrows."""
    f = np.asarray(values, dtype=complex)
    if f.shape != (g.n_arrows,):
        raise ValueError(f"expected {g.n_arrows} values, got shape {f.shape}")
    if not np.all(np.isfinite(f.view(float))):
        raise ValueError("arrow function entries must be finite")
    return f


def delta(g: FiniteGroupoid, x: int) -> np.ndarray:
    f = np.zeros(g.n_arrows, dtype=complex)
    f[x] = 1.0
    return f


def unit_function(g: FiniteGroupoid, values) -> np.ndarray:
    b = np.asarray(values, dtype=complex)
    if b.shape != (g.n_units,):
        raise ValueError(f"expected {g.n_units} values, got shape {b.shape}")
    return b


def convolve(g: FiniteGroupoid, f, h) -> np.ndarray:
    """(f*h)(x) = sum over t in the range fiber of x of w(t) f(t) h(inverse(t) x).

    Computed by a direct loop over fibers; both factors must live on g.
    """
    f = arrow_function(g, f)
    h = arrow_function(g, h)
    out = np.zeros(g.n_arrows, dtype=complex)
    for x in range(g.n_arrows):
        t = g.r_fibers[g.range_of[x]]
        y = g.compose_table[g.inverse_of[t], x]
        out[x] = np.sum(g.weights[t] * f[t] * h[y])
    return out


def star(g: FiniteGroupoid, f) -> np.ndarray:
    """Isometric involution f*(x) = conj(f(inverse(x)))."""
    f = arrow_function(g, f)
    return np.conj(f[g.inverse_of])


def vee(g: FiniteGroupoid, f) -> np.ndarray:
    """Pullback along inversion, without conjugation."""
    f = arrow_function(g, f)
    return f[g.inverse_of]


def i_norm_range(g: FiniteGroupoid, f) -> float:
    """Largest weighted l1 mass of f over a range fiber."""
    f = arrow_function(g, f)
    return max(float(np.sum(g.weights[t] * np.abs(f[t]))) for t in g.r_fibers)


def i_norm_source(g: FiniteGroupoid, f) -> float:
    f = arrow_function(g, f)
    inv_w = g.weights[g.inverse_of]
    return max(float(np.sum(inv_w[t] * np.abs(f[t]))) for t in g.s_fibers)


def i_norm(g: FiniteGroupoid, f) -> float:
    return max(i_norm_range(g, f), i_norm_source(g, f))


def module_action(g: FiniteGroupoid, b, f, side: str) -> np.ndarray:
    """Two-sided action of functions-on-units: (fb)(x) = f(x) b(r(x)), (bf)(x) = b(s(x)) f(x)."""
    b = unit_function(g, b)
    f = arrow_function(g, f)
    if side == "right":
        return f * b[g.range_of]
    if side == "left":
        return b[g.source_of] * f
    raise ValueError("side must be 'left' or 'right'")


def act_bisection(g: FiniteGroupoid, a: Bisection, f, side: str) -> np.ndarray:
    """Translation of f by a bisection.

    side='left' gives (af)(x) = f(x . a_at_source(x)); side='right' gives
    (fa)(x) = f(a_with_source_range(x) . x).
    """
    f = arrow_function(g, f)
    out = np.empty_like(f)
    if side == "left":
        for x in range(g.n_arrows):
            out[x] = f[g.compose(x, a.picks[int(g.source_of[x])])]
        return out
    if side == "right":
        sigma = source_permutation(g, a)
        by_source = np.empty(g.n_units, dtype=int)
        by_source[sigma] = np.asarray(a.picks, dtype=int)
        for x in range(g.n_arrows):
            out[x] = f[g.compose(int(by_source[int(g.range_of[x])]), x)]
        return out
    raise ValueError("side must be 'left' or 'right'")


def convolution_identity(g: FiniteGroupoid) -> np.ndarray:
    """The exact identity of convolution: 1/w(u) at each unit arrow, 0 elsewhere."""
    e = np.zeros(g.n_arrows, dtype=complex)
    e[g.unit_arrows] = 1.0 / g.weights[g.unit_arrows]
    return e
