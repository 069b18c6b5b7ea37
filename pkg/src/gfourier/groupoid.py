"""Finite groupoids with Haar weights, standard constructors, and bisections.

Arrows are dense integer ids.  Composition is a full table with ``UNDEFINED``
marking non-composable pairs, so validation can be exhaustive and composition
is O(1).  A Haar system at finite scale is a positive weight per arrow; left
invariance forces the weight to depend only on the source unit, which
``validate`` checks rather than assumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

UNDEFINED = -1


@dataclass(frozen=True)
class FiniteGroupoid:
    """Arrow-indexed category data: range/source units, inverses, composition.

    ``unit_arrows[u]`` is the arrow id of the identity at unit ``u``;
    ``range_of``/``source_of`` map arrows to unit indices; ``weights`` is the
    Haar weight of each arrow (= the weight of its source unit for a valid
    left Haar system).
    """

    range_of: np.ndarray
    source_of: np.ndarray
    inverse_of: np.ndarray
    compose_table: np.ndarray
    unit_arrows: np.ndarray
    weights: np.ndarray

    @property
    def n_arrows(self) -> int:
        return int(self.range_of.shape[0])

    @property
    def n_units(self) -> int:
        return int(self.unit_arrows.shape[0])

    @cached_property
    def r_fibers(self) -> tuple[np.ndarray, ...]:
        """Arrow ids with range u, ascending, one array per unit."""
        return tuple(np.flatnonzero(self.range_of == u) for u in range(self.n_units))

    @cached_property
    def s_fibers(self) -> tuple[np.ndarray, ...]:
        return tuple(np.flatnonzero(self.source_of == u) for u in range(self.n_units))

    @property
    def unit_weights(self) -> np.ndarray:
        return self.weights[self.unit_arrows]

    def is_composable(self, x: int, y: int) -> bool:
        return self.source_of[x] == self.range_of[y]

    def compose(self, x: int, y: int) -> int:
        z = int(self.compose_table[x, y])
        if z == UNDEFINED:
            raise ValueError(f"arrows {x} and {y} do not compose")
        return z

    def inverse(self, x: int) -> int:
        return int(self.inverse_of[x])

    def with_unit_weights(self, unit_weights) -> "FiniteGroupoid":
        """Same groupoid with the Haar weight of each source unit replaced."""
        uw = np.asarray(unit_weights, dtype=float)
        if uw.shape != (self.n_units,) or np.any(uw <= 0):
            raise ValueError("need one positive weight per unit")
        return FiniteGroupoid(
            range_of=self.range_of,
            source_of=self.source_of,
            inverse_of=self.inverse_of,
            compose_table=self.compose_table,
            unit_arrows=self.unit_arrows,
            weights=uw[self.source_of],
        )


def _build(range_of, source_of, inverse_of, compose_table, unit_arrows, unit_weights=None):
    range_of = np.asarray(range_of, dtype=int)
    source_of = np.asarray(source_of, dtype=int)
    inverse_of = np.asarray(inverse_of, dtype=int)
    compose_table = np.asarray(compose_table, dtype=int)
    unit_arrows = np.asarray(unit_arrows, dtype=int)
    if unit_weights is None:
        unit_weights = np.ones(unit_arrows.shape[0])
    unit_weights = np.asarray(unit_weights, dtype=float)
    return FiniteGroupoid(
        range_of=range_of,
        source_of=source_of,
        inverse_of=inverse_of,
        compose_table=compose_table,
        unit_arrows=unit_arrows,
        weights=unit_weights[source_of],
    )


# ---------------------------------------------------------------------------
# constructors


def pair_groupoid(n: int, unit_weights=None) -> FiniteGroupoid:
    """Pair groupoid on n points: arrows (i, j), (i,j)(j,k) = (i,k).

    Arrow id of (i, j) is i*n + j; unit of point i is the arrow (i, i).
    """
    if n < 1:
        raise ValueError("need at least one point")
    ids = np.arange(n * n)
    i, j = divmod(ids, n)
    compose = np.full((n * n, n * n), UNDEFINED, dtype=int)
    for x in ids:
        for y in ids:
            if j[x] == i[y]:
                compose[x, y] = i[x] * n + j[y]
    return _build(i, j, j * n + i, compose, np.arange(n) * n + np.arange(n), unit_weights)


def _check_group_table(table: np.ndarray) -> tuple[int, np.ndarray]:
    """Return (identity, inverses) of a group multiplication table, or raise."""
    k = table.shape[0]
    if table.shape != (k, k) or k == 0:
        raise ValueError("multiplication table must be square and nonempty")
    if table.min() < 0 or table.max() >= k:
        raise ValueError("table entries must index group elements")
    identity = None
    for e in range(k):
        if np.array_equal(table[e], np.arange(k)) and np.array_equal(table[:, e], np.arange(k)):
            identity = e
            break
    if identity is None:
        raise ValueError("table has no two-sided identity")
    inv = np.full(k, -1, dtype=int)
    for g in range(k):
        hits = np.flatnonzero(table[g] == identity)
        if hits.size != 1 or table[hits[0], g] != identity:
            raise ValueError(f"element {g} has no two-sided inverse")
        inv[g] = hits[0]
    for a in range(k):
        for b in range(k):
            if not np.array_equal(table[table[a, b]], table[a][table[b]]):
                raise ValueError(f"table is not associative at ({a}, {b})")
    return identity, inv


def group_groupoid(table) -> FiniteGroupoid:
    """One-unit groupoid from a group multiplication table (table[a][b] = ab)."""
    table = np.asarray(table, dtype=int)
    identity, inv = _check_group_table(table)
    k = table.shape[0]
    return _build(
        np.zeros(k, dtype=int), np.zeros(k, dtype=int), inv, table, np.array([identity])
    )


def cyclic_table(k: int) -> np.ndarray:
    a = np.arange(k)
    return (a[:, None] + a[None, :]) % k


def group_bundle(tables, unit_weights=None) -> FiniteGroupoid:
    """Disjoint union of one-unit groupoids; arrows compose only within a fiber."""
    groups = [np.asarray(t, dtype=int) for t in tables]
    if not groups:
        raise ValueError("need at least one fiber")
    meta = [_check_group_table(t) for t in groups]
    sizes = [t.shape[0] for t in groups]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    rng = np.concatenate([np.full(s, u) for u, s in enumerate(sizes)])
    inv = np.concatenate([meta[u][1] + offsets[u] for u in range(len(groups))])
    compose = np.full((total, total), UNDEFINED, dtype=int)
    for u, t in enumerate(groups):
        o = offsets[u]
        compose[o : o + sizes[u], o : o + sizes[u]] = t + o
    units = np.array([meta[u][0] + offsets[u] for u in range(len(groups))])
    return _build(rng, rng.copy(), inv, compose, units, unit_weights)


def product_arrow_id(x: int, i: int, j: int) -> int:
    """Arrow id of (x, i, j) in ``product_with_pair_groupoid`` output, i, j in {0, 1}."""
    return 4 * x + 2 * i + j


def product_unit_id(u: int, i: int) -> int:
    return 2 * u + i


def product_with_pair_groupoid(g: FiniteGroupoid) -> FiniteGroupoid:
    """Product of g with the 2-point pair groupoid.

    Arrows are triples (x, i, j) with i, j in {0, 1}; (x,i,j)(y,j,l) composes
    to (xy,i,l) when xy does.  Units are the pairs (unit of g, i), and the
    arrow (x,i,j) inherits the weight of x.
    """
    n = g.n_arrows
    ids = np.arange(4 * n)
    x, rem = divmod(ids, 4)
    i, j = divmod(rem, 2)
    rng = 2 * g.range_of[x] + i
    src = 2 * g.source_of[x] + j
    inv = 4 * g.inverse_of[x] + 2 * j + i
    compose = np.full((4 * n, 4 * n), UNDEFINED, dtype=int)
    for a in ids:
        xy = g.compose_table[x[a]]
        for b in ids:
            z = xy[x[b]]
            if z != UNDEFINED and j[a] == i[b]:
                compose[a, b] = 4 * z + 2 * i[a] + j[b]
    units = np.empty(2 * g.n_units, dtype=int)
    for u in range(g.n_units):
        for t in (0, 1):
            units[2 * u + t] = 4 * g.unit_arrows[u] + 3 * t
    uw = np.repeat(g.unit_weights, 2)
    return _build(rng, src, inv, compose, units, uw)


def transformation_groupoid(table, action, unit_weights=None) -> FiniteGroupoid:
    """Action groupoid of a group acting on a finite point set.

    ``action[g][p]`` is g.p.  Arrows are pairs (g, p) with source p and range
    g.p; (g, h.p)(h, p) = (gh, p).
    """
    table = np.asarray(table, dtype=int)
    identity, ginv = _check_group_table(table)
    action = np.asarray(action, dtype=int)
    k = table.shape[0]
    if action.ndim != 2 or action.shape[0] != k:
        raise ValueError("action must map every group element on the point set")
    m = action.shape[1]
    if action.min() < 0 or action.max() >= m:
        raise ValueError("action entries must index points")
    if not np.array_equal(action[identity], np.arange(m)):
        raise ValueError("identity must act trivially")
    for a in range(k):
        for b in range(k):
            if not np.array_equal(action[a][action[b]], action[table[a, b]]):
                raise ValueError(f"action is not compatible with the product at ({a}, {b})")
    ids = np.arange(k * m)
    grp, pt = divmod(ids, m)
    rng = action[grp, pt]
    src = pt
    inv = ginv[grp] * m + action[grp, pt]
    compose = np.full((k * m, k * m), UNDEFINED, dtype=int)
    for a in ids:
        for b in ids:
            if pt[a] == action[grp[b], pt[b]]:
                compose[a, b] = table[grp[a], grp[b]] * m + pt[b]
    units = identity * m + np.arange(m)
    return _build(rng, src, inv, compose, units, unit_weights)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(g: FiniteGroupoid, max_report: int = 50) -> ValidationReport:
    """Check every groupoid axiom and Haar left-invariance; list violations."""
    bad: list[str] = []

    def note(msg):
        if len(bad) < max_report:
            bad.append(msg)

    n = g.n_arrows
    if sorted(map(int, g.unit_arrows)) != sorted(set(map(int, g.unit_arrows))):
        note("unit arrows are not distinct")
    for u, e in enumerate(g.unit_arrows):
        if g.range_of[e] != u or g.source_of[e] != u:
            note(f"unit arrow {e} of unit {u} has range {g.range_of[e]}, source {g.source_of[e]}")
        if g.inverse_of[e] != e:
            note(f"unit arrow {e} is not fixed by inversion")
    for x in range(n):
        xi = g.inverse_of[x]
        if g.range_of[xi] != g.source_of[x] or g.source_of[xi] != g.range_of[x]:
            note(f"inverse of {x} swaps range/source incorrectly")
        if g.inverse_of[xi] != x:
            note(f"inversion is not involutive at {x}")
    for x in range(n):
        for y in range(n):
            z = g.compose_table[x, y]
            defined = z != UNDEFINED
            should = g.source_of[x] == g.range_of[y]
            if defined != should:
                note(f"composition of ({x}, {y}) defined={defined}, expected {should}")
            elif defined:
                if g.range_of[z] != g.range_of[x] or g.source_of[z] != g.source_of[y]:
                    note(f"product {x}{y}={z} has wrong endpoints")
    for x in range(n):
        er = g.unit_arrows[g.range_of[x]]
        es = g.unit_arrows[g.source_of[x]]
        if g.compose_table[er, x] != x:
            note(f"left identity fails at arrow {x}")
        if g.compose_table[x, es] != x:
            note(f"right identity fails at arrow {x}")
        if g.compose_table[g.inverse_of[x], x] != es:
            note(f"inverse(x).x is not the source unit at arrow {x}")
        if g.compose_table[x, g.inverse_of[x]] != er:
            note(f"x.inverse(x) is not the range unit at arrow {x}")
    for x in range(n):
        for y in np.flatnonzero(g.range_of == g.source_of[x]):
            xy = g.compose_table[x, y]
            if xy == UNDEFINED:
                continue
            for z in np.flatnonzero(g.range_of == g.source_of[y]):
                left = g.compose_table[xy, z]
                right = g.compose_table[x, g.compose_table[y, z]]
                if left != right:
                    note(f"associativity fails on ({x}, {y}, {z})")
    if np.any(g.weights <= 0):
        note("weights must be positive")
    else:
        uw = g.weights[g.unit_arrows]
        for x in range(n):
            expect = uw[g.source_of[x]]
            if abs(g.weights[x] - expect) > 1e-12 * max(1.0, abs(expect)):
                note(
                    f"Haar weight of arrow {x} is {g.weights[x]}, "
                    f"but left invariance needs the source-unit weight {expect}"
                )
    return ValidationReport(tuple(bad))


# ---------------------------------------------------------------------------
# bisections


@dataclass(frozen=True, order=True)
class Bisection:
    """One arrow per unit, ranges and sources each hitting every unit once.

    ``picks[u]`` is the arrow with range u.
    """

    picks: tuple[int, ...]

    def arrows(self) -> frozenset[int]:
        return frozenset(self.picks)


def is_bisection(g: FiniteGroupoid, picks) -> bool:
    picks = tuple(int(p) for p in picks)
    if len(picks) != g.n_units:
        return False
    for u, x in enumerate(picks):
        if not 0 <= x < g.n_arrows or g.range_of[x] != u:
            return False
    sources = [int(g.source_of[x]) for x in picks]
    return sorted(sources) == list(range(g.n_units))


def identity_bisection(g: FiniteGroupoid) -> Bisection:
    return Bisection(tuple(int(e) for e in g.unit_arrows))


def source_permutation(g: FiniteGroupoid, a: Bisection) -> np.ndarray:
    """The unit permutation u -> source(pick(u))."""
    return g.source_of[np.asarray(a.picks, dtype=int)]


def _complete_bisections(g, order, picks, used, out, first_only):
    if not order:
        out.append(tuple(picks[u] for u in range(g.n_units)))
        return first_only
    u = order[0]
    for x in map(int, g.r_fibers[u]):
        s = int(g.source_of[x])
        if used[s]:
            continue
        used[s] = True
        picks[u] = x
        if _complete_bisections(g, order[1:], picks, used, out, first_only):
            return True
        used[s] = False
    return False


def enumerate_bisections(g: FiniteGroupoid) -> list[Bisection]:
    """All bisections, found by backtracking over units ordered by fiber size.

    The result is duplicate-free and canonically ordered (lexicographic in the
    pick tuples), independent of the search order.
    """
    order = sorted(range(g.n_units), key=lambda u: (len(g.r_fibers[u]), u))
    out: list[tuple[int, ...]] = []
    _complete_bisections(g, order, {}, [False] * g.n_units, out, first_only=False)
    return [Bisection(p) for p in sorted(out)]


def bisection_through(g: FiniteGroupoid, x: int) -> Bisection | None:
    """Some bisection containing arrow x, or None when none exists."""
    u0 = int(g.range_of[x])
    s0 = int(g.source_of[x])
    order = sorted((u for u in range(g.n_units) if u != u0), key=lambda u: (len(g.r_fibers[u]), u))
    used = [False] * g.n_units
    used[s0] = True
    out: list[tuple[int, ...]] = []
    _complete_bisections(g, order, {u0: int(x)}, used, out, first_only=True)
    return Bisection(out[0]) if out else None


def bisection_product(g: FiniteGroupoid, a: Bisection, b: Bisection) -> Bisection:
    """Setwise product: the pick at u is a(u) composed with b at source(a(u))."""
    picks = []
    for u in range(g.n_units):
        x = a.picks[u]
        y = b.picks[int(g.source_of[x])]
        picks.append(g.compose(x, y))
    out = Bisection(tuple(picks))
    assert is_bisection(g, out.picks)
    return out


def bisection_inverse(g: FiniteGroupoid, a: Bisection) -> Bisection:
    """Inverse arrows of a, reindexed by their ranges."""
    picks = [UNDEFINED] * g.n_units
    for x in a.picks:
        y = int(g.inverse_of[x])
        picks[int(g.range_of[y])] = y
    out = Bisection(tuple(picks))
    assert is_bisection(g, out.picks)
    return out
