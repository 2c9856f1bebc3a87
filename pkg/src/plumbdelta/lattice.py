"""Exact enumeration of lattice points in a positive definite quadratic ball.

The search is the usual Fincke-Pohst recursion, but every interval
endpoint is an exact rational and the floor/ceil steps are done on
fractions, so boundary points are never lost to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, isqrt
from typing import Iterator, Sequence

from .errors import DimensionMismatch, NotPositiveDefinite
from .linalg import ExactMatrix

__all__ = [
    "Finite",
    "ParityMin",
    "CosetFilter",
    "LatticeBallQuery",
    "enumerate_ball",
]


@dataclass(frozen=True)
class Finite:
    """Coordinate restricted to a finite set of integers."""

    values: frozenset

    def __init__(self, values):
        object.__setattr__(self, "values", frozenset(int(v) for v in values))

    def candidates(self, lo: int, hi: int) -> Iterator[int]:
        return iter(sorted(v for v in self.values if lo <= v <= hi))

    def __contains__(self, x: int) -> bool:
        return x in self.values


@dataclass(frozen=True)
class ParityMin:
    """Coordinate with fixed parity and absolute value at least ``min_abs``."""

    parity: int
    min_abs: int = 0

    def candidates(self, lo: int, hi: int) -> Iterator[int]:
        start = lo if (lo - self.parity) % 2 == 0 else lo + 1
        for x in range(start, hi + 1, 2):
            if abs(x) >= self.min_abs:
                yield x

    def __contains__(self, x: int) -> bool:
        return (x - self.parity) % 2 == 0 and abs(x) >= self.min_abs


def Fixed(value: int) -> Finite:
    return Finite([value])


@dataclass(frozen=True)
class CosetFilter:
    """Accept ``l`` iff ``l + offset`` lies in ``2 M Z^s``.

    With ``offset = b`` this is the coset ``-(2 M Z^s + b)``.
    """

    offset: tuple
    matrix: ExactMatrix

    def __contains__(self, l: Sequence[int]) -> bool:
        x = [a + b for a, b in zip(l, self.offset)]
        if any(v % 2 for v in x):
            return False
        x = [v // 2 for v in x]
        d = self.matrix.det
        adj = self.matrix.adjugate.rows
        return all(sum(a * b for a, b in zip(r, x)) % d == 0 for r in adj)


@dataclass(frozen=True)
class LatticeBallQuery:
    """Integer vectors ``x`` with ``(x - center)^T form (x - center) <= bound``."""

    form: ExactMatrix
    bound: Fraction
    constraints: tuple = ()
    coset: CosetFilter | None = None
    center: tuple | None = None

    def __post_init__(self):
        n = self.form.n
        if not self.constraints:
            object.__setattr__(self, "constraints", (None,) * n)
        if len(self.constraints) != n:
            raise DimensionMismatch("one constraint (or None) per coordinate")
        if self.center is not None and len(self.center) != n:
            raise DimensionMismatch("center has wrong length")
        object.__setattr__(self, "bound", Fraction(self.bound))


def _ldl(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """q with form(z) = sum_i q[i][i] (z_i + sum_{j>i} q[i][j] z_j)^2."""
    n = len(rows)
    q = [[Fraction(x) for x in r] for r in rows]
    for i in range(n):
        if q[i][i] <= 0:
            raise NotPositiveDefinite("form is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _elimination_order(rows: list[list[Fraction]], idx: list[int]) -> list[int]:
    """Greedy minimum-degree order of ``idx``; leaves first, so trees factor without fill."""
    adj = {i: {j for j in idx if j != i and rows[i][j] != 0} for i in idx}
    order = []
    while adj:
        v = min(adj, key=lambda i: (len(adj[i]), i))
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
        order.append(v)
    return order


def _int_range(mu: Fraction, t: Fraction) -> tuple[int, int]:
    """Integer superset range of {y : (y - mu)^2 <= t}."""
    r = isqrt(floor(t)) + 1
    return floor(mu) - r, ceil(mu) + r


def enumerate_ball(q: LatticeBallQuery) -> list[tuple[tuple[int, ...], Fraction]]:
    """All admissible integer vectors in the ball, sorted by (norm, vector)."""
    form = q.form
    n = form.n
    if not form.is_positive_definite():
        raise NotPositiveDefinite("form is not positive definite")
    bound = q.bound
    if bound < 0:
        return []
    center = tuple(Fraction(c) for c in q.center) if q.center is not None else (Fraction(0),) * n

    fixed = {i: next(iter(c.values)) for i, c in enumerate(q.constraints) if isinstance(c, Finite) and len(c.values) == 1}
    if any(isinstance(c, Finite) and not c.values for c in q.constraints):
        return []
    G = [[Fraction(x) for x in r] for r in form.rows]
    free = _elimination_order(G, [i for i in range(n) if i not in fixed])

    # Substitute the fixed coordinates: form(x - c) = (y - y*)^T G_RR (y - y*) + const.
    zf = {i: fixed[i] - center[i] for i in fixed}
    if free:
        g_rr = ExactMatrix([[G[i][j] for j in free] for i in free])
        rhs = [sum(G[i][j] * zf[j] for j in fixed) for i in free]
        shift = g_rr.inverse.matvec(rhs)
        y_center = [center[i] - shift[a] for a, i in enumerate(free)]
        const = sum(zf[i] * G[i][j] * zf[j] for i in fixed for j in fixed) - sum(
            r * s for r, s in zip(rhs, shift)
        )
    else:
        y_center = []
        const = sum(zf[i] * G[i][j] * zf[j] for i in fixed for j in fixed)
    const = Fraction(const)
    budget = bound - const
    if budget < 0:
        return []

    results = []
    if free:
        m = len(free)
        qd = _ldl([[G[i][j] for j in free] for i in free])
        nz = [[(j, qd[i][j]) for j in range(i + 1, m) if qd[i][j] != 0] for i in range(m)]
        cons = [q.constraints[i] for i in free]
        y = [0] * m
        yc = [Fraction(v) for v in y_center]

        def recurse(i: int, remaining: Fraction):
            # t = sum_{j>i} q[i][j] (y_j - yc_j)
            t = sum((qij * (y[j] - yc[j]) for j, qij in nz[i]), Fraction(0))
            mu = yc[i] - t
            qi = qd[i][i]
            tmax = remaining / qi
            lo, hi = _int_range(mu, tmax)
            c = cons[i]
            it = range(lo, hi + 1) if c is None else c.candidates(lo, hi)
            for v in it:
                d = v - mu
                used = qi * d * d
                if used > remaining:
                    continue
                y[i] = v
                if i == 0:
                    results.append((tuple(y), remaining - used))
                else:
                    recurse(i - 1, remaining - used)
            y[i] = 0

        recurse(m - 1, budget)
    else:
        results.append(((), budget))

    out = []
    for yv, left in results:
        x = [0] * n
        for i, v in fixed.items():
            x[i] = v
        for a, i in enumerate(free):
            x[i] = yv[a]
        x = tuple(x)
        if q.coset is not None and x not in q.coset:
            continue
        out.append((x, bound - left))
    out.sort(key=lambda p: (p[1], p[0]))
    return out
