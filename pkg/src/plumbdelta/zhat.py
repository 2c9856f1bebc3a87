"""The q-series Zhat_b and its minimal exponent Delta_b.

Zhat_b is assembled as the lattice sum

    q^{(-3s - Tr M)/4} * sum_{l} c~_l q^{-l^2/4},

where l runs over the support of the symmetric expansion of
prod_v (z_v - 1/z_v)^{2 - deg v} intersected with the coset -(2MZ^s + b).
Terms are grouped by the exact value of -l^2; a group whose coefficients
sum to zero contributes nothing (a cancelled shell).
"""

from __future__ import annotations

import warnings
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import LevelTooSmall, NotNegativeDefinite
from .graph import PlumbingGraph, gamma
from .lattice import CosetFilter, Finite, LatticeBallQuery, ParityMin, enumerate_ball
from .linalg import ExactMatrix
from .spinc import SpincClass, canonical_spinc, enumerate_spinc

__all__ = [
    "ctilde",
    "support_constraints",
    "QSeries",
    "Infinite",
    "DeltaResult",
    "zhat_series",
    "delta",
    "delta_all",
    "conjecture_report",
    "default_cap",
]

HALF = Fraction(1, 2)


def vertex_factor(deg: int, x: int) -> Fraction:
    """Coefficient of z^x in the symmetric expansion of (z - 1/z)^(2 - deg)."""
    if deg == 0:
        return Fraction({2: 1, 0: -2, -2: 1}.get(x, 0))
    if deg == 1:
        return Fraction(x) if x in (1, -1) else Fraction(0)
    if deg == 2:
        return Fraction(int(x == 0))
    d = deg - 2
    if x <= -d and (-x - d) % 2 == 0:
        k = (-x - d) // 2
        return HALF * comb(k + d - 1, k)
    if x >= d and (x - d) % 2 == 0:
        k = (x - d) // 2
        return HALF * (-1) ** d * comb(k + d - 1, k)
    return Fraction(0)


def ctilde(g: PlumbingGraph, l: Sequence[int]) -> Fraction:
    out = Fraction(1)
    for deg, x in zip(g.degrees, l):
        f = vertex_factor(deg, x)
        if not f:
            return Fraction(0)
        out *= f
    return out


def support_constraints(g: PlumbingGraph) -> tuple:
    """Per-vertex description of the support of c~ (leaves, strings, nodes)."""
    cons = []
    for deg in g.degrees:
        if deg == 0:
            cons.append(Finite([-2, 0, 2]))
        elif deg == 1:
            cons.append(Finite([-1, 1]))
        elif deg == 2:
            cons.append(Finite([0]))
        else:
            cons.append(ParityMin(deg % 2, deg - 2))
    return tuple(cons)


@lru_cache(maxsize=512)
def lattice_form(g: PlumbingGraph) -> ExactMatrix:
    """-M^{-1}, positive definite for a negative definite plumbing."""
    m = g.matrix
    if not m.is_negative_definite():
        raise NotNegativeDefinite("plumbing matrix is not negative definite")
    return -m.inverse


def exponent_offset(g: PlumbingGraph) -> Fraction:
    return Fraction(-3 * g.s - g.trace, 4)


@lru_cache(maxsize=512)
def min_support_norm(g: PlumbingGraph) -> Fraction:
    """Minimum of -l^2 over the whole support (no coset condition)."""
    form = lattice_form(g)
    k = g.canonical_vector
    start = Fraction(form.bilinear(k, k))
    pts = enumerate_ball(LatticeBallQuery(form, start, support_constraints(g)))
    return pts[0][1]


def default_cap(g: PlumbingGraph) -> Fraction:
    """Eight integer exponent steps above the support minimum, in units of -l^2."""
    return min_support_norm(g) + 32


@dataclass(frozen=True)
class QSeries:
    """Truncated q-series; every term with exponent <= level_bound is present."""

    terms: tuple
    level_bound: Fraction

    def __str__(self):
        if not self.terms:
            return f"0 + O(q^{self.level_bound})"
        parts = [f"({c})*q^({e})" for e, c in self.terms]
        return " + ".join(parts) + f" + [exponents > {self.level_bound}]"

    @property
    def exponents(self) -> list[Fraction]:
        return [e for e, _ in self.terms]

    @property
    def coefficients(self) -> list[Fraction]:
        return [c for _, c in self.terms]

    def to_json(self) -> dict:
        return {
            "terms": [[str(e), str(c)] for e, c in self.terms],
            "level_bound": str(self.level_bound),
        }


@dataclass(frozen=True)
class Infinite:
    """No surviving term with exponent <= bound; the series may vanish."""

    bound: Fraction

    def __str__(self):
        return f"inf (tentative: no term up to q^{self.bound})"


@dataclass(frozen=True)
class DeltaResult:
    value: Fraction | Infinite
    minimizing_vectors: tuple = ()
    leading_coefficient: Fraction = Fraction(0)
    cancelled_shells: tuple = ()
    norm: Fraction | None = None

    @property
    def is_finite(self) -> bool:
        return not isinstance(self.value, Infinite)

    def to_json(self) -> dict:
        return {
            "delta": str(self.value.bound if not self.is_finite else self.value),
            "finite": self.is_finite,
            "tentative": not self.is_finite,
            "minimizing_vectors": [list(v) for v in self.minimizing_vectors],
            "leading_coefficient": str(self.leading_coefficient),
            "cancelled_shells": [
                {"norm": str(n), "vectors": [list(v) for v in vs]} for n, vs in self.cancelled_shells
            ],
        }


def _shells(g: PlumbingGraph, b: SpincClass, bound: Fraction):
    """(norm, [(l, c~_l)]) for the support in -(2MZ^s + b), norm <= bound."""
    q = LatticeBallQuery(
        lattice_form(g),
        bound,
        support_constraints(g),
        coset=CosetFilter(tuple(b.b), g.matrix),
    )
    groups = defaultdict(list)
    for l, norm in enumerate_ball(q):
        groups[norm].append((l, ctilde(g, l)))
    return sorted(groups.items())


def zhat_series(g: PlumbingGraph, b: SpincClass, level) -> QSeries:
    """Zhat_b(q) with every exponent <= level."""
    level = Fraction(level)
    base = exponent_offset(g)
    bound = 4 * (level - base)
    if level < base + min_support_norm(g) / 4:
        warnings.warn(LevelTooSmall(f"level {level} is below every possible exponent"), stacklevel=2)
        return QSeries((), level)
    terms = []
    for norm, items in _shells(g, b, bound):
        c = sum((ct for _, ct in items), Fraction(0))
        if c:
            terms.append((base + norm / 4, c))
    return QSeries(tuple(terms), level)


def delta(g: PlumbingGraph, b: SpincClass, cap=None) -> DeltaResult:
    """Minimal exponent of Zhat_b, scanning shells of -l^2 up to ``cap``."""
    cap = default_cap(g) if cap is None else Fraction(cap)
    base = exponent_offset(g)
    start = min_support_norm(g)
    bound = min(cap, start + 4)
    step = Fraction(8)
    done = Fraction(-1)
    cancelled = []
    while True:
        for norm, items in _shells(g, b, bound):
            if norm <= done:
                continue
            c = sum((ct for _, ct in items), Fraction(0))
            vecs = tuple(l for l, _ in items)
            if c:
                return DeltaResult(base + norm / 4, vecs, c, tuple(cancelled), norm)
            cancelled.append((norm, vecs))
        done = bound
        if bound >= cap:
            return DeltaResult(Infinite(base + cap / 4), (), Fraction(0), tuple(cancelled), None)
        bound = min(cap, bound + step)
        step *= 2


def _delta_task(args):
    g, b, cap = args
    return delta(g, SpincClass(g, b), cap)


def _first_surviving(base: Fraction, shells, cap: Fraction) -> DeltaResult:
    cancelled = []
    for norm, items in shells:
        c = sum((ct for _, ct in items), Fraction(0))
        vecs = tuple(l for l, _ in items)
        if c:
            return DeltaResult(base + norm / 4, vecs, c, tuple(cancelled), norm)
        cancelled.append((norm, vecs))
    return DeltaResult(Infinite(base + cap / 4), (), Fraction(0), tuple(cancelled), None)


def _delta_single_pass(g: PlumbingGraph, classes, cap: Fraction) -> list[DeltaResult]:
    # one ball up to the cap, split by the class of -l; same results as per-class delta()
    base = exponent_offset(g)
    deg = g.degrees
    buckets = defaultdict(lambda: defaultdict(list))
    for l, norm in enumerate_ball(LatticeBallQuery(lattice_form(g), cap, support_constraints(g))):
        if any((x + d) % 2 for x, d in zip(l, deg)):
            continue
        key = SpincClass(g, [-x for x in l]).key
        buckets[key][norm].append((l, ctilde(g, l)))
    return [_first_surviving(base, sorted(buckets.get(c.key, {}).items()), cap) for c in classes]


def delta_all(g: PlumbingGraph, cap=None, workers: int = 1) -> dict:
    """Delta for every spin^c class, in the order of ``enumerate_spinc``.

    One process enumerates the ball once and sorts points into classes;
    with ``workers > 1`` each class runs its own search in a process pool.
    """
    classes = enumerate_spinc(g)
    cap = default_cap(g) if cap is None else Fraction(cap)
    if workers > 1 and len(classes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_delta_task, [(g, c.b, cap) for c in classes]))
    else:
        results = _delta_single_pass(g, classes, cap)
    return dict(zip(classes, results))


@dataclass(frozen=True)
class ConjectureReport:
    min_delta: Fraction | None
    bound: Fraction
    holds: bool | None
    inconclusive: bool
    canonical_delta: Fraction | Infinite

    def to_json(self) -> dict:
        return {
            "min_delta": None if self.min_delta is None else str(self.min_delta),
            "bound": str(self.bound),
            "holds": self.holds,
            "inconclusive": self.inconclusive,
            "canonical_delta": str(self.canonical_delta),
        }


def conjecture_report(g: PlumbingGraph, cap=None, workers: int = 1) -> ConjectureReport:
    """Check min_b Delta_b <= -gamma/4 + 1/2."""
    table = delta_all(g, cap, workers)
    finite = [r.value for r in table.values() if r.is_finite]
    bound = -gamma(g) / 4 + HALF
    m = min(finite) if finite else None
    holds = None if m is None else m <= bound
    can = table[canonical_spinc(g)].value
    return ConjectureReport(m, bound, holds, len(finite) < len(table), can)
