"""Seifert manifolds over S^2, Brieskorn spheres and lens spaces.

Closed-form invariants (gamma, Delta_can and its Dedekind-sum bounds) and
the Heegaard-Floer correction term as a lattice maximization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd, prod
from typing import Sequence

from .errors import InvalidPair, NotCoprime, NotNegativeDefinite
from .graph import PlumbingGraph
from .lattice import LatticeBallQuery, enumerate_ball
from .spinc import SpincClass, canonical_spinc

__all__ = [
    "SeifertData",
    "hj_expansion",
    "seifert_graph",
    "brieskorn",
    "lens_graph",
    "dedekind_sum",
    "gamma_seifert",
    "delta_can_closed",
    "lens_delta_table",
    "lens_gamma_candidates",
    "lens_generator",
    "delta_bounds",
    "d_invariant",
    "CorrectionTerm",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SeifertData:
    """M(b0; (a_1, w_1), ..., (a_n, w_n))."""

    b0: int
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(a), int(w)) for a, w in self.pairs)
        for a, w in pairs:
            if not 0 < w < a or gcd(a, w) != 1:
                raise InvalidPair(f"need 0 < w < a and gcd(a, w) = 1, got ({a}, {w})")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def e(self) -> Fraction:
        """Orbifold Euler number -b0 + sum w_i / a_i."""
        return -self.b0 + sum((Fraction(w, a) for a, w in self.pairs), Fraction(0))

    @property
    def A(self) -> int:
        return prod(a for a, _ in self.pairs)

    def __str__(self):
        legs = ", ".join(f"{a}/{w}" for a, w in self.pairs)
        return f"seifert({self.b0}; {legs})"


def hj_expansion(a: int, w: int) -> list[int]:
    """Hirzebruch-Jung continued fraction a/w = b1 - 1/(b2 - 1/(...)), all b_i >= 2."""
    if not 0 < w < a and not (a == w == 1):
        raise InvalidPair(f"need 0 < w < a, got ({a}, {w})")
    if gcd(a, w) != 1:
        raise InvalidPair(f"gcd({a}, {w}) != 1")
    out = []
    while w:
        b = -(-a // w)
        out.append(b)
        a, w = w, b * w - a
    return out


def _legs_graph(center_weight: int | None, legs: Sequence[Sequence[int]]) -> PlumbingGraph:
    verts, edges = [], []
    if center_weight is not None:
        verts.append(("c", center_weight))
    for j, chain in enumerate(legs):
        prev = "c" if center_weight is not None else None
        for k, b in enumerate(chain):
            vid = f"l{j}_{k}"
            verts.append((vid, -b))
            if prev is not None:
                edges.append((prev, vid))
            prev = vid
    return PlumbingGraph(verts, edges)


def seifert_graph(d: SeifertData) -> PlumbingGraph:
    """Star-shaped plumbing: center -b0, leg j the chain -hj(a_j/w_j)."""
    if d.e >= 0:
        raise NotNegativeDefinite(f"orbifold Euler number {d.e} is not negative")
    g = _legs_graph(-d.b0, [hj_expansion(a, w) for a, w in d.pairs])
    if not g.matrix.is_negative_definite():
        raise NotNegativeDefinite(f"{d} does not give a negative definite plumbing")
    return g


def brieskorn(a: Sequence[int]) -> SeifertData:
    """Seifert invariants of Sigma(a_1, ..., a_n) normalized so that e = -1/prod(a)."""
    a = [int(x) for x in a]
    if any(x < 2 for x in a):
        raise InvalidPair("Brieskorn exponents must be >= 2")
    for i in range(len(a)):
        for j in range(i):
            if gcd(a[i], a[j]) != 1:
                raise NotCoprime(f"{a[j]} and {a[i]} are not coprime")
    A = prod(a)
    pairs = []
    for ai in a:
        w = (-pow(A // ai, -1, ai)) % ai
        pairs.append((ai, w))
    num = 1 + sum(w * (A // ai) for ai, w in pairs)
    assert num % A == 0
    return SeifertData(num // A, tuple(pairs))


def lens_graph(p: int, r: int) -> PlumbingGraph:
    """L(p, r) as the linear chain -hj(p/r); vertices v0, v1, ... in chain order."""
    if not p > r > 0 or gcd(p, r) != 1:
        raise InvalidPair(f"lens space needs p > r > 0 coprime, got ({p}, {r})")
    bs = hj_expansion(p, r)
    verts = [(f"v{i}", -b) for i, b in enumerate(bs)]
    edges = [(f"v{i}", f"v{i + 1}") for i in range(len(bs) - 1)]
    return PlumbingGraph(verts, edges)


def _sawtooth(x: Fraction) -> Fraction:
    if x.denominator == 1:
        return Fraction(0)
    return x - floor(x) - HALF


def dedekind_sum(a: int, p: int) -> Fraction:
    """s(a, p) = sum_{k=1}^{p-1} ((k/p)) ((ka/p))."""
    if p <= 0:
        raise ValueError("modulus must be positive")
    a %= p
    return sum((_sawtooth(Fraction(k, p)) * _sawtooth(Fraction(k * a, p)) for k in range(1, p)), Fraction(0))


def gamma_seifert(d: SeifertData) -> Fraction:
    """gamma(Y) from the Seifert invariants.

    The Dedekind-sum term enters with a minus sign for the classical
    sawtooth s(w, a); this is the sign that agrees with the plumbing-matrix
    formula for every negative definite star.
    """
    e = d.e
    if e >= 0:
        raise NotNegativeDefinite(f"orbifold Euler number {e} is not negative")
    t = 2 - d.n + sum((Fraction(1, a) for a, _ in d.pairs), Fraction(0))
    return t * t / e + e + 5 - 12 * sum((dedekind_sum(w, a) for a, w in d.pairs), Fraction(0))


def delta_can_closed(d: SeifertData) -> Fraction:
    return -gamma_seifert(d) / 4 + HALF


def delta_bounds(d: SeifertData) -> tuple[Fraction, Fraction]:
    """Lower and upper bounds on Delta_can from |s(a, p)| <= s(1, p)."""
    e = d.e
    if e >= 0:
        raise NotNegativeDefinite(f"orbifold Euler number {e} is not negative")
    n = d.n
    t = 2 - n + sum((Fraction(1, a) for a, _ in d.pairs), Fraction(0))
    head = -t * t / (4 * e)
    corr = sum((Fraction(a, 4) + Fraction(1, 2 * a) for a, _ in d.pairs), Fraction(0))
    upper = head - (e + 3 * (n + 1)) / 4 + corr
    lower = head - (e + 3 * (1 - n)) / 4 - corr
    return lower, upper


def lens_gamma_candidates(p: int, r: int) -> dict[str, Fraction]:
    """The two readings 2 - 2/p - 12 s(., .) of gamma(L(p, r)), by argument order."""
    return {
        "s(p,r)": 2 - Fraction(2, p) - 12 * dedekind_sum(p, r),
        "s(r,p)": 2 - Fraction(2, p) - 12 * dedekind_sum(r, p),
    }


def lens_delta_table(p: int, r: int) -> list[tuple[str, Fraction]]:
    """Labelled nonzero Delta values of L(p, r); classes are written g^k can.

    Coinciding labels are merged; every class not listed has vanishing Zhat.
    """
    if not p > r > 0 or gcd(p, r) != 1:
        raise InvalidPair(f"lens space needs p > r > 0 coprime, got ({p}, {r})")
    s = dedekind_sum(r, p)
    hi = 3 * s + Fraction(1, 2 * p)
    lo = 3 * s - Fraction(1, 2 * p)
    out: dict[int, Fraction] = {}
    for k, v in ((0, hi), (-r - 1, hi), (-1, lo), (-r, lo)):
        out.setdefault(k % p, v)
    return [(_label(k, p), v) for k, v in sorted(out.items())]


def _label(k: int, p: int) -> str:
    k %= p
    if k == 0:
        return "can"
    return f"g^{k}can"


def lens_generator(g: PlumbingGraph) -> list[int]:
    """Vector of the generator g of H_1(L(p, r)) used in the labels: the last chain vertex."""
    h = [0] * g.s
    h[g.index[f"v{g.s - 1}"]] = 1
    return h


@dataclass(frozen=True)
class CorrectionTerm:
    d: Fraction
    witnesses: tuple
    conjectural: bool = True

    def to_json(self) -> dict:
        return {
            "d": str(self.d),
            "witnesses": [list(k) for k in self.witnesses],
            "conjectural": self.conjectural,
        }


def d_invariant(g: PlumbingGraph, b: SpincClass | None = None) -> CorrectionTerm:
    """max over k' in [b + Mu] of ((k')^2 + s)/4.

    With k' = k0 + 2Mn one has -(k')^2 = 4 (n + c)^T (-M) (n + c) where
    c = M^{-1} k0 / 2, so the maximum is a closest-vector problem for the
    integral form -M.  Local search from the rounded center gives a
    candidate; since every value lies in Z/(4|H|), an empty ball strictly
    below it proves optimality without listing every tied maximizer.
    ``witnesses`` holds characteristic vectors attaining the maximum.
    """
    m = g.matrix
    if not m.is_negative_definite():
        raise NotNegativeDefinite("plumbing matrix is not negative definite")
    b = canonical_spinc(g) if b is None else b
    u = [1] * g.s
    k0 = [bi + mi for bi, mi in zip(b.b, m.matvec(u))]
    c = [Fraction(x) / 2 for x in m.inverse.matvec(k0)]
    form = -m
    center = tuple(-x for x in c)

    def value(n):
        y = [ni + ci for ni, ci in zip(n, c)]
        return Fraction(form.bilinear(y, y))

    n = [round(x) for x in center]
    best = value(n)
    improved = True
    while improved:
        improved = False
        for i in range(g.s):
            for step in (1, -1):
                n[i] += step
                v = value(n)
                if v < best:
                    best, improved = v, True
                    break
                n[i] -= step
    step = Fraction(1, 4 * abs(g.det))
    pts = enumerate_ball(LatticeBallQuery(form, best - step, center=center))
    if pts:
        top = pts[0][1]
        tied = [nv for nv, norm in pts if norm == top]
    else:
        top, tied = best, [tuple(n)]
    maxima = [tuple(k + 2 * x for k, x in zip(k0, m.matvec(nv))) for nv in tied]
    dval = (-4 * top + g.s) / 4
    return CorrectionTerm(Fraction(dval), tuple(maxima))
