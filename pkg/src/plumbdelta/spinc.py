"""Spin^c structures as cosets (2Z^s + delta) / 2MZ^s."""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

from .errors import SingularMatrix, ValidationError
from .graph import PlumbingGraph
from .linalg import smith_normal_form

__all__ = [
    "SpincClass",
    "canonical_spinc",
    "enumerate_spinc",
    "same_class",
    "conjugate",
    "spinc_from_vector",
]


@lru_cache(maxsize=512)
def _snf(g: PlumbingGraph):
    if g.det == 0:
        raise SingularMatrix("spin^c structures need det M != 0")
    d, U, Ui, _ = smith_normal_form(g.matrix.rows)
    return d, U, Ui


def _key(g: PlumbingGraph, b: Sequence[int]) -> tuple[int, ...]:
    d, U, _ = _snf(g)
    x = [(bi - di) // 2 for bi, di in zip(b, g.degrees)]
    y = [sum(u * v for u, v in zip(row, x)) for row in U]
    return tuple(yi % di for yi, di in zip(y, d) if di > 1)


class SpincClass:
    """A spin^c structure [b] on Y(g).

    ``b`` is the representative the class was created from; ``key`` is the
    canonical residue vector from the Smith normal form of M, so two classes
    compare equal exactly when their representatives differ by 2Mn.
    """

    __slots__ = ("graph", "b", "key")

    def __init__(self, graph: PlumbingGraph, b: Sequence[int]):
        b = tuple(int(x) for x in b)
        if len(b) != graph.s:
            raise ValidationError(f"spin^c vector has length {len(b)}, graph has {graph.s} vertices")
        if any((bi - di) % 2 for bi, di in zip(b, graph.degrees)):
            raise ValidationError("spin^c representative must be congruent to delta mod 2")
        self.graph = graph
        self.b = b
        self.key = _key(graph, b)

    def __eq__(self, other):
        if not isinstance(other, SpincClass):
            return NotImplemented
        return self.key == other.key and self.graph == other.graph

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"SpincClass(b={list(self.b)}, key={list(self.key)})"

    @property
    def canonical_representative(self) -> tuple[int, ...]:
        g = self.graph
        d, _, Ui = _snf(g)
        y = [0] * len(d)
        it = iter(self.key)
        for i, di in enumerate(d):
            if di > 1:
                y[i] = next(it)
        x = [sum(u * v for u, v in zip(row, y)) for row in Ui]
        return tuple(di + 2 * xi for di, xi in zip(g.degrees, x))

    def act(self, h: Sequence[int]) -> "SpincClass":
        """Action of h in H_1 = Z^s / MZ^s: [b] -> [b + 2h]."""
        return SpincClass(self.graph, [bi + 2 * hi for bi, hi in zip(self.b, h)])

    @property
    def is_self_conjugate(self) -> bool:
        return conjugate(self) == self


def spinc_from_vector(g: PlumbingGraph, b: Sequence[int]) -> SpincClass:
    return SpincClass(g, b)


def canonical_spinc(g: PlumbingGraph) -> SpincClass:
    """can = [2u - delta]."""
    return SpincClass(g, g.canonical_vector)


def enumerate_spinc(g: PlumbingGraph) -> list[SpincClass]:
    """All |det M| classes, each given by its canonical representative."""
    d, _, Ui = _snf(g)
    ranges = [range(di) if di > 1 else range(1) for di in d]
    out = []
    for y in itertools.product(*ranges):
        x = [sum(u * v for u, v in zip(row, y)) for row in Ui]
        out.append(SpincClass(g, [di + 2 * xi for di, xi in zip(g.degrees, x)]))
    return out


def same_class(a: Sequence[int], b: Sequence[int], g: PlumbingGraph) -> bool:
    """True iff M x = (a - b)/2 has an integral solution."""
    m = g.matrix
    if m.det == 0:
        raise SingularMatrix("spin^c structures need det M != 0")
    diff = [x - y for x, y in zip(a, b)]
    if any(v % 2 for v in diff):
        return False
    half = [v // 2 for v in diff]
    det = m.det
    return all(sum(p * q for p, q in zip(r, half)) % det == 0 for r in m.adjugate.rows)


def conjugate(c: SpincClass) -> SpincClass:
    return SpincClass(c.graph, [-x for x in c.b])
