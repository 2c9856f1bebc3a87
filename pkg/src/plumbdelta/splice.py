"""Splice diagrams of plumbing trees and the H-shaped minimizer search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, prod
from typing import Sequence

from .errors import ConstraintViolation, ValidationError, VertexNotInDiagram
from .graph import PlumbingGraph, induced_neg_det

__all__ = [
    "SpliceDiagram",
    "splice_diagram",
    "inverse_entry_via_splice",
    "path_determinant_entry",
    "HShapeWeights",
    "h_shape_weights",
    "h_shape_form",
    "h_shape_minimize",
]


@dataclass(frozen=True)
class SpliceDiagram:
    """String-collapsed tree with the near-node weights w_{v,e}.

    ``weights[(v, w)]`` is det(-M) of the branch cut off at node ``v`` in the
    direction of its plumbing neighbour ``w`` (both ids).  ``edges`` lists
    diagram edges as ``(v, x, interior_ids)``.
    """

    graph: PlumbingGraph
    vertices: tuple
    edges: tuple
    weights: dict
    det_neg: int
    degenerate: bool = False

    def weights_at(self, v: str) -> dict:
        return {w: val for (x, w), val in self.weights.items() if x == v}

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"ends": [a, b], "string": list(mid)} for a, b, mid in self.edges],
            "weights": [
                {"node": v, "toward": w, "weight": val} for (v, w), val in sorted(self.weights.items())
            ],
            "det_neg_M": self.det_neg,
            "degenerate": self.degenerate,
        }


def splice_diagram(g: PlumbingGraph) -> SpliceDiagram:
    verts = [i for i in range(g.s) if g.degrees[i] != 2]
    edges = []
    seen = set()
    for v in verts:
        for w in g.neighbors[v]:
            prev, cur, mid = v, w, []
            while g.degrees[cur] == 2:
                mid.append(cur)
                nxt = next(x for x in g.neighbors[cur] if x != prev)
                prev, cur = cur, nxt
            key = frozenset((v, cur, *mid))
            if key in seen:
                continue
            seen.add(key)
            edges.append((g.ids[v], g.ids[cur], tuple(g.ids[m] for m in mid)))
    weights = {}
    for v in g.nodes:
        for w in g.neighbors[v]:
            comp = next(c for c in g.components_without([v]) if w in c)
            weights[(g.ids[v], g.ids[w])] = induced_neg_det(g, comp)
    det_neg = (-1) ** g.s * g.det
    return SpliceDiagram(
        graph=g,
        vertices=tuple(g.ids[v] for v in verts),
        edges=tuple(edges),
        weights=weights,
        det_neg=det_neg,
        degenerate=not g.nodes,
    )


def path_determinant_entry(g: PlumbingGraph, u: str, v: str) -> Fraction:
    """M^{-1}_{uv} = -det(-M(G minus path(u, v))) / det(-M)."""
    p = g.path(g.index[u], g.index[v])
    rest = set(range(g.s)) - set(p)
    return Fraction(-induced_neg_det(g, rest), (-1) ** g.s * g.det)


def _product_entry(sd: SpliceDiagram, v: str, w: str) -> Fraction:
    g = sd.graph
    iv, iw = g.index[v], g.index[w]
    p = g.path(iv, iw)
    on_path = set(p)
    n = 1
    for x in p:
        if g.degrees[x] < 3:
            continue
        for y in g.neighbors[x]:
            if y not in on_path:
                n *= sd.weights[(g.ids[x], g.ids[y])]
    return Fraction(-n, sd.det_neg)


def inverse_entry_via_splice(sd: SpliceDiagram, v: str, w: str, fallback: bool = True) -> Fraction:
    """M^{-1}_{vw} as -N_{vw}/det(-M) from the diagram weights.

    The product formula needs both ends in the diagram and excludes the
    diagonal at a leaf.  Otherwise the path-determinant formula on the full
    graph is used, or VertexNotInDiagram is raised when ``fallback`` is off.
    """
    g = sd.graph
    for x in (v, w):
        if x not in g.index:
            raise ValidationError(f"unknown vertex {x!r}")
    usable = v in sd.vertices and w in sd.vertices and not (v == w and g.degree(v) < 3)
    if usable:
        return _product_entry(sd, v, w)
    if not fallback:
        raise VertexNotInDiagram(f"no product formula for the pair ({v}, {w})")
    return path_determinant_entry(g, v, w)


@dataclass(frozen=True)
class HShapeWeights:
    """Weights of an H-shaped splice diagram together with its source plumbing.

    ``a`` holds (a1, a2, a3) at the first node and ``ap`` (a1', a2', a3') at
    the second; a3 and a3' sit on the connecting edge.  ``coords`` names the
    plumbing vertices behind (x1, x2, x3, x1', x2', x3').  ``constant`` is
    -sum over leaves of M^{-1}_{vv}; ``det_neg`` is det(-M), equal to 1 for
    integral homology spheres.
    """

    a: tuple
    ap: tuple
    constant: Fraction
    det_neg: int
    coords: tuple
    graph: PlumbingGraph = field(repr=False, compare=False)

    @property
    def is_homology_sphere(self) -> bool:
        return self.det_neg == 1

    def mirrored(self) -> "HShapeWeights":
        c = self.coords
        return HShapeWeights(self.ap, self.a, self.constant, self.det_neg, c[3:] + c[:3], self.graph)

    def embed(self, x: Sequence[int]) -> tuple[int, ...]:
        g = self.graph
        l = [0] * g.s
        for vid, xi in zip(self.coords, x):
            l[g.index[vid]] = xi
        return tuple(l)


def h_shape_weights(g: PlumbingGraph) -> HShapeWeights:
    nodes = g.nodes
    if len(nodes) != 2 or any(g.degrees[v] != 3 for v in nodes):
        raise ValidationError("H-shaped diagram needs exactly two nodes, both of degree 3")
    sd = splice_diagram(g)
    n0, n1 = (g.ids[v] for v in nodes)
    ends = {}
    for a, b, mid in sd.edges:
        first_a = mid[0] if mid else b
        first_b = mid[-1] if mid else a
        ends.setdefault(a, []).append((b, first_a))
        ends.setdefault(b, []).append((a, first_b))

    def side(n, other):
        leaves = sorted(((end, first) for end, first in ends[n] if end != other), key=lambda t: g.index[t[0]])
        toward = next(first for end, first in ends[n] if end == other)
        if len(leaves) != 2:
            raise ValidationError("H-shaped diagram needs two leaves at each node")
        ws = tuple(sd.weights[(n, first)] for _, first in leaves) + (sd.weights[(n, toward)],)
        return ws, (leaves[0][0], leaves[1][0], n)

    a, ca = side(n0, n1)
    ap, cb = side(n1, n0)
    inv = g.matrix.inverse
    const = Fraction(-sum(inv[i, i] for i in g.leaves))
    return HShapeWeights(a, ap, const, sd.det_neg, ca + cb, g)


def _check_x(x: Sequence[int]):
    if len(x) != 6:
        raise ConstraintViolation("need six coordinates (x1, x2, x3, x1', x2', x3')")
    x1, x2, x3, y1, y2, y3 = x
    if any(v not in (1, -1) for v in (x1, x2, y1, y2)):
        raise ConstraintViolation("leaf coordinates must be +-1")
    if x3 % 2 == 0 or y3 % 2 == 0:
        raise ConstraintViolation("node coordinates must be odd")


def _raw(a, ap, x) -> int:
    a1, a2, a3 = a
    b1, b2, b3 = ap
    x1, x2, x3, y1, y2, y3 = x
    line1 = x3 * x3 * a1 * a2 * a3 + 2 * x1 * x3 * a2 * a3 + 2 * x2 * x3 * a1 * a3 + 2 * x1 * x2 * a3
    line1 += y3 * y3 * b1 * b2 * b3 + 2 * y1 * y3 * b2 * b3 + 2 * y2 * y3 * b1 * b3 + 2 * y1 * y2 * b3
    line2 = 2 * x1 * y2 * a2 * b1 + 2 * y1 * x3 * a1 * a2 * b2 + 2 * y2 * x3 * a1 * a2 * b1
    line2 += 2 * y1 * x2 * b2 * a1 + 2 * x1 * y3 * b1 * b2 * a2 + 2 * x2 * y3 * b1 * b2 * a1
    line3 = 2 * x1 * y1 * a2 * b2 + 2 * x2 * y2 * a1 * b1 + 2 * x3 * y3 * a1 * a2 * b1 * b2
    return line1 + line2 + line3


def h_shape_form(w: HShapeWeights, x: Sequence[int]) -> Fraction:
    """-l^2 on the support, written in the six diagram coordinates."""
    _check_x(x)
    return Fraction(_raw(w.a, w.ap, x), w.det_neg) + w.constant


def _odd_neighbors(mu: Fraction) -> tuple[int, int]:
    o = 2 * floor((mu - 1) / 2) + 1
    return o, o + 2


@dataclass(frozen=True)
class HShapeCandidates:
    candidates: tuple  # ((x, value), ...) sorted by value
    minimum: Fraction
    minimizers: tuple

    def to_json(self) -> dict:
        return {
            "minimum": str(self.minimum),
            "minimizers": [list(x) for x in self.minimizers],
            "candidates": [{"x": list(x), "value": str(v)} for x, v in self.candidates],
        }


def h_shape_minimize(w: HShapeWeights) -> HShapeCandidates:
    """Sign-pattern search with odd rounding of the real minimizer in (x3, x3').

    For each of the 16 leaf sign patterns the form is a quadratic in the two
    node coordinates.  Candidates are the four odd roundings of its real
    minimizer plus, for each rounded x3 (resp. x3'), the two odd roundings of
    the conditional minimizer in the other coordinate.
    """
    a1, a2, a3 = w.a
    b1, b2, b3 = w.ap
    P = a1 * a2 * a3
    Q = b1 * b2 * b3
    R = a1 * a2 * b1 * b2
    found = {}
    for x1, x2, y1, y2 in itertools.product((1, -1), repeat=4):
        Lx = x1 * a2 * a3 + x2 * a1 * a3 + y1 * a1 * a2 * b2 + y2 * a1 * a2 * b1
        Ly = y1 * b2 * b3 + y2 * b1 * b3 + x1 * b1 * b2 * a2 + x2 * b1 * b2 * a1
        det = P * Q - R * R
        s3 = Fraction(-(Q * Lx - R * Ly), det)
        t3 = Fraction(-(P * Ly - R * Lx), det)
        pairs = set()
        for u in _odd_neighbors(s3):
            for v in _odd_neighbors(t3):
                pairs.add((u, v))
            for v in _odd_neighbors(Fraction(-(R * u + Ly), Q)):
                pairs.add((u, v))
        for v in _odd_neighbors(t3):
            for u in _odd_neighbors(Fraction(-(R * v + Lx), P)):
                pairs.add((u, v))
        for u, v in pairs:
            x = (x1, x2, u, y1, y2, v)
            found[x] = h_shape_form(w, x)
    cands = tuple(sorted(found.items(), key=lambda t: (t[1], t[0])))
    m = cands[0][1]
    return HShapeCandidates(cands, m, tuple(x for x, v in cands if v == m))
