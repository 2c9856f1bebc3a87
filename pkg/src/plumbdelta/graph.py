"""Plumbing graphs and the invariants read directly off the plumbing matrix."""

from __future__ import annotations

import hashlib
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotNegativeDefinite, SingularMatrix, ValidationError
from .linalg import ExactMatrix

__all__ = [
    "PlumbingGraph",
    "build_matrix",
    "exact_inverse",
    "quadratic_form",
    "is_negative_definite",
    "is_weakly_negative_definite",
    "gamma",
]


def _degree_class(d: int) -> int:
    return 0 if d <= 1 else (1 if d == 2 else 2)


class PlumbingGraph:
    """A weighted tree (genus zero plumbing).

    ``vertices`` is a sequence of ``(id, weight)`` pairs and ``edges`` a
    sequence of id pairs.  The input order is kept in ``input_ids`` for
    serialization; every vector handed to or returned from the numerical
    routines is indexed by the normalized order ``ids`` (leaves and isolated
    vertices first, then degree-2 vertices, then nodes, each block in input
    order).
    """

    def __init__(self, vertices: Iterable[tuple[str, int]], edges: Iterable[Sequence[str]]):
        verts = [(str(v), w) for v, w in vertices]
        if not verts:
            raise ValidationError("graph has no vertices")
        seen = set()
        for v, w in verts:
            if v in seen:
                raise ValidationError(f"repeated vertex id {v!r}")
            if isinstance(w, bool) or not isinstance(w, int):
                raise ValidationError(f"weight of {v!r} must be an integer, got {w!r}")
            seen.add(v)
        edge_list = []
        edge_set = set()
        for e in edges:
            if len(e) != 2:
                raise ValidationError(f"edge {e!r} must have two endpoints")
            a, b = str(e[0]), str(e[1])
            for x in (a, b):
                if x not in seen:
                    raise ValidationError(f"edge {e!r} uses unknown vertex {x!r}")
            if a == b:
                raise ValidationError(f"loop at {a!r}")
            key = frozenset((a, b))
            if key in edge_set:
                raise ValidationError(f"repeated edge {a!r}-{b!r}")
            edge_set.add(key)
            edge_list.append((a, b))
        if len(edge_list) != len(verts) - 1:
            raise ValidationError(
                f"not a tree: {len(verts)} vertices need {len(verts) - 1} edges, got {len(edge_list)}"
            )
        nbrs: dict[str, list[str]] = {v: [] for v, _ in verts}
        for a, b in edge_list:
            nbrs[a].append(b)
            nbrs[b].append(a)
        # connectivity; with s-1 edges this also rules out cycles
        start = verts[0][0]
        stack, reached = [start], {start}
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y not in reached:
                    reached.add(y)
                    stack.append(y)
        if len(reached) != len(verts):
            raise ValidationError("graph is not connected (contains a cycle or is a forest)")

        self.input_ids = tuple(v for v, _ in verts)
        self.edges = tuple(edge_list)
        weight = dict(verts)
        order = sorted(range(len(verts)), key=lambda i: (_degree_class(len(nbrs[verts[i][0]])), i))
        self.ids = tuple(verts[i][0] for i in order)
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.weights = tuple(weight[v] for v in self.ids)
        self.neighbors = tuple(tuple(sorted(self.index[y] for y in nbrs[v])) for v in self.ids)
        self.degrees = tuple(len(n) for n in self.neighbors)
        self.s = len(self.ids)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "PlumbingGraph":
        try:
            verts = [(v["id"], v["weight"]) for v in data["vertices"]]
            edges = [tuple(e) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed graph record: {exc}") from exc
        return cls(verts, edges)

    def to_dict(self) -> dict:
        return {
            "format": "plumbing-v1",
            "vertices": [{"id": v, "weight": self.weight(v)} for v in self.input_ids],
            "edges": [list(e) for e in self.edges],
        }

    def weight(self, vid: str) -> int:
        return self.weights[self.index[vid]]

    def degree(self, vid: str) -> int:
        return self.degrees[self.index[vid]]

    def neighbor_ids(self, vid: str) -> tuple[str, ...]:
        return tuple(self.ids[j] for j in self.neighbors[self.index[vid]])

    def __repr__(self):
        ws = ", ".join(f"{v}:{self.weight(v)}" for v in self.input_ids)
        return f"PlumbingGraph([{ws}], edges={len(self.edges)})"

    def __eq__(self, other):
        if not isinstance(other, PlumbingGraph):
            return NotImplemented
        return (
            self.input_ids == other.input_ids
            and self.weights == other.weights
            and self.ids == other.ids
            and {frozenset(e) for e in self.edges} == {frozenset(e) for e in other.edges}
        )

    def __hash__(self):
        return hash((self.ids, self.weights, frozenset(frozenset(e) for e in self.edges)))

    # -- vertex partition -----------------------------------------------------

    @property
    def leaves(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d <= 1]

    @property
    def chain(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == 2]

    @property
    def nodes(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d >= 3]

    # -- derived data ---------------------------------------------------------

    @cached_property
    def matrix(self) -> ExactMatrix:
        s = self.s
        rows = [[0] * s for _ in range(s)]
        for i in range(s):
            rows[i][i] = self.weights[i]
            for j in self.neighbors[i]:
                rows[i][j] = 1
        return ExactMatrix(rows)

    @property
    def trace(self) -> int:
        return sum(self.weights)

    @property
    def det(self) -> int:
        return self.matrix.det

    @property
    def order_h(self) -> int:
        """|H_1(Y)| = |det M|."""
        return abs(self.matrix.det)

    @cached_property
    def canonical_vector(self) -> tuple[int, ...]:
        """2u - delta."""
        return tuple(2 - d for d in self.degrees)

    @cached_property
    def canonical_hash(self) -> str:
        """Isomorphism-invariant hash of the weighted tree (ids ignored)."""
        return hashlib.sha256(self._canonical_string().encode()).hexdigest()[:16]

    def _canonical_string(self) -> str:
        n = self.s
        remaining = set(range(n))
        deg = list(self.degrees)
        layer = [i for i in range(n) if deg[i] <= 1]
        while len(remaining) > 2:
            nxt = []
            for v in layer:
                remaining.discard(v)
                for w in self.neighbors[v]:
                    if w in remaining:
                        deg[w] -= 1
                        if deg[w] == 1:
                            nxt.append(w)
            layer = nxt
        centers = sorted(remaining)

        def encode(root, parent):
            # iterative post-order to stay clear of the recursion limit
            out = {}
            stack = [(root, parent, False)]
            while stack:
                v, p, done = stack.pop()
                kids = [w for w in self.neighbors[v] if w != p]
                if done:
                    out[v] = "(" + str(self.weights[v]) + "".join(sorted(out[w] for w in kids)) + ")"
                else:
                    stack.append((v, p, True))
                    stack.extend((w, v, False) for w in kids)
            return out[root]

        if len(centers) == 1:
            return encode(centers[0], -1)
        a, b = centers
        return min(encode(a, b) + "-" + encode(b, a), encode(b, a) + "-" + encode(a, b))

    def subgraph(self, keep: Iterable[int]) -> "PlumbingGraph | None":
        """Full subgraph on a connected set of normalized indices (None when empty)."""
        keep = sorted(set(keep))
        if not keep:
            return None
        ks = set(keep)
        verts = [(self.ids[i], self.weights[i]) for i in keep]
        edges = [e for e in self.edges if self.index[e[0]] in ks and self.index[e[1]] in ks]
        return PlumbingGraph(verts, edges)

    def components_without(self, removed: Iterable[int]) -> list[list[int]]:
        """Connected components (as index lists) after deleting ``removed``."""
        gone = set(removed)
        seen = set(gone)
        comps = []
        for start in range(self.s):
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.neighbors[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def path(self, u: int, v: int) -> list[int]:
        """Vertex indices on the unique path from u to v."""
        parent = {u: None}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                break
            for y in self.neighbors[x]:
                if y not in parent:
                    parent[y] = x
                    stack.append(y)
        out = [v]
        while out[-1] != u:
            out.append(parent[out[-1]])
        return out[::-1]


def induced_neg_det(g: PlumbingGraph, keep: Iterable[int]) -> int:
    """det(-M) of the full subgraph on ``keep`` (a forest); 1 for the empty set."""
    keep = sorted(set(keep))
    if not keep:
        return 1
    k = len(keep)
    pos = {v: a for a, v in enumerate(keep)}
    rows = [[0] * k for _ in range(k)]
    for a, v in enumerate(keep):
        rows[a][a] = -g.weights[v]
        for w in g.neighbors[v]:
            if w in pos:
                rows[a][pos[w]] = -1
    return ExactMatrix(rows).det


def build_matrix(g: PlumbingGraph) -> ExactMatrix:
    return g.matrix


def exact_inverse(m: ExactMatrix) -> ExactMatrix:
    return m.inverse


def quadratic_form(m: ExactMatrix, l: Sequence[int]) -> Fraction:
    """-l^2 = -l^T M^{-1} l, the positive normalization of the lattice form."""
    if len(l) != m.n:
        raise DimensionMismatch(f"vector of length {len(l)} for a graph with {m.n} vertices")
    return Fraction(-m.inverse.bilinear(l, l))


def is_negative_definite(m: ExactMatrix) -> bool:
    return m.is_negative_definite()


def is_weakly_negative_definite(g: PlumbingGraph, m: ExactMatrix | None = None) -> bool:
    """M nondegenerate and the node block of M^{-1} negative definite."""
    m = g.matrix if m is None else m
    if m.det == 0:
        raise SingularMatrix("weak negative definiteness needs det M != 0")
    nodes = g.nodes
    if not nodes:
        return True
    return m.inverse.submatrix(nodes).is_negative_definite()


def gamma(g: PlumbingGraph) -> Fraction:
    """gamma(Y) = 3s + Tr(M) + 2 + (2u - delta)^T M^{-1} (2u - delta)."""
    m = g.matrix
    if not m.is_negative_definite():
        raise NotNegativeDefinite("gamma is defined here for negative definite plumbings")
    k = g.canonical_vector
    return Fraction(3 * g.s + g.trace + 2) + Fraction(m.inverse.bilinear(k, k))
