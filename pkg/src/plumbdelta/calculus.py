"""Neumann moves on plumbing trees and reduction of weakly negative definite
graphs to negative definite ones.

Every move rewrites a working copy of the vertex and edge lists and rebuilds
a validated PlumbingGraph, so each intermediate graph is again a tree.
Determinant rule: an epsilon = +1 blow-up or blow-down keeps det M, an
epsilon = -1 one flips its sign, and every 0-chain move flips it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ImpossibleForWeaklyNegDef,
    MoveNotApplicable,
    NodeCreatingMoveRejected,
    NonTermination,
    NotWeaklyNegativeDefinite,
    SingularBlock,
    SingularMatrix,
    ValidationError,
)
from .graph import PlumbingGraph, is_weakly_negative_definite
from .linalg import ExactMatrix

__all__ = [
    "KINDS",
    "Move",
    "TraceStep",
    "MoveTrace",
    "apply_move",
    "inverse_move",
    "creates_node",
    "fresh_id",
    "normalize",
    "replay",
    "schur_split_check",
]

KINDS = (
    "BlowDownVertex",
    "BlowUpEdge",
    "BlowUpVertex",
    "BlowUpFree",
    "ZeroChainAbsorb",
    "ZeroChainExtrude",
    "ZeroLeafAbsorb",
    "ZeroLeafExtrude",
)


@dataclass(frozen=True)
class Move:
    """One local rewrite.

    ``loc`` by kind:

    * BlowDownVertex ``(u,)``: remove the eps-vertex u of valency 1 or 2.
    * BlowUpEdge ``(v, w, new)``: insert an eps-vertex on the edge v-w.
    * BlowUpVertex ``(v, new)``: attach an eps-leaf to v.
    * BlowUpFree ``(new,)``: disjoint eps-vertex; always rejected on trees.
    * ZeroChainAbsorb ``(u, keep, drop)``: delete the 0-vertex u of valency 2
      and merge its neighbours into ``keep`` with weight m_keep + m_drop.
    * ZeroChainExtrude ``(keep, u, drop, *moved)``: inverse of the above;
      ``eps`` is the weight given to ``drop`` and ``moved`` lists the
      neighbours of ``keep`` that are reattached to ``drop``.
    * ZeroLeafAbsorb ``(u, v)``: delete a 0-leaf u together with its
      valency-2 neighbour v.
    * ZeroLeafExtrude ``(w, v, u)``: attach the path w - v - u with v of
      weight ``eps`` and u of weight 0.

    ``before`` and ``after`` hold ``(id, weight)`` for the touched vertices
    once the move has been applied inside a trace.
    """

    kind: str
    eps: int
    loc: tuple
    before: tuple = ()
    after: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown move kind {self.kind!r}")
        object.__setattr__(self, "loc", tuple(str(x) for x in self.loc))
        object.__setattr__(self, "eps", int(self.eps))

    def to_line(self, hash_after: str) -> str:
        return f"{self.kind} {self.eps} {' '.join(self.loc)} | {hash_after}"


class _Work:
    """Mutable copy of a graph in input order."""

    def __init__(self, g: PlumbingGraph):
        self.verts = [[v, g.weight(v)] for v in g.input_ids]
        self.edges = [tuple(e) for e in g.edges]

    def pos(self, vid):
        for i, (v, _) in enumerate(self.verts):
            if v == vid:
                return i
        raise MoveNotApplicable(f"unknown vertex {vid!r}")

    def w(self, vid):
        return self.verts[self.pos(vid)][1]

    def set_w(self, vid, val):
        self.verts[self.pos(vid)][1] = val

    def add(self, vid, weight):
        if any(v == vid for v, _ in self.verts):
            raise MoveNotApplicable(f"vertex id {vid!r} already in use")
        self.verts.append([vid, weight])

    def remove(self, vid):
        del self.verts[self.pos(vid)]

    def nbrs(self, vid):
        out = []
        for a, b in self.edges:
            if a == vid:
                out.append(b)
            elif b == vid:
                out.append(a)
        return out

    def edge_index(self, a, b):
        for i, e in enumerate(self.edges):
            if set(e) == {a, b}:
                return i
        raise MoveNotApplicable(f"no edge {a}-{b}")

    def graph(self) -> PlumbingGraph:
        return PlumbingGraph([tuple(x) for x in self.verts], self.edges)


def fresh_id(g: PlumbingGraph | Iterable[str], prefix: str = "x") -> str:
    taken = set(g.ids) if isinstance(g, PlumbingGraph) else set(g)
    k = 0
    while f"{prefix}{k}" in taken:
        k += 1
    return f"{prefix}{k}"


def _need(cond, msg):
    if not cond:
        raise MoveNotApplicable(msg)


def _node_count(g: PlumbingGraph) -> int:
    return len(g.nodes)


def creates_node(g: PlumbingGraph, m: Move) -> bool:
    """True when ``m`` raises the number of vertices of valency >= 3."""
    return _node_count(apply_move(g, m)) > _node_count(g)


def apply_move(g: PlumbingGraph, m: Move, allow_node_creation: bool = True) -> PlumbingGraph:
    wk = _Work(g)
    kind, eps, loc = m.kind, m.eps, m.loc
    if kind in ("BlowDownVertex", "BlowUpEdge", "BlowUpVertex", "BlowUpFree"):
        _need(eps in (1, -1), f"{kind} needs eps = +-1, got {eps}")

    if kind == "BlowDownVertex":
        _need(len(loc) == 1, "BlowDownVertex takes one vertex")
        (u,) = loc
        _need(wk.w(u) == eps, f"{u} has weight {wk.w(u)}, not {eps}")
        nb = wk.nbrs(u)
        _need(1 <= len(nb) <= 2, f"{u} has valency {len(nb)}; blow-down needs 1 or 2")
        for x in nb:
            wk.set_w(x, wk.w(x) - eps)
        if len(nb) == 2:
            i = wk.edge_index(u, nb[0])
            j = wk.edge_index(u, nb[1])
            wk.edges[min(i, j)] = (nb[0], nb[1]) if i < j else (nb[1], nb[0])
            del wk.edges[max(i, j)]
        else:
            del wk.edges[wk.edge_index(u, nb[0])]
        wk.remove(u)

    elif kind == "BlowUpEdge":
        _need(len(loc) == 3, "BlowUpEdge takes (v, w, new)")
        v, w, new = loc
        i = wk.edge_index(v, w)
        wk.add(new, eps)
        wk.set_w(v, wk.w(v) + eps)
        wk.set_w(w, wk.w(w) + eps)
        wk.edges[i] = (v, new)
        wk.edges.append((new, w))

    elif kind == "BlowUpVertex":
        _need(len(loc) == 2, "BlowUpVertex takes (v, new)")
        v, new = loc
        wk.set_w(v, wk.w(v) + eps)
        wk.add(new, eps)
        wk.edges.append((v, new))

    elif kind == "BlowUpFree":
        raise MoveNotApplicable("a free blow-up disconnects the tree")

    elif kind == "ZeroChainAbsorb":
        _need(eps == 0, "ZeroChainAbsorb carries eps = 0")
        _need(len(loc) == 3, "ZeroChainAbsorb takes (u, keep, drop)")
        u, keep, drop = loc
        _need(wk.w(u) == 0, f"{u} is not 0-decorated")
        _need(sorted(wk.nbrs(u)) == sorted([keep, drop]) and keep != drop, f"{u} does not sit between {keep} and {drop}")
        wk.set_w(keep, wk.w(keep) + wk.w(drop))
        new_edges = []
        for a, b in wk.edges:
            if u in (a, b):
                continue
            if drop in (a, b):
                other = b if a == drop else a
                new_edges.append((keep, other))
            else:
                new_edges.append((a, b))
        wk.edges = new_edges
        wk.remove(u)
        wk.remove(drop)

    elif kind == "ZeroChainExtrude":
        _need(len(loc) >= 3, "ZeroChainExtrude takes (keep, u, drop, *moved)")
        keep, u, drop, *moved = loc
        nb = wk.nbrs(keep)
        _need(len(set(moved)) == len(moved) and all(x in nb for x in moved), f"moved vertices must be neighbours of {keep}")
        _need(u != drop, "new vertex ids must differ")
        wk.set_w(keep, wk.w(keep) - eps)
        wk.add(u, 0)
        wk.add(drop, eps)
        for x in moved:
            wk.edges[wk.edge_index(keep, x)] = (drop, x)
        wk.edges.append((keep, u))
        wk.edges.append((u, drop))

    elif kind == "ZeroLeafAbsorb":
        _need(eps == 0, "ZeroLeafAbsorb carries eps = 0")
        _need(len(loc) == 2, "ZeroLeafAbsorb takes (u, v)")
        u, v = loc
        _need(wk.w(u) == 0 and wk.nbrs(u) == [v], f"{u} is not a 0-leaf at {v}")
        _need(len(wk.nbrs(v)) == 2, f"{v} must have valency 2")
        wk.edges = [e for e in wk.edges if u not in e and v not in e]
        wk.remove(u)
        wk.remove(v)

    elif kind == "ZeroLeafExtrude":
        _need(len(loc) == 3, "ZeroLeafExtrude takes (w, v, u)")
        w, v, u = loc
        wk.pos(w)
        _need(u != v, "new vertex ids must differ")
        wk.add(v, eps)
        wk.add(u, 0)
        wk.edges.append((w, v))
        wk.edges.append((v, u))

    try:
        out = wk.graph()
    except ValidationError as exc:
        raise MoveNotApplicable(str(exc)) from exc
    if not allow_node_creation and _node_count(out) > _node_count(g):
        raise NodeCreatingMoveRejected(f"{kind} at {loc} would create a node")
    return out


def inverse_move(g: PlumbingGraph, m: Move) -> Move:
    """The move undoing ``m`` when ``m`` is applied to ``g``."""
    k, eps, loc = m.kind, m.eps, m.loc
    if k == "BlowUpEdge":
        return Move("BlowDownVertex", eps, (loc[2],))
    if k == "BlowUpVertex":
        return Move("BlowDownVertex", eps, (loc[1],))
    if k == "BlowDownVertex":
        (u,) = loc
        nb = g.neighbor_ids(u)
        if len(nb) == 2:
            # keep the edge orientation that apply_move restores
            ends = sorted(nb, key=lambda x: _edge_pos(g, u, x))
            return Move("BlowUpEdge", eps, (ends[0], ends[1], u))
        return Move("BlowUpVertex", eps, (nb[0], u))
    if k == "ZeroChainAbsorb":
        u, keep, drop = loc
        moved = tuple(x for x in g.neighbor_ids(drop) if x != u)
        return Move("ZeroChainExtrude", g.weight(drop), (keep, u, drop) + moved)
    if k == "ZeroChainExtrude":
        keep, u, drop = loc[:3]
        return Move("ZeroChainAbsorb", 0, (u, keep, drop))
    if k == "ZeroLeafAbsorb":
        u, v = loc
        (w,) = [x for x in g.neighbor_ids(v) if x != u]
        return Move("ZeroLeafExtrude", g.weight(v), (w, v, u))
    if k == "ZeroLeafExtrude":
        w, v, u = loc
        return Move("ZeroLeafAbsorb", 0, (u, v))
    raise MoveNotApplicable(f"{k} has no inverse on trees")


def _edge_pos(g: PlumbingGraph, a: str, b: str) -> int:
    for i, e in enumerate(g.edges):
        if set(e) == {a, b}:
            return i
    raise MoveNotApplicable(f"no edge {a}-{b}")


def _annotate(before: PlumbingGraph, after: PlumbingGraph, m: Move) -> Move:
    ids = [x for x in m.loc]
    if m.kind == "BlowDownVertex":
        ids += list(before.neighbor_ids(m.loc[0]))
    pre = tuple((x, before.weight(x)) for x in ids if x in before.index)
    post = tuple((x, after.weight(x)) for x in ids if x in after.index)
    return dataclasses.replace(m, before=pre, after=post)


@dataclass(frozen=True)
class TraceStep:
    move: Move
    hash_after: str


@dataclass(frozen=True)
class MoveTrace:
    initial: PlumbingGraph
    steps: tuple
    final: PlumbingGraph

    def __len__(self):
        return len(self.steps)

    @property
    def moves(self) -> list[Move]:
        return [st.move for st in self.steps]

    def to_text(self) -> str:
        return "".join(st.move.to_line(st.hash_after) + "\n" for st in self.steps)

    @staticmethod
    def parse_lines(text: str) -> list[tuple[Move, str]]:
        out = []
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            head, sep, tail = line.partition("|")
            parts = head.split()
            if not sep or len(parts) < 2:
                raise ValidationError(f"certificate line {n}: expected '<kind> <eps> <ids> | <hash>'")
            try:
                eps = int(parts[1])
            except ValueError as exc:
                raise ValidationError(f"certificate line {n}: bad eps {parts[1]!r}") from exc
            out.append((Move(parts[0], eps, tuple(parts[2:])), tail.strip()))
        return out


def replay(initial: PlumbingGraph, certificate: str | MoveTrace) -> PlumbingGraph:
    """Apply a certificate to ``initial`` and check every intermediate hash."""
    if isinstance(certificate, MoveTrace):
        certificate = certificate.to_text()
    g = initial
    for n, (m, h) in enumerate(MoveTrace.parse_lines(certificate), 1):
        g = apply_move(g, m)
        if g.canonical_hash != h:
            raise ValidationError(f"certificate step {n}: hash {g.canonical_hash} != recorded {h}")
    return g


# -- normalization ---------------------------------------------------------


def _absorb_choice(g: PlumbingGraph, u: str) -> tuple[str, str]:
    a, b = g.neighbor_ids(u)
    order = {v: i for i, v in enumerate(g.input_ids)}
    keep, drop = sorted((a, b), key=lambda x: (-g.degree(x), order[x]))
    return keep, drop


def _positive_expansion(g: PlumbingGraph, u: str, toward: str) -> list[Move]:
    """Rewrite a string vertex of weight m >= 2 as m - 1 vertices of weight -2.

    Edge blow-ups with eps = -1 on the side of ``toward`` bring u down to +1,
    then u is blown down.
    """
    moves = []
    taken = set(g.ids)
    nxt = toward
    for _ in range(g.weight(u) - 1):
        new = fresh_id(taken)
        taken.add(new)
        moves.append(Move("BlowUpEdge", -1, (u, nxt, new)))
        nxt = new
    moves.append(Move("BlowDownVertex", 1, (u,)))
    return moves


def _plan(g: PlumbingGraph) -> list[Move] | None:
    """Next batch of moves, or None when every string weight is <= -2."""
    string = [v for v in g.input_ids if g.degree(v) <= 2]
    for u in string:
        if g.weight(u) == 0 and g.degree(u) == 2:
            return [Move("ZeroChainAbsorb", 0, (u,) + _absorb_choice(g, u))]
    for u in string:
        w = g.weight(u)
        if w in (1, -1) and g.degree(u) >= 1:
            return [Move("BlowDownVertex", w, (u,))]
    for u in string:
        if g.weight(u) == 0 and g.degree(u) == 1:
            (v,) = g.neighbor_ids(u)
            dv = g.degree(v)
            if dv >= 3:
                raise ImpossibleForWeaklyNegDef(f"0-decorated leaf {u} hangs off the node {v}")
            if dv == 2:
                return [Move("ZeroLeafAbsorb", 0, (u, v))]
            new = fresh_id(g)
            return [Move("BlowUpVertex", -1, (v, new)), Move("ZeroLeafAbsorb", 0, (u, v))]
    for u in string:
        if g.weight(u) >= 2 or (g.weight(u) == 1 and g.degree(u) == 0):
            if g.degree(u) == 0:
                new = fresh_id(g)
                first = Move("BlowUpVertex", -1, (u, new))
                g2 = apply_move(g, first)
                if g2.weight(u) == 0:
                    # single +1 vertex: u(0) - new(-2) - y(-1), then drop the 0-leaf
                    y = fresh_id(g2)
                    return [first, Move("BlowUpVertex", -1, (new, y)), Move("ZeroLeafAbsorb", 0, (u, new))]
                return [first] + _positive_expansion(g2, u, new)
            nb = g.neighbor_ids(u)
            return _positive_expansion(g, u, nb[0])
    return None


def normalize(g: PlumbingGraph, max_steps: int | None = None) -> tuple[PlumbingGraph, MoveTrace]:
    """Reduce a weakly negative definite tree to a negative definite one.

    Only string vertices (valency <= 2) are touched and no move may increase
    the number of nodes.  Returns the final graph and the certificate trace;
    a negative definite input comes back unchanged with an empty trace.
    """
    if g.det == 0:
        raise SingularMatrix("normalization needs det M != 0")
    if g.matrix.is_negative_definite():
        return g, MoveTrace(g, (), g)
    if not is_weakly_negative_definite(g):
        raise NotWeaklyNegativeDefinite("node block of M^{-1} is not negative definite")
    if max_steps is None:
        max_steps = 20 * (g.s + sum(abs(w) for w in g.weights)) + 100
    cur = g
    steps = []
    rounds = 0
    while True:
        plan = _plan(cur)
        if plan is None:
            break
        rounds += 1
        if rounds > max_steps:
            raise NonTermination(
                f"no normal form after {max_steps} rounds; current graph {cur!r}"
            )
        for m in plan:
            nxt = apply_move(cur, m, allow_node_creation=False)
            steps.append(TraceStep(_annotate(cur, nxt, m), nxt.canonical_hash))
            cur = nxt
    if not cur.matrix.is_negative_definite():
        raise NotWeaklyNegativeDefinite(f"reduced graph {cur!r} is not negative definite")
    return cur, MoveTrace(g, tuple(steps), cur)


def schur_split_check(m: ExactMatrix, node_set: Sequence[int]) -> bool:
    """Definiteness of M from its non-node block D and the node block of M^{-1}.

    S = A - B D^{-1} B^T must invert to the node block of M^{-1}; the result
    is D negative definite and that block negative definite, which together
    force M negative definite.
    """
    if m.det == 0:
        raise SingularMatrix("Schur split needs det M != 0")
    nodes = sorted(set(node_set))
    rest = [i for i in range(m.n) if i not in set(nodes)]
    if not rest:
        return m.is_negative_definite()
    d = m.submatrix(rest)
    if d.det == 0:
        raise SingularBlock("the non-node block is singular")
    if not nodes:
        return d.is_negative_definite()
    a = m.submatrix(nodes)
    b = m.block(nodes, rest)
    dinv = d.inverse
    k = len(rest)
    s_rows = [
        [
            Fraction(a[i, j]) - sum(b[i][p] * dinv[p, q] * b[j][q] for p in range(k) for q in range(k))
            for j in range(len(nodes))
        ]
        for i in range(len(nodes))
    ]
    schur = ExactMatrix(s_rows)
    node_block = m.inverse.submatrix(nodes)
    if schur.inverse != node_block:
        raise ArithmeticError("Schur complement does not invert to the node block of M^{-1}")
    ok = d.is_negative_definite() and node_block.is_negative_definite()
    if ok:
        assert m.is_negative_definite()
    return ok
