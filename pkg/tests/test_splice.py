import itertools
import random
from fractions import Fraction

import pytest

from oracles import random_h_graph, random_nd_tree, sympy_inverse
from plumbdelta.calculus import Move, apply_move
from plumbdelta.errors import ConstraintViolation, ValidationError, VertexNotInDiagram
from plumbdelta.graph import quadratic_form
from plumbdelta.seifert import SeifertData, brieskorn, seifert_graph
from plumbdelta.splice import (
    h_shape_form,
    h_shape_minimize,
    h_shape_weights,
    inverse_entry_via_splice,
    path_determinant_entry,
    splice_diagram,
)
from plumbdelta.zhat import min_support_norm


def test_example_weights():
    g = seifert_graph(SeifertData(2, ((3, 1), (3, 2), (3, 2))))
    sd = splice_diagram(g)
    assert sorted(sd.weights_at("c").values()) == [3, 3, 3]
    assert inverse_entry_via_splice(sd, "c", "c") == Fraction(-3)
    e8 = seifert_graph(brieskorn([2, 3, 5]))
    sd8 = splice_diagram(e8)
    assert sorted(sd8.weights_at("c").values()) == [2, 3, 5]
    assert inverse_entry_via_splice(sd8, "c", "c") == -30


def test_formulas_match_inverse():
    rng = random.Random(41)
    for _ in range(40):
        g = random_nd_tree(rng, 10, 3)
        inv = sympy_inverse(g.matrix.rows)
        sd = splice_diagram(g)
        for u in g.ids:
            for v in g.ids:
                expected = inv[g.index[u]][g.index[v]]
                assert path_determinant_entry(g, u, v) == expected
                assert inverse_entry_via_splice(sd, u, v) == expected


def test_no_fallback_raises():
    g = seifert_graph(brieskorn([2, 3, 7]))
    sd = splice_diagram(g)
    interior = [v for v in g.ids if g.degree(v) == 2]
    leaf = [v for v in g.ids if g.degree(v) == 1][0]
    if interior:
        with pytest.raises(VertexNotInDiagram):
            inverse_entry_via_splice(sd, interior[0], "c", fallback=False)
    with pytest.raises(VertexNotInDiagram):
        inverse_entry_via_splice(sd, leaf, leaf, fallback=False)
    with pytest.raises(ValidationError):
        inverse_entry_via_splice(sd, "nope", "c")


def test_weights_invariant_under_string_moves():
    g = seifert_graph(SeifertData(2, ((5, 2), (3, 1), (7, 3))))
    base = splice_diagram(g).weights_at("c")
    leg = [v for v in g.ids if g.degree(v) == 2][0]
    nb = g.neighbor_ids(leg)[0]
    # blow up an edge inside a leg (eps = -1 keeps the leg determinant) and undo it
    up = apply_move(g, Move("BlowUpEdge", -1, (leg, nb, "x0")))
    down = apply_move(up, Move("BlowDownVertex", -1, ("x0",)))
    assert splice_diagram(down).weights_at("c") == base
    ext = apply_move(g, Move("ZeroChainExtrude", -1, (leg, "u0", "d0", nb)))
    absorbed = apply_move(ext, Move("ZeroChainAbsorb", 0, ("u0", leg, "d0")))
    assert splice_diagram(absorbed).weights_at("c") == base
    assert {abs(v) for v in splice_diagram(up).weights_at("c").values()} == {abs(v) for v in base.values()}


def test_h_form_matches_lattice_form():
    rng = random.Random(43)
    for _ in range(10):
        g = random_h_graph(rng)
        w = h_shape_weights(g)
        for x in itertools.product((1, -1), (1, -1), (1, -1, 3, -5), (1, -1), (1, -1), (1, -3, 5)):
            assert h_shape_form(w, x) == quadratic_form(g.matrix, w.embed(x))
        assert h_shape_form(w.mirrored(), x[3:] + x[:3]) == h_shape_form(w, x)


def test_h_heuristic_matches_exact_minimum():
    rng = random.Random(44)
    for _ in range(10):
        g = random_h_graph(rng)
        res = h_shape_minimize(h_shape_weights(g))
        assert res.minimum == min_support_norm(g)


def test_h_validation():
    with pytest.raises(ValidationError):
        h_shape_weights(seifert_graph(brieskorn([2, 3, 5])))
    g = random_h_graph(random.Random(45))
    w = h_shape_weights(g)
    with pytest.raises(ConstraintViolation):
        h_shape_form(w, (1, 1, 2, 1, 1, 1))
    with pytest.raises(ConstraintViolation):
        h_shape_form(w, (0, 1, 1, 1, 1, 1))
