"""Exact invariants of negative definite plumbed 3-manifolds.

The main entry points are re-exported here; see the submodules for the
full interfaces.
"""

from .calculus import Move, MoveTrace, apply_move, normalize, schur_split_check
from .errors import PlumbingError
from .graph import PlumbingGraph, gamma, is_weakly_negative_definite, quadratic_form
from .lattice import LatticeBallQuery, enumerate_ball
from .seifert import SeifertData, brieskorn, d_invariant, lens_graph, seifert_graph
from .spinc import SpincClass, canonical_spinc, enumerate_spinc
from .splice import h_shape_minimize, h_shape_weights, splice_diagram
from .zhat import delta, delta_all, zhat_series

__version__ = "0.1.0"
