"""Input parsing and the ``plumbdelta`` command line."""

from __future__ import annotations

import argparse
import itertools
import json
import os
import re
import sys
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import calculus, seifert, splice, zhat
from .errors import (
    CapExceeded,
    NonTermination,
    ParseError,
    PlumbingError,
    SingularMatrix,
    ValidationError,
)
from .graph import PlumbingGraph, gamma, is_weakly_negative_definite
from .spinc import SpincClass, canonical_spinc, enumerate_spinc

__all__ = ["parse_spec", "run", "main"]

_CALL = re.compile(r"\s*([A-Za-z_]+)\s*\(")
_INT = re.compile(r"\s*([+-]?\d+)")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def where(self, i=None):
        i = self.i if i is None else i
        line = self.text.count("\n", 0, i) + 1
        col = i - (self.text.rfind("\n", 0, i) + 1) + 1
        return line, col

    def fail(self, msg, i=None):
        raise ParseError(*self.where(i), msg)

    def skip(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def int(self) -> int:
        m = _INT.match(self.text, self.i)
        if not m:
            self.skip()
            self.fail("expected an integer")
        self.i = m.end()
        return int(m.group(1))

    def expect(self, ch):
        self.skip()
        if not self.text.startswith(ch, self.i):
            found = self.text[self.i] if self.i < len(self.text) else "end of input"
            self.fail(f"expected {ch!r}, found {found!r}")
        self.i += 1

    def peek(self):
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def int_list(self, sep=","):
        out = [self.int()]
        while self.peek() == sep:
            self.i += 1
            out.append(self.int())
        return out


def _parse_dsl(text: str) -> PlumbingGraph:
    cur = _Cursor(text)
    m = _CALL.match(text)
    if not m:
        cur.skip()
        cur.fail("expected seifert(...), brieskorn(...), lens(...) or a JSON graph")
    name = m.group(1).lower()
    cur.i = m.end()
    start = m.start(1)
    if name == "seifert":
        b0 = cur.int()
        cur.expect(";")
        pairs = []
        while True:
            a = cur.int()
            cur.expect("/")
            w = cur.int()
            pairs.append((a, w))
            if cur.peek() != ",":
                break
            cur.i += 1
        cur.expect(")")
        _end(cur)
        return seifert.seifert_graph(seifert.SeifertData(b0, tuple(pairs)))
    if name == "brieskorn":
        a = cur.int_list()
        cur.expect(")")
        _end(cur)
        return seifert.seifert_graph(seifert.brieskorn(a))
    if name == "lens":
        p = cur.int()
        cur.expect(",")
        r = cur.int()
        cur.expect(")")
        _end(cur)
        return seifert.lens_graph(p, r)
    cur.fail(f"unknown constructor {name!r}", start)


def _end(cur: _Cursor):
    cur.skip()
    if cur.i != len(cur.text):
        cur.fail("unexpected trailing input")


def parse_spec(text: str) -> PlumbingGraph:
    """Graph from plumbing-v1 JSON, a constructor string, or a path to either."""
    if not text.lstrip().startswith(("{", "[")) and not _CALL.match(text) and os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    if text.lstrip().startswith(("{", "[")):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, exc.colno, exc.msg) from exc
        if not isinstance(data, dict):
            raise ValidationError("graph JSON must be an object")
        fmt = data.get("format", "plumbing-v1")
        if fmt != "plumbing-v1":
            raise ValidationError(f"unsupported graph format {fmt!r}")
        return PlumbingGraph.from_dict(data)
    return _parse_dsl(text)


# -- output helpers -----------------------------------------------------------


def _q(x) -> str:
    return str(Fraction(x))


def _input_order(g: PlumbingGraph, vec: Sequence[int]) -> list[int]:
    return [vec[g.index[v]] for v in g.input_ids]


def _from_input_order(g: PlumbingGraph, vec: Sequence[int]) -> list[int]:
    out = [0] * g.s
    for v, x in zip(g.input_ids, vec):
        out[g.index[v]] = x
    return out


def _classes(g: PlumbingGraph, choice: str) -> list[SpincClass]:
    if choice == "canonical":
        return [canonical_spinc(g)]
    if choice == "all":
        return enumerate_spinc(g)
    try:
        vec = json.loads(choice) if choice.strip().startswith("[") else [int(x) for x in choice.split(",")]
    except ValueError as exc:
        raise ValidationError(f"--spinc must be canonical, all or a comma separated vector: {exc}") from exc
    if len(vec) != g.s:
        raise ValidationError(f"--spinc vector has {len(vec)} entries, graph has {g.s} vertices")
    return [SpincClass(g, _from_input_order(g, vec))]


def _class_json(g: PlumbingGraph, c: SpincClass) -> dict:
    return {"representative": _input_order(g, c.canonical_representative), "key": list(c.key)}


def _delta_json(g: PlumbingGraph, c: SpincClass, r: zhat.DeltaResult) -> dict:
    out = r.to_json()
    out["minimizing_vectors"] = [_input_order(g, v) for v in r.minimizing_vectors]
    out["cancelled_shells"] = [
        {"norm": str(n), "vectors": [_input_order(g, v) for v in vs]} for n, vs in r.cancelled_shells
    ]
    out["spinc"] = _class_json(g, c)
    return out


# -- subcommands --------------------------------------------------------------


def _cmd_check(g, args):
    nd = g.matrix.is_negative_definite()
    try:
        wnd = is_weakly_negative_definite(g)
    except SingularMatrix:
        wnd = None
    return {
        "negative_definite": nd,
        "weakly_negative_definite": wnd,
        "det": g.det,
        "order_h": abs(g.det),
        "s": g.s,
    }


def _cmd_invariants(g, args):
    nd = g.matrix.is_negative_definite()
    return {
        "s": g.s,
        "trace": g.trace,
        "det": g.det,
        "order_h": abs(g.det),
        "degrees": _input_order(g, g.degrees),
        "vertex_order": list(g.input_ids),
        "gamma": _q(gamma(g)) if nd else None,
        "canonical_hash": g.canonical_hash,
    }


def _cmd_spinc(g, args):
    can = canonical_spinc(g)
    return {
        "vertex_order": list(g.input_ids),
        "classes": [dict(_class_json(g, c), canonical=(c == can)) for c in enumerate_spinc(g)],
    }


def _cmd_zhat(g, args):
    out = []
    for c in _classes(g, args.spinc):
        if args.level is not None:
            level = Fraction(args.level)
        else:
            r = zhat.delta(g, c)
            start = r.value if r.is_finite else zhat.exponent_offset(g) + zhat.min_support_norm(g) / 4
            level = start + 10
        out.append({"spinc": _class_json(g, c), "series": zhat.zhat_series(g, c, level).to_json()})
    return out[0] if args.spinc != "all" else {"classes": out}


def _cmd_delta(g, args):
    cap = None if args.cap is None else 4 * (Fraction(args.cap) - zhat.exponent_offset(g))
    classes = _classes(g, args.spinc)
    if args.spinc == "all":
        table = zhat.delta_all(g, cap, args.workers)
        rows = [(c, table[c]) for c in classes]
    else:
        rows = [(c, zhat.delta(g, c, cap)) for c in classes]
    if args.fail_on_cap and any(not r.is_finite for _, r in rows):
        raise CapExceeded("no surviving term below the cap")
    out = [_delta_json(g, c, r) for c, r in rows]
    return out[0] if args.spinc != "all" else {"classes": out}


def _cmd_dinv(g, args):
    out = []
    for c in _classes(g, args.spinc):
        ct = seifert.d_invariant(g, c)
        j = ct.to_json()
        j["witnesses"] = [_input_order(g, k) for k in ct.witnesses]
        j["spinc"] = _class_json(g, c)
        out.append(j)
    return out[0] if args.spinc != "all" else {"classes": out}


def _cmd_splice(g, args):
    return splice.splice_diagram(g).to_json()


def _cmd_hshape(g, args):
    w = splice.h_shape_weights(g)
    res = splice.h_shape_minimize(w).to_json()
    res.update(
        {
            "a": list(w.a),
            "a_prime": list(w.ap),
            "coords": list(w.coords),
            "constant": _q(w.constant),
            "det_neg_M": w.det_neg,
            "exact_minimum": _q(zhat.min_support_norm(g)),
        }
    )
    return res


def _cmd_normalize(g, args):
    final, trace = calculus.normalize(g)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(trace.to_text())
    return {"graph": final.to_dict(), "moves": len(trace), "certificate": args.output}


def _cmd_conjecture(g, args):
    cap = None if args.cap is None else 4 * (Fraction(args.cap) - zhat.exponent_offset(g))
    return zhat.conjecture_report(g, cap, args.workers).to_json()


def _ranges(text: str) -> list[range]:
    out = []
    for part in text.split(","):
        lo, sep, hi = part.strip().partition("..")
        try:
            out.append(range(int(lo), int(hi if sep else lo) + 1))
        except ValueError as exc:
            raise ValidationError(f"bad range {part!r}; use a..b") from exc
    return out


def _family(name: str, params: str):
    rs = _ranges(params)
    if name == "lens":
        for p in rs[0]:
            for r in range(1, p):
                if gcd(p, r) == 1:
                    yield f"lens({p},{r})", seifert.lens_graph(p, r)
        return
    if name == "seifert":
        # b0 range, then one range of a_i shared by three legs; all w_i
        for b0 in rs[0]:
            vals = list(rs[1])
            for a1 in vals:
                for a2 in vals:
                    for a3 in vals:
                        if not a1 <= a2 <= a3:
                            continue
                        for w1 in range(1, a1):
                            for w2 in range(1, a2):
                                for w3 in range(1, a3):
                                    pairs = ((a1, w1), (a2, w2), (a3, w3))
                                    if any(gcd(a, w) != 1 for a, w in pairs):
                                        continue
                                    d = seifert.SeifertData(b0, pairs)
                                    if d.e < 0:
                                        yield str(d), seifert.seifert_graph(d)
        return
    triples = {
        "sigma-p-q-pq1": lambda p, q: (p, q, p * q + 1),
        "sigma-2-3-6r-1": lambda r: (2, 3, 6 * r - 1),
        "sigma-p-p1": lambda p: (p, p + 1, p * (p + 1) - 1),
    }
    if name not in triples:
        raise ValidationError(f"unknown family {name!r}; choose lens, seifert, " + ", ".join(triples))
    f = triples[name]
    arity = f.__code__.co_argcount
    if len(rs) != arity:
        raise ValidationError(f"family {name} needs {arity} parameter ranges")

    for vals in itertools.product(*rs):
        a = f(*vals)
        if len(set(a)) < 3 or any(gcd(x, y) != 1 for x, y in itertools.combinations(a, 2)):
            continue
        yield f"brieskorn({','.join(map(str, a))})", seifert.seifert_graph(seifert.brieskorn(a))


def _cmd_survey(g, args):
    rows = []
    for label, h in _family(args.family, args.params):
        can = canonical_spinc(h)
        r = zhat.delta(h, can)
        d = seifert.d_invariant(h, can).d
        bound = -gamma(h) / 4 + Fraction(1, 2)
        rows.append(
            {
                "manifold": label,
                "order_h": abs(h.det),
                "delta_can": _q(r.value) if r.is_finite else None,
                "d_can": _q(d),
                "gamma_bound": _q(bound),
                "residual": _q(r.value - bound) if r.is_finite else None,
            }
        )
    return {"family": args.family, "rows": rows}


_COMMANDS = {
    "check": _cmd_check,
    "invariants": _cmd_invariants,
    "spinc": _cmd_spinc,
    "zhat": _cmd_zhat,
    "delta": _cmd_delta,
    "dinv": _cmd_dinv,
    "splice": _cmd_splice,
    "hshape-min": _cmd_hshape,
    "normalize": _cmd_normalize,
    "conjecture": _cmd_conjecture,
    "survey": _cmd_survey,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plumbdelta", description="Exact invariants of negative definite plumbed 3-manifolds.")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("graph", help="plumbing-v1 JSON, seifert(...)/brieskorn(...)/lens(...), or a file holding either")
        return sp

    graph_cmd("check", "definiteness and |H_1|")
    graph_cmd("invariants", "gamma, s, trace, degrees")
    graph_cmd("spinc", "list spin^c classes")
    sp = graph_cmd("zhat", "truncated Zhat series")
    sp.add_argument("--spinc", default="canonical")
    sp.add_argument("--level", default=None, help="largest exponent kept (default: Delta + 10)")
    sp = graph_cmd("delta", "minimal exponent Delta")
    sp.add_argument("--spinc", default="canonical")
    sp.add_argument("--cap", default=None, help="largest q-exponent scanned")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--fail-on-cap", action="store_true", help="exit 3 when a class reaches the cap")
    sp = graph_cmd("dinv", "correction term d")
    sp.add_argument("--spinc", default="canonical")
    graph_cmd("splice", "splice diagram")
    graph_cmd("hshape-min", "H-shaped minimizer search")
    sp = graph_cmd("normalize", "reduce to a negative definite graph")
    sp.add_argument("-o", "--output", default=None, help="certificate file")
    sp = graph_cmd("conjecture", "compare min Delta with -gamma/4 + 1/2")
    sp.add_argument("--cap", default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp = sub.add_parser("survey", help="batch table over a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--params", required=True, help="comma separated ranges a..b")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    args = _parser().parse_args(argv)
    try:
        g = None if args.command == "survey" else parse_spec(args.graph)
        result = _COMMANDS[args.command](g, args)
    except (CapExceeded, NonTermination) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, stderr)
        stderr.write("\n")
        return 3
    except (PlumbingError, ValueError, ZeroDivisionError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ParseError):
            err.update(line=exc.line, column=exc.column)
        json.dump(err, stderr)
        stderr.write("\n")
        return 2
    json.dump(result, stdout, sort_keys=True)
    stdout.write("\n")
    return 0


def main() -> None:
    sys.exit(run())
