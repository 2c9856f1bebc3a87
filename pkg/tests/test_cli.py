import io
import json

import pytest

from plumbdelta.calculus import replay
from plumbdelta.cli import parse_spec, run
from plumbdelta.errors import InvalidPair, ParseError, ValidationError
from plumbdelta.seifert import SeifertData, seifert_graph

CHAIN = json.dumps(
    {
        "format": "plumbing-v1",
        "vertices": [{"id": "a", "weight": -2}, {"id": "b", "weight": 0}, {"id": "c", "weight": -3}],
        "edges": [["a", "b"], ["b", "c"]],
    }
)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, (json.loads(out.getvalue()) if out.getvalue() else None), err.getvalue()


def test_parse_dsl():
    assert parse_spec("lens(2,1)").weights == (-2,)
    g = parse_spec("seifert(2; 3/1, 3/2, 3/2)")
    assert g == seifert_graph(SeifertData(2, ((3, 1), (3, 2), (3, 2))))
    assert g.s == 6
    assert parse_spec("  brieskorn( 2 , 3 , 5 )\n").s == 8


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_spec("seifert(2; 3/1,\n 3/x)")
    assert (e.value.line, e.value.column) == (2, 4)
    with pytest.raises(ParseError) as e:
        parse_spec("lens(5 2)")
    assert e.value.line == 1 and e.value.column == 8
    with pytest.raises(ParseError):
        parse_spec("torus(1)")
    with pytest.raises(ParseError):
        parse_spec('{"vertices": [}')
    with pytest.raises(InvalidPair):
        parse_spec("lens(4,2)")


def test_parse_json_cycle():
    bad = {"vertices": [{"id": "a", "weight": -2}, {"id": "b", "weight": -2}], "edges": [["a", "b"], ["b", "a"]]}
    with pytest.raises(ValidationError):
        parse_spec(json.dumps(bad))


def test_parse_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(CHAIN)
    assert parse_spec(str(p)).s == 3


def test_delta_example():
    code, out, _ = call("delta", "seifert(2; 3/1,3/2,3/2)")
    assert code == 0 and out["delta"] == "-5/6" and out["leading_coefficient"] == "1/2"


def test_dinv_e8():
    code, out, _ = call("dinv", "brieskorn(2,3,5)")
    assert code == 0 and out["d"] == "2"


def test_check_chain():
    code, out, _ = call("check", CHAIN)
    assert code == 0
    assert out["negative_definite"] is False and out["weakly_negative_definite"] is True
    assert out["det"] == 5


def test_invariants_spinc_zhat():
    code, out, _ = call("invariants", "seifert(2; 3/1,3/2,3/2)")
    assert out["gamma"] == "16/3" and out["order_h"] == 9
    code, out, _ = call("spinc", "lens(5,2)")
    assert len(out["classes"]) == 5 and sum(c["canonical"] for c in out["classes"]) == 1
    code, out, _ = call("zhat", "seifert(2; 3/1,3/2,3/2)")
    assert out["series"]["terms"] == [["-5/6", "1/2"]]
    assert out["series"]["level_bound"] == "55/6"


def test_spinc_vector_option():
    code, out, _ = call("delta", "lens(5,2)", "--spinc", "1,1")
    assert code == 0 and "delta" in out
    code, _, err = call("delta", "lens(5,2)", "--spinc", "0,0")
    assert code == 2 and "ValidationError" in err


def test_exit_codes():
    code, _, err = call("check", "lens(5,")
    assert code == 2 and json.loads(err)["error"] == "ParseError"
    code, _, err = call("delta", "lens(7,2)", "--spinc", "all", "--fail-on-cap")
    assert code == 3 and json.loads(err)["error"] == "CapExceeded"


def test_splice_and_hshape():
    code, out, _ = call("splice", "brieskorn(2,3,5)")
    assert code == 0 and sorted(w["weight"] for w in out["weights"]) == [2, 3, 5]
    h = {
        "format": "plumbing-v1",
        "vertices": [{"id": i, "weight": w} for i, w in [("n0", -2), ("n1", -2), ("a", -2), ("b", -3), ("c", -2), ("d", -3)]],
        "edges": [["n0", "a"], ["n0", "b"], ["n0", "n1"], ["n1", "c"], ["n1", "d"]],
    }
    code, out, _ = call("hshape-min", json.dumps(h))
    assert code == 0 and out["minimum"] == out["exact_minimum"]


def test_normalize_writes_certificate(tmp_path):
    cert = tmp_path / "trace.txt"
    code, out, _ = call("normalize", CHAIN, "-o", str(cert))
    assert code == 0 and out["graph"]["vertices"] == [{"id": "a", "weight": -5}]
    final = replay(parse_spec(CHAIN), cert.read_text())
    assert final.to_dict() == out["graph"]


def test_conjecture_and_survey():
    code, out, _ = call("conjecture", "seifert(2; 3/1,3/2,3/2)")
    assert code == 0 and out["holds"] is True and out["canonical_delta"] == "-5/6"
    code, out, _ = call("survey", "--family", "sigma-p-q-pq1", "--params", "2..2,3..3")
    assert out["rows"][0]["delta_can"] == "1/2" and out["rows"][0]["d_can"] == "0"
    code, _, _ = call("survey", "--family", "nope", "--params", "1..2")
    assert code == 2


def test_output_is_deterministic():
    a = io.StringIO()
    b = io.StringIO()
    run(["delta", "seifert(2; 3/1,3/2,3/2)", "--spinc", "all", "--workers", "1"], stdout=a)
    run(["delta", "seifert(2; 3/1,3/2,3/2)", "--spinc", "all", "--workers", "3"], stdout=b)
    assert a.getvalue() == b.getvalue()
    assert '"delta": "-5/6"' in a.getvalue()
    assert "." not in json.dumps([c["delta"] for c in json.loads(a.getvalue())["classes"]])
