import json

import pytest

import oracles
from sdverify import cli
from sdverify.ledger import diagonal, matmul
from sdverify.mukai import MukaiVector, Rejected, d_v, product_chi, verlinde_count
from sdverify.report import IdentityCheck, Report, validate_report_json
from sdverify.varieties import surface_model


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out)


@pytest.fixture(scope="module")
def full_report():
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(["verify-paper", "--json"])
    return code, json.loads(buf.getvalue())


def test_verify_paper_full(full_report):
    code, doc = full_report
    assert code == 0
    validate_report_json(doc)
    s = doc["summary"]
    assert s["fail"] == "0"
    assert int(s["pass"]) > 2000
    unresolved = [c["id"] for c in doc["checks"] if c["status"] == "unresolved"]
    assert unresolved and all(i.startswith("genus-g.chiL-literal") for i in unresolved)
    assert Report.from_json(doc).to_json() == doc


def test_verify_paper_filter(capsys):
    code, doc = run_json(capsys, "verify-paper", "--filter", "prop1A*")
    assert code == 0
    assert doc["checks"] and all(c["id"].startswith("prop1A") for c in doc["checks"])


def test_verify_paper_text(capsys):
    code, out, _ = run(capsys, "verify-paper", "--filter", "tower*")
    assert code == 0
    assert out.splitlines()[-1].startswith("-- ")
    assert all(line.startswith("PASS") for line in out.splitlines()[:-1])


def test_verify_paper_exit_1_on_failure(capsys, monkeypatch):
    bad = Report("x", [], [IdentityCheck.compare("broken", "", "", 1, 2)])
    monkeypatch.setattr(cli, "run_catalog", lambda *a, **k: bad)
    code, out, _ = run(capsys, "verify-paper")
    assert code == 1 and "FAIL" in out


def test_model_option(capsys, tmp_path):
    good = tmp_path / "m.json"
    good.write_text(surface_model().dumps())
    code, doc = run_json(capsys, "verify-paper", "--filter", "tower*", "--model", str(good))
    assert code == 0 and doc["models"] == [json.loads(surface_model().dumps())]
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "verify-paper", "--model", str(bad))[0] == 2
    assert run(capsys, "pair", "-v", "1:(0):0", "-w", "1:(0):0", "--model", str(tmp_path / "missing.json"))[0] == 2


def test_transform(capsys):
    code, doc = run_json(capsys, "transform", "-v", "1:(σ+5f):-1", "--kernel", "rsdagger")
    assert code == 0
    assert MukaiVector.from_json(doc["output"]).to_text() == "1:(-1σ-1f):-5"
    assert doc["trace"] == [{"rule": "lemma1", "params": []}]
    code, out, _ = run(capsys, "transform", "-v", "0:(0):1", "--kernel", "rs")
    assert code == 0 and "1:(0σ+0f):0" in out


def test_transform_u_kernel_decoration(capsys):
    code, doc = run_json(capsys, "transform", "-v", "3:(2σ+5f):-1", "--kernel", "u:2,-1,3,2")
    assert code == 0
    assert doc["kernel"] == "u:2,-1,3,2"
    assert doc["trace"][0] == {"rule": "lemma1A", "params": ["2", "-1", "3", "2"]}


@pytest.mark.parametrize("argv", [
    ["transform", "-v", "garbage"],
    ["transform", "-v", "1:(0):0", "--kernel", "bogus"],
    ["transform", "-v", "1:(0):0", "--kernel", "u:1,1,3,2"],
    ["verlinde", "-v", "3:(σ+3f):-1", "-w", "1:(0):0"],
    ["search-orthogonal", "--rmax", "-1"],
    ["smith", "1,2;3"],
    ["no-such-command"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_pair(capsys):
    code, doc = run_json(capsys, "pair", "-v", "3:(σ+3f):-1", "-w", "3:(σ+3f):-1")
    assert code == 0
    assert doc["orthogonal"] is True and doc["chi_vw"] == "0" and doc["d_v"] == "6"
    assert MukaiVector.from_json(doc["v"]) == MukaiVector.of(3, 1, 3, -1)


def test_verlinde(capsys):
    code, doc = run_json(capsys, "verlinde", "-v", "3:(σ+3f):-1", "-w", "3:(σ+3f):-1")
    assert code == 0 and doc["count"] == "8316" and doc["c1_L"] == ["6", "18"] and doc["chi_L"] == "108"
    code, doc = run_json(capsys, "verlinde", "-v", "3:(σ+3f):-1", "-w", "3:(σ+3f):-1", "--sign", "minus")
    assert doc["count"] == "924" and doc["c1_L"] == ["6", "2"]


def _brute_orthogonal(rmax, chimax, mmax):
    rows = set()
    vecs = [(r, m, c) for r in range(1, rmax + 1) for c in range(-chimax, chimax + 1) for m in range(-mmax, mmax + 1)]
    for i in range(len(vecs)):
        for j in range(i, len(vecs)):
            (r, m, c), (s, n, e) = vecs[i], vecs[j]
            if r * e + s * c + m + n:
                continue
            dv, dw = m - r * c, n - s * e
            count = None
            if dv >= 0 and dw >= 0 and dv + dw > 0:
                count = oracles.verlinde((r, 1, m, c), (s, 1, n, e))
            rows.add((MukaiVector.of(r, 1, m, c).to_text(), MukaiVector.of(s, 1, n, e).to_text(),
                      str(dv), str(dw), None if count is None else str(count)))
    return rows


def test_search_orthogonal_matches_double_loop(capsys):
    code, doc = run_json(capsys, "search-orthogonal", "--rmax", "3", "--chimax", "2", "--mmax", "5")
    assert code == 0
    got = {(p["v"], p["w"], p["d_v"], p["d_w"], p["verlinde"]) for p in doc["pairs"]}
    assert len(got) == len(doc["pairs"]) == 857
    assert got == _brute_orthogonal(3, 2, 5)
    assert ("3:(1σ+3f):-1", "3:(1σ+3f):-1", "6", "6", "8316") in got


def test_search_orthogonal_rows_are_orthogonal():
    for v, w, a, b, c in cli.search_orthogonal(2, 1, 3):
        assert product_chi(v, w) == 0 and (a, b) == (d_v(v), d_v(w))
        if c is None:
            with pytest.raises(Rejected):
                verlinde_count(v, w)


def test_search_orthogonal_empty_range(capsys):
    code, doc = run_json(capsys, "search-orthogonal", "--rmax", "0")
    assert code == 0 and doc == {"pairs": []}
    code, out, _ = run(capsys, "search-orthogonal", "--rmax", "0")
    assert out.strip() == "-- 0 orthogonal pairs"


def _check_smith_doc(doc, M):
    U, D, V = ([[int(x) for x in row] for row in doc[k]] for k in ("U", "D", "V"))
    assert matmul(matmul(U, M), V) == D
    assert [int(x) for x in doc["invariants"]] == diagonal(D)


def test_smith_inline_and_files(capsys, tmp_path):
    M = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    code, out, _ = run(capsys, "smith", "2,4,4;-6,6,12;10,-4,-16")
    doc = json.loads(out)
    assert code == 0 and doc["invariants"] == ["2", "6", "12"]
    _check_smith_doc(doc, M)
    jf = tmp_path / "m.json"
    jf.write_text(json.dumps(M))
    code, out, _ = run(capsys, "smith", str(jf))
    assert code == 0 and json.loads(out) == doc
    tf = tmp_path / "m.txt"
    tf.write_text("2 4 4\n-6 6 12\n10 -4 -16\n")
    code, out, _ = run(capsys, "smith", str(tf))
    assert code == 0 and json.loads(out) == doc

