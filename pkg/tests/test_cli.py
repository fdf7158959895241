import json

import pytest

from ternarycc.cli import main
from ternarycc.permgroup import make_named_group
from ternarycc.schemas import validate
from ternarycc.tensor import TensorConfig, orb_coloring, pattern_coloring


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv, line", [
    (["orb", "--group", "agl1:5", "--arity", "3"], "7 classes, AST: true"),
    (["orb", "--group", "sym:5", "--arity", "2"], "2 classes"),
    (["orb", "--group", "cyclic:5", "--arity", "3"], "25 classes, AST: false"),
])
def test_orb(capsys, argv, line):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip() == line


def test_orb_roundtrip(capsys, tmp_path):
    path = tmp_path / "c.json"
    assert run(capsys, "orb", "--group", "cyclotomic:7:3", "--out", str(path))[0] == 0
    doc = json.loads(path.read_text())
    validate("config", doc)
    cfg = TensorConfig.from_dict(doc)
    assert cfg == orb_coloring(make_named_group("cyclotomic:7:3"), 3)
    assert json.dumps(cfg.to_dict()) == json.dumps(doc)


def test_wl_close(capsys, tmp_path):
    src = tmp_path / "in.json"
    src.write_text(json.dumps(pattern_coloring(5, 3).to_dict()))
    code, out, _ = run(capsys, "wl-close", str(src))
    assert code == 0 and out.startswith("5 classes")
    coherent = tmp_path / "c.json"
    coherent.write_text(orb_coloring(make_named_group("cyclic:5"), 3).to_json())
    code, out, _ = run(capsys, "wl-close", str(coherent))
    assert "stable after 0 refining rounds" in out


def test_wl_close_monochrome(capsys, tmp_path):
    src = tmp_path / "in.json"
    src.write_text(json.dumps({"n": 5, "m": 3, "colors": [0] * 125}))
    code, out, _ = run(capsys, "wl-close", str(src))
    assert code == 0 and out.startswith("5 classes")


@pytest.mark.parametrize("text", ['{"n": 5, "m": 3, "colors": [0, 1', '{"n": 5}', "[]"])
def test_bad_json(capsys, tmp_path, text):
    src = tmp_path / "bad.json"
    src.write_text(text)
    code, _, err = run(capsys, "wl-close", str(src))
    assert code == 2 and err


def test_project_residue(capsys):
    assert run(capsys, "project", "--group", "agl1:5", "--coords", "0,1")[1].strip() == "2 classes"
    assert run(capsys, "residue", "--group", "sym:5", "--tuple", "0,1")[1].strip() == "3 classes"


def test_aut_and_schurian(capsys):
    code, out, _ = run(capsys, "aut", "--group", "agl1:5")
    assert code == 0 and out.splitlines()[0] == "order 20"
    code, out, _ = run(capsys, "schurian", "--group", "cyclotomic:7:3")
    assert code == 0 and out.startswith("schurian: true")


def test_aut_budget(capsys):
    code, _, err = run(capsys, "aut", "--group", "cyclic:13", "--arity", "2", "--node-limit", "2")
    assert code == 3 and "budget" in err


def test_enumerate(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "enumerate", "--base", "agl1:5", "--jobs", "1", "--out", str(out_path))
    assert code == 0 and out.startswith("2 results, complete")
    doc = json.loads(out_path.read_text())
    validate("report", doc)
    assert doc["complete"] and len(doc["results"]) == 2


def test_enumerate_partial(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run(capsys, "enumerate", "--base", "cyclic:7", "--ast-only", "--node-limit", "10",
                       "--jobs", "1", "--out", str(out_path))
    assert code == 3 and "partial" in out
    assert json.loads(out_path.read_text())["complete"] is False


def test_enumerate_jobs_identical(capsys, tmp_path):
    docs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"r{jobs}.json"
        assert run(capsys, "enumerate", "--base", "cyclic:5", "--jobs", jobs, "--out", str(path))[0] == 0
        docs.append(json.loads(path.read_text()))
    for d in docs:
        d["bases"][0].pop("nodes")
    assert docs[0] == docs[1]


@pytest.mark.parametrize("argv, code, needle", [
    (["verify", "--suite", "lemma41", "--max-p", "2000"], 0, "PASS"),
    (["verify", "--suite", "thm51", "--p", "5"], 0, "PASS, 2 configurations"),
    (["verify", "--suite", "starred", "--group", "psl:2:11"], 0, "starred classes: 2"),
    (["verify", "--suite", "thm51", "--p", "7"], 2, ""),
    (["verify", "--suite", "thm11"], 2, ""),
])
def test_verify(capsys, argv, code, needle):
    got, out, _ = run(capsys, *argv)
    assert got == code and needle in out


def test_verify_report_schema(capsys, tmp_path):
    path = tmp_path / "v.json"
    assert run(capsys, "verify", "--suite", "wl3", "--max-p", "7", "--out", str(path))[0] == 0
    validate("report", json.loads(path.read_text()))


def test_unknown_suite():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv, code, needle", [
    (["schur", "check", "--carrier", "fstar:5", "--classes", "1|2,3|4"], 0, "Schur partition"),
    (["schur", "check", "--carrier", "fstar:5", "--classes", "1|2|3,4"], 1, "not a Schur"),
    (["schur", "classify", "--carrier", "zmod:6", "--classes", "0|1,5|2,4|3"], 0, "case (b), k=2"),
    (["schur", "classify", "--carrier", "zmod:6", "--classes", "0|3|1,2,4,5"], 0, "case (a)"),
    (["schur", "radical", "--carrier", "fstar:7", "--set", "3,5,6"], 0, "1,2,4"),
    (["schur", "cyclotomic", "--carrier", "zmod:7", "--K", "1,2,4"], 0, "0 | 1,2,4 | 3,5,6"),
    (["schur", "enumerate", "--carrier", "zmod:4"], 0, "3 Schur partitions"),
    (["schur", "check", "--carrier", "zmod:4"], 2, ""),
    (["schur", "check", "--carrier", "fstar:8", "--classes", "1"], 2, ""),
])
def test_schur(capsys, argv, code, needle):
    got, out, _ = run(capsys, *argv)
    assert got == code and needle in out


def test_bad_group(capsys):
    code, _, err = run(capsys, "orb", "--group", "agl1:6")
    assert code == 2 and "error" in err
