import json

import pytest

from siccat import __version__
from siccat.cli import (
    EXIT_CLASSIFICATION,
    EXIT_INVALID,
    EXIT_IO,
    EXIT_NO_BRANCH,
    EXIT_OK,
    EXIT_VERIFY,
    main,
    resolve_digits,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(capsys, "list", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert [e["label"] for e in data["entries"]][:3] == ["4a", "7b", "12b"]
    assert data["version"] == __version__


def test_sequences(capsys):
    code, out, _ = run(capsys, "sequences", "--d0", "5", "--count", "7")
    assert (code, out.strip()) == (EXIT_OK, "4 8 19 48 124 323 844")


def test_classify(capsys):
    assert run(capsys, "classify", "39")[1].strip() == "39 = 3·13, n=6, conforms"
    assert run(capsys, "classify", "--n", "15")[1].startswith("228 = 4·3·19")
    assert run(capsys, "classify", "40")[0] == EXIT_INVALID


def test_classification_violation_exit(capsys, monkeypatch):
    from siccat import cli
    from siccat.number_theory import ClassificationViolation

    def broken(n):
        raise ClassificationViolation("forced")

    monkeypatch.setattr(cli, "classify_dimension", broken)
    assert run(capsys, "classify", "39")[0] == EXIT_CLASSIFICATION


def test_units(capsys):
    code, out, _ = run(capsys, "units", "--d0", "2")
    assert out.splitlines()[0] == "1+√2, norm −1"
    assert run(capsys, "units", "--d0", "8")[0] == EXIT_INVALID


def test_report(capsys):
    _, out, _ = run(capsys, "report", "39i")
    assert "UNPAIRED" in out
    _, out, _ = run(capsys, "report", "7b", "--json")
    data = json.loads(out)
    assert isinstance(data["character_count"], int)
    assert "eta" in data["unit_claims"]


def test_unknown_label(capsys):
    assert run(capsys, "build", "99z")[0] == EXIT_INVALID
    assert run(capsys, "report", "99z")[0] == EXIT_INVALID
    assert run(capsys, "nonsense")[0] == EXIT_INVALID


def test_build_verify_import(capsys, tmp_path):
    out = tmp_path / "7b.json"
    code, _, _ = run(capsys, "build", "7b", "--digits", "40", "--out", str(out))
    assert code == EXIT_OK
    assert len(json.loads(out.read_text())["components"]) == 7
    code, text, _ = run(capsys, "verify", str(out))
    assert code == EXIT_OK and "verdict: PASS" in text and "40 digits" in text
    copy = tmp_path / "copy.json"
    assert run(capsys, "import", str(out), "--out", str(copy))[0] == EXIT_OK
    assert copy.read_text() == out.read_text()


def test_tampered_file_fails(capsys, tmp_path):
    out = tmp_path / "t.json"
    run(capsys, "build", "7b", "--digits", "40", "--out", str(out))
    data = json.loads(out.read_text())
    data["components"][3][1] = "0.125"
    out.write_text(json.dumps(data))
    code, text, _ = run(capsys, "verify", str(out))
    assert code == EXIT_VERIFY and "FAIL" in text


def test_io_errors(capsys, tmp_path):
    assert run(capsys, "import", str(tmp_path / "missing.json"))[0] == EXIT_IO
    bad_dir = tmp_path / "nope" / "x.json"
    assert run(capsys, "build", "4a", "--digits", "30", "--out", str(bad_dir))[0] == EXIT_IO


def test_malformed_file(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{}")
    assert run(capsys, "import", str(p))[0] == EXIT_INVALID


def test_certify_with_search(capsys):
    code, out, _ = run(capsys, "certify", "28c", "--digits", "40", "--json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["canonical_branches"] == {"c2": 0}
    assert len(data["certificates"]) == 3


def test_certify_no_branch(capsys, monkeypatch):
    from siccat import cli
    from siccat.evaluation import FAIL, BranchCertificate

    monkeypatch.setattr(cli, "certify_branches",
                        lambda r, d, w: [BranchCertificate(r.label, (("c2", 0),), None, FAIL, "forced")])
    assert run(capsys, "certify", "28c", "--digits", "30")[0] == EXIT_NO_BRANCH


def test_explicit_branches(capsys):
    code, out, _ = run(capsys, "verify", "28c", "--digits", "40", "--branches", "c2=2", "--no-probe", "--json")
    data = json.loads(out)
    assert code == EXIT_OK and data["report"]["branches"]["c2"] == 2
    assert run(capsys, "verify", "28c", "--branches", "c2")[0] == EXIT_INVALID


def test_digits_resolution(monkeypatch):
    monkeypatch.setenv("SICCAT_DIGITS", "70")
    assert resolve_digits(None) == 70
    assert resolve_digits(45) == 45
    monkeypatch.setenv("SICCAT_DIGITS", "x")
    with pytest.raises(Exception):
        resolve_digits(None)
    monkeypatch.delenv("SICCAT_DIGITS")
    assert resolve_digits(None) == 120
