"""Command-line behavior: formats, exit codes, composition."""

import io
import json
import subprocess
import sys

from nilmat.cli import main
from nilmat.distortion import SubgroupGens, subgroup_to_json
from nilmat.matgroup import elementary
from nilmat.presentation import (
    NilpotentPresentation,
    presentation_to_json,
)


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_embed_jennings_json(capsys):
    rc, out, err = run(capsys, "embed", "jennings", "ut:3")
    assert rc == 0 and err == ""
    payload = json.loads(out)
    assert list(payload) == ["d", "ordering", "generators", "unitriangular"]
    assert payload["d"] == 7
    assert payload["unitriangular"] is True
    assert payload["generators"][0]["rows"][0][1] == "-1"


def test_embed_table_format(capsys):
    rc, out, err = run(capsys, "embed", "jennings", "ut:3",
                       "--format", "table")
    assert rc == 0
    assert out.startswith("d = 7\n")
    assert "generator 1:" in out
    assert "relators_ok = true" in out


def test_embed_nickel_declared(capsys):
    rc, out, _ = run(capsys, "embed", "nickel", "ut:3")
    assert rc == 0
    payload = json.loads(out)
    assert payload["d"] == 4
    assert payload["ordering"] == ["t12", "t13", "t23", "1"]

    rc, out, _ = run(capsys, "embed", "nickel", "ut:3",
                     "--order", "1,t12,t13,t23")
    assert rc == 0
    assert json.loads(out)["unitriangular"] is False


def test_embed_errors_print_nothing(capsys):
    rc, out, err = run(capsys, "embed", "nickel", "ut:4")
    assert rc == 1
    assert out == ""
    assert "declared ordering" in err

    rc, out, err = run(capsys, "embed", "jennings", "nosuchgroup")
    assert rc == 1 and out == ""

    rc, out, err = run(capsys, "embed", "jennings", "ut:3",
                       "--order", "weight-lex,extra")
    assert rc == 1 and out == ""


def test_failed_relators_exit_2(capsys, tmp_path):
    # a relation set that cannot hold in any group: the images are
    # still reported, with the failure signaled through the exit code
    bad = NilpotentPresentation(
        5, (1, 1, 1, 2, 3),
        {(2, 1): (0, 0, 0, 1, 0), (4, 3): (0, 0, 0, 0, 1)},
        label="bad",
    )
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(presentation_to_json(bad)))
    rc, out, _ = run(capsys, "embed", "jennings", f"file:{path}")
    assert rc == 2
    assert json.loads(out)["d"] == 25


def test_construct_json(capsys):
    rc, out, _ = run(capsys, "construct", "--p", "3", "--q", "2")
    assert rc == 0
    payload = json.loads(out)
    assert payload["N"] == 4
    assert len(payload["generators"]) == 3


def test_construct_rejects_bad_ratio(capsys):
    rc, out, err = run(capsys, "construct", "--p", "2", "--q", "3")
    assert rc == 1 and out == ""


def test_construct_pipes_into_distortion():
    base = [sys.executable, "-m", "nilmat.cli"]
    construct = subprocess.run(
        base + ["construct", "--p", "3", "--q", "2"],
        capture_output=True, text=True,
    )
    assert construct.returncode == 0
    report = subprocess.run(
        base + ["distortion"],
        input=construct.stdout, capture_output=True, text=True,
    )
    assert report.returncode == 0
    payload = json.loads(report.stdout)
    assert payload["d_H"] == "3/2"
    assert [(s["m"], s["t"]) for s in payload["strata"]] == [(3, 2), (1, 1)]


def test_distortion_from_file_and_stdin(capsys, tmp_path, monkeypatch):
    sub = SubgroupGens(3, [elementary(3, 1, 3)])
    blob = json.dumps(subgroup_to_json(sub))
    path = tmp_path / "sub.json"
    path.write_text(blob)
    rc, out, _ = run(capsys, "distortion", f"file:{path}")
    assert rc == 0
    assert json.loads(out)["d_H"] == "2"

    monkeypatch.setattr("sys.stdin", io.StringIO(blob))
    rc, out, _ = run(capsys, "distortion")
    assert rc == 0
    assert json.loads(out)["d_H"] == "2"

    rc, out, err = run(capsys, "distortion", "notaspec")
    assert rc == 1 and out == ""


def test_empirical_table(capsys, monkeypatch):
    sub = SubgroupGens(3, [elementary(3, 1, 3)])
    blob = json.dumps(subgroup_to_json(sub))
    monkeypatch.setattr("sys.stdin", io.StringIO(blob))
    rc, out, _ = run(capsys, "empirical", "--radius", "8")
    assert rc == 0
    payload = json.loads(out)
    assert payload["delta"]["8"] == 4
    assert not any(payload["capped"].values())

    monkeypatch.setattr("sys.stdin", io.StringIO(blob))
    rc, out, _ = run(capsys, "empirical", "--radius", "8",
                     "--cap", "1", "--format", "table")
    assert rc == 0
    assert "(cap hit)" in out


def test_guard_exit_3(capsys, monkeypatch):
    sub = SubgroupGens(3, [elementary(3, 1, 3)])
    blob = json.dumps(subgroup_to_json(sub))
    monkeypatch.setattr("sys.stdin", io.StringIO(blob))
    rc, out, err = run(capsys, "empirical", "--radius", "11")
    assert rc == 3
    assert out == ""
    assert "capped at 10" in err


def test_orderings_jennings_survey(capsys):
    rc, out, _ = run(capsys, "orderings", "jennings", "ut:3")
    assert rc == 0
    payload = json.loads(out)
    assert payload["mode"] == "named"
    by_name = {r["ordering"]: r for r in payload["records"]}
    assert by_name["weight-lex"]["weights"] == [1, 2, 6]
    assert by_name["weight-lex"]["degree"] == "3"
    assert by_name["scheme-perturbed"]["weights"] == [1, 1, 2]
    assert by_name["scheme-perturbed"]["degree"] == "1"


def test_orderings_nickel_modes(capsys):
    rc, out, _ = run(capsys, "orderings", "nickel", "ut:3")
    assert rc == 0
    payload = json.loads(out)
    assert payload["mode"] == "report-first"
    assert len(payload["records"]) == 1
    assert payload["records"][0]["unitriangular"] is True

    rc, out, _ = run(capsys, "orderings", "nickel", "ut:3",
                     "--exhaustive")
    payload = json.loads(out)
    assert payload["mode"] == "exhaustive"
    assert len(payload["records"]) == 24
    declared = [
        r for r in payload["records"]
        if r["ordering"] == ["t12", "t13", "t23", "1"]
    ]
    assert declared[0]["unitriangular"] is True
    assert declared[0]["degree"] == "1"


def test_out_file_keeps_stdout_clean(capsys, tmp_path):
    path = tmp_path / "emb.json"
    rc, out, _ = run(capsys, "embed", "jennings", "ut:3",
                     "--out", str(path))
    assert rc == 0
    assert out == ""
    assert json.loads(path.read_text())["d"] == 7


def test_output_is_reproducible(capsys):
    first = run(capsys, "embed", "jennings", "freenil23")
    second = run(capsys, "embed", "jennings", "freenil23")
    assert first == second


def test_usage_errors(capsys):
    rc, out, err = run(capsys, "embed", "jennings")
    assert rc == 1 and out == ""
    rc, out, err = run(capsys)
    assert rc == 1 and out == ""
    rc, out, err = run(capsys, "--help")
    assert rc == 0
    assert "usage" in out
