from __future__ import annotations

import csv
import json

import pytest

from strandf.cli import main
from strandf.families import f_word


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_and_len(capsys):
    assert run(capsys, "norm", "-w", "x1") == (0, "6\n", "")
    assert run(capsys, "len", "-w", f_word(3))[1] == "19\n"
    assert run(capsys, "len", "-w", "fn:3", "--method", "bfs", "--cap", "19")[1] == "19\n"
    code, out, _ = run(capsys, "len", "-w", "x0 x1^-2", "--method", "table")
    assert code == 0 and int(out) == 3


def test_len_cap_exceeded(capsys):
    code, _, err = run(capsys, "len", "-w", "x1^5", "--method", "bfs", "--cap", "3")
    assert code == 1 and "exceeds cap 3" in err


def test_reduce_golden(capsys):
    code, out, _ = run(capsys, "reduce", "-w", "x0 x1 x0^-1")
    assert code == 0
    assert out == ("shape: (1, 1)\nnorm: 6\ntree pair: ((.(..)).) -> ((..)(..))\n"
                   "normal form: x0 x1 x0^-1\n")
    code, out, _ = run(capsys, "reduce", "-w", "x0", "--json")
    assert len(json.loads(out)["nodes"]) == 6


def test_reduce_family(capsys):
    code, out, _ = run(capsys, "reduce", "-w", "frak_f:2")
    assert code == 0 and "shape: (5, 5)" in out and "norm: 8" in out


def test_parse_error(capsys):
    code, _, err = run(capsys, "norm", "-w", "x0 x1^")
    assert code == 1 and "position 5" in err
    code, _, err = run(capsys, "norm", "-w", "fn:x")
    assert code == 1
    code, _, err = run(capsys, "len", "-w", "vine:3")
    assert code == 1 and "not an element" in err


def test_conjugate(capsys):
    code, out, _ = run(capsys, "conjugate", "x0", "x1")
    assert code == 2 and out == "not conjugate\n"
    code, out, _ = run(capsys, "conjugate", "x0 x1", "x1 x0", "--json")
    data = json.loads(out)
    assert code == 0 and data["conjugate"] and data["verified"] and data["conjugator_word"] == "x0"
    code, out, _ = run(capsys, "conjugate", "fn:4", "gn:4")
    assert code == 0 and out.startswith("conjugate\n")


def test_conjugate_random_smoke(capsys, rng):
    from conftest import random_word
    for _ in range(5):
        w, u = random_word(rng, 8), random_word(rng, 5)
        inv = " ".join(reversed([t + "^-1" if not t.endswith("^-1") else t[:-3]
                                 for t in u.split()]))
        code, out, _ = run(capsys, "conjugate", w, f"{inv} {w} {u}")
        assert code == 0 and out.startswith("conjugate")


def test_clf(capsys, tmp_path):
    path = tmp_path / "clf.csv"
    code, _, err = run(capsys, "clf", "--from", "4", "--to", "5", "--csv", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert [r["cd"] for r in rows] == ["26", "42"]
    assert (tmp_path / "clf.svg").exists()
    code, out, _ = run(capsys, "clf", "--from", "2", "--to", "2")
    rows = list(csv.DictReader(out.splitlines()))
    assert rows[0]["thm32_lower"] == "-5" and int(rows[0]["cd"]) >= 0
    assert run(capsys, "clf", "--from", "5", "--to", "4")[0] == 1


def test_clf_reports_mismatch(capsys):
    code, out, _ = run(capsys, "clf", "--from", "3", "--to", "3")
    assert code == 4 and "False" in out


def test_render(capsys, tmp_path):
    code, out, _ = run(capsys, "render", "-w", "x0")
    assert code == 0 and out.startswith("digraph") and out.count("triangle") == 4
    svg = tmp_path / "f3.svg"
    code, _, err = run(capsys, "render", "-w", "frak_f:3", "--closure", "--fmt", "svg",
                       "--out", str(svg))
    assert code == 0 and "7 cut crossings" in err
    assert svg.read_text().lstrip().startswith("<?xml")


def test_usage_error():
    with pytest.raises(SystemExit):
        main([])
