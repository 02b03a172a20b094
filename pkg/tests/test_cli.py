import json
import subprocess
import sys

import pytest

from linlat.cli import main, render_document
from linlat.families import dump_family, level_family
from linlat.lattice import build_lattice


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_qbinom(capsys):
    assert run(capsys, "qbinom", "4", "2", "2")[:2] == (0, "35\n")


def test_search_json(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "search", "--n", "3", "--q", "2", "--forbid", "V:2,L:2", "--induced",
                     "--enumerate-extremal", "--format", "json", "--output", str(path))
    doc = json.loads(path.read_text())
    assert code == 0
    assert doc["schema"] == "linlat.report/1"
    assert doc["result"]["optimum"] == 7 and doc["result"]["extremal_count"] == 58
    assert "threads" not in doc["config"]


def test_search_text_and_poset_dsl(capsys):
    code, out, _ = run(capsys, "search", "--n", "2", "--q", "2", "--poset", "elements: a,b; relations: a<b")
    assert code == 0 and "optimum: 3" in out


def test_exit_codes(capsys):
    assert run(capsys, "search", "--n", "3", "--q", "2", "--forbid", "V:2,L:2", "--node-limit", "5")[0] == 3
    assert run(capsys, "verify", "thm_1.4", "--n", "4")[0] == 4
    assert run(capsys, "verify", "thm_1.6", "--n", "2", "--q", "2")[0] == 1
    assert run(capsys, "search", "--n", "3", "--q", "6", "--forbid", "V:2")[0] == 2
    assert run(capsys, "search", "--n", "3", "--q", "2")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["search", "--n", "x"])
    assert exc.value.code == 2


def test_verify_text(capsys):
    code, out, _ = run(capsys, "verify", "lemma_3.2", "--q", "3")
    assert code == 0 and out.startswith("lemma_3.2: pass")


def test_lym_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "lym", "alpha", "--n", "3", "--H", "cyclic", "--forbid", "Y:1,Y':1", "--induced")
    assert code == 0 and "alpha: 4" in out
    path = tmp_path / "f.json"
    dump_family(level_family(build_lattice(3, 2), 1), str(path))
    code, out, _ = run(capsys, "lym", "check", "--family", str(path), "--forbid", "V:2", "--format", "json")
    assert code == 0 and json.loads(out)["result"]["holds"] is True
    code, out, _ = run(capsys, "lym", "interval", "--k", "3", "--n", "7", "--forbid", "V:2", "--format", "json")
    assert code == 0 and json.loads(out)["result"]["verdicts"][0]["status"] == "below"


def test_pushdown_commands(capsys, tmp_path):
    L = build_lattice(4, 2)
    path = tmp_path / "f.json"
    dump_family(level_family(L, 3), str(path))
    code, out, _ = run(capsys, "pushdown", "--family", str(path))
    assert code == 0 and "result levels: [0, 0, 15, 0, 0]" in out
    dump_family(level_family(L, 1), str(path))
    code, out, _ = run(capsys, "pushdown", "--family", str(path), "--up")
    assert code == 0 and "result levels: [0, 0, 15, 0, 0]" in out
    code, out, _ = run(capsys, "pushdown", "--count", "5")
    assert code == 0 and "passed: 5" in out


def test_render_document_is_canonical():
    from fractions import Fraction

    a = render_document("x", {"b": 1, "a": 2}, {"r": Fraction(15, 2)})
    assert a == render_document("x", {"a": 2, "b": 1}, {"r": Fraction(15, 2)})
    assert '"15/2"' in a


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "linlat", "qbinom", "3", "1", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "13\n"
