import csv
import json
import subprocess
import sys

import pytest

from qsubtest.benchsuite import catalog
from qsubtest.benchsuite import programs as P
from qsubtest.cli import main
from qsubtest.harness import REPORT_HEADER
from qsubtest.mutator import EditKind, enumerate_mutants, read_corpus
from qsubtest.qir import parse, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == len(catalog()) == 18
    assert any(line.startswith("QFT ") for line in lines)


def test_list_json(capsys):
    code, out, _ = run(capsys, "list", "--json")
    rows = json.loads(out)
    assert code == 0 and {r["name"] for r in rows} == {e.name for e in catalog()}


def test_dump_round_trips(capsys):
    code, out, _ = run(capsys, "dump", "QAdd")
    assert code == 0 and parse(out) == P.qadd()


def test_dump_suite_to_file(capsys, tmp_path):
    path = tmp_path / "qft.suite"
    assert run(capsys, "dump", "QFT", "--suite", "--out", str(path))[0] == 0
    assert "subroutine: QFT" in path.read_text()


def test_suite_export_and_run(capsys, tmp_path):
    path = tmp_path / "reverse.suite"
    assert run(capsys, "suite", "export", "Reverse", "--out", str(path))[0] == 0
    report = tmp_path / "rep.csv"
    code, out, _ = run(capsys, "suite", "run", str(path), "--seed", "3", "--report", str(report))
    assert code == 0
    rows = list(csv.reader(report.open()))
    assert rows[0][:3] == ["subroutine", "case", "verdict"]
    assert rows[1:] and all(r[2] == "pass" for r in rows[1:])
    assert report.with_suffix(".json").exists()


def test_shipped_suite_passes(capsys):
    assert run(capsys, "suite", "run", "configs/qft.suite")[0] == 0


def test_failing_program_exits_one(capsys, tmp_path):
    broken = next(m for m in enumerate_mutants(P.qft(), ["GM"], seed=0)
                  if m.edit is EditKind.REMOVE and json.loads(m.payload)[1] == "H")
    prog = tmp_path / "qft.qir"
    prog.write_text(serialize(broken.program))
    code, _, _ = run(capsys, "suite", "run", "configs/qft.suite", "--program", str(prog))
    assert code == 1


def test_mutate_writes_corpus(capsys, tmp_path):
    code, out, _ = run(capsys, "mutate", "QFT", "--kinds", "GM,CM", "--limit", "3", "--out", str(tmp_path))
    assert code == 0 and "6 mutants of QFT" in out
    corpus = read_corpus(tmp_path)
    assert len(corpus) == 6 and {m.kind.value for m in corpus} == {"GM", "CM"}


@pytest.mark.parametrize("argv", [
    ["mutate", "QFT", "--kinds", "GM,ZZ", "--out", "x"],
    ["mutate", "Nope", "--out", "x"],
    ["dump", "Nope"],
    ["suite", "export", "Nope"],
    ["experiment", "no/such.cfg"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_experiment_and_report(capsys, tmp_path):
    out_csv = tmp_path / "smoke.csv"
    code, _, err = run(capsys, "experiment", "configs/smoke.cfg", "--out", str(out_csv))
    assert code == 0 and "wrote" in err
    rows = list(csv.DictReader(out_csv.open()))
    assert list(rows[0]) == REPORT_HEADER
    assert all(int(r["trials"]) == int(r["mutants"]) * 10 * int(r["n"]) for r in rows)
    js = tmp_path / "smoke2.json"
    assert run(capsys, "report", str(out_csv), "--format", "json", "--out", str(js))[0] == 0
    back = tmp_path / "back.csv"
    assert run(capsys, "report", str(js), "--format", "csv", "--out", str(back))[0] == 0
    assert back.read_text() == out_csv.read_text()


def test_experiment_append(capsys, tmp_path):
    out_csv = tmp_path / "smoke.csv"
    run(capsys, "experiment", "configs/smoke.cfg", "--out", str(out_csv))
    first = out_csv.read_text().splitlines()
    run(capsys, "experiment", "configs/smoke.cfg", "--out", str(out_csv), "--append")
    both = out_csv.read_text().splitlines()
    assert both == first + first[1:]


def test_report_rejects_unknown(capsys, tmp_path):
    bad = tmp_path / "x.csv"
    bad.write_text("a,b\n")
    assert run(capsys, "report", str(bad), "--format", "json")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qsubtest", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and len(proc.stdout.splitlines()) == 18
