"""Exit codes, output contracts, and the bench table/CSV."""

from __future__ import annotations

import csv

from bvsynth.cli import main
from bvsynth.corpus import CorpusSpec, generate_corpus
from bvsynth.frontend import parse_problem, parse_solution
from bvsynth.semantics import eval_expr

IDENTITY = """(set-logic BV)
(synth-fun f ((x (BitVec 64))) (BitVec 64)
  ((Start (BitVec 64) (x #x0000000000000000 #x0000000000000001
    (bvnot Start) (bvand Start Start) (bvadd Start Start) (if0 Start Start Start)))))
(constraint (= (f #x0000000000000001) #x0000000000000001))
(constraint (= (f #x0000000000000009) #x0000000000000009))
(constraint (= (f #x000000000000002a) #x000000000000002a))
(constraint (= (f #x0000000000000007) #x0000000000000007))
(check-synth)
"""

NOT_PBE = """(set-logic BV)
(synth-fun f ((x (BitVec 64))) (BitVec 64)
  ((Start (BitVec 64) (x (if0 Start Start Start)))))
(declare-var v (BitVec 64))
(constraint (bvult (f v) v))
(check-synth)
"""

HARD = """(set-logic BV)
(synth-fun f ((x (BitVec 64))) (BitVec 64)
  ((Start (BitVec 64) (x #x0000000000000000 #x0000000000000001
    (bvnot Start) (bvand Start Start) (bvadd Start Start) (if0 Start Start Start)))))
(constraint (= (f #x0000000000001234) #x00000000deadbeef))
(check-synth)
"""


def test_solve_identity_prints_define_fun(tmp_path, capsys):
    path = tmp_path / "identity.sl"
    path.write_text(IDENTITY, encoding="utf-8")
    assert main(["solve", str(path)]) == 0
    out = capsys.readouterr().out
    assert out == "(define-fun f ((x (BitVec 64))) (BitVec 64) x)\n"


def test_solve_stats_go_to_stderr(tmp_path, capsys):
    path = tmp_path / "identity.sl"
    path.write_text(IDENTITY, encoding="utf-8")
    assert main(["solve", str(path), "--stats"]) == 0
    captured = capsys.readouterr()
    assert captured.out == "(define-fun f ((x (BitVec 64))) (BitVec 64) x)\n"
    assert "candidates:" in captured.err


def test_solve_not_pbe_exits_2(tmp_path, capsys):
    path = tmp_path / "notpbe.sl"
    path.write_text(NOT_PBE, encoding="utf-8")
    assert main(["solve", str(path)]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "not a PBE task" in captured.err


def test_solve_missing_file_exits_2(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "nope.sl")]) == 2
    assert "error" in capsys.readouterr().err


def test_solve_budget_exhausted_exits_1(tmp_path, capsys):
    path = tmp_path / "hard.sl"
    path.write_text(HARD, encoding="utf-8")
    assert main(["solve", str(path), "--max-size", "3"]) == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "unsolved" in captured.err


def test_solve_crlf_file(tmp_path, capsys):
    path = tmp_path / "crlf.sl"
    path.write_bytes(IDENTITY.replace("\n", "\r\n").encode())
    assert main(["solve", str(path)]) == 0
    assert capsys.readouterr().out.startswith("(define-fun f ")


def test_solve_file_with_bom(tmp_path, capsys):
    path = tmp_path / "bom.sl"
    path.write_bytes(b"\xef\xbb\xbf" + IDENTITY.replace("\n", "\r\n").encode())
    assert main(["solve", str(path)]) == 0
    assert capsys.readouterr().out.startswith("(define-fun f ")


def test_gen_writes_count_files(tmp_path, capsys):
    out = tmp_path / "corpus"
    code = main(
        [
            "gen", "--count", "4", "--seed", "3", "--size-min", "2", "--size-max", "4",
            "--examples", "5", "--width", "64", "--out", str(out),
        ]
    )
    assert code == 0
    assert len(list(out.glob("*.sl"))) == 4
    assert "wrote 4 instances" in capsys.readouterr().out


def test_gen_invalid_spec_exits_2(tmp_path, capsys):
    code = main(
        [
            "gen", "--count", "1", "--seed", "3", "--size-min", "5", "--size-max", "4",
            "--examples", "5", "--width", "64", "--out", str(tmp_path / "x"),
        ]
    )
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_bench_empty_directory(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["bench", str(empty)]) == 0
    out = capsys.readouterr().out
    assert "solved 0/0" in out


def test_bench_missing_directory(tmp_path, capsys):
    assert main(["bench", str(tmp_path / "gone")]) == 2


def test_bench_directory_with_mixed_outcomes(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    generate_corpus(CorpusSpec(count=3, size_min=2, size_max=4, examples=5, width=64, seed=9), corpus)
    (corpus / "hard.sl").write_text(HARD, encoding="utf-8")
    (corpus / "broken.sl").write_text("(set-logic", encoding="utf-8")
    csv_path = tmp_path / "results.csv"
    sols = tmp_path / "solutions"
    code = main(
        [
            "bench", str(corpus), "--max-size", "4", "--max-candidates", "100000",
            "--csv", str(csv_path), "--solutions", str(sols),
        ]
    )
    assert code == 0
    with open(csv_path, newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert [r["file"] for r in rows] == sorted(r["file"] for r in rows)
    by_name = {r["file"]: r for r in rows}
    assert by_name["hard.sl"]["status"] == "budget"
    assert by_name["broken.sl"]["status"] == "error"
    solved = [r for r in rows if r["status"] == "solved"]
    assert len(solved) == 3  # the generated instances are unaffected
    assert list(rows[0].keys()) == [
        "file", "status", "millis", "solution_size", "internal_nodes", "candidates",
    ]
    # every solved instance produced a verifiable solution file
    for row in solved:
        sol_path = sols / (row["file"].removesuffix(".sl") + ".sol")
        parsed = parse_solution(sol_path.read_text(encoding="utf-8"))
        problem = parse_problem((corpus / row["file"]).read_text(encoding="utf-8"))
        for ex in problem.examples:
            env = dict(zip(parsed.params, ex.inputs))
            assert eval_expr(parsed.body, env, problem.width) == ex.output


def test_console_entry_via_python_m(tmp_path):
    import subprocess
    import sys

    path = tmp_path / "identity.sl"
    path.write_text(IDENTITY, encoding="utf-8")
    proc = subprocess.run(
        [sys.executable, "-m", "bvsynth", "solve", str(path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "(define-fun f ((x (BitVec 64))) (BitVec 64) x)\n"
