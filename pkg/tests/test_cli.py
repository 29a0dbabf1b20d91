import io
import json
import pathlib
import shutil
import subprocess
from fractions import Fraction as F

import pytest

from pgainfer import cli
from pgainfer.analysis import DistTable, normalize
from pgainfer.automata import Label, Pga, dirac_pga, geometric_pga
from pgainfer.lang import parse
from pgainfer.report import QueryResult, csv_table, dot_export, json_report
from pgainfer.semantics import infer
from support import PIRANHA

PROGRAMS = pathlib.Path(__file__).resolve().parent.parent / "programs"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(no_floats(v) for v in obj)
    return True


def test_piranha_point_query(write):
    code, out, _ = run(write("piranha.pp", PIRANHA), "--query", "P(P=1)")
    assert code == 0
    assert "P(P=1) = 2/3" in out
    assert "approx" in out


def test_piranha_json(write):
    path = write("piranha.pp", PIRANHA)
    code, out, _ = run(path, "--query", "P(P=1)", "--query", "P(P=0, R=1)", "--json")
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["program", "normalized", "mass", "queries"]
    assert doc["program"] == path
    assert doc["normalized"] is True
    assert doc["mass"] == "3/4"
    assert doc["queries"][0] == {"kind": "point", "target": "P(P=1)", "value": "2/3", "residual": "0"}
    assert doc["queries"][1]["value"] == "1/3"
    assert list(doc["queries"][0]) == ["kind", "target", "value", "residual"]
    assert no_floats(doc)


def test_unnormalized_mode(write):
    code, out, _ = run(write("piranha.pp", PIRANHA), "--query", "P(P=1)", "--unnormalized", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["normalized"] is False
    assert doc["mass"] == "3/4"
    assert doc["queries"][0]["value"] == "1/2"


def test_geometric_then_assign_marginal(write):
    path = write("geom_assign.pp", "X := geometric(1/2); X := 1")
    code, out, _ = run(path, "--marginal", "X", "--max-degree", "3", "--json")
    assert code == 0
    q = json.loads(out)["queries"][0]
    assert q["kind"] == "marginal" and q["target"] == "X"
    assert q["value"] == {"0": "0", "1": "1", "2": "0", "3": "0"}
    assert q["residual"] == "0"


def test_marginal_human_and_csv(write):
    path = write("g.pp", "X := geometric(1/2)")
    code, out, _ = run(path, "--marginal", "X", "--max-degree", "2")
    assert code == 0
    assert "X=2: 1/8" in out and "residual: 1/8" in out
    code, out, _ = run(path, "--marginal", "X", "--max-degree", "1", "--csv")
    assert code == 0
    assert "valuation,probability\nX=0,1/2\nX=1,1/4\n" in out


def test_multiple_marginals_share_one_degree(write):
    path = write("two.pp", "X := bernoulli(1/2); Y := X + 1")
    code, out, _ = run(path, "--marginal", "X", "--marginal", "Y", "--max-degree", "2", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["queries"][1]["value"] == {"0": "0", "1": "1/2", "2": "1/2"}


def test_expectation(write):
    code, out, _ = run(write("g.pp", "X := geometric(1/3)"), "--expect", "X", "--json")
    assert code == 0
    assert json.loads(out)["queries"][0] == {
        "kind": "expectation", "target": "X", "value": "1/2", "residual": "0"
    }


def test_rejection_exit_code(write):
    code, _, err = run(write("reject.pp", "X := 0; observe(X = 1)"))
    assert code == 2
    assert "rejected" in err


def test_rejection_in_unnormalized_mode_is_not_an_error(write):
    code, out, _ = run(write("reject.pp", "X := 0; observe(X = 1)"), "--unnormalized", "--json")
    assert code == 0
    assert json.loads(out)["mass"] == "0"


@pytest.mark.parametrize(
    "source, needle",
    [("X := ", "1:6"), ("X := bernoulli(3/2)", "outside"), ("observe(X = Y)", "constant")],
)
def test_input_errors_exit_one(write, source, needle):
    code, _, err = run(write("bad.pp", source), "--query", "P(X=1)")
    assert code == 1
    assert needle in err


@pytest.mark.parametrize(
    "args",
    [
        ["--query", "X=1"],
        ["--query", "P(X==1)"],
        ["--query", "P(X=1, X=2)"],
        ["--marginal", "X"],
        ["--max-degree", "2"],
        ["--marginal", "X", "--marginal", "Y", "--max-degree", "1", "--max-degree", "2", "--max-degree", "3"],
        ["--oracle-check", "--epsilon", "0"],
        ["--oracle-check", "--epsilon", "abc"],
        ["--bogus"],
    ],
)
def test_usage_errors_exit_one(write, args):
    code, _, _ = run(write("ok.pp", "X := 1"), *args)
    assert code == 1


def test_missing_file_exit_one(tmp_path):
    code, _, err = run(str(tmp_path / "nope.pp"))
    assert code == 1 and "cannot read" in err


def test_divergent_exit_code(write, monkeypatch):
    loop = Pga(1, [(0, Label(F(1)), 0)], {0: 1}, {0: 1})
    monkeypatch.setattr(cli, "infer", lambda p, cfg: loop)
    code, _, err = run(write("x.pp", "X := 1"))
    assert code == 3
    assert "divergent" in err


def test_oracle_check_passes(write):
    src = "X := geometric(1/2); Y := bernoulli(1/3); if (Y = 1) { X := X + 1 } else { skip }; observe(X < 4)"
    code, out, _ = run(write("o.pp", src), "--oracle-check", "--epsilon", "1/1000000", "--json")
    assert code == 0
    report = json.loads(out)["oracle_check"]
    assert report["violations"] == [] and report["epsilon"] == "1/1000000"


def test_oracle_check_violation_exit_code(write, monkeypatch):
    wrong = Pga(2, [(0, Label(F(2, 3), "X"), 1)], {0: 1}, {0: F(1, 3), 1: 1})
    monkeypatch.setattr(cli, "infer", lambda p, cfg: wrong)
    code, out, err = run(write("b.pp", "X := bernoulli(1/2)"), "--oracle-check")
    assert code == 4
    assert "violation" in out and "oracle mismatch" in err


def test_dot_only_gives_empty_query_list(write, tmp_path):
    dot = tmp_path / "out.dot"
    code, out, _ = run(write("piranha.pp", PIRANHA), "--dot", str(dot), "--json")
    assert code == 0
    assert json.loads(out)["queries"] == []
    text = dot.read_text(encoding="utf-8")
    assert text.startswith("digraph") and text.count("in: 4/3") == 2


def test_minimize_flag_keeps_answers(write):
    path = write("piranha.pp", PIRANHA)
    plain = run(path, "--query", "P(P=1)", "--json")[1]
    minimized = run(path, "--query", "P(P=1)", "--json", "--minimize")[1]
    assert plain == minimized


def test_output_is_deterministic(write, tmp_path):
    path = write("piranha.pp", PIRANHA)
    outputs = []
    for i in range(3):
        dot = tmp_path / f"{i}.dot"
        _, out, _ = run(path, "--query", "P(P=1)", "--marginal", "R", "--max-degree", "2", "--json", "--dot", str(dot))
        outputs.append((out, dot.read_bytes()))
    assert outputs[0] == outputs[1] == outputs[2]


def test_console_script(write):
    exe = shutil.which("pga-infer")
    if exe is None:
        pytest.skip("package not installed as a console script")
    proc = subprocess.run([exe, write("p.pp", PIRANHA), "--query", "P(P=1)"], capture_output=True, text=True)
    assert proc.returncode == 0 and "2/3" in proc.stdout


@pytest.mark.parametrize(
    "name, args, code, needle",
    [
        ("piranha.pp", ["--query", "P(P=1)"], 0, "P(P=1) = 2/3"),
        ("geom_assign.pp", ["--marginal", "X", "--max-degree", "3"], 0, "X=1: 1  "),
        ("reject.pp", [], 2, ""),
    ],
)
def test_shipped_programs(name, args, code, needle):
    got, out, _ = run(str(PROGRAMS / name), *args)
    assert got == code and needle in out


# --- renderers ------------------------------------------------------------------------


def test_dot_geometric():
    text = dot_export(geometric_pga("X", F(1, 2)))
    assert 'q0 -> q0 [label="1/2·X"];' in text
    assert "out: 1/2" in text
    assert text.count("->") == 2  # entry arrow + self-loop


def test_dot_dirac():
    text = dot_export(dirac_pga("X", 1))
    assert 'q0 -> q1 [label="1·X"];' in text
    assert "q0 [" in text and "q1 [" in text and "q2 [" not in text


def test_dot_piranha_posterior_components():
    a = normalize(infer(parse(PIRANHA)))
    text = dot_export(a)
    assert text.count("in: 4/3") == 2
    # two weakly connected components, one per initial state
    parent = list(range(a.n_states))

    def find(q):
        while parent[q] != q:
            q = parent[q]
        return q

    for s, _, d in a.transitions:
        parent[find(s)] = find(d)
    assert len({find(q) for q in a.states}) == 2


def test_json_report_empty_queries():
    text = json_report("x.pp", True, F(1), [])
    assert json.loads(text) == {"program": "x.pp", "normalized": True, "mass": "1", "queries": []}


def test_json_report_marginal_of_two_variables():
    table = DistTable(("X", "Y"), {(0, 1): F(1, 2), (1, 0): F(1, 2)})
    text = json_report("x.pp", False, F(3, 4), [QueryResult("marginal", "X,Y", table)])
    assert json.loads(text)["queries"][0]["value"] == {"X=0,Y=1": "1/2", "X=1,Y=0": "1/2"}


def test_csv_table():
    table = DistTable(("X",), {(0,): F(1, 3), (1,): F(2, 3)})
    assert csv_table(table) == "valuation,probability\nX=0,1/3\nX=1,2/3\n"
