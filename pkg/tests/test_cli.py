import json

import pytest

from tbl.cli import run
from tbl.exactla import Operator
from tbl.qfield import RatFunc, parse_ratfunc


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_loop(capsys):
    code, out, _ = call(capsys, "eval", "--m", "1", "A ; U")
    assert code == 0
    op = Operator.from_json(json.loads(out))
    assert op.shape == (1, 1)
    assert op.get(0, 0) == parse_ratfunc("-q^2 - q^-2")


def test_eval_round_trips_through_json(capsys):
    code, out, _ = call(capsys, "eval", "--m", "1", "X - Xop")
    op = Operator.from_json(json.loads(out))
    assert code == 0 and json.loads(op.dumps()) == json.loads(out)


def test_eval_bmw_element(capsys):
    code, out, _ = call(capsys, "eval", "--m", "1", "--n", "2", "E1")
    assert code == 0
    assert Operator.from_json(json.loads(out)).shape == (4, 4)


def test_yb_example(capsys):
    code, out, _ = call(capsys, "yb", "--n", "5", "3 2 1 3 4")
    assert code == 0 and out.strip() == "Y3(1) Y2(2) Y1(3) Y3(1) Y4(3)"


def test_yb_expand_json(capsys):
    code, out, _ = call(capsys, "yb", "--n", "3", "1 2 1", "--expand", "--json")
    doc = json.loads(out)
    assert doc["labels"] == [[1, 1], [2, 2], [1, 1]] and len(doc["factors"]) == 3


def test_yb_not_reduced(capsys):
    code, _, err = call(capsys, "yb", "--n", "3", "1 1")
    assert code == 2 and "not reduced" in err


def test_verify_small(capsys):
    code, out, _ = call(capsys, "verify", "--m", "1", "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["fail"] == 0 and doc["summary"]["pass"] == len(doc["claims"])


def test_verify_list(capsys):
    code, out, _ = call(capsys, "verify", "--list")
    assert code == 0 and "yb.kernel" in out


@pytest.mark.parametrize("argv", [
    ["eval", "X ; A"],
    ["eval", "X +"],
    ["eval", "--m", "0", "X"],
    ["trace", "T1"],
    ["check", "nope[m=1]"],
    ["yb", "1 x"],
    ["bogus"],
])
def test_input_errors_exit_2(capsys, argv):
    assert run(argv) == 2


def test_check_pass_and_mutated_fail(capsys):
    assert call(capsys, "check", "yb.kernel[m=1]")[0] == 0
    code, out, _ = call(capsys, "check", "yb.kernel[m=1]", "--mutate", "Y")
    assert code == 1 and "fail" in out


def test_equal_and_trace(capsys):
    code, out, _ = call(capsys, "equal", "--n", "2", "T1 - T1^-1", "(q-q^-1) - (q-q^-1).E1")
    assert code == 0 and out.strip() == "true"
    code, out, _ = call(capsys, "equal", "--n", "2", "T1", "T1^-1")
    assert code == 1
    code, out, _ = call(capsys, "trace", "--m", "1", "--n", "2", "E1", "--json")
    doc = json.loads(out)
    assert parse_ratfunc(doc["value"]) == parse_ratfunc("-q^2 - q^-2")


def test_dims_and_out_file(capsys, tmp_path):
    path = tmp_path / "dims.json"
    code, _, _ = call(capsys, "dims", "--n", "2", "--m", "1", "--json", "--out", str(path))
    doc = json.loads(path.read_text())
    assert code == 0 and doc["image_rank"] == 2 and doc["kernel_dim"] == 1 and doc["word_span"] == 3


def test_eval_reads_file(capsys, tmp_path):
    path = tmp_path / "loop.tng"
    path.write_text("# loop\nA\nU\n")
    code, out, _ = call(capsys, "eval", "@" + str(path))
    assert code == 0 and Operator.from_json(json.loads(out)).shape == (1, 1)
