import json
import subprocess
import sys

import pytest

from sumprod.cli import EXIT_FAIL, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_SIZE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def set_file(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("1\n2\n")
    return str(p)


def test_eval_size_and_set(capsys, set_file):
    code, out, _ = run(capsys, "--format", "plain", "eval", "X+X", "-b", f"X={set_file}", "--size")
    assert code == EXIT_OK and out.strip() == "3"
    code, out, _ = run(capsys, "eval", "X+X", "-b", f"X={set_file}")
    assert json.loads(out)["set"] == ["2", "3", "4"]


def test_eval_error_codes(capsys, set_file):
    assert run(capsys, "eval", "X+Y", "-b", f"X={set_file}")[0] == EXIT_PARSE
    assert run(capsys, "eval", "X+(", "-b", f"X={set_file}")[0] == EXIT_PARSE
    assert run(capsys, "eval", "X/X0", "-b", f"X={set_file}", "-b", "X0={0,1}")[0] == EXIT_PRECONDITION
    code = run(capsys, "--max-set-size", "100", "eval", "X*X", "-b", "X=interval:50")[0]
    assert code == EXIT_SIZE
    with pytest.raises(SystemExit) as info:
        main(["eval"])
    assert info.value.code == 2


def test_eval_independent_of_jobs(capsys):
    outs = [run(capsys, "--jobs", j, "eval", "X*X-X", "-b", "X=random-int:200:U=100000", "--size")[1]
            for j in ("1", "3")]
    assert outs[0] == outs[1]


def test_witness_squeeze(capsys):
    code, out, _ = run(capsys, "witness", "squeeze", "--set", "interval:4", "--map", "pow:2", "--shift", "0,1/2")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["count"] == 6 and rep["verified"]


def test_witness_spacing_failure_names_check(capsys):
    code, _, err = run(capsys, "witness", "squeeze", "--set", "interval:4", "--shift", "0,3")
    assert code == EXIT_PRECONDITION and "spacing" in err


def test_witness_main(capsys):
    code, out, _ = run(capsys, "witness", "main", "--set", "interval:12", "--map", "pow:3", "--thin")
    assert code == EXIT_OK and json.loads(out)["verified"]


def test_dotprod_grid(capsys, tmp_path):
    p = tmp_path / "pts.txt"
    p.write_text("".join(f"{x} {y}\n" for x in (1, 2) for y in (1, 2)))
    code, out, _ = run(capsys, "dotprod", str(p))
    rep = json.loads(out)
    assert code == EXIT_OK and rep["lambda_size"] == 6


def test_check_requires_seed(capsys):
    with pytest.raises(SystemExit):
        main(["check", "plunnecke", "--trials", "5"])


def test_check_suite_is_reproducible(capsys):
    a = run(capsys, "--seed", "7", "check", "plunnecke", "--trials", "50")
    b = run(capsys, "--seed", "7", "check", "plunnecke", "--trials", "50")
    assert a[0] == EXIT_OK and a[1] == b[1]
    assert "0 violations" in a[2]


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "sweep", "quad-expander", "--n", "4,8,16")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0] == "N,size,log2N,log2size" and len(lines) >= 4


def test_search_json(capsys):
    code, out, _ = run(capsys, "--seed", "1", "search", "X+X", "--n", "6", "--universe", "30", "--steps", "50")
    rep = json.loads(out)
    assert code == EXIT_OK and len(rep["best"]) == 6


def test_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "sumprod.cli", "--format", "plain", "eval", "X-X", "-b", "X={1,2,4}", "--size"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "7"
    assert EXIT_FAIL == 1
