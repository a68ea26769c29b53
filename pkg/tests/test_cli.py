import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from sumset_lab.cli import main
from sumset_lab.core import ZpSet, ZSet
from sumset_lab.io import format_set, parse_intervals_text, parse_pairs_text, parse_set_file, parse_set_text
from sumset_lab.errors import InvalidInputError


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        f = tmp_path / name
        f.write_text(text)
        return str(f)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_set_examples(files):
    assert parse_set_file(files("a", "0\n1\n5\n")) == ZSet([0, 1, 5])
    assert parse_set_file(files("b", "p 7\n0\n3\n6\n")) == ZpSet(7, [0, 3, 6])
    assert parse_set_text("# c\n\n3  # tail\n-2\n") == ZSet([-2, 3])


@pytest.mark.parametrize(
    "text,needle",
    [
        ("p 8\n0\n", "line 1"),
        ("0\n1\n1\n", "line 3"),
        ("0\nx\n", "line 2"),
        ("p 7\n0\n7\n", "line 3"),
        ("0\np 7\n", "line 2"),
        ("p 2097143\n0\n", "line 1"),
    ],
)
def test_parse_set_errors_name_the_line(text, needle):
    with pytest.raises(InvalidInputError, match=needle):
        parse_set_text(text)


def test_parse_pairs_and_intervals():
    assert parse_pairs_text("1 1\n2 5\n").pairs == ((1, 1), (2, 5))
    with pytest.raises(InvalidInputError, match="line 2"):
        parse_pairs_text("1 1\n2\n")
    U = parse_intervals_text("circle\n9/10 1\n0 0.2\n")
    assert U.ambient == "circle" and U.measure == parse_intervals_text("0.9 1.2").measure == Fraction(3, 10)
    with pytest.raises(InvalidInputError, match="line 1"):
        parse_intervals_text("0 pi\n")


def test_sumset_round_trip(capsys, files):
    a, b = files("a", "p 7\n0\n3\n6\n"), files("b", "p 7\n0\n3\n")
    code, out, _ = run(capsys, "sumset", "--a", a, "--b", b)
    assert code == 0
    res = json.loads(out)
    S = ZpSet(res["set"]["p"], res["set"]["elements"])
    assert S == ZpSet(7, [0, 2, 3, 6])
    assert parse_set_text(format_set(S)) == S
    code, out, _ = run(capsys, "sumset", "--a", a, "--b", b, "--op", "difference")
    assert json.loads(out)["set"]["elements"] == [0, 3, 4, 6]


def test_restricted_sum(capsys, files):
    a = files("a", "1\n2\n3\n4\n5\n")
    f = files("f", "1 1\n5 5\n")
    code, out, _ = run(capsys, "sumset", "--a", a, "--b", a, "--pairs", f)
    assert code == 0 and json.loads(out)["set"]["elements"] == list(range(3, 10))


def test_select_endpoints(capsys, files):
    a, b = files("a", "1\n2\n3\n4\n6\n7\n8\n"), files("b", "0\n1\n2\n3\n4\n5\n6\n")
    code, out, _ = run(capsys, "select", "--strategy", "endpoints", "--a", a, "--b", b)
    res = json.loads(out)
    assert code == 0 and res["achieved"] >= res["bound"] == 13
    code, out, _ = run(capsys, "select", "--strategy", "exhaustive", "--a", a, "--b", b, "--c", "2")
    assert json.loads(out)["achieved"] == 12
    code, _, err = run(capsys, "select", "--strategy", "fibre", "--a", a, "--b", b, "--modulus", "2")
    assert code == 2 and "--seed" in err


def test_verify_exit_codes(capsys, files):
    a, b = files("a", "p 17\n0\n5\n"), files("b", "p 17\n1\n5\n8\n10\n")
    code, out, _ = run(capsys, "verify", "--theorem", "stability", "--a", a, "--b", b)
    rep = json.loads(out)
    assert code == 3 and rep["verdict"] == "fails" and rep["witness"]["best"]
    code, out, _ = run(capsys, "verify", "--theorem", "thm1", "--a", files("c", "0\n2\n9\n"), "--b", files("d", "0\n4\n"))
    assert code == 0 and json.loads(out)["verdict"] == "holds"
    code, _, err = run(capsys, "verify", "--theorem", "thm1", "--a", files("e", "0\n0\n"), "--b", files("f", "0\n"))
    assert code == 2 and "duplicate" in err
    code, _, _ = run(capsys, "verify", "--theorem", "thm1", "--a", str(files("g", "0\n")) + ".missing", "--b", a)
    assert code == 2
    code, _, _ = run(capsys, "verify", "--theorem", "nope")
    assert code == 2
    code, _, _ = run(capsys, "verify", "--theorem", "thm1", "--exhaustive")
    assert code == 2


def test_verify_eh_default_diagonal(capsys, files):
    a = files("a", "p 17\n1\n2\n3\n4\n5\n")
    code, out, _ = run(capsys, "verify", "--theorem", "eh", "--a", a)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "holds" and rep["witness"]["achieved"] >= 7


def test_verify_exhaustive_sweep(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "thm1", "--exhaustive", "--range", "5", "--jobs", "2")
    s = json.loads(out)
    assert code == 0 and s["total"] == 32 * 32 and s["fails"] == 0


def test_hunt_conjecture1_writes_log(capsys, tmp_path):
    log = tmp_path / "log.jsonl"
    code, out, _ = run(capsys, "hunt", "conjecture1", "--pmax", "13", "--mode", "exhaustive", "--out", str(log))
    s = json.loads(out)
    assert code == 0 and s["total"] == 364 and len(log.read_text().splitlines()) == 364
    code, _, err = run(capsys, "hunt", "conjecture1", "--pmax", "13", "--mode", "random", "--budget", "5")
    assert code == 2 and "--seed" in err


def test_hunt_coverage_needs_seed(capsys):
    code, _, _ = run(capsys, "hunt", "coverage", "--p", "101", "--beta", "0.2")
    assert code == 2
    code, out, _ = run(capsys, "hunt", "coverage", "--p", "101", "--beta", "0.2", "--trials", "5", "--seed", "1")
    assert code == 0 and json.loads(out)["trials"] == 5


def test_hunt_campaign_csv(capsys, files, tmp_path):
    cfg = files("c.cfg", f"mode=random\nchecker=thm1\nn_max=8\ntrials=30\nseed=4\nout={tmp_path / 'x.jsonl'}\n")
    code, out, _ = run(capsys, "hunt", "campaign", "--config", cfg, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1 and rows[0]["total"] == "30" and rows[0]["fails"] == "0"


def test_continuous_verb(capsys, files):
    a = files("a", "0 1\n2 3\n")
    b = files("b", "0 1\n")
    code, out, _ = run(capsys, "continuous", "--a", a, "--b", b)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "holds" and rep["metrics"]["exact"] is True
    code, _, _ = run(capsys, "continuous", "--a", files("c", "0 0.1.2\n"), "--b", b)
    assert code == 2


def test_module_entry_point(files):
    a = files("a", "0\n1\n5\n")
    r = subprocess.run([sys.executable, "-m", "sumset_lab", "sumset", "--a", a, "--b", a],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["set"]["elements"] == [0, 1, 2, 5, 6, 10]
