from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from flatcover import setfile
from flatcover.cli import REPORT_SCHEMA, main

GOLDEN = Path(__file__).parent / "golden"

# smallest valid (r, d) per method, with any extra flags it needs
SMALLEST = {
    "sum3": (2, 2, []),
    "simplex": (3, 3, []),
    "bch": (8, 3, []),
    "generic_code": (7, 3, ["--code", "simplex:3"]),
    "product": (2, 1, ["--factors", "full:1,full:1"]),
    "balanced": (4, 2, []),
    "prime": (2, 2, []),
    "multiblock": (1, 1, ["--parts", "1:1"]),
    "rk": (4, 2, []),
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def report(capsys, *argv):
    code, out = run(capsys, *argv)
    rep = json.loads(out)
    assert rep["schema"] == REPORT_SCHEMA and rep["exit_code"] == code
    return code, rep


@pytest.mark.parametrize(
    "name,argv",
    [
        ("construct_balanced_8_2", ["construct", "--method", "balanced", "--r", "8", "--d", "2"]),
        ("exact_gamma_3_2", ["exact", "--r", "3", "--d", "2", "--quantity", "gamma"]),
        ("code_simplex_3", ["code", "--family", "simplex", "--d", "3", "--threads", "1"]),
    ],
)
def test_golden(capsys, name, argv):
    code, rep = report(capsys, *argv)
    assert code == 0
    want = json.loads((GOLDEN / f"{name}.json").read_text())
    assert rep["result"] == want
    assert rep["command"] == ["flatcover", *argv]


def test_golden_values_are_the_known_ones():
    assert json.loads((GOLDEN / "construct_balanced_8_2.json").read_text())["size"] == 24
    assert json.loads((GOLDEN / "exact_gamma_3_2.json").read_text())["value"] == 6
    assert json.loads((GOLDEN / "code_simplex_3.json").read_text())["weights"] == {"0": 1, "4": 7}


@pytest.mark.parametrize("method", sorted(SMALLEST))
def test_roundtrip(capsys, tmp_path, method):
    r, d, extra = SMALLEST[method]
    out = tmp_path / f"{method}.flat"
    code, rep = report(capsys, "construct", "--method", method, "--r", str(r), "--d", str(d),
                       "--out", str(out), "--check", *extra)
    assert code == 0 and rep["result"]["witness_check"]["holds"]
    s = setfile.read(out)
    assert len(s) == rep["result"]["size"]
    mode = "nonblocking" if method in ("balanced", "prime", "multiblock", "rk") else "complete"
    code, rep = report(capsys, "verify", "--set", str(out), "--d", str(d), "--mode", mode, "--threads", "1")
    assert code == 0 and rep["result"]["holds"]
    code, rep = report(capsys, "verify", "--set", str(out), "--d", str(d), "--mode", mode,
                       "--witness", str(out) + ".json")
    assert code == 0


def test_balanced_exhaustive(capsys, tmp_path):
    out = tmp_path / "b.flat"
    report(capsys, "construct", "--method", "balanced", "--r", "8", "--d", "2", "--out", str(out))
    side = json.loads(Path(str(out) + ".json").read_text())
    assert side["size"] == 24 <= side["bound_upper"] == 33
    code, rep = report(capsys, "verify", "--set", str(out), "--d", "2", "--mode", "nonblocking",
                       "--exhaustive", "--threads", "1")
    assert code == 0


def test_verify_fails(capsys, tmp_path):
    path = tmp_path / "s.flat"
    path.write_text("# flatset v1\nr=3\nmode=points\n000\n100\n010\n")
    code, rep = report(capsys, "verify", "--set", str(path), "--d", "1", "--mode", "nonblocking")
    assert code == 1 and rep["result"]["counterexample"] is not None


def test_hex_and_mutated_witness(capsys, tmp_path):
    out = tmp_path / "p.flat"
    report(capsys, "construct", "--method", "prime", "--r", "6", "--d", "2", "--out", str(out), "--hex")
    s = setfile.read(out)
    victim = next(iter(s))
    setfile.write(out, type(s)(s.r, s.mask ^ (1 << (victim ^ 63 if (victim ^ 63) not in s else 1))))
    code, _ = report(capsys, "verify", "--set", str(out), "--d", "2", "--mode", "nonblocking",
                     "--witness", str(out) + ".json")
    assert code == 1


def test_exit_codes(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--method", "nope", "--r", "4", "--d", "2"])
    assert exc.value.code == 64
    capsys.readouterr()
    code, rep = report(capsys, "construct", "--method", "balanced", "--r", "4", "--d", "3")
    assert code == 64 and "error" in rep
    code, rep = report(capsys, "exact", "--r", "7", "--d", "3")
    assert code == 2
    code, rep = report(capsys, "exact", "--r", "5", "--d", "2", "--budget", "100")
    assert code == 2


def test_bounds_and_table(capsys):
    code, out = run(capsys, "bounds", "--r", "4", "--d", "2")
    assert code == 0 and "beta: [" in out
    code, rep = report(capsys, "bounds", "--r", "4", "--d", "2", "--json")
    assert rep["result"]["beta"]["bracket"] == [9, 9]
    code, out = run(capsys, "table", "--r", "2:3", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0].startswith("r,d,gamma,beta") and len(lines) == 1 + 3 + 4
    code, out = run(capsys, "table", "--r", "4", "--kind", "bounds", "--format", "markdown")
    assert out.startswith("| r | d |")


def test_dual_bch_report(capsys):
    code, rep = report(capsys, "code", "--family", "dual_bch", "--m", "4", "--e", "2", "--threads", "1")
    res = rep["result"]
    assert res["k"] == 8 and res["carlitz_uchiyama"] and not res["carlitz_uchiyama_loose"]


def test_exact_cache(capsys, tmp_path):
    cache = tmp_path / "exact-cache.json"
    report(capsys, "exact", "--r", "3", "--d", "2", "--cache", str(cache))
    assert "gamma:3:2" in json.loads(cache.read_text())


def test_console_script(tmp_path):
    env = dict(os.environ, FLATCOVER_BUDGET="50")
    proc = subprocess.run([sys.executable, "-m", "flatcover.cli", "exact", "--r", "5", "--d", "2"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 2
