import json
import subprocess
import sys
import time

import pytest

from frobtrace.cli import main

SUBCOMMANDS = ["traces", "census", "constant", "sieve", "gl2-verify", "greaves"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def toy_cache(tmp_path, capsys):
    path = tmp_path / "t.csv"
    assert run(capsys, "traces", "--A", "1", "--B", "1", "--x", "10", "--out", str(path))[0] == 0
    return path


def test_traces_writes_three_rows(toy_cache):
    assert toy_cache.read_text().splitlines() == ["# frobtrace v1 A=1 B=1 x=10", "3,0", "5,-3", "7,3"]


def test_traces_header_only(capsys):
    code, out, _ = run(capsys, "traces", "--A", "1", "--B", "1", "--x", "1")
    assert code == 0 and out == "# frobtrace v1 A=1 B=1 x=1\n"


def test_traces_singular_curve(capsys):
    code, _, err = run(capsys, "traces", "--A", "0", "--B", "0", "--x", "10")
    assert code == 2 and "singular" in err


def test_traces_worker_independent(capsys):
    a = run(capsys, "traces", "--A", "3", "--B", "-7", "--x", "30000", "--workers", "1")[1]
    b = run(capsys, "traces", "--A", "3", "--B", "-7", "--x", "30000", "--workers", "3")[1]
    assert a == b


def test_census_toy(capsys):
    code, out, _ = run(capsys, "census", "--A", "1", "--B", "1", "--x", "10", "--workers", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["counts"]["prime"] == 2
    assert rep["counts"]["gcd_filtered"] == 2
    assert rep["counts"]["zero"] == 1
    assert rep["diagnostics"]["reciprocal_partial"] == pytest.approx(12 / 35)
    assert rep["meta"]["m_E_assumed"] is True


def test_census_from_cache_is_byte_identical(capsys, toy_cache, tmp_path):
    args = ["census", "--traces", str(toy_cache), "--image", "full", "--level", "2", "--half", "full"]
    first = run(capsys, *args, "--out", str(tmp_path / "a.json"))
    second = run(capsys, *args, "--out", str(tmp_path / "b.json"))
    assert first[0] == second[0] == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    rep = json.loads((tmp_path / "a.json").read_text())
    assert rep["constants"]["Cprime"] == pytest.approx(0.6151326573, abs=1e-9)


def test_census_cache_matches_direct_run(capsys, toy_cache):
    cached = run(capsys, "census", "--traces", str(toy_cache))[1]
    direct = run(capsys, "census", "--A", "1", "--B", "1", "--x", "10", "--workers", "1")[1]
    assert cached == direct


def test_census_errors(capsys, tmp_path, toy_cache):
    assert run(capsys, "census", "--traces", str(tmp_path / "missing.csv"))[0] == 2
    assert run(capsys, "census", "--A", "1", "--B", "1")[0] == 2
    assert run(capsys, "census", "--traces", str(toy_cache), "--x", "11")[0] == 2
    assert run(capsys, "census", "--traces", str(toy_cache), "--theta", "0.3")[0] == 2
    assert run(capsys, "census", "--traces", str(toy_cache), "--image", "full", "--level", "3")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("# frobtrace v1 A=1 B=1 x=10\n3,0\n5,11\n7,3\n")
    code, _, err = run(capsys, "census", "--traces", str(bad))
    assert code == 2 and "line 3" in err


def test_constant_full_level_two(capsys):
    code, out, _ = run(capsys, "constant", "--level", "2", "--image", "full")
    rep = json.loads(out)
    assert code == 0
    assert rep["C1"] == pytest.approx(1 / 3)
    assert rep["C"] == pytest.approx(2 * rep["C1"] * rep["C2"], abs=1e-12)
    assert rep["Cprime"] is None


def test_constant_identity_image(capsys, tmp_path):
    img = tmp_path / "id.txt"
    img.write_text("# gl2image v1 m=2\n1,0,0,1\n")
    code, out, _ = run(capsys, "constant", "--image", str(img))
    assert code == 0 and json.loads(out)["C"] == 0


def test_constant_odd_level(capsys):
    assert run(capsys, "constant", "--level", "3", "--image", "full")[0] == 2
    assert run(capsys, "constant", "--image", "full")[0] == 2
    assert run(capsys, "constant", "--level", "2", "--tol", "0")[0] == 2


def test_sieve_eval(capsys):
    code, out, _ = run(capsys, "sieve", "eval", "--U", "0.83", "--V", "0.1666666667")
    assert code == 0
    assert json.loads(out)["J"] == pytest.approx(0.00692, abs=5e-5)


def test_sieve_solve(capsys):
    code, out, _ = run(capsys, "sieve", "solve", "--V", "0.25", "--target", "0.5")
    assert code == 0
    assert json.loads(out)["U"] == pytest.approx(0.5111286, abs=5e-5)


def test_sieve_solve_no_root(capsys):
    assert run(capsys, "sieve", "solve", "--V", "0.25", "--target", "-1")[0] == 1


def test_sieve_recipe(capsys):
    code, out, _ = run(capsys, "sieve", "recipe", "--theta", "0.5", "--mode", "greaves_P")
    rep = json.loads(out)
    assert code == 0
    assert (rep["U"], rep["V"], rep["r"]) == (0.6, 0.25, 5)


def test_sieve_bad_inputs(capsys):
    assert run(capsys, "sieve", "eval", "--U", "0.83", "--V", "0.1")[0] == 2
    assert run(capsys, "sieve", "recipe", "--theta", "1.2", "--mode", "pcc")[0] == 2


def test_gl2_verify(capsys):
    t0 = time.perf_counter()
    code, out, _ = run(capsys, "gl2-verify", "--lmax", "7")
    assert code == 0 and time.perf_counter() - t0 < 5
    assert json.loads(out)["failed"] == 0
    assert run(capsys, "gl2-verify", "--lmax", "11")[0] == 0
    assert run(capsys, "gl2-verify", "--lmax", "1")[0] == 2


def test_greaves_on_cache(capsys, tmp_path):
    cache = tmp_path / "t.csv"
    run(capsys, "traces", "--A", "1", "--B", "1", "--x", "10000", "--out", str(cache), "--workers", "1")
    code, out, _ = run(capsys, "greaves", "--traces", str(cache), "--drop-log", "--r", "6")
    rep = json.loads(out)
    assert code == 0
    assert rep["lower_lemma"]["max_ok"] and rep["lower_lemma"]["omega_holds"]
    # exact recipe is degenerate at x = 10^4
    assert run(capsys, "greaves", "--traces", str(cache))[0] == 2
    assert run(capsys, "greaves", "--traces", str(cache), "--mode", "selberg", "--drop-log")[0] == 2


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_and_unknown_flags(capsys, sub):
    code, out, _ = run(capsys, sub, "--help")
    assert code == 0 and "usage" in out
    assert run(capsys, sub, "--bogus")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "frobtrace", "sieve", "recipe", "--theta", "0.5", "--mode", "pcc"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["r"] == 2
