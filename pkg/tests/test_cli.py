import hashlib
import json
import subprocess
import sys

import pytest

from contactval import checks, cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_blob_sha1_matches_git():
    data = b"hello\n"
    # `git hash-object` of "hello\n"
    assert cli.blob_sha1(data) == "ce013625030ba8dba906f756967f9e9ca394464a"
    assert cli.blob_sha1(b"") == hashlib.sha1(b"blob 0\0").hexdigest()


@pytest.mark.parametrize("n", [0, 1, 4])
def test_tables_exit_zero(n, capsys, tmp_path):
    out = tmp_path / "tables.json"
    code, text = run(["tables", "--n", str(n), "--out", str(out)], capsys)
    assert code == 0
    assert "phi[k][m]" in text
    report = json.loads(out.read_text())
    assert report["body"]["command"] == "tables"
    assert all(r["passed"] for r in report["body"]["records"])
    assert all(r["provenance"] for r in report["body"]["records"])


def test_tables_n1_shape(capsys):
    code, text = run(["tables", "--n", "1"], capsys)
    assert "k=1:        0      -1/3" in text


def test_tables_csv_to_stdout(capsys):
    code, text = run(["tables", "--n", "2", "--format", "csv", "--out", "-"], capsys)
    assert code == 0
    assert text.splitlines()[0].startswith("name,category,passed")


def test_report_body_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["tables", "--n", "3", "--out", str(a)], capsys)
    run(["tables", "--n", "3", "--out", str(b)], capsys)
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert ra["body"] == rb["body"]
    assert ra["meta"]["body_hash"] == rb["meta"]["body_hash"]


def test_contact_points_torus(capsys):
    code, text = run(["contact-points", "torus 2 0.5"], capsys)
    assert code == 0
    assert "index sum = 0" in text


def test_contact_points_sphere_printed_law_fails(capsys, tmp_path):
    out = tmp_path / "sphere.json"
    code, _ = run(["contact-points", "sphere 1.0", "--degree", "2", "--out", str(out)], capsys)
    assert code == cli.EXIT_EXACT
    rec = {r["name"]: r for r in json.loads(out.read_text())["body"]["records"]}
    assert rec["sphere_phi2_printed"]["expected"] == pytest.approx(6.4)
    assert rec["sphere_phi2_printed"]["observed"] == pytest.approx(4.0)
    assert rec["euler_index_sum"]["passed"]


def test_contact_points_degenerate_exit_three(capsys):
    code, text = run(["contact-points", "quadratic 0 0 0 0"], capsys)
    assert code == cli.EXIT_DEGENERATE
    assert "degenerate tangency" in text


def test_bad_spec_is_an_error(capsys):
    assert cli.main(["contact-points", "cube 2"]) == cli.EXIT_EXACT


def test_mc_appends_json_lines(capsys, tmp_path):
    out = tmp_path / "mc.jsonl"
    args = ["mc", "--experiment", "simplex", "--samples", "20000", "--out", str(out), "--no-figures"]
    assert cli.main(args) == 0
    assert cli.main(args) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["body"] == json.loads(lines[1])["body"]


def test_mc_statistical_failure_exit_four(capsys, tmp_path):
    code = cli.main(["mc", "--experiment", "simplex", "--n", "3", "--k", "1", "--samples", "20000"])
    assert code == cli.EXIT_STATISTICAL


def test_mc_figures(capsys, tmp_path):
    out = tmp_path / "run" / "mc.jsonl"
    cli.main(["mc", "--experiment", "crofton", "--samples", "20000", "--s", "0", "--s", "1",
              "--s", "2", "--out", str(out)])
    assert (tmp_path / "run" / "mc_crofton_2_1.png").stat().st_size > 0


def test_single_check(capsys):
    code, text = run(["check", "c02_euler_secant_closed_form"], capsys)
    assert code == 0
    assert "PASS  c02_euler_secant_closed_form" in text


def test_exact_checks_ignore_seed():
    for name in ("c01_contact_sphere_tables", "c10_gauss_crofton", "c06_pfaffian_canonical_form"):
        a = checks.run_check(name, seed=1).to_dict()
        b = checks.run_check(name, seed=2).to_dict()
        assert a == b


def test_exit_code_precedence():
    def rec(cat, ok):
        return checks.Record("x", cat, ok, None, None, None, "p")

    assert cli.exit_code([rec(checks.STATISTICAL, False), rec(checks.EXACT, False)]) == 2
    assert cli.exit_code([rec(checks.STATISTICAL, False), rec(checks.DEGENERACY, False)]) == 3
    assert cli.exit_code([rec(checks.STATISTICAL, False)]) == 4
    assert cli.exit_code([rec(checks.INFO, False), rec(checks.EXACT, True)]) == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "contactval", "tables", "--n", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "c[k][j]" in res.stdout


@pytest.mark.parametrize("flag,expected", [("paper", "-1/98"), ("kappa-factorial", "-1/98"),
                                           ("mass-normalized", "-1/49")])
def test_variant_flag(flag, expected, capsys):
    code, text = run(["tables", "--n", "3", "--variant", flag], capsys)
    assert code == 0
    assert expected in text or expected.lstrip("-") in text


def test_unknown_variant_rejected(capsys):
    with pytest.raises(SystemExit):
        cli.main(["tables", "--variant", "other"])
