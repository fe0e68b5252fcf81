import csv
import subprocess
import sys

import pytest

from subcenter.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_csv_stdout(capsys):
    code, out, err = run(["simulate", "--n", "1500", "--p", "3", "--r", "120", "--reps", "5",
                          "--case", "normal", "--sampler", "iboss"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "case,sampler,param,variant,n,p,r,reps,mse,mc_se,failures"
    assert len(lines) == 6
    assert "[normal/iboss]" in err


def test_simulate_file_is_byte_identical(tmp_path, capsys):
    args = ["simulate", "--n", "1500", "--p", "3", "--r", "120", "--reps", "4", "--seed", "9"]
    assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.csv"), "--threads", "2"]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    rows = list(csv.reader(open(tmp_path / "a.csv", encoding="utf-8")))
    assert len(rows) == 2 + 9 * 4


def test_simulate_table_format(capsys):
    code, out, _ = run(["simulate", "--n", "1000", "--p", "2", "--r", "100", "--reps", "3",
                        "--format", "table"], capsys)
    assert code == 0 and "uniform" in out and "lognormal" in out


def test_configuration_errors(capsys):
    assert run(["simulate", "--r", "5", "--p", "19", "--n", "1000"], capsys)[0] == 2
    assert run(["simulate", "--reps", "0"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--case", "cauchy"])
    assert exc.value.code == 2


def test_verify_report_and_fault_injection(tmp_path, capsys):
    out = tmp_path / "report.csv"
    main(["verify", "--instances", "10", "--unbiased-reps", "200", "--out", str(out)])
    rows = {r["identity_name"]: r for r in csv.DictReader(open(out, encoding="utf-8"))}
    assert rows["gram_shift"]["pass"] == "1"
    assert rows["gap_vs_exact_map"]["pass"] == "1"
    capsys.readouterr()
    code = main(["verify", "--instances", "10", "--unbiased-reps", "200", "--inject-fault",
                 "--out", str(out)])
    assert code == 1
    rows = {r["identity_name"]: r for r in csv.DictReader(open(out, encoding="utf-8"))}
    assert rows["gram_shift"]["pass"] == "0"
    assert "FAILED gram_shift" in capsys.readouterr().err


def test_verify_exit_code_tracks_failures(capsys):
    code, out, _ = run(["verify", "--instances", "10", "--unbiased-reps", "200"], capsys)
    failed = [line for line in out.splitlines()[1:] if line.endswith(",0")]
    assert code == (1 if failed else 0)


def test_variance_command(tmp_path, capsys):
    code, out, _ = run(["variance", "--n", "2000", "--p", "3", "--r", "60", "--case", "t5"], capsys)
    assert code == 0
    assert "closed-form gap: d = " in out and "weighted-mean relocation" in out
    assert main(["variance", "--n", "500", "--p", "2", "--r", "40", "--out", str(tmp_path / "v.txt")]) == 0
    assert (tmp_path / "v.txt").read_text(encoding="utf-8").startswith("# case=normal")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "subcenter", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "simulate" in proc.stdout
