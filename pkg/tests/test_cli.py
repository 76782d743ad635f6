"""End-to-end command-line tests: output shape, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "fykit.cli"]

# frozen oracle values for the packaged presets
TINY3_GS = -7.464396364388277
TINY4_GS = -28.448373683564892


def run_cli(*args, check=True):
    proc = subprocess.run(
        CLI + list(args), capture_output=True, text=True, timeout=300
    )
    if check and proc.returncode != 0:
        raise AssertionError(
            f"fy {' '.join(args)} exited {proc.returncode}\n"
            f"stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
        )
    return proc


def data_lines(stdout):
    return [line for line in stdout.splitlines() if not line.startswith("#")]


@pytest.fixture(scope="module")
def gaussian4_cfg(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "gauss4.cfg"
    path.write_text(
        "[model]\n"
        "N = 4\n"
        "L = 3\n"
        "boundary = box\n"
        "t = 1.0\n"
        "potential.kind = gaussian\n"
        "potential.params = -3.0, 1.0\n"
        "core_radius = none\n"
        "\n"
        "[solver]\n"
        "tol = 1e-10\n"
        "max_iter = 200\n"
    )
    return str(path)


def test_chains_lists_census():
    proc = run_cli("chains", "--n", "4")
    rows = data_lines(proc.stdout)
    assert len(rows) == 19  # header + 18 chains
    assert any("identity passed=True" in line for line in proc.stdout.splitlines())


def test_yak_pattern_census_row():
    proc = run_cli("yak-pattern")
    rows = data_lines(proc.stdout)
    assert rows[-1] == "census  blocks=90  row_3p1=6  row_2p2=3"


def test_machine_format_is_json_lines():
    proc = run_cli("chains", "--n", "3", "--format", "machine", "--quiet")
    records = [json.loads(line) for line in proc.stdout.splitlines()]
    kinds = [r["record"] for r in records]
    assert kinds[0] == "columns"
    assert kinds.count("chain") == 3
    assert records[1]["chain"] == "12|3,12"


def test_spectrum_check_passes_and_fails_by_exit_code():
    ok = run_cli("spectrum-check", "--n", "3", "--dim", "4", "--seeds", "5")
    assert ok.stdout.splitlines()[-1].endswith("PASS")
    bad = run_cli(
        "spectrum-check", "--n", "3", "--dim", "4", "--seeds", "2",
        "--tol", "1e-300", check=False,
    )
    assert bad.returncode == 3
    assert bad.stdout.splitlines()[-1].endswith("FAIL")


def test_oracle_reports_preset_ground_state():
    proc = run_cli("oracle", "--config", "tiny3", "--k", "1", "--format", "machine")
    rec = [json.loads(l) for l in data_lines(proc.stdout) if "eigenpair" in l]
    assert len(rec) == 1
    assert abs(rec[0]["eigenvalue"] - TINY3_GS) <= 1e-9
    assert rec[0]["residual"] <= 1e-10


def test_solve3_recovers_ground_state():
    proc = run_cli("solve3", "--config", "tiny3", "--format", "machine")
    records = [json.loads(l) for l in data_lines(proc.stdout)]
    sol = next(r for r in records if r["record"] == "solution")
    assert abs(sol["eigenvalue"] - TINY3_GS) <= 1e-8
    assert sol["residual"] <= 1e-8
    comps = [r for r in records if r["record"] == "component"]
    assert len(comps) == 3
    assert all(c["fe_residual"] <= 1e-8 for c in comps)
    recon = next(r for r in records if r["record"] == "reconstruction")
    assert recon["lippmann_schwinger_residual"] <= 1e-8


def test_solve4_small_model(gaussian4_cfg):
    proc = run_cli("solve4", "--config", gaussian4_cfg, "--format", "machine")
    records = [json.loads(l) for l in data_lines(proc.stdout)]
    sol = next(r for r in records if r["record"] == "solution")
    oracle = run_cli("oracle", "--config", gaussian4_cfg, "--k", "1", "--format", "machine")
    gs = json.loads(data_lines(oracle.stdout)[1])["eigenvalue"]
    assert abs(sol["eigenvalue"] - gs) <= 1e-8
    chain_rows = [r for r in records if r["record"] == "component"]
    assert len(chain_rows) == 18
    assert all(r["ye_residual"] <= 1e-8 for r in chain_rows)
    sums = [r for r in records if r["record"] == "chain_sum"]
    assert len(sums) == 6
    assert all(r["chain_sum_defect"] <= 1e-8 for r in sums)


def test_hardcore3_sweep_matches_oracle():
    proc = run_cli(
        "hardcore3", "--config", "tiny3", "--sweep", "none,0,1", "--format", "machine"
    )
    rows = [json.loads(l) for l in data_lines(proc.stdout) if "core_point" in l]
    assert [r["core"] for r in rows] == ["none", "0", "1"]
    assert [r["dim"] for r in rows] == [216, 120, 24]
    for r in rows:
        assert r["difference"] <= 1e-8
        assert r["core_vanishing"] <= 1e-10
        assert r["physical"] is True
    energies = [r["pencil_eigenvalue"] for r in rows]
    assert energies[0] <= energies[1] <= energies[2]


def test_hardcore3_flags_bad_target():
    proc = run_cli(
        "hardcore3", "--config", "tiny3", "--core", "1", "--target", "0.5",
        "--format", "machine", check=False,
    )
    assert proc.returncode == 3
    rows = [json.loads(l) for l in data_lines(proc.stdout) if "core_point" in l]
    assert rows[0]["physical"] is False


def test_hardcore4_check_trivial_zero():
    proc = run_cli("hardcore4-check", "--config", "tiny4", "--format", "machine")
    records = [json.loads(l) for l in data_lines(proc.stdout)]
    summary = next(r for r in records if r["record"] == "summary")
    assert summary["sites"] == 0
    assert summary["max_defect"] == 0.0


def test_config_errors_exit_2(tmp_path):
    missing = run_cli("oracle", "--config", "/no/such/file.cfg", check=False)
    assert missing.returncode == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("[model]\nN = 3\nL = 6\nunknown_key = 1\n")
    unknown = run_cli("oracle", "--config", str(bad), check=False)
    assert unknown.returncode == 2
    assert "unknown key" in unknown.stderr
    n4 = tmp_path / "n4.cfg"
    n4.write_text("[model]\nN = 4\nL = 3\n")
    wrong = run_cli("solve3", "--config", str(n4), check=False)
    assert wrong.returncode == 2


def test_output_file_matches_stdout(tmp_path):
    out = tmp_path / "capture.txt"
    proc = run_cli("chains", "--n", "4", "--output", str(out))
    assert out.read_text() == proc.stdout


def test_dump_matrix_writes_header(tmp_path):
    dump = tmp_path / "flat.txt"
    run_cli("solve3", "--config", "tiny3", "--dump-matrix", str(dump))
    first = dump.read_text().splitlines()[0]
    assert first == "# 648 648"


@pytest.mark.parametrize(
    "args",
    [
        ("chains", "--n", "4"),
        ("yak-pattern", "--format", "machine"),
        ("spectrum-check", "--n", "3", "--dim", "4", "--seeds", "6"),
        ("oracle", "--config", "tiny3", "--k", "4"),
        ("solve3", "--config", "tiny3"),
        ("hardcore3", "--config", "tiny3", "--sweep", "none,0,1"),
        ("hardcore4-check", "--config", "tiny4"),
    ],
    ids=lambda a: a[0],
)
def test_repeat_runs_are_byte_identical(args):
    first = run_cli(*args, check=False)
    second = run_cli(*args, check=False)
    assert first.returncode == second.returncode
    assert first.stdout == second.stdout
    assert first.stderr == second.stderr
