"""End-to-end tests of the command-line interface."""

import pytest

from rispilot.cli import main
from rispilot.io import RATE_CSV_HEADER, UTILITY_CSV_HEADER

FAST = [
    "--set", "num_elements=8",
    "--set", "pilot_budgets=2,4",
    "--set", "num_trials=30",
    "--set", "grid_points=200",
]


def test_rate_curve_writes_csv(tmp_path, capsys):
    out = tmp_path / "rates.csv"
    assert main(["rate-curve", *FAST, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == RATE_CSV_HEADER
    assert [int(line.split(",")[0]) for line in lines[1:]] == [2, 4]
    assert "wrote 2 rate points" in capsys.readouterr().out


def test_rate_curve_is_byte_deterministic(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert main(["rate-curve", *FAST, "--out", str(first)]) == 0
    assert main(["rate-curve", *FAST, "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_config_file_plus_overrides(tmp_path):
    cfg = tmp_path / "fast.cfg"
    cfg.write_text(
        "num_elements=8\npilot_budgets=2,4\nnum_trials=30\ngrid_points=200\n"
    )
    out = tmp_path / "rates.csv"
    assert main(
        ["rate-curve", "--config", str(cfg), "--set", "num_trials=25",
         "--out", str(out)]
    ) == 0
    assert out.read_text().splitlines()[1].endswith(",25")


def test_env_seed_overrides_config(tmp_path, monkeypatch):
    base = tmp_path / "base.csv"
    env = tmp_path / "env.csv"
    explicit = tmp_path / "explicit.csv"
    assert main(["rate-curve", *FAST, "--out", str(base)]) == 0
    monkeypatch.setenv("RIS_SIM_SEED", "777")
    assert main(["rate-curve", *FAST, "--out", str(env)]) == 0
    monkeypatch.delenv("RIS_SIM_SEED")
    assert main(
        ["rate-curve", *FAST, "--set", "rng_seed=777", "--out", str(explicit)]
    ) == 0
    assert env.read_bytes() != base.read_bytes()
    assert env.read_bytes() == explicit.read_bytes()


def test_bad_env_seed_exits_2(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RIS_SIM_SEED", "not-a-number")
    code = main(["rate-curve", *FAST, "--out", str(tmp_path / "r.csv")])
    assert code == 2
    assert "RIS_SIM_SEED" in capsys.readouterr().err


def test_utility_trace_cli(tmp_path):
    out = tmp_path / "trace.csv"
    code = main(
        ["utility-trace", *FAST, "--true-aoa-deg", "-45", "--l-max", "5",
         "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == UTILITY_CSV_HEADER
    assert len(lines) == 1 + 4 * 200  # stages for L = 2..5


def test_estimate_once_prints_summary(capsys):
    code = main(["estimate-once", *FAST, "--true-aoa-deg", "-30", "--l", "4"])
    assert code == 0
    text = capsys.readouterr().out
    for token in ("true aoa", "estimated aoa", "gain estimate", "phase estimate",
                  "achieved rate", "capacity ratio", "pilot 1", "pilot 4", "deg"):
        assert token in text


def test_estimate_once_is_text_deterministic(capsys):
    argv = ["estimate-once", *FAST, "--true-aoa-deg", "20", "--l", "3"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_estimate_once_noise_free_on_grid_truth_prints_unit_ratio(capsys):
    # a 181-point grid over +-90 deg puts -45 deg exactly on the grid,
    # and a +300 dB pilot offset makes the pilots effectively noise-free
    argv = [
        "estimate-once",
        "--set", "num_elements=16",
        "--set", "pilot_budgets=2,8",
        "--set", "grid_points=181",
        "--set", "pilot_snr_offset_db=300",
        "--true-aoa-deg", "-45",
        "--l", "8",
    ]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "capacity ratio: 1\n" in out
    assert "estimated aoa: -0.785398 rad (-45 deg)" in out


def test_estimate_once_converges_near_true_angle(capsys):
    # reference setup, true angle -45 deg, ten pilots
    assert main(["estimate-once", "--true-aoa-deg", "-45", "--l", "10"]) == 0
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("estimated aoa"))
    estimated_deg = float(line.split("(")[1].split(" deg")[0])
    assert abs(estimated_deg - (-45.0)) < 1.0


def test_validate_passes(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") == 5


def test_validate_failure_exits_nonzero(capsys, monkeypatch):
    import rispilot.cli as cli

    def broken_check():
        return False, "synthetic failure"

    monkeypatch.setattr(
        cli, "VALIDATION_CHECKS", (("broken", broken_check),) + cli.VALIDATION_CHECKS
    )
    assert main(["validate"]) == 2
    assert "FAIL broken" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["rate-curve", "--set", "wavelength=3", "--out", "x.csv"],
        ["rate-curve", "--set", "num_trials=0", "--out", "x.csv"],
        ["utility-trace", *FAST, "--true-aoa-deg", "80", "--l-max", "5",
         "--out", "x.csv"],  # outside the configured UE range
        ["utility-trace", *FAST, "--true-aoa-deg", "0", "--l-max", "40",
         "--out", "x.csv"],  # more pilots than pool configurations
    ],
)
def test_invalid_inputs_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_config_file_reports_io_error(tmp_path, capsys):
    code = main(
        ["rate-curve", "--config", str(tmp_path / "nope.cfg"), "--out", "x.csv"]
    )
    assert code == 3
    assert "runtime error" in capsys.readouterr().err


def test_unwritable_output_exits_3(tmp_path, capsys):
    out = tmp_path / "missing_dir" / "rates.csv"
    assert main(["rate-curve", *FAST, "--out", str(out)]) == 3
    assert "runtime error" in capsys.readouterr().err
