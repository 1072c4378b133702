"""End-to-end command behavior: exact text, schemas, exit codes."""

import csv
import io
import json

import pytest

from mdmtj.cli import main


@pytest.fixture(autouse=True)
def pinned_clock(monkeypatch):
    # byte-identical manifests across a test run
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1755734400")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    comments = [line for line in text.splitlines() if line.startswith("#")]
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return comments, list(csv.reader(io.StringIO("\n".join(body))))


def test_resistance_known_pattern(capsys):
    code, out, _ = run_cli(capsys, "resistance", "--pattern", "00010", "--borders", "same,same")
    assert code == 0
    assert out == "431.54 ohm\n"


def test_voltage_known_pattern(capsys):
    code, out, _ = run_cli(capsys, "voltage", "--pattern", "00010")
    assert code == 0
    assert out == "221.64 mV\n"


def test_margin_enumerated_table(capsys):
    code, out, _ = run_cli(capsys, "margin", "--domains", "5")
    assert (code, out) == (0, "25.14 mV\n")


def test_margin_closed_form_and_worst_agree(capsys):
    code, closed, _ = run_cli(capsys, "margin", "--domains", "5", "--closed-form")
    assert (code, closed) == (0, "23.71 mV\n")
    code, worst, _ = run_cli(capsys, "margin", "--domains", "5", "--borders", "worst")
    assert (code, worst) == (0, "23.71 mV\n")


def test_margin_csv_closed_form(capsys):
    code, out, _ = run_cli(
        capsys, "margin", "--domains", "4", "--closed-form", "--format", "csv"
    )
    assert code == 0
    comments, rows = parse_csv(out)
    assert any(line.startswith("# command: margin") for line in comments)
    assert any(line.startswith("# config: r_minus_80=1911 ") for line in comments)
    assert rows[0] == ["weight_low", "weight_high", "r_low_max_ohm", "r_high_min_ohm", "margin_mv"]
    assert rows[1:] == [["0", "1", "480.73", "555.31", "30.64"]]


def test_margin_csv_enumerated_rows(capsys):
    code, out, _ = run_cli(capsys, "margin", "--domains", "5", "--format", "csv")
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[1] == ["0", "1", "382.20", "431.14", "25.14"]
    assert len(rows) == 1 + 5  # header plus one gap per adjacent weight pair


def test_levels_csv_schema(capsys):
    code, out, _ = run_cli(capsys, "levels", "--domains", "5", "--format", "csv")
    assert code == 0
    comments, rows = parse_csv(out)
    assert comments[0] == "# command: levels"
    assert rows[0] == ["pattern_class", "weight", "multiplicity", "resistance_ohm", "voltage_mv"]
    assert rows[1] == ["00000", "0", "1", "382.20", "196.30"]
    assert len(rows) == 1 + 16  # sixteen classes under same/same
    assert sum(int(r[2]) for r in rows[1:]) == 32


def test_levels_table_text(capsys):
    code, out, _ = run_cli(capsys, "levels", "--domains", "5")
    assert code == 0
    assert out.startswith("5-domain levels, borders same/same, read current 513.60 uA")
    assert "minimum margin 25.14 mV between weights 0 and 1" in out


def test_levels_json_round_trip(capsys):
    code, out, _ = run_cli(capsys, "levels", "--domains", "5", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["manifest"]["command"] == "levels"
    assert payload["manifest"]["version"] == "0.1.0"
    assert payload["manifest"]["configuration"]["r_plus_68"] == "5143"
    assert payload["min_margin_mv"] == 25.14
    assert len(payload["classes"]) == 16
    first = payload["classes"][0]
    assert first == {
        "pattern_class": "00000",
        "weight": 0,
        "multiplicity": 1,
        "resistance_ohm": 382.2,
        "voltage_mv": 196.3,
    }


def test_sweep_table_threshold(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--from", "2", "--to", "6", "--threshold-mv", "20"
    )
    assert code == 0
    assert out.rstrip().endswith("threshold 20.00 mV -> max scalable domains: 5")


def test_sweep_csv_blank_after_enumeration_limit(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--from", "19", "--to", "21", "--threshold-mv", "5", "--format", "csv"
    )
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[0] == ["domains", "closed_form_margin_mv", "enumerated_margin_mv"]
    by_domains = {row[0]: row for row in rows[1:]}
    assert by_domains["20"][2] != ""
    assert by_domains["21"][2] == ""


def test_sweep_json_fields(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--from", "2", "--to", "4", "--threshold-mv", "31", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["max_scalable_domains"] == 3
    assert [row["domains"] for row in payload["rows"]] == [2, 3, 4]
    assert payload["rows"][0]["closed_form_margin_mv"] == 73.62


def test_variation_offset_table(capsys):
    code, out, _ = run_cli(capsys, "variation", "--domains", "4", "--offset-nm", "6")
    assert code == 0
    assert out == (
        "nominal min margin: 32.46 mV\n"
        "offset 6.000 nm (worst sign) min margin: 27.60 mV\n"
        "reduction: 4.86 mV (14.96%)\n"
    )


def test_variation_offset_json_neighbors(capsys):
    def perturbed(*extra):
        code, out, _ = run_cli(
            capsys, "variation", "--domains", "3", "--offset-nm", "4",
            "--format", "json", *extra,
        )
        assert code == 0
        return json.loads(out)["perturbed_min_margin_mv"]

    worst = perturbed()
    assert worst <= min(perturbed("--neighbors", "0"), perturbed("--neighbors", "1"))


def test_variation_monte_carlo_csv(capsys):
    args = (
        "variation", "--domains", "3", "--monte-carlo", "64", "--seed", "9",
        "--format", "csv",
    )
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    comments, rows = parse_csv(out)
    assert "# seed: 9" in comments
    assert rows[0] == ["sample", "delta_nm", "min_margin_mv"]
    assert len(rows) == 1 + 64
    assert [row[0] for row in rows[1:4]] == ["0", "1", "2"]

    # chunked evaluation must not change a single byte
    code, chunked, _ = run_cli(capsys, *args, "--workers", "4")
    assert code == 0
    assert chunked == out


def test_variation_monte_carlo_json(capsys):
    code, out, _ = run_cli(
        capsys, "variation", "--domains", "3", "--monte-carlo", "32", "--seed", "5",
        "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["manifest"]["seed"] == 5
    assert len(payload["samples"]) == 32
    margins = [s["min_margin_mv"] for s in payload["samples"]]
    assert payload["min_margin_mv"] == min(margins)
    assert all(m <= payload["nominal_min_margin_mv"] for m in margins)


def test_repeated_runs_are_byte_identical(capsys):
    first = run_cli(capsys, "levels", "--domains", "4", "--format", "json")
    second = run_cli(capsys, "levels", "--domains", "4", "--format", "json")
    assert first == second


def test_out_file_matches_stdout(capsys, tmp_path):
    target = tmp_path / "report.csv"
    code, out, _ = run_cli(
        capsys, "margin", "--domains", "4", "--format", "csv", "--out", str(target)
    )
    assert code == 0
    assert out == ""
    code, direct, _ = run_cli(capsys, "margin", "--domains", "4", "--format", "csv")
    assert target.read_text() == direct


def test_custom_config_changes_results(capsys, tmp_path):
    config = tmp_path / "device.cfg"
    config.write_text("r_minus_80 = 2000\n")
    code, out, _ = run_cli(
        capsys, "resistance", "--pattern", "00000", "--config", str(config)
    )
    assert (code, out) == (0, "400.00 ohm\n")


def test_oracle_cross_checks_pass(capsys):
    for argv in (
        ("resistance", "--pattern", "01101", "--oracle"),
        ("voltage", "--pattern", "10", "--borders", "differ,differ", "--oracle"),
        ("levels", "--domains", "8", "--oracle"),
        ("margin", "--domains", "5", "--borders", "worst", "--oracle"),
        ("margin", "--domains", "6", "--closed-form", "--oracle"),
        ("sweep", "--from", "2", "--to", "6", "--threshold-mv", "20", "--oracle"),
    ):
        code, _, err = run_cli(capsys, *argv)
        assert code == 0, (argv, err)


def test_oracle_above_brute_force_limit(capsys):
    code, _, err = run_cli(capsys, "levels", "--domains", "13", "--oracle")
    assert code == 2
    assert "12 domains" in err


def test_invalid_pattern_exits_2(capsys):
    code, _, err = run_cli(capsys, "resistance", "--pattern", "00x10")
    assert code == 2
    assert err.startswith("error:")
    assert "'x'" in err


def test_worst_borders_rejected_outside_margin(capsys):
    code, _, err = run_cli(capsys, "levels", "--domains", "4", "--borders", "worst")
    assert code == 2
    assert "margin reports only" in err


def test_domain_count_too_large_exits_2(capsys):
    code, _, err = run_cli(capsys, "levels", "--domains", "31")
    assert code == 2
    assert "30" in err


def test_missing_config_exits_3(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "margin", "--domains", "4", "--config", str(tmp_path / "nope.cfg")
    )
    assert code == 3
    assert "cannot read config" in err


def test_broken_config_exits_3(capsys, tmp_path):
    config = tmp_path / "dup.cfg"
    config.write_text("r_minus_80 = 1911\nr_minus_80 = 1900\n")
    code, _, err = run_cli(capsys, "margin", "--domains", "4", "--config", str(config))
    assert code == 3
    assert "r_minus_80" in err


def test_variation_usage_errors(capsys):
    cases = [
        ("variation", "--domains", "4", "--offset-nm", "13"),
        ("variation", "--domains", "13", "--offset-nm", "5"),
        ("variation", "--domains", "4", "--offset-nm", "5", "--format", "csv"),
        ("variation", "--domains", "4", "--offset-nm", "5", "--seed", "3"),
        ("variation", "--domains", "4", "--monte-carlo", "10"),
        ("variation", "--domains", "4", "--monte-carlo", "10", "--seed", "-1"),
        ("variation", "--domains", "4", "--monte-carlo", "10", "--seed", "2", "--workers", "0"),
    ]
    for argv in cases:
        code, _, err = run_cli(capsys, *argv)
        assert code == 2, (argv, err)
        assert err.startswith("error:")


def test_version_flag(capsys):
    code, out, _ = run_cli(capsys, "--version")
    assert code == 0
    assert out == "mdmtj 0.1.0\n"


def test_no_arguments_is_a_usage_error(capsys):
    assert run_cli(capsys)[0] == 2


def test_conflicting_margin_modes(capsys):
    code, _, _ = run_cli(
        capsys, "margin", "--domains", "5", "--closed-form", "--borders", "same,same"
    )
    assert code == 2
