"""Command line surface: flag plumbing, config files, exit codes."""

import pytest

import coopd2d.cli as cli
from coopd2d.cli import build_parser, main


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[1].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[2:]]
    return lines[0], header, rows


def test_parser_accepts_the_documented_flags():
    args = build_parser().parse_args(
        ["simulate", "--strategy", "tdma", "--trials", "5", "--eta", "0.3",
         "--seed", "7", "--beta", "0.9", "--mu", "2e6", "--out", "x.csv"]
    )
    assert args.command == "simulate"
    assert args.strategy == "tdma"
    assert args.trials == 5
    assert args.eta == 0.3
    assert args.mu == 2e6


def test_strategy_flag_is_simulate_only():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["optimize-cluster", "--strategy", "tdma"])


def test_missing_subcommand_exits():
    with pytest.raises(SystemExit):
        main([])


def test_optimize_cluster_end_to_end(tmp_path, capsys):
    out = tmp_path / "profile.csv"
    assert main(["optimize-cluster", "--beta", "0.8", "--out", str(out)]) == 0
    assert "wrote %s" % out in capsys.readouterr().out
    schema, _, rows = read_csv(out)
    assert schema == "# schema=coopd2d.cluster_profile.v1"
    assert len(rows) == 15
    assert {r["k_star"] for r in rows} == {"8"}


def test_config_file_with_flag_overrides(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(
        "trials: 5\n"
        "population_trials: 2000\n"
        "strategy: tdma\n"
        "out: %s\n" % (tmp_path / "ignored.csv")
    )
    out = tmp_path / "trials.csv"
    code = main(
        ["simulate", "--config", str(cfg), "--trials", "8", "--out", str(out)]
    )
    assert code == 0
    assert not (tmp_path / "ignored.csv").exists()  # flag wins over config
    _, _, rows = read_csv(out)
    assert len(rows) == 8
    assert {r["strategy"] for r in rows} == {"tdma"}
    assert {r["eta"] for r in rows} == {"0.0"}


def test_simulate_eta_flag(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("population_trials: 2000\n")
    out = tmp_path / "trials.csv"
    code = main(
        ["simulate", "--config", str(cfg), "--trials", "4", "--eta", "0.7",
         "--out", str(out)]
    )
    assert code == 0
    _, _, rows = read_csv(out)
    assert {r["eta"] for r in rows} == {"0.7"}


def test_beta_and_mu_flags_reach_the_sweep(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("population_trials: 20000\n")
    out = tmp_path / "split.csv"
    code = main(
        ["optimize-bandwidth", "--config", str(cfg), "--beta", "0.9",
         "--mu", "2000000", "--out", str(out)]
    )
    assert code == 0
    _, _, rows = read_csv(out)
    assert len(rows) == 1
    assert rows[0]["beta"] == "0.9"
    assert rows[0]["mu_bps"] == "2000000.0"
    assert rows[0]["feasible"] == "true"


def test_bad_catalog_size_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("n_files: 301\n")
    assert main(["optimize-cluster", "--config", str(cfg)]) == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("warp_factor: 9\n")
    assert main(["simulate", "--config", str(cfg)]) == 2


def test_missing_config_file_exits_2(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.yaml")]) == 2


def test_malformed_yaml_exits_2(tmp_path):
    cfg = tmp_path / "broken.yaml"
    cfg.write_text("trials: [5, 6\n")
    assert main(["simulate", "--config", str(cfg)]) == 2


def test_non_mapping_yaml_exits_2(tmp_path):
    cfg = tmp_path / "list.yaml"
    cfg.write_text("- 1\n- 2\n")
    assert main(["simulate", "--config", str(cfg)]) == 2


def test_divergent_geometry_exits_2(tmp_path, capsys):
    # a zero pairing floor makes the truncated moments diverge at the
    # reference path-loss exponent
    cfg = tmp_path / "run.yaml"
    cfg.write_text("min_pairing_distance_m: 0.0\npopulation_trials: 2000\n")
    assert main(["optimize-bandwidth", "--config", str(cfg)]) == 2
    assert "error:" in capsys.readouterr().err


def test_validate_exit_code_mapping(monkeypatch):
    seen = []

    def fake_validate(spec):
        seen.append(spec.scenario)
        return fake_validate.verdict

    fake_validate.verdict = True
    monkeypatch.setattr(cli, "cmd_validate", fake_validate)
    assert main(["validate"]) == 0
    fake_validate.verdict = False
    assert main(["validate"]) == 1
    assert seen == ["validate", "validate"]
