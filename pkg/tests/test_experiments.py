"""Experiment orchestration: specs, sweeps, CSV emission, self-validation."""

import math

import numpy as np
import pytest
from pytest import approx

from coopd2d import (
    ExperimentSpec,
    analytic_point,
    grid_search_eta,
    sim_feasible_cluster_sizes,
    spec_from_mapping,
)
from coopd2d.errors import ConfigurationError
from coopd2d.experiments import (
    cmd_compare,
    cmd_optimize_bandwidth,
    cmd_optimize_cluster,
    cmd_simulate,
    cmd_validate,
    write_csv,
)

import oracles


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[1].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[2:]]
    return lines[0], header, rows


def test_spec_defaults_describe_the_reference_scenario():
    spec = ExperimentSpec(scenario="simulate")
    assert spec.n_users == 135
    assert spec.n_clusters * spec.users_per_cluster == 135
    assert spec.beta == 1.0
    assert spec.mu_bps == 1e6


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        ExperimentSpec(scenario="teleport")
    with pytest.raises(ConfigurationError):
        ExperimentSpec(scenario="simulate", sweep_name="bogus", sweep_values=(1,))
    with pytest.raises(ConfigurationError):
        ExperimentSpec(scenario="simulate", sweep_name="beta")  # empty values
    with pytest.raises(ConfigurationError):
        ExperimentSpec(scenario="simulate", n_users=100)


def test_spec_from_mapping():
    spec = spec_from_mapping(
        "bandwidth-sweep",
        {"beta": 0.8, "sweep": {"name": "mu_bps", "values": [1e6, 2e6]}},
    )
    assert spec.beta == 0.8
    assert spec.sweep_name == "mu_bps"
    assert spec.sweep_values == (1e6, 2e6)
    with pytest.raises(ConfigurationError):
        spec_from_mapping("simulate", {"warp_factor": 9})
    with pytest.raises(ConfigurationError):
        spec_from_mapping("simulate", {"sweep": {"axis": "beta"}})


def test_analytic_point_reference_frozen():
    pt = analytic_point(ExperimentSpec(scenario="bandwidth-sweep"))
    assert pt.pc == approx(0.9999787380676235, rel=1e-12)
    assert pt.rate_coop == approx(15.288348744652652, rel=1e-12)
    assert pt.rate_noncoop == approx(2.4065033112793515, rel=1e-12)
    assert pt.nc_bar == approx(80.54069, rel=1e-12)
    assert pt.nn_bar == approx(54.45931, rel=1e-12)
    assert pt.nb_bar == 0.0
    assert pt.solution.eta_star == approx(0.8742774544276946, rel=1e-12)
    assert pt.nc_bar + pt.nn_bar + pt.nb_bar == approx(135.0, abs=1e-9)


def test_analytic_point_population_cache_reused():
    cache = {}
    spec = ExperimentSpec(scenario="bandwidth-sweep", population_trials=5_000)
    a = analytic_point(spec, mu=1e6, _pop_cache=cache)
    b = analytic_point(spec, mu=3e6, _pop_cache=cache)
    assert len(cache) == 1
    assert a.nc_bar == b.nc_bar  # same population estimate, different split
    assert a.solution.eta_star != b.solution.eta_star


def test_grid_search_eta_against_oracle():
    args = (0.9999787380676235, 15.288348744652652, 2.4065033112793515, 20e6, 9, 80.54069, 54.45931)
    for mu in (0.0, 1e6, 3e6):
        lib = grid_search_eta(*args, mu)
        ref = oracles.grid_best_eta(*args, mu)
        # the two grids are built with different numpy idioms, so allow one
        # grid spacing of disagreement
        assert lib == approx(ref, abs=1.1e-5)
    assert math.isnan(grid_search_eta(*args, 1e9))


def test_grid_search_breaks_ties_toward_largest_eta():
    # rc == rn: the objective is flat, every point feasible at mu = 0
    assert grid_search_eta(0.5, 2.0, 2.0, 1e6, 9, 10.0, 10.0, 0.0) == 1.0


def test_sim_feasible_cluster_sizes():
    assert sim_feasible_cluster_sizes(135, 15) == [(15, 9)]
    assert sim_feasible_cluster_sizes(64, 15) == [(4, 16), (1, 64)]
    assert sim_feasible_cluster_sizes(7, 15) == [(7, 1)]


def test_write_csv_deterministic_bytes(tmp_path):
    path = tmp_path / "table.csv"
    rows = [(1, 0.5, True, "label"), (2, 1.0 / 3.0, False, "x")]
    write_csv(path, "unit_test", ["a", "b", "c", "d"], rows)
    first = path.read_bytes()
    write_csv(path, "unit_test", ["a", "b", "c", "d"], rows)
    assert path.read_bytes() == first
    text = first.decode()
    assert text.startswith("# schema=coopd2d.unit_test.v1\n")
    assert "0.3333333333333333" in text  # full-precision float repr
    assert ",true," in text and ",false," in text


def test_cmd_optimize_cluster_sweep(tmp_path):
    out = tmp_path / "profile.csv"
    spec = ExperimentSpec(
        scenario="cluster-sweep",
        sweep_name="beta",
        sweep_values=(0.6, 1.0),
        out=str(out),
    )
    assert cmd_optimize_cluster(spec) == str(out)
    schema, header, rows = read_csv(out)
    assert schema == "# schema=coopd2d.cluster_profile.v1"
    assert header == ["beta", "n_users", "users_per_cluster", "objective_links", "k_star"]
    assert len(rows) == 2 * 15  # full profile per beta
    for beta, k_star in (("0.6", "12"), ("1.0", "6")):
        block = [r for r in rows if r["beta"] == beta]
        assert {r["k_star"] for r in block} == {k_star}
        best = max(block, key=lambda r: float(r["objective_links"]))
        assert best["users_per_cluster"] == k_star


def test_cmd_optimize_cluster_single_point(tmp_path):
    out = tmp_path / "single.csv"
    spec = ExperimentSpec(
        scenario="cluster-sweep",
        sweep_name="n_users",
        sweep_values=(15,),
        out=str(out),
    )
    cmd_optimize_cluster(spec)
    _, _, rows = read_csv(out)
    assert len(rows) == 15
    assert all(r["n_users"] == "15" for r in rows)


def test_cmd_optimize_bandwidth_mu_sweep(tmp_path):
    out = tmp_path / "split.csv"
    spec = ExperimentSpec(
        scenario="bandwidth-sweep",
        sweep_name="mu_bps",
        sweep_values=(0.0, 1e6, 2e6, 4e6),
        population_trials=20_000,
        out=str(out),
    )
    cmd_optimize_bandwidth(spec)
    _, _, rows = read_csv(out)
    assert len(rows) == 4
    assert rows[0]["eta_star"] == "1.0"  # no floor: whole band cooperative
    stars = [float(r["eta_star"]) for r in rows if r["feasible"] == "true"]
    assert stars == sorted(stars, reverse=True)  # tighter floors shrink eta
    for r in rows:
        if r["feasible"] == "true":
            assert abs(float(r["eta_star"]) - float(r["eta_star_grid"])) <= 1e-4
        else:
            assert r["eta_star"] == "nan"


def test_cmd_optimize_bandwidth_beta_sweep(tmp_path):
    out = tmp_path / "split_beta.csv"
    spec = ExperimentSpec(
        scenario="bandwidth-sweep",
        sweep_name="beta",
        sweep_values=(0.0, 0.4, 0.8, 1.2),
        population_trials=20_000,
        out=str(out),
    )
    cmd_optimize_bandwidth(spec)
    _, _, rows = read_csv(out)
    # stronger skew concentrates users on the cooperative class, which earns
    # the larger share
    stars = [float(r["eta_star"]) for r in rows]
    assert all(r["feasible"] == "true" for r in rows)
    assert np.all(np.diff(stars) >= 0.0), stars
    pcs = [float(r["pc"]) for r in rows]
    assert np.all(np.diff(pcs) > 0.0)


def test_cmd_optimize_bandwidth_rerun_is_byte_identical(tmp_path):
    out = tmp_path / "rerun.csv"
    spec = ExperimentSpec(
        scenario="bandwidth-sweep", population_trials=10_000, out=str(out)
    )
    cmd_optimize_bandwidth(spec)
    first = out.read_bytes()
    cmd_optimize_bandwidth(spec)
    assert out.read_bytes() == first


def test_cmd_simulate_emits_per_trial_rows(tmp_path):
    out = tmp_path / "trials.csv"
    spec = ExperimentSpec(
        scenario="simulate", trials=40, population_trials=5_000, out=str(out)
    )
    cmd_simulate(spec)
    schema, header, rows = read_csv(out)
    assert schema == "# schema=coopd2d.campaign_trials.v1"
    assert len(rows) == 40
    assert [r["trial"] for r in rows] == [str(t) for t in range(40)]
    assert {r["strategy"] for r in rows} == {"coop"}
    assert {r["K"] for r in rows} == {"15"}
    assert {r["B"] for r in rows} == {"9"}
    # the optimized split was applied (its exact value wanders a little with
    # the reduced population sample, so only bracket it)
    assert 0.85 <= float(rows[0]["eta"]) <= 0.90
    for r in rows:
        total = int(r["n_coop"]) + int(r["n_noncoop"]) + int(r["n_cellular"])
        assert total == 135


def test_cmd_simulate_fixed_eta_and_strategy(tmp_path):
    out = tmp_path / "nocoop.csv"
    spec = ExperimentSpec(
        scenario="simulate",
        strategy="nocoop",
        trials=10,
        population_trials=5_000,
        out=str(out),
    )
    cmd_simulate(spec)
    _, _, rows = read_csv(out)
    assert {r["eta"] for r in rows} == {"0.0"}


def test_cmd_compare_smoke(tmp_path):
    out = tmp_path / "compare.csv"
    spec = ExperimentSpec(
        scenario="throughput-compare",
        trials=10,
        population_trials=5_000,
        out=str(out),
    )
    cmd_compare(spec)
    schema, header, rows = read_csv(out)
    assert schema == "# schema=coopd2d.strategy_compare.v1"
    assert [r["strategy"] for r in rows] == [
        "optimized", "eta0.5", "etaK", "nocoop", "tdma",
    ]
    # the reference population admits a single grid-feasible factorization,
    # so every strategy runs 15-user clusters here
    assert {r["users_per_cluster"] for r in rows} == {"15"}
    for r in rows:
        assert float(r["throughput_mean_bps"]) > 0.0


def test_cmd_validate_default_passes():
    lines = []
    spec = ExperimentSpec(scenario="validate", population_trials=100_000)
    assert cmd_validate(spec, report=lines.append) is True
    assert lines[-1] == "validation passed (13 gated checks)"
    assert sum(line.startswith("PASS ") for line in lines) == 13
    assert not any(line.startswith("FAIL ") for line in lines)
    assert any(line.startswith("PASS popularity-normalization") for line in lines)
    assert any(line.startswith("INFO link-rate-gap") for line in lines)
