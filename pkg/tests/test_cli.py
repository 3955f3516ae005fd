import json

import numpy as np
import pytest

from alaam.cli import main, parse_config_file


@pytest.fixture
def workdir(tmp_path):
    edges = tmp_path / "toy.edges"
    # 12-node undirected graph with a mix of degrees
    rng = np.random.Generator(np.random.PCG64(5))
    lines = {f"{u} {u + 1}" for u in range(11)}  # spine covers every node id
    for u in range(12):
        for v in range(u + 2, 12):
            if rng.random() < 0.25:
                lines.add(f"{u} {v}")
    edges.write_text("\n".join(sorted(lines)) + "\n")
    attrs = tmp_path / "toy.attrs"
    y = (rng.random(12) < 0.5).astype(int)
    y[0], y[1] = 1, 0  # keep both groups non-empty
    attrs.write_text("male\n" + "\n".join(str(v) for v in y) + "\n")
    return tmp_path, edges, attrs


def run(argv):
    return main([str(a) for a in argv])


def test_stats_writes_report_and_manifest(workdir, capsys):
    tmp, edges, attrs = workdir
    out = tmp / "out_stats"
    code = run(["stats", "--graph", edges, "--attrs", attrs,
                "--attr-types", "male:binary", "--outcome", "male", "--out", out])
    assert code == 0
    text = capsys.readouterr().out
    assert "mean_degree" in text and "percent_ones" in text
    assert (out / "graph_report.csv").exists()
    assert (out / "outcome_report.csv").exists()
    assert (out / "idmap.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "stats"
    assert str(edges) in manifest["inputs"]


def test_unknown_effect_is_usage_error(workdir, capsys):
    tmp, edges, _ = workdir
    code = run(["simulate", "--graph", edges, "--effects", "Density,Bogus",
                "--samples", 2, "--burn-in", 10, "--interval", 5,
                "--initial", "random:0.5"])
    assert code == 1
    assert "valid kinds" in capsys.readouterr().err


def test_missing_graph_is_io_error(tmp_path, capsys):
    code = run(["stats", "--graph", tmp_path / "nope.edges"])
    assert code == 3


def test_estimate_sa_boundary_exits_2(workdir, capsys):
    tmp, edges, _ = workdir
    attrs = tmp / "ones.attrs"
    attrs.write_text("male\n" + "\n".join("1" for _ in range(12)) + "\n")
    code = run(["estimate-sa", "--graph", edges, "--attrs", attrs,
                "--attr-types", "male:binary", "--outcome", "male",
                "--effects", "Density"])
    assert code == 2
    assert "does not exist" in capsys.readouterr().err


def test_simulate_rerun_from_manifest_bit_identical(workdir):
    tmp, edges, attrs = workdir
    out1, out2 = tmp / "o1", tmp / "o2"
    base = ["simulate", "--graph", edges, "--attrs", attrs,
            "--attr-types", "male:binary", "--outcome", "male",
            "--effects", "Density,Contagion", "--theta=-0.5,0.3",
            "--burn-in", 500, "--interval", 60, "--samples", 8,
            "--seed", 9, "--out", out1]
    assert run(base) == 0
    assert run(["simulate", "--manifest", out1 / "manifest.json", "--out", out2]) == 0
    assert (out1 / "batch.csv").read_text() == (out2 / "batch.csv").read_text()


def test_manifest_detects_input_drift(workdir):
    tmp, edges, attrs = workdir
    out1 = tmp / "d1"
    assert run(["simulate", "--graph", edges, "--effects", "Density",
                "--burn-in", 100, "--interval", 10, "--samples", 3,
                "--initial", "random:0.5", "--out", out1]) == 0
    edges.write_text(edges.read_text() + "0 11\n")
    code = run(["simulate", "--manifest", out1 / "manifest.json",
                "--out", tmp / "d2"])
    assert code == 3
    assert run(["simulate", "--manifest", out1 / "manifest.json",
                "--force", "--out", tmp / "d3"]) == 0


def test_enumerate_outputs(workdir):
    tmp, edges, _ = workdir
    out = tmp / "enum"
    assert run(["enumerate", "--graph", edges, "--effects", "Density,Contagion",
                "--theta", "0.2,0.1", "--out", out]) == 0
    data = json.loads((out / "enumerate.json").read_text())
    assert set(data) == {"log_kappa", "effects", "expected_z", "cov_z"}
    assert (out / "expected.csv").read_text().startswith("effect,expected")
    assert (out / "cov.csv").exists()


def test_sweep_csvs(workdir):
    tmp, edges, attrs = workdir
    out = tmp / "sw"
    assert run(["sweep", "--graph", edges, "--attrs", attrs,
                "--attr-types", "male:binary", "--outcome", "male",
                "--effects", "Density,Contagion", "--vary", "Contagion",
                "--lo", 0.0, "--hi", 0.4, "--step", 0.2,
                "--burn-in", 200, "--interval", 30, "--samples", 4,
                "--out", out]) == 0
    lines = (out / "sweep_samples.csv").read_text().splitlines()
    assert lines[0] == "theta,sample,Density,Contagion,mean_degree_y1"
    assert len(lines) == 1 + 3 * 4
    assert (out / "sweep_summary.csv").exists()


def test_sweep_rerun_from_manifest_bit_identical(workdir):
    tmp, edges, attrs = workdir
    out1, out2 = tmp / "sw1", tmp / "sw2"
    base = ["sweep", "--graph", edges, "--attrs", attrs,
            "--attr-types", "male:binary", "--outcome", "male",
            "--effects", "Density,Contagion", "--vary", "Contagion",
            "--lo", 0.0, "--hi", 0.3, "--step", 0.1,
            "--burn-in", 200, "--interval", 20, "--samples", 5,
            "--seed", 6, "--threads", 2, "--out", out1]
    assert run(base) == 0
    assert run(["sweep", "--manifest", out1 / "manifest.json", "--out", out2]) == 0
    for name in ("sweep_samples.csv", "sweep_summary.csv"):
        assert (out1 / name).read_text() == (out2 / name).read_text()


def test_gof_and_degen_check(workdir):
    tmp, edges, attrs = workdir
    out = tmp / "gof"
    assert run(["gof", "--graph", edges, "--attrs", attrs,
                "--attr-types", "male:binary", "--outcome", "male",
                "--effects", "Density", "--theta", "0.0",
                "--burn-in", 300, "--interval", 30, "--samples", 60,
                "--out", out]) == 0
    header = (out / "gof.csv").read_text().splitlines()[0]
    assert header == "effect,observed,sim_mean,sim_sd,t_ratio,adequate,degenerate"
    out2 = tmp / "degen"
    code = run(["degen-check", "--graph", edges, "--attrs", attrs,
                "--attr-types", "male:binary", "--outcome", "male",
                "--effects", "Density", "--theta", "0.0",
                "--burn-in", 300, "--interval", 30, "--samples", 80,
                "--out", out2])
    assert code in (0, 2)
    assert (out2 / "degen_summary.csv").exists()
    assert (out2 / "degen_trace.csv").exists()


def test_config_file_and_flag_override(workdir):
    tmp, edges, attrs = workdir
    cfg = tmp / "run.cfg"
    cfg.write_text(
        f"graph = {edges}\n"
        f"attrs = {attrs}\n"
        "attr_types = male:binary\n"
        "outcome = male\n"
        "burn_in = 100\ninterval = 20\nsamples = 5\nseed = 4\n"
        "effect Density theta=-0.3\n"
        "effect Contagion theta=0.1\n")
    out1, out2 = tmp / "c1", tmp / "c2"
    assert run(["simulate", "--config", cfg, "--out", out1]) == 0
    lines = (out1 / "batch.csv").read_text().splitlines()
    assert lines[0].startswith("sample,Density,Contagion")
    assert len(lines) == 6
    # flags override config
    assert run(["simulate", "--config", cfg, "--samples", 2, "--out", out2]) == 0
    assert len((out2 / "batch.csv").read_text().splitlines()) == 3


def test_config_parser_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("effect\n")
    with pytest.raises(Exception):
        parse_config_file(bad)
