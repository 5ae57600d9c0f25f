import json

import numpy as np
import pytest

import ppwave as pw
from ppwave.cli import _experiment_config, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    assert code == 0
    return capsys.readouterr().out


def simulate_files(tmp_path, capsys, dataset="Data_80", T="2", seed="7"):
    pfile = str(tmp_path / "p.txt")
    cfile = str(tmp_path / "c.txt")
    run_cli(
        capsys,
        "simulate",
        "--dataset",
        dataset,
        "--T",
        T,
        "--seed",
        seed,
        "--out-parents",
        pfile,
        "--out-children",
        cfile,
    )
    return pfile, cfile


def test_simulate_writes_event_files(tmp_path, capsys):
    pfile, cfile = simulate_files(tmp_path, capsys)
    parents = pw.read_events(pfile)
    children = pw.read_events(cfile)
    assert parents.window == pw.Window(0.0, 2.0)
    assert children.window == pw.Window(-1.0, 3.0)
    ref_p, ref_c = pw.make_dataset(pw.DatasetId("Data_80"), 2.0, pw.RngSeed(7))
    assert np.array_equal(parents.times, ref_p.times)
    assert np.array_equal(children.times, ref_c.times)


def test_wavelet_test_output(tmp_path, capsys):
    pfile, cfile = simulate_files(tmp_path, capsys)
    out = run_cli(
        capsys,
        "test",
        "--parents",
        pfile,
        "--children",
        cfile,
        "--B",
        "600",
        "--seed",
        "3",
    )
    lines = out.strip().split("\n")
    assert lines[0] == "decision: reject"  # Data_80 at T=2 is a strong signal
    assert lines[1].startswith("u_alpha: ")
    assert lines[2] == (
        "j,k,beta_hat,t_stat,threshold,reject,"
        "position_original_time,range_original_time"
    )
    assert len(lines) == 3 + 30
    first = lines[3].split(",")
    assert first[0] == "0" and first[1] == "-1"


def test_coeffs_only_output(tmp_path, capsys):
    pfile, cfile = simulate_files(tmp_path, capsys)
    out = run_cli(
        capsys, "test", "--parents", pfile, "--children", cfile, "--coeffs-only"
    )
    lines = out.strip().split("\n")
    assert lines[0] == "j,k,beta_hat,t_stat"
    assert len(lines) == 1 + 30
    # beta_hat for (0, 0) should be close to -0.8 on this dataset
    row = [l for l in lines[1:] if l.startswith("0,0,")][0]
    assert float(row.split(",")[2]) < -0.4


def test_ks_and_gaue_methods(tmp_path, capsys):
    pfile, cfile = simulate_files(tmp_path, capsys, dataset="Data_0")
    out = run_cli(
        capsys, "test", "--method", "ks", "--parents", pfile, "--children", cfile
    )
    assert "d_stat:" in out and "p_value:" in out and "decision:" in out

    out = run_cli(
        capsys,
        "test",
        "--method",
        "gaue",
        "--delta",
        "0.01",
        "--parents",
        pfile,
        "--children",
        cfile,
    )
    lines = out.strip().split("\n")
    assert lines[0] == "delta,x_t,m0_hat,sigma_hat,reject"
    assert len(lines) == 3  # header, one delta row, decision

    out = run_cli(
        capsys,
        "test",
        "--method",
        "gaue",
        "--delta-grid",
        "--parents",
        pfile,
        "--children",
        cfile,
    )
    assert len(out.strip().split("\n")) == 42


def test_level_command_with_config_and_out(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(
        json.dumps(
            {
                "R": 6,
                "B": 100,
                "T": 1.0,
                "master_seed": 5,
                "workers": 1,
                "methods": ["wavelet", "ks"],
            }
        )
    )
    out_path = str(tmp_path / "level.csv")
    out = run_cli(capsys, "level", "--config", str(cfg_path), "--out", out_path)
    assert out.startswith("dataset,method,delta_summary,rate,ci_halfwidth,R")
    written = open(out_path).read()
    assert written == out
    sidecar = json.loads(open(str(tmp_path / "level.json")).read())
    assert sidecar["config"]["B"] == 100


def test_power_command_flags(tmp_path, capsys):
    out = run_cli(
        capsys,
        "power",
        "--datasets",
        "Data_80",
        "--methods",
        "wavelet",
        "--R",
        "5",
        "--B",
        "100",
        "--T",
        "1",
        "--seed",
        "9",
        "--workers",
        "1",
    )
    lines = out.strip().split("\n")
    assert len(lines) == 2
    assert lines[1].startswith("Data_80,wavelet,")


def test_paper_scale_preset_plumbing():
    class Args:
        config = None
        R = None
        B = None
        j0 = None
        side = None
        T = None
        alpha = None
        seed = None
        datasets = None
        methods = None
        workers = None
        paper_scale = True
        out = None

    level_cfg = _experiment_config(Args(), "level")
    assert level_cfg.R == 5000 and level_cfg.B == 20000
    power_cfg = _experiment_config(Args(), "power")
    assert power_cfg.R == 1000 and power_cfg.B == 20000
    assert power_cfg.datasets == pw.POWER_DATASETS

    Args.paper_scale = False
    Args.R = 77
    assert _experiment_config(Args(), "level").R == 77
