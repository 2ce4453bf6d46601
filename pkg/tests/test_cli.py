import numpy as np
import pytest

from hankelsq.cli import main
from hankelsq.errors import ConfigError
from hankelsq.experiments import (list_experiments, load_config_file,
                                  make_config)


def test_list_shows_catalog(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    names = [line.split()[0] for line in out.strip().splitlines()]
    assert len(names) == 13
    for expected in ("plancherel", "gfunc-identity", "cz-properties",
                     "endpoint-sharpness", "kernel-bounds"):
        assert expected in names


def test_grid_info(capsys):
    assert main(["grid-info", "--d", "3", "--n", "512"]) == 0
    out = capsys.readouterr().out
    assert "nodes      = 512" in out
    assert "exact mass" in out


def test_unknown_experiment_is_config_error(capsys):
    assert main(["run", "no-such-experiment"]) == 2
    assert "config error" in capsys.readouterr().err


def test_unknown_parameter_is_config_error(capsys):
    assert main(["run", "plancherel", "--set", "bogus_key=1"]) == 2
    assert "config error" in capsys.readouterr().err


def test_endpoint_exponent_validation():
    # the endpoint experiment requires p > 2d/(d-1)
    with pytest.raises(ConfigError):
        make_config("endpoint-sharpness", {"p": "2.0"})


def test_config_file_round_trip(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment line\nd_list = 2\nslope_tol = 0.05\n")
    loaded = load_config_file(str(cfg_file))
    cfg = make_config("gradient-condition", loaded)
    assert cfg.params["d_list"] == (2.0,)
    assert cfg.params["slope_tol"] == 0.05


def test_run_writes_csv_report(tmp_path, capsys):
    rc = main(["run", "gradient-condition", "--set", "d_list=2",
               "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "0 failed" in out
    csvs = list(tmp_path.glob("*.csv"))
    assert len(csvs) == 1
    text = csvs[0].read_text()
    lines = text.splitlines()
    assert lines[0].startswith("# experiment: gradient-condition")
    header = next(l for l in lines if not l.startswith("#"))
    assert header.split(",")[-1] == "verdict"
    data = [l for l in lines if not l.startswith("#")][1:]
    assert all(row.endswith(",pass") for row in data)


def test_run_is_deterministic_up_to_timestamp(tmp_path, capsys):
    def one(sub):
        out = tmp_path / sub
        assert main(["run", "gradient-condition", "--set", "d_list=2",
                     "--out", str(out)]) == 0
        csv = next(out.glob("*.csv"))
        return [l for l in csv.read_text().splitlines()
                if not l.startswith("# timestamp:")
                and not l.startswith("# runtime_s:")]

    assert one("a") == one("b")
    capsys.readouterr()
