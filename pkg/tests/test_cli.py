import json

import pytest

from mbmsim.cli import main


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "0 failure(s)" in out


def test_bound_subcommand(capsys):
    rc = main(["bound", "--n-tu", "1", "--n-rf", "1", "--m-rf", "2",
               "--n-r", "2", "--M", "2", "--alphabet", "psk",
               "--snr-db", "0", "10", "20"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    vals = [float(line.split("union_bound=")[1]) for line in lines]
    assert vals[0] > vals[1] > vals[2] > 0


def test_ber_and_diversity_round_trip(tmp_path, capsys):
    config = {
        "scheme": "sm-mbm",
        "system": {"n_tu": 2, "n_rf": 1, "m_rf": 1, "n_r": 2, "M": 2, "alphabet": "psk"},
        "snr_db": [0.0, 5.0, 10.0, 15.0, 20.0],
        "stop": {"min_bit_errors": 100, "max_trials": 30000},
        "master_seed": 3,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    csv_path = tmp_path / "out.csv"
    assert main(["ber", str(cfg_path), "-o", str(csv_path), "-w", "2"]) == 0
    assert csv_path.exists()
    capsys.readouterr()
    assert main(["diversity", str(csv_path), "--window", "5", "20"]) == 0
    out = capsys.readouterr().out
    assert "diversity=" in out


def test_dmin_subcommand(capsys):
    rc = main(["dmin", "--n-tu", "1", "--n-rf", "1", "--m-rf", "1",
               "--M-rf", "2", "--seeds", "20"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "seed,dmin_full,dmin_mi,dmin_ed"
    assert len(lines) == 21
    for line in lines[1:]:
        _, d_full, d_mi, d_ed = line.split(",")
        assert float(d_full) <= float(d_mi) + 1e-12 <= float(d_ed) + 2e-12
