import re
from pathlib import Path

import numpy as np
import pytest

from hydrosense import io
from hydrosense.cli import main
from hydrosense.scene import SETUP1, los_aoa

SMALL = """
[geometry]
preset = setup1
[sampling]
k = 32
l = 32
n = 120
[errors]
enabled = true
gains = 1.0, 1.2, 0.8, 1.1
phases_deg = 0, 10, -20, 5
rco_deg = 30
[spectrum]
theta_step = 0.5
f_points = 101
[study]
d_step = 100
"""

DIAG = re.compile(r'^hydrosense error kind=(\w+) code=(\d+) msg=".*"$')


@pytest.fixture
def cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL)
    return p


def diag(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1, err
    m = DIAG.match(err[0])
    assert m, err[0]
    return m.group(1), int(m.group(2))


def test_simulate_deterministic(tmp_path, cfg):
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    assert main(["simulate", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path / "c")]) == 0
    for name in ("capture.csiw", "truth.csv", "snapshot.npy"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a/capture.csiw").read_bytes() != (tmp_path / "c/capture.csiw").read_bytes()
    hdr = io.read_header(tmp_path / "a/capture.csiw")
    assert (hdr.k, hdr.l, hdr.m, hdr.n) == (32, 32, 4, 120)


def test_thread_count_does_not_change_output(tmp_path, cfg, monkeypatch):
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")])
    monkeypatch.setenv("HYDROSENSE_THREADS", "3")
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "b")])
    assert (tmp_path / "a/capture.csiw").read_bytes() == (tmp_path / "b/capture.csiw").read_bytes()


def test_bad_thread_env(tmp_path, cfg, monkeypatch, capsys):
    monkeypatch.setenv("HYDROSENSE_THREADS", "0")
    assert main(["study-aoa", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 3
    assert diag(capsys) == ("config", 3)


def test_full_chain(tmp_path, cfg):
    out = tmp_path
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    assert main(["calibrate", "--snapshot", str(out / "snapshot.npy"), "--pilot-aoa", str(los_aoa(SETUP1)),
                 "--config", str(cfg), "--out", str(out / "cal.json")]) == 0
    args = ["sense", str(out / "capture.csiw"), "--config", str(cfg), "--calibration", str(out / "cal.json")]
    assert main([*args, "--out", str(out / "l1.csv"), "--emit-spectrum", str(out / "s.csv")]) == 0
    assert main([*args, "--out", str(out / "l2.csv")]) == 0
    assert (out / "l1.csv").read_bytes() == (out / "l2.csv").read_bytes()

    truth = io.read_truth_csv(out / "truth.csv")
    level = io.read_level_csv(out / "l1.csv")
    err = level["delta_w_m"] - (truth["water_m"] - truth["water_m"][0])
    assert np.mean(np.abs(err)) < 0.05

    grid = io.read_spectrum_csv(out / "s.csv")
    assert grid.theta_axis[1] - grid.theta_axis[0] == pytest.approx(0.5)
    assert len(grid.f_axis) == 101 and grid.f_axis[-1] == pytest.approx(1 / 180)


def test_calibrate_identity_snapshot(tmp_path):
    from hydrosense.arrays import ArrayConfig
    from hydrosense.csisim import synth_snapshot
    io.save_snapshot(tmp_path / "s.npy", synth_snapshot(ArrayConfig(4), [10.0], 10_000, 30.0))
    assert main(["calibrate", "--snapshot", str(tmp_path / "s.npy"), "--pilot-aoa", "10",
                 "--out", str(tmp_path / "c.json")]) == 0
    model = io.read_calibration(tmp_path / "c.json")
    assert np.allclose(model.vector, 1.0, atol=0.02)


def test_missing_pilot_aoa_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["calibrate", "--snapshot", str(tmp_path / "s.npy")])
    assert info.value.code == 2


def test_corrupted_magic(tmp_path, cfg, capsys):
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    path = tmp_path / "capture.csiw"
    path.write_bytes(b"JUNK" + path.read_bytes()[4:])
    assert main(["sense", str(path), "--config", str(cfg), "--out", str(tmp_path / "l.csv")]) == 4
    assert diag(capsys) == ("format", 4)


def test_zero_captures_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[geometry]\npreset = setup1\n[sampling]\nn = 0\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 3
    kind, code = diag(capsys)
    assert (kind, code) == ("config", 3)
    assert not (tmp_path / "capture.csiw").exists()


def test_missing_file_is_io_error(tmp_path, cfg, capsys):
    assert main(["sense", str(tmp_path / "nope.csiw"), "--config", str(cfg)]) == 10
    assert diag(capsys)[0] == "io"


def test_study_aoa(tmp_path, cfg):
    assert main(["study-aoa", "--config", str(cfg), "--out", str(tmp_path / "curve.csv")]) == 0
    rows = np.genfromtxt(tmp_path / "curve.csv", delimiter=",", names=True)
    assert rows["d_tr_m"][0] == 100 and rows["d_tr_m"][-1] == 1000
    assert np.all(np.diff(rows["delta_aoa_deg"]) <= 0)


@pytest.mark.parametrize("extra, check", [
    ("delta_w = 0\n", lambda r: np.all(r["delta_aoa_deg"] == 0)),
    ("d_min = 423\nd_max = 423\n", lambda r: r.size == 1),
])
def test_study_aoa_edge_cases(tmp_path, extra, check):
    p = tmp_path / "c.cfg"
    p.write_text("[geometry]\npreset = setup1\n[study]\n" + extra)
    assert main(["study-aoa", "--config", str(p), "--out", str(tmp_path / "curve.csv")]) == 0
    assert check(np.atleast_1d(np.genfromtxt(tmp_path / "curve.csv", delimiter=",", names=True)))


def test_distinct_exit_codes():
    from hydrosense import errors
    codes = [cls.exit_code for cls in (errors.ConfigError, errors.CsiFormatError, errors.PeakFindingError,
                                       errors.CalibrationError, errors.UnwrapError, errors.GeometryError,
                                       errors.IllConditionedError)]
    assert len(set(codes)) == len(codes) and 0 not in codes and 2 not in codes
