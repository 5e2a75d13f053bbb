import json

import numpy as np
import pytest

from photonfilter.cli import main
from photonfilter.experiments import (EXPERIMENT_KINDS, ExperimentConfig,
                                      SPEED_OF_LIGHT, default_config,
                                      feasibility, run, run_detuning_sensitivity,
                                      run_filter_curves, run_q_sweep,
                                      run_sharpening)
from photonfilter.tableio import read_table, sha256_of


def _floats(rows, col):
    return np.array([float(r[col]) for r in rows])


def test_default_configs_are_valid():
    for kind in EXPERIMENT_KINDS:
        cfg = default_config(kind)
        assert cfg.kind == kind
    assert default_config("q-sweep").nbar == 20.0
    assert default_config("q-sweep").m_values == (25,)
    assert default_config("sharpen").nbar == 16.0


def test_config_rejects_unknown_keys_and_bad_values():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"kind": "sharpen", "typo": 1})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"nbar": 16})
    with pytest.raises(ValueError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(kind="sharpen", g0=-1.0)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="sharpen", l_values=())
    with pytest.raises(ValueError):
        ExperimentConfig(kind="sharpen", m_values=(0,))
    with pytest.raises(ValueError):
        ExperimentConfig(kind="sharpen", n_max=0)


def test_config_file_round_trip(tmp_path):
    cfg = ExperimentConfig(kind="q-sweep", nbar=12.0, g0_grid=(1.0, 2.5),
                           m_values=(4,), out_dir=str(tmp_path / "o"))
    path = tmp_path / "cfg.json"
    cfg.to_file(path)
    assert ExperimentConfig.from_file(path) == cfg


def test_feasibility_numbers():
    est = feasibility(300.0, 50e9)
    assert est.wavenumber == pytest.approx(2.0 * np.pi * 50e9 / SPEED_OF_LIGHT)
    assert est.interaction_time == pytest.approx(SPEED_OF_LIGHT / (2 * 50e9 * 300.0))
    assert est.interaction_to_loss_ratio == pytest.approx(est.interaction_time / 0.3)
    with pytest.raises(ValueError):
        feasibility(-1.0, 50e9)


def _manifest(out_dir):
    with open(out_dir / "manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


def test_filter_curves_outputs(tmp_path):
    cfg = ExperimentConfig(kind="filter-curves", n_max=12, l_values=(1, 2),
                           out_dir=str(tmp_path))
    record = run_filter_curves(cfg)
    assert record.convergence_ok
    names = record.output_names()
    assert "filter_rz_analytic.dat" in names
    assert "filter_microwave_l2.dat" in names
    assert "filter_curves.gp" in names

    _, exact = read_table(tmp_path / "filter_rz_analytic.dat")
    _, numeric = read_table(tmp_path / "filter_rz_numeric.dat")
    assert np.max(np.abs(_floats(exact, 1) - _floats(numeric, 1))) < 1e-5

    manifest = _manifest(tmp_path)
    assert manifest["kind"] == "filter-curves"
    for entry in manifest["outputs"]:
        assert sha256_of(tmp_path / entry["file"]) == entry["sha256"]
    script = (tmp_path / "filter_curves.gp").read_text()
    assert "plot" in script and "filter_rz_numeric.dat" in script


def test_runs_are_byte_reproducible(tmp_path):
    cfg = {"kind": "filter-curves", "n_max": 10, "l_values": [1]}
    a = run(ExperimentConfig.from_dict({**cfg, "out_dir": str(tmp_path / "a")}))
    b = run(ExperimentConfig.from_dict({**cfg, "out_dir": str(tmp_path / "b")}))
    assert a.output_names() == b.output_names()
    for name in a.output_names():
        assert (tmp_path / "a" / name).read_bytes() \
            == (tmp_path / "b" / name).read_bytes()
    assert a.outputs == b.outputs


def test_sharpening_outputs(tmp_path):
    cfg = ExperimentConfig(kind="sharpen", m_values=(1, 3),
                           out_dir=str(tmp_path))
    record = run_sharpening(cfg)
    assert record.convergence_ok
    header, rows = read_table(tmp_path / "sharpening_stats.dat")
    assert header == ["m", "mean", "variance", "mandel_q"]
    variances = _floats(rows, 2)
    assert [int(r[0]) for r in rows] == [0, 1, 3]
    assert variances[0] > variances[1] > variances[2]
    for m in (0, 1, 3):
        assert (tmp_path / f"sharpening_m{m}.dat").exists()


def test_sharpening_default_run_regression(tmp_path):
    """Frozen moments of the stock sharpening study (nbar 16, l 1, dw 0.5)."""
    cfg = default_config("sharpen", out_dir=str(tmp_path))
    run_sharpening(cfg)
    _, rows = read_table(tmp_path / "sharpening_stats.dat")
    variances = _floats(rows, 2)
    qs = _floats(rows, 3)
    assert variances == pytest.approx(
        [16.0, 7.192053, 2.529359, 0.817363], rel=1e-3)
    assert qs[-1] == pytest.approx(-0.948864, abs=1e-3)


def test_sharpening_warns_off_target(tmp_path):
    cfg = ExperimentConfig(kind="sharpen", nbar=10.0, m_values=(1,),
                           out_dir=str(tmp_path))
    with pytest.warns(UserWarning, match="filter maximum"):
        record = run_sharpening(cfg)
    assert any("sharpening will be poor" in note for note in record.notes)


def test_q_sweep_outputs(tmp_path):
    cfg = ExperimentConfig(kind="q-sweep", nbar=20.0, m_values=(5,),
                           g0_grid=(2.0, 4.5), out_dir=str(tmp_path))
    record = run_q_sweep(cfg)
    assert record.convergence_ok
    header, rows = read_table(tmp_path / "q_sweep.dat")
    assert header == ["g0", "mean", "variance", "mandel_q", "status"]
    assert [r[4] for r in rows] == ["ok", "ok"]
    assert np.all(np.isfinite(_floats(rows, 3)))


def test_detuning_sensitivity_outputs(tmp_path):
    cfg = ExperimentConfig(kind="detuning-sensitivity",
                           delta_omega_grid=(0.0, 5.0), out_dir=str(tmp_path))
    record = run_detuning_sensitivity(cfg)
    assert record.convergence_ok
    header, rows = read_table(tmp_path / "detuning_shift.dat")
    assert header == ["delta_omega", "square-wave", "trigonometric",
                      "gaussian", "rosen-zener", "lorentzian"]
    # Row at delta_omega = 5: slower switching means a larger shift.
    shifts = {name: float(rows[1][c])
              for c, name in enumerate(header[1:], start=1)}
    assert (shifts["lorentzian"] > shifts["rosen-zener"] > shifts["gaussian"]
            > shifts["trigonometric"] > shifts["square-wave"])
    assert any("n = 49" in note for note in record.notes)


def test_cli_runs_feasibility(tmp_path, capsys):
    assert main(["feasibility", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "feasibility.dat" in out and "manifest" in out
    assert (tmp_path / "feasibility.dat").exists()


def test_cli_accepts_seedless_flag(tmp_path):
    assert main(["--seedless", "feasibility", "--out", str(tmp_path)]) == 0


def test_cli_reads_config_and_checks_kind(tmp_path, capsys):
    cfg = ExperimentConfig(kind="q-sweep", nbar=12.0, m_values=(2,),
                           g0_grid=(2.0,), out_dir=str(tmp_path / "unused"))
    path = tmp_path / "cfg.json"
    cfg.to_file(path)
    out_dir = tmp_path / "real"
    assert main(["q-sweep", str(path), "--out", str(out_dir)]) == 0
    assert (out_dir / "q_sweep.dat").exists()

    assert main(["sharpen", str(path)]) == 2
    assert "does not match" in capsys.readouterr().err


def test_cli_rejects_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
