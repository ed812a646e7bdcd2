from dataclasses import replace
import math
import os
from pathlib import Path
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import trapezoid

from brownpair import ConfigError, NumericalError, cli, propagator
from brownpair.cli import (
    COLUMNS,
    REFERENCE_CONFIG,
    ScenarioResult,
    main,
    parse_config,
    run_scenario,
    run_sweep,
    self_check,
    summarize,
)
from brownpair.propagator import REL, classical_weights, kernel_matrix, sector_rates

REFERENCE_DIR = Path(__file__).resolve().parent.parent / "reference"

BASE = """\
eta = 0.1
mass_M = 1
omega_cutoff = 5
beta = inf   # zero temperature
k0L = 1
sigma = 2
t_max = 6
n_times = 13
"""


def test_parse_defaults_and_comments():
    cfg = parse_config("# header\n\n" + BASE)
    assert math.isinf(cfg.bath.beta)
    assert cfg.init.z == 0.0 and cfg.init.sigma == 2.0
    assert cfg.sweep_axis is None and cfg.output_path is None
    assert cfg.times()[-1] == 6.0 and cfg.times().size == 13


@pytest.mark.parametrize(
    "extra, field",
    [
        ("etta = 0.1", "etta"),
        ("eta = 0.2", "eta"),
        ("n_times = 2.5", "n_times"),
        ("sigma = -1", "sigma"),
        ("time_panels = 0", "time_panels"),
        ("sweep_axis = mass_M", "sweep_axis"),
        ("sweep_axis = k0L", "sweep_values"),
        ("sweep_values = 1, 2", "sweep_axis"),
        ("t_min = 1e-9", "t_min"),
    ],
)
def test_invalid_config_names_field(extra, field):
    with pytest.raises(ConfigError) as info:
        parse_config(BASE + extra + "\n")
    assert info.value.field == field
    assert field in str(info.value)


def test_missing_and_malformed():
    with pytest.raises(ConfigError) as info:
        parse_config(BASE.replace("k0L = 1\n", ""))
    assert info.value.field == "k0L"
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just words\n" + BASE)
    with pytest.raises(ConfigError) as info:
        parse_config(BASE.replace("beta = inf", "beta = warm"))
    assert info.value.field == "beta"


def test_sweep_values_validated_per_axis():
    with pytest.raises(ConfigError) as info:
        parse_config(BASE + "sweep_axis = k0L\nsweep_values = 1, -2\n")
    assert info.value.field == "sweep_values"
    cfg = parse_config(BASE + "sweep_axis = beta\nsweep_values = 1, inf\n")
    assert cfg.sweep_values == (1.0, math.inf)


def test_t_min_rejected_before_computation(monkeypatch, tmp_path):
    def fail(*args, **kwargs):
        raise AssertionError("computation started")

    monkeypatch.setattr(cli, "evolve", fail)
    path = tmp_path / "bad.cfg"
    path.write_text(BASE + "t_min = 1e-8\n")
    assert main(["run", "--config", str(path)]) == cli.EXIT_CONFIG


def test_reference_configs_parse():
    files = sorted(REFERENCE_DIR.glob("*.cfg"))
    assert len(files) >= 6
    for path in files:
        cfg = cli.load_config(path)
        assert cfg.init.sigma >= 2


def test_csv_layout():
    result = run_scenario(parse_config(BASE), workers=1)
    text = result.to_csv()
    lines = text.split("\n")
    assert lines[0] == ",".join(COLUMNS)
    assert "\r" not in text and text.endswith("\n")
    assert len(lines) == 13 + 2
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == 0.0 and first[1] == 0.0
    assert all(float(x) == v for x, v in zip(lines[5].split(","), result.data[4]))


def test_rows_are_physical_and_consistent():
    result = run_scenario(parse_config(BASE.replace("k0L = 1", "k0L = 0.2")), workers=2)
    assert np.all(result.column("E_N") >= 0)
    assert np.all(result.column("min_symplectic") >= 0.5 - 1e-6)
    det = result.column("det_Lambda")
    assert np.allclose(result.column("purity"), 1 / (4 * np.sqrt(det)))
    d_tilde = result.column("detA") + result.column("detB") - 2 * result.column("detC")
    s = result.column("sigma_minus_tilde")
    assert np.allclose(s**2 + det / s**2, d_tilde, rtol=1e-9)


def test_long_distance_never_entangles():
    result = run_scenario(parse_config(BASE.replace("k0L = 1", "k0L = 20").replace("t_max = 6", "t_max = 30")))
    assert np.abs(result.column("E_N")).max() < 1e-8


def test_short_distance_entangles_within_first_period():
    cfg = parse_config(BASE.replace("k0L = 1", "k0L = 1e-9").replace("n_times = 13", "n_times = 41"))
    period = 2 * math.pi / math.sqrt(4 * 5 * 0.1 / math.pi)
    result = run_scenario(cfg)
    t, e = result.column("t"), result.column("E_N")
    assert e[0] == 0
    assert e[(t > 0) & (t < period)].max() > 0.1


def test_unphysical_run_is_reported_with_time():
    cfg = parse_config(BASE.replace("sigma = 2", "sigma = 1").replace("k0L = 1", "k0L = 2") + "z = 0.25\n")
    cfg = replace(cfg, t_max=0.5, n_times=11)
    with pytest.raises(NumericalError, match=r"t=0\.\d+: unphysical"):
        run_scenario(cfg)


def test_determinism_across_threads():
    cfg = parse_config(BASE.replace("k0L = 1", "k0L = 0.3"))
    assert run_scenario(cfg, workers=1).to_csv() == run_scenario(cfg, workers=3).to_csv()


def _result(t, e, z):
    cfg = parse_config(BASE + f"z = {z}\n")
    data = np.zeros((len(t), len(COLUMNS)))
    data[:, 0], data[:, 1] = t, e
    return ScenarioResult(cfg, data)


def test_summary_for_separable_start():
    t = np.arange(6.0)
    delay, peak, tail, extinction, mean = summarize(_result(t, [0, 0, 5e-4, 0.2, 0.4, 0.1], 0))
    assert delay == 3.0 and peak == 0.4 and tail == pytest.approx(0.25)
    assert math.isinf(extinction)
    assert mean == pytest.approx(trapezoid([0, 0, 5e-4, 0.2, 0.4, 0.1]) / 5)


def test_summary_for_entangled_start():
    t = np.arange(7.0)
    delay, _, _, extinction, _ = summarize(_result(t, [0.5, 0.2, 0, 0, 0.3, 0, 0.1], 0.25))
    assert extinction == 2.0 and delay == 4.0
    delay, _, _, extinction, _ = summarize(_result(t[:3], [0.5, 0.4, 0.3], 0.25))
    assert math.isinf(delay) and math.isinf(extinction)


def test_slip_time_hides_switch_on_transient():
    t = np.arange(6.0)
    r = _result(t, [0, 0.01, 0, 0, 0.2, 0.3], 0)
    assert summarize(r)[0] == 1.0
    r = ScenarioResult(replace(r.config, slip_time=2.0), r.data)
    assert summarize(r)[0] == 4.0


def test_sweep_writes_files(tmp_path):
    cfg = parse_config(
        BASE.replace("n_times = 13", "n_times = 7") + f"sweep_axis = beta\nsweep_values = inf, 1\noutput_path = {tmp_path}\n"
    )
    result = run_sweep(cfg, workers=1)
    assert result.file_names() == ["beta_inf.csv", "beta_1.0.csv"]
    cli.write_sweep(result, tmp_path)
    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0] == "beta,delay_time,max_E_N,asymptotic_E_N,extinction_time,mean_E_N"
    assert summary[1].startswith("inf,") and len(summary) == 3
    assert (tmp_path / "beta_1.0.csv").read_text() == result.runs[1].to_csv()


def test_self_check_passes():
    report = self_check(workers=1)
    assert report.passed, report.lines()
    assert len(report.lines()) == 5


def test_self_check_catches_corrupted_b(monkeypatch):
    original = propagator.coefficients_rel

    def corrupted(t, spec, table, quad=None):
        # sign error in the B integrand: sinh(G (t - x)/2) -> sinh(G (t + x)/2)
        quad = quad or cli.QuadratureConfig()
        c = original(t, spec, table, quad)
        nodes, weights = propagator._time_rule(t, spec, quad)
        rates = sector_rates(REL, spec)
        w_final, _ = classical_weights(nodes, t, rates)
        g, root = rates.g, rates.gamma_root
        wrong = np.exp(-0.5 * g * nodes) * np.sinh(0.5 * root * (t + nodes)) / np.sinh(0.5 * root * t)
        b = 2 * rates.noise_prefactor * ((weights * w_final) @ kernel_matrix(nodes, table) @ (weights * wrong))
        return replace(c, B=float(np.real(b)))

    monkeypatch.setattr(propagator, "coefficients_rel", corrupted)
    report = self_check(workers=1)
    assert not report.passed
    failed = [c.name for c in report.checks if not c.passed]
    assert failed == ["coefficient positivity"]


def test_reference_config_text_is_valid():
    cfg = parse_config(REFERENCE_CONFIG)
    assert cfg.bath.k0L == 1.0 and cfg.init.sigma == 2.0


def test_main_run_and_exit_codes(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(BASE)
    out = tmp_path / "nested" / "out.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_text().startswith("t,E_N,")

    assert main(["run", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.startswith("t,E_N,")

    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    cfg.write_text(BASE + "colour = blue\n")
    assert main(["run", "--config", str(cfg)]) == 2
    assert "[colour]" in capsys.readouterr().err

    cfg.write_text(BASE)
    assert main(["sweep", "--config", str(cfg)]) == 2

    unphysical = BASE.replace("sigma = 2", "sigma = 1").replace("k0L = 1", "k0L = 2")
    cfg.write_text(unphysical.replace("t_max = 6", "t_max = 0.5") + "z = 0.25\n")
    assert main(["run", "--config", str(cfg)]) == 3
    assert "t=" in capsys.readouterr().err

    monkeypatch.setenv(cli.THREADS_ENV, "many")
    assert main(["selfcheck"]) == 2


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(BASE.replace("n_times = 13", "n_times = 3"))
    env = dict(os.environ, **{cli.THREADS_ENV: "2"})
    proc = subprocess.run(
        [sys.executable, "-m", "brownpair", "run", "--config", str(cfg)],
        capture_output=True,
        text=True,
        env=env,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.count("\n") == 4
