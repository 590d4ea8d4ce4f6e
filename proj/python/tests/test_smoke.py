import math

import pytest

import kslab


def test_constants():
    assert kslab.omega_n(3) == pytest.approx(4 * math.pi, rel=1e-15)
    assert kslab.blowup_mass_threshold(3) == pytest.approx(72 * math.sqrt(2) * math.pi, rel=1e-12)
    assert kslab.theta(2.0, 4.0 / 3.0, 3) == pytest.approx(7.0 / 9.0, rel=1e-14)
    value, th, warning = kslab.critical_mass(2.0, 4.0 / 3.0, 3, 1.0)
    assert value == pytest.approx(27.0 / 2744.0, rel=1e-12)
    assert warning is None
    rows = kslab.constants(["n=3", "m=1.5"])
    assert float(rows["critical_exponent"]) == pytest.approx(4.0 / 3.0)


def test_model_params_validation():
    p = kslab.ModelParams(3, 1.0, 10.0)
    assert p.critical_exponent() == pytest.approx(4.0 / 3.0)
    with pytest.raises(ValueError):
        kslab.ModelParams(2, 1.0, 10.0)


def test_select_parameters_gate():
    crit = 1.3333333333333333
    sp = kslab.select_parameters(kslab.ModelParams(3, crit, 400.0))
    assert 0 < sp["alpha"] < sp["alpha_star"]
    with pytest.raises(kslab._kslab.OutOfTheory):
        kslab.select_parameters(kslab.ModelParams(3, crit, 300.0))


def test_certify_pass():
    out = kslab.certify(["n=3", "m=1", "M_per_omega=100"])
    assert out["pass"]
    assert out["max_outer_residual"] <= 0


def test_simulate_bounded_short():
    res = kslab.simulate(["n=3", "m=1.5", "M=400", "data=bump", "t_end=2", "record_interval=0.1"])
    assert res["mass_drift"] < 1e-6
    assert min(res["min_u"]) >= -1e-12
    assert len(res["r"]) == len(res["u"])


def test_simulate_mass_runs():
    res = kslab.simulate_mass(["n=3", "m=1.5", "M=400", "data=bump", "t_end=1", "record_interval=0.1"])
    assert res["U"][0] == 0.0
    assert res["U"][-1] == pytest.approx(400.0 / kslab.omega_n(3), rel=1e-12)


def test_run_command_exit_codes(tmp_path):
    rc, out, err = kslab.run_command("constants", overrides=["n=2"])
    assert rc == 2
    rc, out, err = kslab.run_command("simulate", overrides=["nonsense=1"], out=tmp_path / "x")
    assert rc == 2 and not (tmp_path / "x").exists()
    rc, out, err = kslab.run_command("certify", overrides=["m=1.3333333333333333", "M=300"])
    assert rc == 3 and "threshold" in err


def test_sweep_sorted():
    rows = kslab.sweep(["n=3", "data=bump", "sweep_m=1.5", "sweep_M=400,200", "t_end=2",
                        "record_interval=0.1"], 2)
    assert [r[1] for r in rows] == [200.0, 400.0]
