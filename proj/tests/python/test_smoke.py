import json
import math

import numpy as np
import pytest

import casimir_dipole as cd

PAIR = {
    "scene": {"bodies": [
        {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.05},
         "particles": [{"position_um": [0, 0, 0]}]},
        {"material": "gold", "inclusion": {"type": "sphere_radiative", "radius_um": 0.05},
         "particles": [{"position_um": [0, 0, 1.0]}]},
    ]},
    "mode": "nonretarded",
}


def test_energy_matches_london_oracle():
    e = cd.energy(json.dumps(PAIR))
    c6 = cd.oracle.london_c6("gold", 0.05, "gold", 0.05)
    assert e["energy_eV"] == pytest.approx(-c6, rel=1e-3)
    assert e["node_count"] == 60
    assert e["integrand"].shape == (40, 2)


def test_sweep_far_field_exponent():
    cfg = dict(PAIR, sweep={"separation_kind": "center", "grid": [0.8, 1.0, 1.3, 1.6, 2.0], "fit": [0.8, 2.0]})
    s = cd.sweep(json.dumps(cfg))
    assert s["rows"].shape == (5, 4)
    assert s["fit"]["exponent"] == pytest.approx(-7.0, abs=0.05)
    assert np.all(s["rows"][:, 2] < 0)


def test_scenario_object_and_geometry():
    sc = cd.Scenario.from_json('{"scene": {"preset": "fig1_cubes", "params": {"n": 3, "L_um": 0.3}}}')
    assert sc.particle_count == 54
    assert sc.mode == "retarded"
    g = cd.geometry(sc)
    assert g.shape == (54, 4)
    assert np.allclose(g[:, 3], 0.1 / 3)
    m = cd.coupling_matrix(sc, 0.5)
    assert m.shape == (162, 162)
    assert np.allclose(m, m.T, rtol=0, atol=1e-12 * np.abs(m).max())


def test_delta_logdet_matches_two_dipole_oracle():
    for mode in ("retarded", "nonretarded"):
        cfg = dict(PAIR, mode=mode)
        got = cd.delta_logdet(json.dumps(cfg), 0.7)
        want = cd.oracle.two_dipole_delta_logdet("gold", 0.05, "gold", 0.05, 1.0, mode, 0.7)
        assert got == pytest.approx(want, rel=1e-12)


def test_materials_and_presets():
    assert "gold" in cd.materials()
    assert cd.epsilon("gold", 1.0) == pytest.approx(1 + 81 / 1.035)
    assert math.isinf(cd.epsilon("perfect_metal", 1.0))
    names = {p["name"] for p in cd.presets()}
    assert {"fig1_cubes", "fig3_rect_torque", "fig4_aniso_torque"} <= names


def test_errors_map_to_python_exceptions():
    with pytest.raises(cd.ConfigError) as info:
        cd.energy('{"scene": {"preset": "fig1_cubes"}, "quadrature": {"nodes": 1}}')
    assert isinstance(info.value, cd.ValidationError)
    assert "nodes" in str(info.value)
    with pytest.raises(cd.NumericalError):
        cd.energy(json.dumps({
            "scene": {"bodies": [
                {"material": "perfect_metal", "inclusion": {"type": "sphere_radiative", "radius_um": 0.1},
                 "particles": [{"position_um": [0, 0, 0]}]},
                {"material": "perfect_metal", "inclusion": {"type": "sphere_radiative", "radius_um": 0.1},
                 "particles": [{"position_um": [0, 0, 0.25]}]}]},
            "quadrature": {"xi0_eV": 5}}))


def test_run_writes_outputs(tmp_path):
    r = cd.run(json.dumps(PAIR), out=tmp_path / "out")
    assert r["exit_code"] == 0 and r["status"] == "complete"
    assert (tmp_path / "out" / "energy.csv").read_text().startswith("energy_eV,quad_error_eV,node_count\n")
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["status"] == "complete"
