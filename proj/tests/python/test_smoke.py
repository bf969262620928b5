import math

import numpy as np
import pytest

import stormdiag


def test_gradient_wind_root_satisfies_the_quadratic():
    f, k, vg = 1e-4, 1.0 / 5e5, 20.0
    v = stormdiag.solve_gradient_wind(f, k, vg)
    assert abs(k * v * v + f * v - f * vg) < 1e-12
    assert stormdiag.solve_gradient_wind(f, -1.0 / 1e5, 20.0) is None


def test_bergerons_case():
    assert stormdiag.bergerons(34.0, 24.0, 48.0) == pytest.approx(1.6509, abs=1e-4)


def test_great_circle_one_degree_east():
    assert stormdiag.great_circle_km(50.0, 340.0, 50.0, 341.0) == pytest.approx(71.47, abs=0.02)
    assert stormdiag.great_circle_km(50.0, 340.0, 50.0, 340.0) == 0.0


def test_truncate_keeps_low_degrees():
    g = stormdiag.GridSpec.global_grid(1.0)
    lat = np.radians(np.array(g.lats()))[:, None] * np.ones((1, g.nlon))
    values = 5.0 + np.sin(lat)
    out = stormdiag.truncate(values, g, 40)
    assert np.max(np.abs(out - values)) < 1e-9


def test_synth_track_balance_pipeline(tmp_path):
    params = {"grid": {"step": 1.0, "global": True}, "center_lat": 45, "center_lon": 330,
              "translation": [17.7, 6.4], "coriolis": "sphere", "steps": 5}
    assert stormdiag.synth("gaussian-low", params, tmp_path / "ds") == 30
    tr = stormdiag.track(tmp_path / "ds", (320, 340, 40, 50), "2023-11-01T00:00Z", "2023-11-02T00:00Z")
    assert len(tr["points"]) == 5
    assert tr["intensification"]["window_h"] == 24.0
    fields, prov = stormdiag.balance(tmp_path / "ds", "2023-11-01T12:00Z", 850, (17.7, 6.4), truncation=60,
                                     out=tmp_path / "bal")
    assert set(fields) == {"ws", "wsg", "curv", "wsgr", "wsdiff", "gwmask"}
    assert prov["smoothed"] is True
    assert (tmp_path / "bal" / "balance_provenance.json").exists()
    assert np.nanmax(fields["ws"]) > 5.0


def test_contour_export_levels():
    g = stormdiag.GridSpec.regional(60, 40, 0, 20, 1.0)
    ex = stormdiag.contour_export(np.full((g.nlat, g.nlon), 270.0), g, "theta_w", "thw", "K")
    assert [lv["value"] for lv in ex["levels"]] == [280.0, 282.5, 285.0, 287.5]
    assert all(lv["polylines"] == [] for lv in ex["levels"])
    with pytest.raises(stormdiag.StormdiagError):
        stormdiag.contour_export(np.zeros((g.nlat, g.nlon)), g, "unknown")


def test_report_flags_missing_source(tmp_path):
    params = {"grid": {"step": 1.0, "global": True}, "center_lat": 45, "center_lon": 330, "steps": 3}
    stormdiag.synth("gaussian-low", params, tmp_path / "a")
    config = {"datasets": {"a": "a", "b": "absent"}, "reference": "a", "first_guess": [320, 340, 40, 50],
              "t0": "2023-11-01T00:00Z", "t1": "2023-11-01T12:00Z"}
    failed, summary = stormdiag.run_report(config, tmp_path / "out", tmp_path)
    assert failed == ["b"]
    assert "intercomparison.csv" in summary["written"]
    assert math.isfinite(summary["reference_track"]["points"][0]["mslp_hPa"])
