import json

import numpy as np
import pytest

import isacsim


def test_reference_paths_and_noise():
    paths = isacsim.derive_paths()
    assert len(paths) == 3
    mags = [abs(p["gain"]) for p in paths]
    assert mags == sorted(mags, reverse=True)
    assert paths[0]["doppler"] == 0.0
    assert isacsim.noise_variance() == pytest.approx(1.2057e-12, rel=1e-3)
    bins = isacsim.true_bins(paths)
    assert [b[0] for b in bins] == [8, 11, 18]


def test_channel_image_and_cfar_on_grid():
    scen = isacsim.reference_scenario()
    scen["waveform"]["n_subcarriers"] = 64
    scen["waveform"]["n_symbols"] = 16
    paths = [{"gain": 1.0 + 0.0j, "delay": 0.0, "doppler": 0.0}]
    h = isacsim.synthesize_channel(paths, scen)
    assert h.shape == (64, 16)
    np.testing.assert_allclose(h, np.ones((64, 16)))
    img = isacsim.delay_doppler_image(h)
    assert img[0, 0] == pytest.approx(64 * 16)
    assert img.sum() == pytest.approx(np.sum(np.abs(h) ** 2))
    dets = isacsim.cfar(img + 1e-3, {"guard": [1, 1], "training": [2, 3]})
    assert [(d["delay_bin"], d["doppler_bin"]) for d in dets] == [(0, 0)]
    gains = isacsim.ls_gains(h, dets, scen)
    assert gains[0] == pytest.approx(1.0)


def test_pilots_and_rate():
    p = isacsim.pilot_pattern(400, 60, 5.0, 1)
    assert len(p) == isacsim.pilot_count(400, 60, 5.0) == 1200
    assert p == isacsim.pilot_pattern(400, 60, 5.0, 1)
    assert isacsim.achievable_rate(2.0, 100.0) == 0.0
    assert isacsim.achievable_rate(2.0, 25.0) == pytest.approx(1.5)
    pts = np.asarray(isacsim.constellation("16QAM"))
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0)


def test_mutual_information_bounds():
    h = np.ones((4, 4), dtype=complex)
    assert isacsim.mutual_information("QPSK", h, 1e-3) == pytest.approx(2.0, abs=1e-3)
    assert 0.0 <= isacsim.mutual_information("QPSK", h, 10.0) < 0.3


def test_noiseless_genie_trial_finds_every_path():
    out = isacsim.simulate_trial(scheme="genie", noiseless=True)
    assert out["h_hat"].shape == (400, 60)
    assert all(out["hits"])


def test_sweep_and_spec_errors(tmp_path):
    spec = {
        "kind": "rcs_sweep",
        "scenario": {"waveform": {"n_subcarriers": 64, "n_symbols": 16, "tx_power_dbm": 30.0}},
        "sweep": {"values": [0.0, 10.0]},
        "cfar": {"guard": [1, 1], "training": [2, 3]},
        "n_trials": 3,
        "threads": 1,
    }
    res = isacsim.run_experiment(spec, tmp_path)["results"]
    assert len(res) == 2 * 3
    assert set(res["scheme"]) == {"pilot_only", "data_aided", "genie"}
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["spec"]["n_trials"] == 3
    assert isacsim.normalize_spec(spec)["sweep"]["variable"] == "rcs_dbsm"
    with pytest.raises(isacsim.ConfigError):
        isacsim.run_sweep({"kind": "rcs_sweep", "sweep": {"values": [0]}, "n_trails": 5})


def test_oracles_pass():
    assert all(ok for _, ok, _ in isacsim.run_oracles())
