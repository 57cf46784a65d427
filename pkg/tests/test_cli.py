"""End-to-end CLI pipelines: products, manifests, determinism, exit codes."""

import json

import numpy as np
import pytest

from vortexsans.cli import main
from vortexsans.grating import GratingSpec
from vortexsans.instrument import InstrumentConfig, xi_of_lambda
from vortexsans.sesans import model_curve_at


def write_config(path, charge=1, depth_nm=5500.0, **sim):
    grating = dict(period_nm=2000.0, charge=charge, depth_nm=depth_nm, duty=0.5,
                   profile="rectangular", trapezoid_c=1.0,
                   plaquette_w_nm=10000.0, plaquette_h_nm=10000.0,
                   hole_radius_nm=500.0, tiles_x=1, tiles_y=1,
                   sld_per_nm2=2.07e-4)
    simulation = dict(lambda_nm=0.4, samples_per_period=16, pad_factor=4,
                      n_lambda=12)
    simulation.update(sim)
    path.write_text(json.dumps({"grating": grating, "instrument": {},
                                "simulation": simulation}))
    return path


class TestDiffractCommand:
    def test_forked_grating_products(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", samples_per_period=32)
        out = tmp_path / "out"
        assert main(["diffract", "--config", str(cfg), "--out-dir", str(out)]) == 0
        for name in ("pattern.grid", "profile_n1.csv", "profile_n3.csv",
                     "summary.json", "manifest.json"):
            assert (out / name).exists()
        summary = json.loads((out / "summary.json").read_text())
        radius = summary["orders"]["1"]["peak_radius_per_nm"]
        assert radius is not None and 1e-4 < radius < 1.5e-3
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "diffract"
        assert len(manifest["content_hash"]) == 64

    def test_straight_grating_reports_not_a_donut(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", charge=0, samples_per_period=32)
        out = tmp_path / "out"
        assert main(["diffract", "--config", str(cfg), "--out-dir", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["orders"]["1"]["peak_radius_per_nm"] is None
        assert summary["orders"]["1"]["not_a_donut"]

    def test_missing_config_exits_2(self, tmp_path, capsys):
        code = main(["diffract", "--config", str(tmp_path / "nope.json"),
                     "--out-dir", str(tmp_path)])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "config"

    def test_invalid_json_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["diffract", "--config", str(bad), "--out-dir", str(tmp_path)]) == 2

    def test_unknown_grating_key_exits_2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"grating": {"period_nm": 2000.0, "charge": 1,
                                               "depth_nm": 1.0, "bogus": 7}}))
        assert main(["diffract", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2

    def test_numerical_failure_exits_3(self, tmp_path, capsys):
        # 4 samples per period trips the aliasing guard at run time
        cfg = write_config(tmp_path / "cfg.json", samples_per_period=4)
        code = main(["diffract", "--config", str(cfg), "--out-dir", str(tmp_path)])
        assert code == 3
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "numerical"


class TestSesansCommand:
    def test_map_mode(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", depth_nm=38000.0)
        out = tmp_path / "out"
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(out),
                     "--mode", "map"]) == 0
        data = np.genfromtxt(out / "map.csv", delimiter=",", names=True)
        assert data.dtype.names == ("xi_x_nm", "xi_y_nm", "pol")
        meta = json.loads((out / "map.csv.json").read_text())
        assert meta["spec"]["depth_nm"] == 38000.0

    def test_slice_mode_with_orientation(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", depth_nm=38000.0)
        out = tmp_path / "out"
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(out),
                     "--mode", "slice", "--orientation", "90"]) == 0
        meta = json.loads((out / "slice.csv.json").read_text())
        assert meta["orientation_rad"] == pytest.approx(np.pi / 2)

    def test_tof_mode_with_resolution_and_stack(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "out"
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(out),
                     "--mode", "tof", "--resolution", "on", "--stack", "2"]) == 0
        data = np.genfromtxt(out / "tof.csv", delimiter=",", names=True)
        assert data.dtype.names == ("xi_nm", "pol", "lambda_nm")
        assert data["xi_nm"][0] == pytest.approx(1233.0)
        meta = json.loads((out / "tof.csv.json").read_text())
        assert meta["resolution_applied"] is True
        assert meta["stack"] == 2

    def test_stacked_curve_is_square_of_single(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        single_dir, double_dir = tmp_path / "one", tmp_path / "two"
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(single_dir),
                     "--mode", "tof"]) == 0
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(double_dir),
                     "--mode", "tof", "--stack", "2"]) == 0
        one = np.genfromtxt(single_dir / "tof.csv", delimiter=",", skip_header=1)
        two = np.genfromtxt(double_dir / "tof.csv", delimiter=",", skip_header=1)
        np.testing.assert_array_equal(two[:, 1], one[:, 1] ** 2)

    def test_bad_mode_exits_2(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", mode="banana")
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2

    def test_deterministic_output_bytes(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(a),
                     "--mode", "tof"]) == 0
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(b),
                     "--mode", "tof"]) == 0
        assert (a / "tof.csv").read_bytes() == (b / "tof.csv").read_bytes()

    def test_manifest_hash_tracks_inputs(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        main(["sesans", "--config", str(cfg), "--out-dir", str(a), "--mode", "tof"])
        main(["sesans", "--config", str(cfg), "--out-dir", str(b), "--mode", "tof"])
        write_config(tmp_path / "cfg.json", depth_nm=3900.0)
        main(["sesans", "--config", str(cfg), "--out-dir", str(c), "--mode", "tof"])
        ha = json.loads((a / "manifest.json").read_text())["content_hash"]
        hb = json.loads((b / "manifest.json").read_text())["content_hash"]
        hc = json.loads((c / "manifest.json").read_text())["content_hash"]
        assert ha == hb
        assert ha != hc


def synthesize_data(path, charge, depth_nm, n_points=12):
    inst = InstrumentConfig()
    spec = GratingSpec(period_nm=2000.0, charge=charge, depth_nm=depth_nm,
                       plaquette_w_nm=10000.0, plaquette_h_nm=10000.0,
                       hole_radius_nm=500.0)
    xi = xi_of_lambda(inst.xi0_per_nm, np.linspace(*inst.band_nm, n_points))
    curve = model_curve_at(spec, inst, 0.0, xi, samples_per_period=16)
    from vortexsans.sesans import convolve_resolution
    curve = convolve_resolution(curve, inst.frac_resolution)
    rows = np.column_stack([curve.xi, curve.pol])
    np.savetxt(path, rows, delimiter=",", header="xi_nm,pol", comments="")
    return path


class TestFitCommand:
    def test_round_trip_recovery(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", depth_nm=1.0,
                           depth_range_nm=[3500.0, 5000.0], depth_grid=5)
        data = synthesize_data(tmp_path / "data.csv", charge=1, depth_nm=4200.0)
        out = tmp_path / "out"
        assert main(["fit", "--config", str(cfg), "--data", str(data),
                     "--out-dir", str(out)]) == 0
        report = json.loads((out / "fit_report.json").read_text())
        assert abs(report["d_best_nm"] - 4200.0) <= 50.0
        overlay = np.genfromtxt(out / "fit_overlay.csv", delimiter=",", names=True)
        assert overlay.dtype.names == ("xi_nm", "pol_data", "pol_model")
        np.testing.assert_allclose(overlay["pol_model"], overlay["pol_data"],
                                   atol=5e-3)

    def test_charge_mismatch_fits_worse(self, tmp_path):
        data = synthesize_data(tmp_path / "data.csv", charge=2, depth_nm=4200.0)
        sses = {}
        for charge in (2, 1):
            cfg = write_config(tmp_path / f"cfg{charge}.json", charge=charge,
                               depth_range_nm=[3500.0, 5000.0], depth_grid=5)
            out = tmp_path / f"out{charge}"
            assert main(["fit", "--config", str(cfg), "--data", str(data),
                         "--out-dir", str(out)]) == 0
            sses[charge] = json.loads((out / "fit_report.json").read_text())["sse"]
        assert sses[1] >= 5.0 * sses[2]

    def test_empty_data_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        empty = tmp_path / "empty.csv"
        empty.write_text("xi_nm,pol\n")
        code = main(["fit", "--config", str(cfg), "--data", str(empty),
                     "--out-dir", str(tmp_path)])
        assert code == 2

    def test_missing_columns_exits_2(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert main(["fit", "--config", str(cfg), "--data", str(bad),
                     "--out-dir", str(tmp_path)]) == 2


class TestDonutCommand:
    def test_profiles_written(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json",
                           donut_orders=[[1, 1], [1, 2]], donut_npoints=64)
        out = tmp_path / "out"
        assert main(["donut", "--config", str(cfg), "--out-dir", str(out)]) == 0
        for name in ("donut_n1_m1.csv", "donut_n1_m2.csv"):
            data = np.genfromtxt(out / name, delimiter=",", names=True)
            assert data.dtype.names == ("q_prime", "intensity", "re_amplitude",
                                        "im_amplitude")
            assert data["intensity"][0] == 0.0  # dark center


class TestWorkerCap:
    def test_vortex_threads_env_caps_workers(self, monkeypatch):
        from vortexsans._workers import worker_count
        monkeypatch.setenv("VORTEX_THREADS", "1")
        assert worker_count() == 1
        monkeypatch.setenv("VORTEX_THREADS", "not-a-number")
        assert worker_count() >= 1

    def test_capped_run_matches_uncapped(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path / "cfg.json")
        free_dir, capped_dir = tmp_path / "free", tmp_path / "capped"
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(free_dir),
                     "--mode", "tof"]) == 0
        monkeypatch.setenv("VORTEX_THREADS", "1")
        assert main(["sesans", "--config", str(cfg), "--out-dir", str(capped_dir),
                     "--mode", "tof"]) == 0
        assert (free_dir / "tof.csv").read_bytes() == (capped_dir / "tof.csv").read_bytes()


class TestXiCommand:
    def test_reports_both_constants(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "out"
        assert main(["xi", "--config", str(cfg), "--out-dir", str(out)]) == 0
        payload = json.loads((out / "xi.json").read_text())
        assert payload["xi0_configured_per_nm"] == pytest.approx(1.37e4)
        assert payload["xi0_computed_per_nm"] == pytest.approx(1.446e4, rel=1e-3)
        assert payload["xi_range_nm"][0] == pytest.approx(1233.0)
        assert payload["xi_range_nm"][1] == pytest.approx(15104.25)
