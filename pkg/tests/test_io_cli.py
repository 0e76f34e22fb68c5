import json

import numpy as np
import pytest

from torusnoise import cli, io
from torusnoise.channels import apply, eta, superoperator_matrix
from torusnoise.experiments import (ConfigError, ExperimentConfig, GridMismatchError,
                                    compare_fields, load_config, parse_grid, run)
from torusnoise.noise import sdc_channel
from torusnoise.torus import TorusSpace


def csv_columns(path):
    header, rows = io.read_csv(path)
    return {h: np.array([float(r[i]) for r in rows]) for i, h in enumerate(header)}


class TestSpecs:
    @pytest.mark.parametrize("spec", [
        {"type": "sdc", "n": 8, "eps": 0.5, "alpha": 0.25},
        {"type": "sdc", "n": 8, "eps": 0.5, "alpha": 0.25, "signed": True},
        {"type": "sloppy", "n": 8, "delta": 0.25},
        {"type": "rup", "n": 8, "sigma": 0.1},
        {"type": "identity", "n": 3},
        {"type": "gad", "n": 2, "c": [[0, 0, 1, 0], [1, 0, 0.8, 0], [0, 1, 0.6, 0]], "basis": "position"},
        {"type": "amplitude_damping", "gamma": 0.3},
    ])
    def test_kraus_round_trip(self, spec):
        ch = io.channel_from_spec(spec)
        back = io.channel_from_spec(json.loads(json.dumps(io.channel_to_spec(ch))))
        np.testing.assert_allclose(superoperator_matrix(back), superoperator_matrix(ch), atol=1e-14)

    def test_sdc_matches_constructor(self):
        ch = io.channel_from_spec({"type": "sdc", "n": 16, "eps": 0.5, "alpha": 0.5})
        assert eta(ch) == eta(sdc_channel(TorusSpace(16), 0.5, 0.5))

    @pytest.mark.parametrize("spec", [
        {"n": 4}, {"type": "nope", "n": 4}, {"type": "sdc", "n": 4, "eps": 0.5},
        {"type": "sdc", "eps": 0.5, "alpha": 0.5}, "sdc",
        {"type": "kraus", "n": 2, "ops": [[1, 0], [0, 1]]},
    ])
    def test_bad_specs(self, spec):
        with pytest.raises(io.SpecError):
            io.channel_from_spec(spec)

    def test_space_override(self):
        sp = TorusSpace(6, 0.5, 0.5)
        ch = io.channel_from_spec({"type": "sloppy", "n": 99, "delta": 1 / 3}, sp)
        assert ch.space == sp

    def test_map_specs(self):
        sp = io.map_space({"type": "baker"}, 8)
        assert (sp.N, sp.theta_q, sp.theta_p) == (8, 0.5, 0.5)
        assert io.map_space({"type": "standard", "k": 0.1}, 8).theta_q == 0.0
        with pytest.raises(io.SpecError):
            io.unitary_from_spec({"type": "cat"}, sp)


class TestFormats:
    def test_gray_levels(self):
        px, const = io.gray_levels(np.array([[0.0, 1.0], [0.5, 0.25]]))
        assert not const
        np.testing.assert_array_equal(px, [[255, 0], [128, 191]])

    def test_constant(self):
        px, const = io.gray_levels(np.zeros((3, 3)))
        assert const and np.all(px == 128)

    def test_pgm_round_trip(self, tmp_path):
        px = np.arange(12).reshape(3, 4) * 20
        io.write_pgm(tmp_path / "a.pgm", px, ["hello"])
        data, maxval, comments = io.read_pgm(tmp_path / "a.pgm")
        np.testing.assert_array_equal(data, px)
        assert maxval == 255 and comments == ["hello"]
        assert (tmp_path / "a.pgm").read_text().splitlines()[0] == "P2"

    def test_csv_repr_round_trip(self, tmp_path):
        x = 0.1 + 0.2
        io.write_csv(tmp_path / "a.csv", ["x", "flag", "n"], [(x, True, 3)])
        header, rows = io.read_csv(tmp_path / "a.csv")
        assert header == ["x", "flag", "n"]
        assert float(rows[0][0]) == x and rows[0][1:] == ["true", "3"]

    def test_field_image_orientation(self):
        v = np.zeros((4, 3))
        v[0, 2] = 1  # q smallest, p largest -> top-left
        assert io.field_image(v)[0, 0] == 1

    def test_montage(self):
        imgs = [np.full((2, 3), i) for i in range(3)]
        m = io.montage(imgs, ncols=2, pad=1)
        assert m.shape == (5, 7)
        assert m[0, 4] == 1 and m[3, 0] == 2 and m[4, 6] == 255

    def test_json_non_finite(self, tmp_path):
        io.write_json(tmp_path / "a.json", {"b": np.float64("nan"), "a": np.arange(2)})
        assert json.loads((tmp_path / "a.json").read_text()) == {"a": [0, 1], "b": "nan"}


class TestConfig:
    def test_grid(self):
        assert parse_grid("128x64") == (128, 64)
        assert parse_grid([3, 4]) == (3, 4)
        with pytest.raises(ConfigError):
            parse_grid("12by3")

    def test_default_grid(self):
        assert ExperimentConfig("report", n=16).grid_shape == (32, 32)

    def test_file_and_overrides(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"n": 8, "seed": 4, "classical": {"k": 0.1}}))
        cfg = load_config("classical", p, seed=9, out=str(tmp_path))
        assert (cfg.n, cfg.seed, cfg.classical["k"], cfg.classical["delta"]) == (8, 9, 0.1, 0.6)
        assert "out" not in cfg.provenance()

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config("report", None, colour="red")

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("plot")

    def test_empty_ranges(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("eta-sweep", alphas=[])
        with pytest.raises(ConfigError):
            ExperimentConfig("invariant", sweep={"eps": [0.1], "alpha": []})


class TestEtaSweep:
    def test_shape_and_saturation(self, tmp_path):
        alphas = [1 / 64] + [k / 32 for k in range(1, 33)]
        out = {}
        for e in (0.5, 0.75):
            run(ExperimentConfig("eta-sweep", n=32, eps=e, alphas=alphas, out=str(tmp_path)))
            out[e] = csv_columns(tmp_path / f"eta_sweep_eps{e:g}.csv")
        c = out[0.5]
        assert np.all(np.abs(c["eta_exact"] - c["eta_channel"]) < 1e-10)
        assert np.all(np.diff(c["eta_exact"]) <= 1e-12)
        assert c["eta_exact"][-1] == 0.0
        assert c["eta_exact"][0] == pytest.approx(7.75, abs=1e-12)
        assert np.all(out[0.75]["eta_exact"] >= c["eta_exact"])

    def test_header(self, tmp_path):
        run(ExperimentConfig("eta-sweep", n=8, eps=0.5, out=str(tmp_path)))
        header, rows = io.read_csv(tmp_path / "eta_sweep_eps0.5.csv")
        assert header == ["alpha", "eta_exact", "eta_channel", "eta_analytic"] and len(rows) == 8

    def test_bad_alpha(self, tmp_path):
        with pytest.raises(ConfigError):
            run(ExperimentConfig("eta-sweep", n=8, alphas=[0.0, 0.5], out=str(tmp_path)))


class TestGammaMap:
    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
    def test_light_fraction(self, tmp_path, alpha):
        s = run(ExperimentConfig("gamma-map", n=64, out=str(tmp_path),
                                 channel={"type": "sdc", "eps": 0.5, "alpha": alpha}))
        assert abs(s["light_fraction"] - (1 - alpha)) < 0.1

    def test_sloppy_bands(self, tmp_path):
        d = 0.25
        run(ExperimentConfig("gamma-map", n=64, out=str(tmp_path),
                             channel={"type": "sloppy", "delta": d}))
        v = io.read_grid_csv(tmp_path / "gamma_map.csv", "value")
        profile = v.mean(axis=0)  # along p
        assert np.max(np.abs(v - profile[None, :])) < 1e-12  # no q dependence
        pos = np.mean(profile > profile.max() / 2)
        neg = np.mean(profile < profile.min() / 2)
        assert abs(pos - d / 2) < 2 / 64 and abs(neg - d / 2) < 2 / 64
        # positive band sits just below p = 1/2, negative band just below p = 1
        ps = (np.arange(128) + 0.5) / 128
        assert np.all((ps[profile > profile.max() / 2] > 0.5 - d / 2 - 0.05)
                      & (ps[profile > profile.max() / 2] < 0.5))
        assert np.all(ps[profile < profile.min() / 2] > 1 - d / 2 - 0.05)

    def test_unital_mid_gray(self, tmp_path):
        s = run(ExperimentConfig("gamma-map", n=8, out=str(tmp_path),
                                 channel={"type": "identity"}))
        assert s["constant_field"]
        px, _, comments = io.read_pgm(tmp_path / "gamma_map.pgm")
        assert np.all(px == 128) and any("constant-field" in c for c in comments)

    def test_black_is_maximum(self, tmp_path):
        run(ExperimentConfig("gamma-map", n=16, out=str(tmp_path),
                             channel={"type": "sdc", "eps": 0.5, "alpha": 0.5}))
        px, _, _ = io.read_pgm(tmp_path / "gamma_map.pgm")
        v = io.field_image(io.read_grid_csv(tmp_path / "gamma_map.csv", "value"))
        assert np.all(px[v == v.max()] == 0) and np.all(px[v == v.min()] == 255)


class TestInvariant:
    def test_identity_noise(self, tmp_path):
        s = run(ExperimentConfig("invariant", n=8, out=str(tmp_path), channel={"type": "identity"}))
        assert s["unital"] and "note" in s
        assert s["report"]["iterations"] == 1

    def test_default_run(self, tmp_path):
        s = run(ExperimentConfig("invariant", n=16, out=str(tmp_path)))
        assert s["report"]["converged"] and not s["unital"]
        assert (tmp_path / "invariant.pgm").exists() and (tmp_path / "invariant.csv").exists()
        # centred momentum axis in the CSV
        p = csv_columns(tmp_path / "invariant.csv")["p"]
        assert p.min() < 0 < p.max()

    def test_nonconvergence_still_writes(self, tmp_path):
        s = run(ExperimentConfig("invariant", n=8, max_iter=2, out=str(tmp_path)))
        assert not s["report"]["converged"]
        assert (tmp_path / "invariant.json").exists()

    def test_sweep_layout(self, tmp_path):
        s = run(ExperimentConfig("invariant", n=8, grid=(8, 8), out=str(tmp_path),
                                 sweep={"eps": [0.2, 0.4], "alpha": [0.125, 0.5, 1.0]}))
        assert len(s["panels"]) == 6
        px, _, comments = io.read_pgm(tmp_path / "invariant_sweep.pgm")
        assert px.shape == (2 * 8 + 2, 3 * 8 + 2 * 2)
        assert comments[0].startswith("rows: eps")


class TestClassicalCmd:
    def test_space_filling(self, tmp_path):
        s = run(ExperimentConfig("classical", out=str(tmp_path), grid=(64, 64),
                                 classical={"delta": 1.0, "n_traj": 500, "n_steps": 300,
                                            "transient": 50}))
        assert s["occupied_fraction"] > 0.5

    def test_zero_trajectories(self, tmp_path):
        s = run(ExperimentConfig("classical", out=str(tmp_path), grid=(8, 8),
                                 classical={"n_traj": 0, "n_steps": 10, "transient": 1}))
        assert s["total"] == 0 and s["constant_field"]
        header, rows = io.read_csv(tmp_path / "classical.csv")
        assert header == ["q_index", "p_index", "count"] and len(rows) == 64

    def test_bad_delta(self, tmp_path):
        with pytest.raises(ConfigError):
            run(ExperimentConfig("classical", out=str(tmp_path), classical={"delta": 0.0}))


class TestCompare:
    def test_self(self, rng):
        a = rng.random((16, 16))
        r = compare_fields(a, a)
        assert r["pearson"] == pytest.approx(1.0) and r["top_overlap"] == 1.0

    def test_uniform(self, rng):
        r = compare_fields(rng.random((16, 16)), np.ones((16, 16)))
        assert r["pearson"] == 0.0 and r["constant_field"]

    def test_mismatch(self):
        with pytest.raises(GridMismatchError):
            compare_fields(np.zeros((4, 4)), np.zeros((4, 5)))

    def test_from_files(self, tmp_path):
        q, c = tmp_path / "q", tmp_path / "c"
        run(ExperimentConfig("invariant", n=8, grid=(16, 16), out=str(q)))
        run(ExperimentConfig("classical", grid=(16, 16), out=str(c),
                             classical={"n_traj": 50, "n_steps": 100, "transient": 10}))
        s = run(ExperimentConfig("compare", out=str(tmp_path), grid=(16, 16),
                                 inputs={"quantum": str(q / "invariant.csv"),
                                         "classical": str(c / "classical.csv")}))
        assert -1 <= s["pearson"] <= 1 and s["top_cells"] == 26

    def test_file_mismatch(self, tmp_path):
        q, c = tmp_path / "q", tmp_path / "c"
        run(ExperimentConfig("invariant", n=8, grid=(16, 16), out=str(q)))
        run(ExperimentConfig("classical", grid=(8, 8), out=str(c),
                             classical={"n_traj": 5, "n_steps": 10, "transient": 1}))
        with pytest.raises(GridMismatchError):
            run(ExperimentConfig("compare", out=str(tmp_path),
                                 inputs={"quantum": str(q / "invariant.csv"),
                                         "classical": str(c / "classical.csv")}))


class TestReport:
    def test_sloppy(self, tmp_path):
        s = run(ExperimentConfig("report", n=16, out=str(tmp_path),
                                 channel={"type": "sloppy", "delta": 0.25}))
        assert s["eta"] == pytest.approx(0.25, abs=1e-12) and not s["unital"]
        assert set(s) >= {"tp_residual", "unital", "eta", "eta_from_purity", "eta_from_affine",
                          "v1_norm_sq", "kraus_count", "subleading_modulus"}

    def test_rup(self, tmp_path):
        s = run(ExperimentConfig("report", n=16, out=str(tmp_path),
                                 channel={"type": "rup", "sigma": 0.1}))
        assert s["eta"] < 1e-12 and s["unital"]

    def test_sdc(self, tmp_path):
        s = run(ExperimentConfig("report", n=16, out=str(tmp_path),
                                 channel={"type": "sdc", "eps": 0.5, "alpha": 0.5}))
        assert s["eta"] == pytest.approx(0.25, abs=1e-12)
        saved = json.loads((tmp_path / "report.json").read_text())
        assert saved["kraus_count"] == 17 and saved["config"]["command"] == "report"

    def test_large_n_first_column(self, tmp_path):
        s = run(ExperimentConfig("report", n=40, out=str(tmp_path),
                                 channel={"type": "sdc", "eps": 0.5, "alpha": 0.5}))
        assert abs(s["eta_from_affine"] - s["eta"]) < 1e-10 and "subleading_modulus" not in s


class TestCLI:
    def test_main(self, tmp_path, capsys):
        rc = cli.main(["report", "--n", "8", "--out", str(tmp_path),
                       "--channel", '{"type": "sdc", "eps": 0.5, "alpha": 0.25}'])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["eta"] == pytest.approx(0.75)

    def test_error_exit(self, tmp_path, capsys):
        rc = cli.main(["report", "--n", "8", "--out", str(tmp_path),
                       "--channel", '{"type": "sloppy", "delta": 0.3}'])
        assert rc == 2 and "error" in capsys.readouterr().err

    def test_config_file(self, tmp_path, capsys):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"n": 8, "alphas": [0.25, 0.5], "eps": [0.5, 0.75]}))
        assert cli.main(["eta-sweep", "--config", str(p), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "eta_sweep_eps0.75.csv").exists()

    @pytest.mark.parametrize("argv", [
        ["eta-sweep", "--n", "16", "--eps", "0.5"],
        ["gamma-map", "--n", "16", "--channel", '{"type": "sdc", "eps": 0.5, "alpha": 0.3}'],
        ["invariant", "--n", "8", "--grid", "16x16"],
        ["classical", "--grid", "32x32", "--seed", "5"],
        ["report", "--n", "8", "--channel", '{"type": "rup", "sigma": 0.2}'],
    ])
    def test_deterministic(self, tmp_path, argv):
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.main(argv + ["--out", str(a)]) == 0
        assert cli.main(argv + ["--out", str(b)]) == 0
        files = sorted(p.name for p in a.iterdir())
        assert files == sorted(p.name for p in b.iterdir()) and files
        for name in files:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
