import json
import math

import pytest
import yaml

from phsurgery import cli
from phsurgery.config import CampaignConfig, ConfigError


@pytest.fixture()
def small_config(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({
        "samples": 64,
        "crossing_entries": 40,
        "cone_orbits": 8,
        "delta_sweep": [0.1, 0.01],
        "moser_steps": 200,
    }), encoding="utf-8")
    return path


class TestConfig:
    def test_defaults_mirror_worked_example(self):
        cfg = CampaignConfig()
        assert cfg.k == 4
        assert cfg.resolved_rho0() == pytest.approx(0.5)
        assert cfg.resolved_alpha() == pytest.approx(-0.75)
        assert cfg.lam == pytest.approx(math.exp(-2))
        spec = cfg.saddle_spec()
        assert spec.lam_prime == pytest.approx(math.exp(-1))

    def test_yaml_round_trip(self):
        cfg = CampaignConfig(samples=17, rho0=0.37, delta_sweep=[0.2, 0.05])
        again = CampaignConfig.from_yaml(cfg.to_yaml())
        assert again.to_dict() == cfg.to_dict()
        assert CampaignConfig.from_yaml(again.to_yaml()).to_yaml() == again.to_yaml()

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown fields"):
            CampaignConfig.from_dict({"not_a_field": 1})

    def test_unknown_tolerance_rejected(self):
        with pytest.raises(ConfigError, match="tolerances"):
            CampaignConfig(tolerances={"bogus": 1.0})

    def test_bad_suite_rejected(self):
        with pytest.raises(ConfigError, match="suite"):
            CampaignConfig(suite="nonsense")

    def test_volume_mode_changes_nothing_for_defaults(self):
        plain = CampaignConfig().resolved_rho0()
        vol = CampaignConfig(volume_mode=True).resolved_rho0()
        assert plain == pytest.approx(vol)


class TestCli:
    def test_homogeneous_subcommand_passes(self, small_config, tmp_path, capsys):
        out = tmp_path / "rep"
        code = cli.main(["verify-homogeneous", "--config", str(small_config),
                         "--out", str(out)])
        assert code == 0
        report = json.loads((out / "verify_homogeneous_report.json").read_text())
        assert report["passed"] is True
        assert report["schema_version"] == 1
        assert set(report["suites"]) == {"homogeneous"}
        printed = capsys.readouterr().out
        assert "[PASS]" in printed

    def test_exit_2_on_malformed_yaml(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("samples: [oops\n", encoding="utf-8")
        assert cli.main(["all", "--config", str(bad)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_exit_2_on_bad_field(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("samples: -3\n", encoding="utf-8")
        assert cli.main(["all", "--config", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "samples" in err

    def test_exit_2_on_missing_file(self, tmp_path, capsys):
        assert cli.main(["all", "--config", str(tmp_path / "none.yaml")]) == 2

    def test_forced_inadmissible_rho0_exits_1_with_witnesses(self, tmp_path, capsys):
        cfgpath = tmp_path / "bad_rho.yaml"
        cfgpath.write_text(yaml.safe_dump({
            "rho0": 1.5,  # violates the domination inequality (bound is 1.0)
            "samples": 64,
            "crossing_entries": 40,
            "cone_orbits": 8,
            "delta_sweep": [0.1],
        }), encoding="utf-8")
        out = tmp_path / "rep"
        code = cli.main(["verify-cones", "--config", str(cfgpath), "--out", str(out)])
        assert code == 1
        report = json.loads((out / "verify_cones_report.json").read_text())
        core = next(c for c in report["suites"]["cones"]["checks"]
                    if c["name"] == "core-cone-campaign")
        assert core["passed"] is False
        assert core["witness"]["violations"], "expected violation witnesses"
        types = {v["type"] for v in core["witness"]["violations"]}
        assert "domination" in types or "u-invariance" in types

    def test_seed_override_and_csv(self, small_config, tmp_path):
        out = tmp_path / "rep"
        code = cli.main(["verify-volume", "--config", str(small_config),
                         "--seed", "7", "--out", str(out), "--csv"])
        assert code == 0
        report = json.loads((out / "verify_volume_report.json").read_text())
        assert report["config"]["seed"] == 7
        csv_text = (out / "volume_measured.csv").read_text()
        assert "max_residual" in csv_text

    def test_reports_are_deterministic(self, tmp_path):
        cfg = CampaignConfig(samples=48, crossing_entries=30, cone_orbits=8,
                             delta_sweep=[0.1, 0.01], moser_steps=150, seed=42)
        r1 = cli.build_report(cfg, ("saddle", "volume", "homogeneous"))
        r2 = cli.build_report(cfg, ("saddle", "volume", "homogeneous"))
        assert (cli.canonical_json(cli.strip_timing(r1))
                == cli.canonical_json(cli.strip_timing(r2)))

    def test_strict_rejects_loosened_tolerances(self, tmp_path, capsys):
        loose = tmp_path / "loose.yaml"
        loose.write_text(yaml.safe_dump({
            "samples": 16,
            "tolerances": {"commutation": 1.0},
        }), encoding="utf-8")
        assert cli.main(["verify-volume", "--config", str(loose), "--strict",
                         "--out", str(tmp_path / "r")]) == 2
        assert "strict mode" in capsys.readouterr().err
        # tightening is fine
        tight = tmp_path / "tight.yaml"
        tight.write_text(yaml.safe_dump({
            "samples": 64,
            "tolerances": {"commutation": 1e-9},
        }), encoding="utf-8")
        assert cli.main(["verify-volume", "--config", str(tight), "--strict",
                         "--out", str(tmp_path / "r2")]) == 0

    def test_thread_pool_matches_serial(self, monkeypatch):
        cfg = CampaignConfig(samples=48, crossing_entries=30, cone_orbits=8,
                             delta_sweep=[0.1], moser_steps=150)
        serial = cli.build_report(cfg, ("volume", "homogeneous"), max_workers=1)
        threaded = cli.build_report(cfg, ("volume", "homogeneous"), max_workers=2)
        assert (cli.canonical_json(cli.strip_timing(serial))
                == cli.canonical_json(cli.strip_timing(threaded)))
