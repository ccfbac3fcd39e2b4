"""The preset registry and its on-disk config files."""

from __future__ import annotations

import re
from pathlib import Path

import pytest

from pinnbench import harness, network
from pinnbench.errors import ConfigurationError
from pinnbench.presets import (PRESETS, ExperimentConfig, config_from_dict,
                               get_preset, preset_names)

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"


class TestRegistry:
    def test_inventory(self):
        names = preset_names()
        assert len(names) == 150

        def count(pat):
            return sum(bool(re.match(pat, n)) for n in names)

        assert count(r"poisson_d(1|2|3|10)_") == 24
        assert count(r"burgers1_inviscid_") == 12
        assert count(r"burgers1_viscid_") == 54
        assert count(r"burgers2_") == 9
        assert count(r"burgers3_") == 24
        assert count(r"kdv1_") == 12
        assert count(r"kdv2_") == 12
        assert count(r"kdv3_") == 3

    @pytest.mark.parametrize("name", preset_names())
    def test_resolves(self, name):
        prob, model, risk, train = PRESETS[name].resolve()
        assert model.problem is prob
        m = re.search(r"_(\d+)p$", name)
        if m:
            assert network.param_count(model.spec) == int(m.group(1))

    def test_kdv1_example(self):
        cfg = get_preset("kdv1_initial_included_57p")
        assert cfg.epochs == 60000
        assert cfg.n_bulk == 500
        assert cfg.boundary_per_face == [125, 125]
        assert cfg.n_initial is None  # initial term built into the model
        assert cfg.activation == "sigmoid"
        assert cfg.q_blend == 1e-9

    def test_poisson_d10_example(self):
        cfg = get_preset("poisson_d10_residual_b_lambda5")
        assert cfg.epochs == 7000
        assert cfg.n_bulk == 5000
        assert cfg.lam == 5.0
        assert cfg.model_kind == "boundary_included_scaled"

    def test_penalty_betas(self):
        assert get_preset("poisson_d2_energy_p").beta_penalty == 50.0
        assert get_preset("poisson_d2_residual_p").beta_penalty == 200.0
        assert get_preset("poisson_d2_residual_p").n_bulk == 10000

    def test_kdv3_preset(self):
        cfg = get_preset("kdv3_initial_included_3297p")
        assert (cfg.depth, cfg.width) == (5, 32)
        assert cfg.activation == "sin"
        assert cfg.epochs == 5000
        assert cfg.n_bulk == 18000
        assert cfg.q_blend == 1e-4

    def test_burgers3_faces(self):
        cfg = get_preset("burgers3_nu0p01_vanilla_75p")
        assert cfg.boundary_per_face == [166, 166, 166, 166, 170, 170]
        assert cfg.problem().nu == pytest.approx(0.01)

    def test_unknown_preset_lists_available(self):
        with pytest.raises(ConfigurationError, match="kdv1_initial_included_57p"):
            get_preset("nope")


class TestConfigParsing:
    def test_unknown_key_rejected(self):
        data = get_preset("kdv1_vanilla_57p").to_dict()
        data["optimzer"] = "adam"
        with pytest.raises(ConfigurationError):
            config_from_dict(data)

    def test_roundtrip_through_yaml(self, tmp_path):
        cfg = get_preset("burgers2_vanilla_66p")
        path = tmp_path / "cfg.yaml"
        harness.write_config(cfg, path)
        assert harness.load_config(path) == cfg

    def test_bad_yaml_is_config_error(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("{: not yaml")
        with pytest.raises(ConfigurationError):
            harness.load_config(path)


class TestShippedFiles:
    def test_every_preset_has_a_file(self):
        files = {p.stem for p in PRESET_DIR.glob("*.yaml")}
        assert files == set(preset_names())

    @pytest.mark.parametrize("name", ["kdv1_initial_included_57p",
                                      "poisson_d10_residual_b_lambda5",
                                      "burgers1_viscid_nu10_vanilla_3441p"])
    def test_file_matches_registry(self, name):
        assert harness.load_config(PRESET_DIR / f"{name}.yaml") == PRESETS[name]
