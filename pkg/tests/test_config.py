"""Tests for the configuration module."""

import json
from pathlib import Path
from unittest.mock import patch

import pytest

from dilution_gt.config import Config, ConfigManager
from dilution_gt.errors import DilutionGTError


class TestConfig:
    """Test cases for Config class."""

    def test_init_default(self):
        """Test Config initialization with default values."""
        config = Config()
        assert config.lambda_ == pytest.approx(1 / 3)
        assert config.xi == 0.001
        assert config.delta == 0.001
        assert (config.theta0, config.theta1) == (0.2, 0.1)
        assert config.verify_budget == 10**8
        assert config.sim_budget == 2 * 10**8
        assert config.matrix_budget == 10**7
        assert config.workers == 1
        assert config.strict is False

    def test_from_dict(self):
        """Unknown keys are ignored."""
        config = Config.from_dict({"theta0": 0.05, "workers": 8, "extra_field": "ignored"})
        assert config.theta0 == 0.05
        assert config.workers == 8
        assert config.theta1 == 0.1

    def test_to_dict_round_trip(self, sample_config):
        assert Config.from_dict(sample_config.to_dict()) == sample_config

    def test_derived_params(self, sample_config):
        assert sample_config.noise.theta0 == 0.05
        assert sample_config.chernoff.lambda_ == 0.25

    def test_validate(self):
        Config().validate()
        with pytest.raises(DilutionGTError):
            Config(theta0=0.7).validate()
        with pytest.raises(DilutionGTError):
            Config(lambda_=1.5).validate()
        with pytest.raises(DilutionGTError):
            Config(delta=1.0).validate()
        with pytest.raises(DilutionGTError):
            Config(workers=0).validate()


class TestConfigManager:
    """Test cases for ConfigManager class."""

    def test_init_default_path(self, temp_dir):
        """Test ConfigManager initialization with default path."""
        with patch("dilution_gt.config.Path.home", return_value=temp_dir):
            manager = ConfigManager()
        assert manager.config_path == temp_dir / ".dilution-gt" / "config.json"
        assert manager.config_path.parent.is_dir()

    def test_init_custom_path(self, temp_config_file):
        manager = ConfigManager(temp_config_file)
        assert manager.config_path == temp_config_file

    def test_load_missing_file(self, config_manager):
        assert config_manager.load() == Config()

    def test_save_and_load(self, config_manager, sample_config):
        config_manager.save(sample_config)
        data = json.loads(config_manager.config_path.read_text())
        assert data["workers"] == 4
        assert config_manager.load() == sample_config

    def test_load_invalid_json(self, config_manager):
        config_manager.config_path.write_text("invalid json")
        assert config_manager.load() == Config()

    def test_update(self, config_manager):
        config = config_manager.update(theta0=0.05, unknown_key=3)
        assert config.theta0 == 0.05
        assert not hasattr(config, "unknown_key")
        assert config_manager.load().theta0 == 0.05

    def test_update_rejects_invalid(self, config_manager):
        with pytest.raises(DilutionGTError):
            config_manager.update(delta=2.0)
        assert not Path(config_manager.config_path).exists()
