"""
Tests for settings loading and env overrides.
"""

import json

import pytest

from src.config import ModelSection, Settings, load_settings, save_settings
from src.config.settings import SEED_ENV
from src.core.errors import ConfigurationError
from src.models import Cnn3dConfig, LstmConfig


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Point the config home at a temp dir and keep stray .env files out."""
    monkeypatch.setenv("GESTUREBENCH_HOME", str(tmp_path / "home"))
    monkeypatch.setenv(SEED_ENV, "0")
    monkeypatch.delenv(SEED_ENV)
    monkeypatch.chdir(tmp_path)
    return tmp_path / "home"


def write_config(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestLoadSettings:
    """Tests for load_settings."""

    def test_defaults_without_file(self):
        """No config file, built-in defaults."""
        settings = load_settings()
        assert settings == Settings()
        assert settings.train.learning_rate == 1e-3
        assert settings.bench.trials == 100
        assert settings.stream.window_len == 30

    def test_reads_sections(self, tmp_path):
        """Listed keys override defaults section by section."""
        path = write_config(tmp_path / "c.json", {"train": {"epochs": 3, "batch_size": 4}, "bench": {"trials": 5}})
        settings = load_settings(path)
        assert settings.train.epochs == 3
        assert settings.train.batch_size == 4
        assert settings.bench.trials == 5

    def test_home_config_used_by_default(self, isolated_home):
        """The config under the home directory is read when no path is given."""
        isolated_home.mkdir()
        write_config(isolated_home / "config.json", {"stream": {"cooldown_frames": 9}})
        assert load_settings().stream.cooldown_frames == 9

    def test_unknown_key_is_named(self, tmp_path):
        """A misspelled key is an error naming the key."""
        path = write_config(tmp_path / "c.json", {"train": {"learning_rat": 0.1}})
        with pytest.raises(ConfigurationError, match="learning_rat"):
            load_settings(path)

    def test_unknown_section(self, tmp_path):
        """An unknown top-level section is an error."""
        path = write_config(tmp_path / "c.json", {"optimizer": {}})
        with pytest.raises(ConfigurationError, match="optimizer"):
            load_settings(path)

    def test_invalid_json(self, tmp_path):
        """Malformed JSON reports the line it broke on."""
        path = tmp_path / "c.json"
        path.write_text("{\n  oops", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="line 2"):
            load_settings(path)

    def test_missing_explicit_file(self, tmp_path):
        """An explicit path that does not exist is an error."""
        with pytest.raises(ConfigurationError, match="not found"):
            load_settings(tmp_path / "absent.json")

    def test_env_seed_overrides_file(self, tmp_path, monkeypatch):
        """The seed variable wins over train.seed."""
        path = write_config(tmp_path / "c.json", {"train": {"seed": 1}})
        monkeypatch.setenv(SEED_ENV, "42")
        assert load_settings(path).train.seed == 42

    def test_env_seed_must_be_integer(self, monkeypatch):
        """A non-integer seed variable is an error."""
        monkeypatch.setenv(SEED_ENV, "forty")
        with pytest.raises(ConfigurationError, match=SEED_ENV):
            load_settings()

    def test_dotenv_does_not_override_env(self, tmp_path, monkeypatch):
        """.env supplies the seed only when the environment does not."""
        (tmp_path / ".env").write_text(f"{SEED_ENV}=7\n", encoding="utf-8")
        assert load_settings().train.seed == 7
        monkeypatch.setenv(SEED_ENV, "8")
        assert load_settings().train.seed == 8

    def test_save_round_trip(self, tmp_path):
        """Saved settings load back equal."""
        settings = Settings.model_validate({"model": {"family": "cnn3d", "dense_size": 32}, "train": {"epochs": 2}})
        path = save_settings(settings, tmp_path / "saved.json")
        assert load_settings(path) == settings


class TestModelSection:
    """Tests for the family-tagged model section."""

    def test_default_family(self):
        """An empty model section builds the default LSTM config."""
        cfg = ModelSection().build_config()
        assert isinstance(cfg, LstmConfig)
        assert cfg == LstmConfig()

    def test_family_fields(self):
        """The family tag picks the config type."""
        section = ModelSection.model_validate({"family": "cnn3d", "dense_size": 64})
        cfg = section.build_config()
        assert isinstance(cfg, Cnn3dConfig)
        assert cfg.dense_size == 64

    def test_fields_ignored_for_other_family(self):
        """Building another family drops fields it does not have."""
        section = ModelSection.model_validate({"family": "cnn3d", "dropout_rate": 0.1})
        cfg = section.build_config("lstm", num_classes=5)
        assert isinstance(cfg, LstmConfig)
        assert cfg.dropout_rate == LstmConfig().dropout_rate
        assert cfg.num_classes == 5

    def test_overrides_fill_unset_fields_only(self):
        """Data-derived hints never override explicit fields."""
        section = ModelSection.model_validate({"family": "lstm", "num_classes": 12})
        cfg = section.build_config(num_classes=5, window_len=20)
        assert cfg.num_classes == 12
        assert cfg.window_len == 20

    def test_field_from_wrong_family(self, tmp_path):
        """A field no family declares is named in the error."""
        path = write_config(tmp_path / "c.json", {"model": {"family": "lstm", "blocks": []}})
        with pytest.raises(ConfigurationError, match="blocks"):
            load_settings(path)

    def test_unknown_family(self):
        """Unknown family tags fail validation."""
        with pytest.raises(ValueError):
            ModelSection.model_validate({"family": "transformer"})
