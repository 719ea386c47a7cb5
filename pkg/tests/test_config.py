import pytest

from utils.config import Settings, settings
from utils.errors import ConfigError


def test_defaults():
    """Test the built-in limits when the environment is empty"""
    config = Settings.from_env({})
    assert config.factor_trial_limit == 10**6
    assert config.iterate_max_slots == 2**20
    assert config.census_workers == 1
    assert config.database_url == "sqlite:///census.db"


def test_from_env():
    """Test that upper-cased variables override the fields"""
    config = Settings.from_env({
        "FACTOR_TRIAL_LIMIT": "5000",
        "ITERATE_MAX_SLOTS": "64",
        "DATABASE_URL": "sqlite:///other.db",
        "LOG_LEVEL": "DEBUG",
        "CENSUS_WORKERS": "",
    })
    assert config.factor_trial_limit == 5000
    assert config.iterate_max_slots == 64
    assert config.database_url == "sqlite:///other.db"
    assert config.log_level == "DEBUG"
    assert config.census_workers == 1


@pytest.mark.parametrize("value", ["abc", "0", "-5"])
def test_from_env_rejects_bad_integers(value):
    with pytest.raises(ConfigError):
        Settings.from_env({"CENSUS_MAX_VOLUME": value})


def test_override_restores_values():
    """Test that override is undone on exit, even after an error"""
    before = settings.factor_trial_limit
    with pytest.raises(RuntimeError):
        with settings.override(factor_trial_limit=97, iterate_max_slots=None):
            assert settings.factor_trial_limit == 97
            raise RuntimeError("inside")
    assert settings.factor_trial_limit == before


def test_override_validates_before_changing():
    """Test that a bad value leaves every field untouched"""
    before = (settings.factor_trial_limit, settings.iterate_max_slots)
    with pytest.raises(ConfigError):
        with settings.override(factor_trial_limit=97, iterate_max_slots=0):
            pass
    with pytest.raises(ConfigError):
        with settings.override(no_such_setting=1):
            pass
    assert (settings.factor_trial_limit, settings.iterate_max_slots) == before
