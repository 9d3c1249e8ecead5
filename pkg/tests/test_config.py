import os

import pytest

from wmha.config import Settings
from wmha.errors import ConfigError


@pytest.fixture
def no_dotenv(tmp_path):
    return str(tmp_path / "absent.env")


def test_defaults(no_dotenv):
    assert Settings.from_env(no_dotenv) == Settings()


def test_environment_values(monkeypatch, no_dotenv):
    monkeypatch.setenv("WMHA_SEED", "7")
    monkeypatch.setenv("WMHA_WINDOWS", "4")
    monkeypatch.setenv("WMHA_CROSSCHECK", "off")
    monkeypatch.setenv("WMHA_LOG_LEVEL", "debug")
    settings = Settings.from_env(no_dotenv)
    assert settings.seed == 7
    assert settings.windows == 4
    assert settings.crosscheck is False
    assert settings.log_level == "DEBUG"


def test_dotenv_file_is_read(tmp_path):
    env = tmp_path / ".env"
    env.write_text("WMHA_REPORT_INDENT=4\nWMHA_ROUND_TRIPS=no\n", encoding="utf-8")
    try:
        settings = Settings.from_env(str(env))
    finally:
        # load_dotenv writes into os.environ
        for name in ("WMHA_REPORT_INDENT", "WMHA_ROUND_TRIPS"):
            os.environ.pop(name, None)
    assert settings.report_indent == 4
    assert settings.round_trips is False


@pytest.mark.parametrize(
    "name, value",
    [("WMHA_SEED", "seven"), ("WMHA_WINDOWS", "-1"), ("WMHA_CROSSCHECK", "maybe"), ("WMHA_LOG_LEVEL", "LOUD")],
)
def test_bad_values(monkeypatch, no_dotenv, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        Settings.from_env(no_dotenv)


def test_override_ignores_missing_flags():
    settings = Settings(seed=3).override(seed=None, windows=5)
    assert settings.seed == 3
    assert settings.windows == 5


@pytest.mark.parametrize("flag", ["windows", "seed", "report_indent"])
def test_override_rejects_negative_counts(flag):
    with pytest.raises(ConfigError):
        Settings().override(**{flag: -1})
