from pathlib import Path

from app.core.config import Settings


def test_settings_defaults(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SUBAG_CACHE_DIR", raising=False)
    monkeypatch.delenv("SUBAG_DEBUG", raising=False)
    config = Settings()
    assert config.PROJECT_NAME == "subagging-cv"
    assert config.SUBAG_CACHE_DIR == Path(".subag_cache")
    assert config.SUBAG_DEBUG is False
    assert Settings.model_config["case_sensitive"] is True
    assert Settings.model_config["env_file"] == ".env"


def test_settings_read_the_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("SUBAG_CACHE_DIR", " ~/ensembles ")
    monkeypatch.setenv("SUBAG_DEBUG", "true")
    monkeypatch.setenv("UNRELATED_SETTING", "ignored")
    config = Settings()
    assert config.SUBAG_CACHE_DIR == Path("~/ensembles").expanduser()
    assert config.SUBAG_DEBUG is True


def test_settings_read_the_env_file(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SUBAG_DEBUG", raising=False)
    (tmp_path / ".env").write_text("SUBAG_DEBUG=1\nOTHER_KEY=x\n", encoding="utf-8")
    assert Settings().SUBAG_DEBUG is True
