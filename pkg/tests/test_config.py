import pytest

from app.config import Settings


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("RINDLER_SIM_TAIL_TOL", "1e-6")
    monkeypatch.setenv("RINDLER_SIM_THREADS", "3")
    monkeypatch.setenv("RINDLER_SIM_MAX_DIMENSION", "1000")
    settings = Settings()
    assert settings.tail_tol == 1e-6
    assert settings.worker_count == 3
    assert settings.max_dimension == 1000


def test_worker_count_never_below_one():
    assert Settings(threads=0).worker_count == 1


@pytest.mark.parametrize("overrides", [
    {"threads": 0},
    {"tail_tol": 1.5},
    {"max_dimension": 0},
    {"frame_padding": -1},
    {"series_max_terms": 0},
    {"hermiticity_tol": 0.0},
])
def test_validate_config_rejects_bad_values(overrides, tmp_path):
    with pytest.raises(ValueError):
        Settings(output_dir=str(tmp_path), **overrides).validate_config()


def test_validate_config_creates_output_directory(tmp_path):
    target = tmp_path / "reports" / "nested"
    settings = Settings(output_dir=str(target))
    settings.validate_config()
    assert target.is_dir()
    assert settings.output_path == target
