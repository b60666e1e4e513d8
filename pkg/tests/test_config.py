import logging

import pytest

from src import config


def test_runtime_settings_cover_every_default():
    settings = config.get_runtime_settings()

    assert set(settings) == set(config.RUNTIME_DEFAULTS)
    assert isinstance(settings["SAMPLER_CHUNK_SIZE"], int)
    assert isinstance(settings["NORMALIZATION_TOLERANCE"], float)


def test_coerce_casts_to_default_type():
    assert config._coerce("SAMPLER_CHUNK_SIZE", "128") == 128
    assert config._coerce("IDENTITY_TOLERANCE", "1e-10") == pytest.approx(1e-10)


@pytest.mark.parametrize("value", [0, -5, "not-a-number"])
def test_coerce_falls_back_to_default(value):
    assert config._coerce("SAMPLER_CHUNK_SIZE", value) == config.RUNTIME_DEFAULTS["SAMPLER_CHUNK_SIZE"]


def test_override_updates_module_constants(restore_runtime_settings):
    config.override_runtime_settings({"SAMPLER_CHUNK_SIZE": 8, "PAIRWISE_SUMMATION_THRESHOLD": 4})

    assert config.SAMPLER_CHUNK_SIZE == 8
    assert config.PAIRWISE_SUMMATION_THRESHOLD == 4
    assert config.get_runtime_settings()["SAMPLER_CHUNK_SIZE"] == 8


def test_override_rejects_unknown_keys():
    with pytest.raises(KeyError):
        config.override_runtime_settings({"NOT_A_SETTING": 1})


def test_logger_writes_to_file_only():
    logger = config.get_logger("tests.config")

    assert logger.propagate is False
    assert len(logger.handlers) == 1
    assert isinstance(logger.handlers[0], logging.FileHandler)

    again = config.get_logger("tests.config")
    assert len(again.handlers) == 1


def test_coerce_log_level():
    assert config._coerce("LOG_LEVEL", "debug") == "DEBUG"
    assert config._coerce("LOG_LEVEL", "chatty") == config.RUNTIME_DEFAULTS["LOG_LEVEL"]


def test_coarse_tolerance_falls_back():
    assert config._coerce("NORMALIZATION_TOLERANCE", 0.5) == config.RUNTIME_DEFAULTS["NORMALIZATION_TOLERANCE"]
