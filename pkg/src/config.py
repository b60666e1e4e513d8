import json
import logging
import os
from datetime import datetime
from typing import Dict, Mapping, Union

# Numeric tolerances and sampler knobs, tunable through default_config.json.
CONFIG_FILE = os.path.join(os.path.dirname(__file__), "default_config.json")

Setting = Union[int, float, str]

RUNTIME_DEFAULTS: Dict[str, Setting] = {
    "NORMALIZATION_TOLERANCE": 1e-9,
    "IDENTITY_TOLERANCE": 1e-12,
    "PAIRWISE_SUMMATION_THRESHOLD": 1024,
    "SAMPLER_CHUNK_SIZE": 65536,
    "SAMPLER_MAX_WORKERS": 1,
    "LOG_LEVEL": "INFO",
}

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

_runtime_settings: Dict[str, Setting] = {}


def _coerce(key: str, value: object) -> Setting:
    """Cast *value* to the type of the default for *key*; bad values fall back with a warning."""

    fallback = RUNTIME_DEFAULTS[key]
    try:
        cast = type(fallback)(value)
    except (TypeError, ValueError):
        logging.warning("Setting %s=%r is not a %s; using %r.", key, value, type(fallback).__name__, fallback)
        return fallback

    if isinstance(cast, str):
        cast = cast.upper()
        if cast not in _LOG_LEVELS:
            logging.warning("Setting %s=%r is not a log level; using %r.", key, value, fallback)
            return fallback
        return cast
    if cast <= 0:
        logging.warning("Setting %s=%r must be positive; using %r.", key, value, fallback)
        return fallback
    if isinstance(cast, float) and cast >= 1e-3:
        logging.warning("Tolerance %s=%r is too coarse; using %r.", key, value, fallback)
        return fallback
    return cast


def _normalize_settings(raw_settings: Mapping[str, object]) -> Dict[str, Setting]:
    return {key: _coerce(key, raw_settings.get(key, fallback)) for key, fallback in RUNTIME_DEFAULTS.items()}


def _save_runtime_settings(settings: Mapping[str, Setting]) -> None:
    with open(CONFIG_FILE, "w", encoding="utf-8") as handle:
        json.dump(dict(settings), handle, indent=2)
        handle.write("\n")


def _load_runtime_settings() -> Dict[str, Setting]:
    """Read the JSON settings file; a missing or unreadable file is rewritten with defaults."""

    try:
        with open(CONFIG_FILE, "r", encoding="utf-8") as handle:
            stored = json.load(handle)
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        if isinstance(exc, json.JSONDecodeError):
            logging.warning("Could not parse %s; rewriting it with defaults.", CONFIG_FILE)
        defaults = dict(RUNTIME_DEFAULTS)
        _save_runtime_settings(defaults)
        return defaults

    return _normalize_settings(stored if isinstance(stored, dict) else {})


def _apply_runtime_settings(settings: Dict[str, Setting]) -> None:
    global _runtime_settings
    global NORMALIZATION_TOLERANCE
    global IDENTITY_TOLERANCE
    global PAIRWISE_SUMMATION_THRESHOLD
    global SAMPLER_CHUNK_SIZE
    global SAMPLER_MAX_WORKERS
    global LOG_LEVEL

    _runtime_settings = settings
    NORMALIZATION_TOLERANCE = float(settings["NORMALIZATION_TOLERANCE"])
    IDENTITY_TOLERANCE = float(settings["IDENTITY_TOLERANCE"])
    PAIRWISE_SUMMATION_THRESHOLD = int(settings["PAIRWISE_SUMMATION_THRESHOLD"])
    SAMPLER_CHUNK_SIZE = int(settings["SAMPLER_CHUNK_SIZE"])
    SAMPLER_MAX_WORKERS = int(settings["SAMPLER_MAX_WORKERS"])
    LOG_LEVEL = str(settings["LOG_LEVEL"])


def get_runtime_settings() -> Dict[str, Setting]:
    """Copy of the settings in effect for this process."""

    return dict(_runtime_settings)


def override_runtime_settings(overrides: Mapping[str, object]) -> Dict[str, Setting]:
    """Apply in-memory overrides for this process only; nothing is written to disk."""

    unknown = sorted(set(overrides) - set(RUNTIME_DEFAULTS))
    if unknown:
        raise KeyError(f"Unknown runtime settings: {', '.join(unknown)}")

    merged: Dict[str, object] = {**_runtime_settings, **overrides}
    _apply_runtime_settings(_normalize_settings(merged))
    return get_runtime_settings()


_apply_runtime_settings(_load_runtime_settings())


BASE_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
LOG_DIR = os.path.join(BASE_DIR, "logs")

# One log file per process run.
LOG_FILE = os.path.join(LOG_DIR, f"app_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def get_logger(name: str) -> logging.Logger:
    """Module logger writing to this run's log file and nowhere else."""

    logger = logging.getLogger(name)
    level = getattr(logging, LOG_LEVEL, logging.INFO)
    logger.setLevel(level)

    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)

    os.makedirs(LOG_DIR, exist_ok=True)
    file_handler = logging.FileHandler(LOG_FILE, encoding="utf-8", delay=True)
    file_handler.setLevel(level)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(file_handler)

    # stdout and stderr carry command output only
    logger.propagate = False
    return logger


logging.getLogger().handlers.clear()
