"""Process-wide resource caps and solve policy."""

from contextlib import contextmanager
from dataclasses import dataclass, replace
import os

ENV_PREFIX = "GERBES_"


@dataclass(frozen=True)
class Settings:
    max_order: int = 4096
    max_matrix_dim: int = 20000
    level_multiplier: int = 1


def _from_env():
    kw = {}
    for name in ("max_order", "max_matrix_dim", "level_multiplier"):
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is not None:
            kw[name] = int(raw)
    return Settings(**kw)


_settings = _from_env()


def get_settings():
    return _settings


def configure(**changes):
    """Replace settings globally; returns the previous value."""
    global _settings
    old = _settings
    _settings = replace(_settings, **changes)
    return old


@contextmanager
def settings(**changes):
    old = configure(**changes)
    try:
        yield _settings
    finally:
        configure(**vars(old))
