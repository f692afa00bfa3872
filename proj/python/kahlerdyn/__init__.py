"""Torus automorphisms: dynamical degrees, Green currents, entropy."""

import json
import os

from . import _core
from ._core import KahlerdynError, UsageError

__all__ = [
    "KahlerdynError",
    "UsageError",
    "kinds",
    "degrees",
    "lyapunov",
    "brin_katok",
    "validate_config",
    "run_config",
    "run_file",
]

SCHEMA_VERSION = _core.schema_version


def kinds():
    return list(_core.kinds())


def degrees(torus):
    """torus: dict as in the config files ({"k": .., "A": ..} etc)."""
    return json.loads(_core.degrees(json.dumps(torus)))


def lyapunov(torus):
    return json.loads(_core.lyapunov(json.dumps(torus)))


def brin_katok(torus, n, epsilon, samples=100000, seed=1, method="auto"):
    return json.loads(_core.brin_katok(json.dumps(torus), n, epsilon, samples, seed, method))


def validate_config(config, base_dir="."):
    return json.loads(_core.validate_config(json.dumps(config), base_dir))


def run_config(config, base_dir=".", persist=False):
    """Runs one experiment; returns the report dict (with timing)."""
    return json.loads(_core.run_config(json.dumps(config), base_dir, persist))


def run_file(path, persist=False):
    with open(path) as fh:
        config = json.load(fh)
    return run_config(config, os.path.dirname(os.path.abspath(path)), persist)
