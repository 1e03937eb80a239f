"""Python access to the ODMA unsourced random access simulator.

Configs are plain dicts with the same keys as the JSON config files.
"""

import json

from . import _core
from ._core import ConfigError, CSV_HEADER, crc, frozen_set, polar_encode, wilson_interval

__all__ = [
    "ConfigError",
    "CSV_HEADER",
    "crc",
    "desk_profile",
    "eb_n0_db",
    "find_min_eb_n0",
    "frozen_set",
    "paper_profile",
    "polar_decode",
    "polar_encode",
    "run_sweep",
    "run_trial",
    "validate",
    "wilson_interval",
]


def _dump(cfg):
    return json.dumps(cfg)


def desk_profile(ka=5.0):
    return json.loads(_core.desk_profile(ka))


def paper_profile(ka=75.0):
    return json.loads(_core.paper_profile(ka))


def validate(cfg):
    """Return cfg with defaults filled in; raises ConfigError on bad values."""
    return json.loads(_core.normalize_config(_dump(cfg)))


def eb_n0_db(cfg):
    return _core.eb_n0_db(_dump(cfg))


def polar_decode(llr, k, r=16, list_size=32):
    """Message bits, or None when no list path passes the CRC."""
    return _core.polar_decode(list(llr), k, r, list_size)


def run_trial(cfg, seed, index):
    return _core.run_trial(_dump(cfg), seed, index)


def run_sweep(cfg, ebn0, trials, workers=1):
    return _core.run_sweep(_dump(cfg), list(ebn0), trials, workers)


def find_min_eb_n0(cfg, eps, grid, trials, workers=1):
    """grid is (lo, hi, step). Returns (dB or None, evaluated points)."""
    lo, hi, step = grid
    return _core.find_min_eb_n0(_dump(cfg), eps, lo, hi, step, trials, workers)
