"""Enumeration limits; every brute-force loop consults these before starting."""
from __future__ import annotations

import os

from .errors import BoundExceeded

DEFAULT_MAX_CARRIER = 6
DEFAULT_MAX_MAPS = 10**7
ISO_SEARCH_BOUND = 9

MAPS = "configured map bound"

_config = {"max_maps": DEFAULT_MAX_MAPS, "max_carrier": None}


def max_carrier() -> int:
    if _config["max_carrier"] is not None:
        return _config["max_carrier"]
    return int(os.environ.get("QAW_MAX_CARRIER", DEFAULT_MAX_CARRIER))


def max_maps() -> int:
    return _config["max_maps"]


def configure(max_maps: int | None = None, max_carrier: int | None = None) -> None:
    """Override the bounds for the rest of the process (the CLI flags land here)."""
    if max_maps is not None:
        _config["max_maps"] = max_maps
    if max_carrier is not None:
        _config["max_carrier"] = max_carrier


def reset() -> None:
    _config.update(max_maps=DEFAULT_MAX_MAPS, max_carrier=None)


def check(count: int, limit, what: str) -> None:
    """Raise :class:`BoundExceeded` when ``count`` passes ``limit``.

    ``limit`` may be ``MAPS`` for the configured map bound, or ``None`` for no bound.
    """
    if limit == MAPS:
        limit = _config["max_maps"]
    if limit is not None and count > limit:
        raise BoundExceeded(f"{what}: {count} exceeds bound {limit}")


def check_carrier(size: int, what: str = "carrier") -> None:
    check(size, max_carrier(), what)
