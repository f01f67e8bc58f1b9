"""Resource caps, overridable through environment variables or CLI flags.

INCOMPAT_MAX_SDP_DIM   caps sum(block_size^2) accepted by the SDP solver
INCOMPAT_MAX_CLASSES   caps the co-tree rank enumerated by switching_classes
INCOMPAT_THREADS       worker threads for the orientation scan (1 = sequential)
"""

from __future__ import annotations

import os

_DEFAULTS = {
    "max_sdp_dim": 4_000_000,
    "max_classes": 24,
    "threads": 1,
}

_overrides: dict[str, int] = {}


def get(name: str) -> int:
    if name in _overrides:
        return _overrides[name]
    env = os.environ.get("INCOMPAT_" + name.upper())
    if env is not None:
        try:
            return int(env)
        except ValueError:
            pass  # unreadable env values fall back to the default
    return _DEFAULTS[name]


def set_override(name: str, value: int | None) -> None:
    if name not in _DEFAULTS:
        raise KeyError(name)
    if value is None:
        _overrides.pop(name, None)
    else:
        _overrides[name] = int(value)
