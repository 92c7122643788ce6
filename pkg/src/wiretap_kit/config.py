"""Runtime knobs: the enumeration cap."""

import os

from .errors import EnumerationCapExceeded

DEFAULT_CAP = 1 << 24
CAP_ENV = "WIRETAP_KIT_CAP"

_override = None


def enumeration_cap():
    if _override is not None:
        return _override
    env = os.environ.get(CAP_ENV)
    if env:
        return int(env)
    return DEFAULT_CAP


def set_enumeration_cap(cap):
    """Set a process-wide cap; ``None`` restores the env/default lookup."""
    global _override
    if cap is not None and cap <= 0:
        raise ValueError("cap must be positive")
    _override = cap


def check_cap(size, cap=None):
    cap = enumeration_cap() if cap is None else cap
    if size > cap:
        raise EnumerationCapExceeded(size, cap)
    return size
