"""
Settings access for the synchronization services.

Services run both inside the Django project and as a plain library; outside
a configured project the defaults below apply.
"""
import os
from typing import Any

from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'NCS_THREADS': 0,
    'NCS_DEFAULT_ETA': 2.0,
    'NCS_DEFAULT_SIGMA': 1.0,
    'NCS_FAULT_MIN': 2.0,
    'NCS_FAULT_MAX': 8.0,
    'NCS_OFFSET_RANGE': 10.0,
    'NCS_MIN_GRAPH_LIMIT': 16,
    'NCS_MIN_GRAPH_MAX_NODES': 9,
    'NCS_SWEEP_EXHAUSTIVE_CAP': 2000,
    'NCS_SWEEP_SAMPLE_SIZE': 200,
}


def get_setting(name: str) -> Any:
    """Return an ``NCS_*`` setting, falling back to the built-in default."""
    from django.conf import settings

    try:
        return getattr(settings, name, DEFAULTS[name])
    except ImproperlyConfigured:
        return DEFAULTS[name]


def worker_count(requested: int | None = None) -> int:
    """
    Resolve the number of worker processes.

    Args:
        requested: Explicit count; None or 0 defers to NCS_THREADS.

    Returns:
        At least 1.
    """
    count = requested if requested else get_setting('NCS_THREADS')
    if not count:
        count = os.cpu_count() or 1
    return max(1, int(count))
