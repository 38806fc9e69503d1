"""Environment-driven defaults."""

import os

WORKERS_ENV = "SRTM_WORKERS"


def default_workers():
    """Worker count from ``SRTM_WORKERS`` (default 1)."""
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1
