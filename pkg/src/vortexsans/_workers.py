"""Worker-count policy for the embarrassingly parallel loops."""

import os


def worker_count():
    """Number of parallel workers, capped by the VORTEX_THREADS env var."""
    n = os.cpu_count() or 1
    cap = os.environ.get("VORTEX_THREADS")
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n
