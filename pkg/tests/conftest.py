import os

# Single-worker by default so unit runs are quick and scheduling-stable.
# Tests that exercise the worker-count invariance override this via
# monkeypatch; an explicit RISNOMA_WORKERS in the environment wins.
os.environ.setdefault("RISNOMA_WORKERS", "1")
