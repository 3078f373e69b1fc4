from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")

_verdicts = pytest.StashKey[dict]()


@pytest.fixture
def verdict(request):
    """Record one acceptance line: ``verdict(n, title, ok, detail)``."""
    store = request.config.stash.setdefault(_verdicts, {})

    def record(n: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        store[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_verdicts, {})
    if store:
        terminalreporter.section("acceptance criteria")
        for n in sorted(store):
            terminalreporter.write_line(store[n])
