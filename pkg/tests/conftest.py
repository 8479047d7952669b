import os
import tempfile
from functools import lru_cache

import pytest
from hypothesis import settings

# never touch the user's cache from the test suite
os.environ.setdefault("HILBERT_SIEGEL_CACHE", tempfile.mkdtemp(prefix="hs-cache-"))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

TABLE1_LEVELS = ("2", "2+w", "3", "3+w", "4+w", "5+w", "5+2*w", "6+w", "7")


@lru_cache(maxsize=None)
def level_result(gen: str):
    """Uncached end-to-end computation at the prime level (gen), shared across tests."""
    from hilbert_siegel.base_ring import prime_ideal
    from hilbert_siegel.pipeline import compute_level

    return compute_level([(prime_ideal(gen), 1)])


@pytest.fixture(scope="session")
def levels():
    return level_result


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
