import pytest

from pt_toric.engine import clear_caches

# filled by test_acceptance: criterion number -> (passed, summary)
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def fresh_caches():
    clear_caches()
    yield
    clear_caches()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {text}")
