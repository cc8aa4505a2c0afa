import pytest

from unisimplex import _backend

BACKENDS = _backend.available_backends()


def pytest_addoption(parser):
    parser.addoption("--kernels", choices=BACKENDS, default=None, help="force the default kernel backend")


def pytest_configure(config):
    choice = config.getoption("--kernels")
    if choice:
        _backend.set_backend(choice)

# (criterion number, title, passed, detail) appended by test_acceptance
ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {num:>2}: {title} -- {detail}")
    terminalreporter.write_line(f"kernel backend: {_backend.BACKEND}")
