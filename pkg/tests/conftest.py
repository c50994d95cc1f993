import pytest

from fracchenlee import _pykernels
from fracchenlee._backend import BACKEND

ACCEPTANCE_LINES = []


@pytest.fixture(params=["python", "cython"])
def backend(request, monkeypatch):
    """Run the decorated test once per available kernel backend."""
    if request.param == "python":
        impl = _pykernels
    else:
        try:
            from fracchenlee import _ckernels as impl
        except ImportError:
            pytest.skip("compiled kernels not built")
    import fracchenlee.integrator as integ

    monkeypatch.setattr(integ, "kernels", impl)
    return request.param


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section(f"acceptance criteria (kernel backend: {BACKEND})")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
