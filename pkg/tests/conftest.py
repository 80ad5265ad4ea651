import pytest

from nbpas.code import build_code, systematic_form
from nbpas.gf import field_new
from nbpas.simulate import MODES, config_from_run, preset_run_config


class Mode:
    def __init__(self, name):
        self.name = name
        self.rc = preset_run_config(name)
        self.config = config_from_run(self.rc)
        preset = MODES[name]
        self.H = build_code(preset.d_c, preset.lifting_n, field_new(self.config.p), seed=0)
        self.enc = systematic_form(self.H)


_cache = {}


def get_mode(name):
    if name not in _cache:
        _cache[name] = Mode(name)
    return _cache[name]


@pytest.fixture(scope="session")
def mode1():
    return get_mode("mode1")


@pytest.fixture(scope="session", params=["mode1", "mode2", "mode3"])
def table_mode(request):
    return get_mode(request.param)


_acceptance = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)``; summarized at the end of the run."""

    def record(n, ok, detail):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _acceptance[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance:
        terminalreporter.section("acceptance")
        for n in sorted(_acceptance):
            terminalreporter.write_line(_acceptance[n])
