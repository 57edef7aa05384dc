import functools

import numpy as np
import pytest

from approxmul.builders import build_dadda, build_design1, build_design2, build_initial_design
from approxmul.netlist import elaborate
from approxmul.simulator import signed_error_table

BUILDERS = {
    "dadda": lambda: build_dadda(8),
    "initial": build_initial_design,
    "design1": build_design1,
    "design2": build_design2,
}


@functools.lru_cache(maxsize=None)
def plan_of(name):
    return BUILDERS[name]()


@functools.lru_cache(maxsize=None)
def netlist_of(name):
    return elaborate(plan_of(name))


@functools.lru_cache(maxsize=None)
def errors_of(name):
    e = signed_error_table(netlist_of(name))
    e.setflags(write=False)
    return e


def exact_products():
    v = np.arange(256, dtype=np.int64)
    return np.outer(v, v)


@pytest.fixture(params=["initial", "design1", "design2"])
def proposed(request):
    return request.param


# acceptance criteria report one line each; printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
