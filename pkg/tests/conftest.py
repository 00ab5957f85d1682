import numpy as np
import pytest
from hypothesis import settings

from layerheat import validate
from layerheat.config import example_problem

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def example():
    """Validated built-in example, cached across the session."""
    cache = {}

    def get(name, n=None):
        key = (name, n)
        if key not in cache:
            cache[key] = validate(example_problem(name, n))
        return cache[key]

    return get


def fourier_A(x, t, right=1.0, terms=400):
    """Series for x**3 initial data on [0, 1] with u(0)=0, u(1)=right, written out directly."""
    m = np.arange(1, terms + 1)
    # 2 int_0^1 (x^3 - right x) sin(m pi x) dx
    bm = 2 * (-1.0) ** (m + 1) * (1 - right) / (m * np.pi) + 12 * (-1.0) ** m / (m * np.pi) ** 3
    return right * x + (np.sin(np.outer(x, m * np.pi)) * np.exp(-(m * np.pi) ** 2 * t)) @ bm


ACCEPTANCE = []


def record(label, ok, detail):
    """Log one acceptance line; the terminal summary repeats them after the run."""
    line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
