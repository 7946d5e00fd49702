import numpy as np
import pytest

from brierlab import model


@pytest.fixture(scope="session")
def canonical():
    return model.canonical_model()


@pytest.fixture(scope="session")
def independent():
    return model.independence_model()


@pytest.fixture(scope="session")
def small_sample(canonical):
    return model.sample(canonical, 20_000, seed=7)


@pytest.fixture(scope="session")
def medium_sample(canonical):
    return model.sample(canonical, 100_000, seed=11)


@pytest.fixture(scope="session")
def large_sample(canonical):
    return model.sample(canonical, 1_000_000, seed=20240607)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# One PASS/FAIL line per acceptance criterion, repeated in the terminal summary.
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(capsys):
    def record(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail}"
        ACCEPTANCE_LINES.append((number, line))
        with capsys.disabled():
            print(f"\n{line}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
