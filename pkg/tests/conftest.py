import numpy as np
import pytest
from scipy.stats import unitary_group

_LOG_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LOG_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Append ``(criterion, passed, detail)``; printed in the terminal summary."""
    return request.config.stash[_LOG_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_LOG_KEY, [])
    if not log:
        return
    verdict: dict[str, bool] = {}
    for crit, ok, _ in log:
        verdict[crit] = verdict.get(crit, True) and ok
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in log:
        terminalreporter.write_line(f"  [{'PASS' if ok else 'FAIL'}] {crit}: {detail}")
    terminalreporter.write_line("")
    for crit in sorted(verdict, key=lambda c: int(c.split()[-1])):
        terminalreporter.write_line(f"{crit}: {'PASS' if verdict[crit] else 'FAIL'}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(k: int, seed: int) -> np.ndarray:
    if k == 1:  # unitary_group needs dim >= 2
        phase = np.random.default_rng(seed).uniform(-np.pi, np.pi)
        return np.array([[np.exp(1j * phase)]])
    return unitary_group.rvs(k, random_state=seed)


def random_unit_vector(rng, k: int) -> np.ndarray:
    v = rng.normal(size=k) + 1j * rng.normal(size=k)
    return v / np.linalg.norm(v)
