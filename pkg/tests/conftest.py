import numpy as np
import pytest
from hypothesis import settings

from fwintervene import optimizer
from fwintervene.generators import random_graph

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# every InterventionResult built during a test, validated at teardown
_RESULTS = []
# running total over the session, reported by the acceptance suite
CHECKED = [0]
_Base = optimizer.InterventionResult


class _Recorded(_Base):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        _RESULTS.append(self)


@pytest.fixture(autouse=True)
def _validate_results(monkeypatch):
    monkeypatch.setattr(optimizer, "InterventionResult", _Recorded)
    _RESULTS.clear()
    yield _RESULTS
    for res in _RESULTS:
        optimizer.check_result(res)
    CHECKED[0] += len(_RESULTS)
    _RESULTS.clear()


@pytest.fixture
def results_log():
    """The list of results checked after the test (for counting runs)."""
    return _RESULTS


def gapped_graph(n, density, seed, r=1, min_gap=1e-3, weights="uniform"):
    """First random graph from ``seed`` upwards whose r-th spectral gap exceeds ``min_gap``."""
    while True:
        g = random_graph(n, density, seed=seed, weights=weights)
        s = np.linalg.svd(g.to_dense(), compute_uv=False)
        if g.edge_count and s[r - 1] - s[r] > min_gap:
            return g
        seed += 10_000


# acceptance criterion -> (status, detail), echoed again in the terminal summary
_CRITERIA = {}


def report(number, ok, detail):
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    _CRITERIA[number] = (status, detail)
    line = f"criterion {number:2d}: {status}  {detail}"
    capman = _PLUGINS[0].getplugin("capturemanager") if _PLUGINS else None
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)


_PLUGINS = []


def pytest_configure(config):
    _PLUGINS.append(config.pluginmanager)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        status, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {detail}")
