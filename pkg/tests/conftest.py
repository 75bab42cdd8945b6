import hypothesis
import numpy as np
import pytest

from expertrec.neural import TrainConfig, train
from expertrec.retrieve import build_index
from expertrec.synthetic import load_bundled
from expertrec.vectorize import build_documents, build_matrix, build_vocabulary

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")


def pytest_configure(config):
    config._criterion_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], item.name)
        if rep.when == "call" or (rep.when == "setup" and rep.failed):
            item.config._criterion_results[rep.criterion] = rep.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criterion_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), outcome in sorted(results.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {name}")


class Pipeline:
    """Records -> documents -> vocabulary -> matrix for one bundled corpus."""

    def __init__(self, name):
        self.records = load_bundled(name)
        self.docs = build_documents(self.records)
        self.vocab = build_vocabulary(self.docs)
        self.matrix = build_matrix(self.docs, self.vocab)


@pytest.fixture(scope="session")
def sample():
    return Pipeline("sample")


@pytest.fixture(scope="session")
def disjoint():
    return Pipeline("disjoint")


@pytest.fixture(scope="session")
def sample_model(sample):
    cfg = TrainConfig(epochs=2, hidden=(64, 32, 24, 20), seed=3)
    model, _ = train(sample.matrix, cfg)
    return model


@pytest.fixture(scope="session")
def sample_index(sample_model, sample):
    return build_index(sample_model, sample.matrix)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
