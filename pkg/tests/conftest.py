import random

import pytest

from predprey import neat
from predprey.config import RunConfig
from predprey.neat import NeatConfig
from predprey.runs import run_evolution

_criterion_results = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        marker = item.get_closest_marker("criterion")
        if marker:
            _criterion_results.append((marker.args[0], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criterion_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed in _criterion_results:
        prefix = "[PASS] " if passed else "[FAIL] "
        terminalreporter.write_line(prefix + name)


def zero_genome(n_in, n_out):
    g = neat.initial_genome(n_in, n_out, random.Random(0))
    for c in g.connections:
        c.weight = 0.0
    return g


def full_speed_genome(n_in=3, n_out=2):
    """Outputs saturate tanh near +1: drives straight at full speed."""
    g = zero_genome(n_in, n_out)
    for n in g.nodes:
        if n.role == neat.OUTPUT:
            n.bias = 8.0
    return g


@pytest.fixture(scope="session")
def smoke_config():
    return RunConfig(
        neat=NeatConfig(population_size=8, generations=10),
        evaluations_per_individual=3,
        master_seed=1,
        output_dir="unused",
    )


@pytest.fixture(scope="session")
def smoke_run_dir(tmp_path_factory, smoke_config):
    """One full smoke evolution, shared by tournament/acceptance tests."""
    run_dir = tmp_path_factory.mktemp("runs") / "smoke"
    run_evolution(smoke_config, run_dir)
    return run_dir


@pytest.fixture(scope="session")
def golden_config():
    return RunConfig(
        neat=NeatConfig(population_size=4, generations=1, elites=2),
        evaluations_per_individual=1,
        master_seed=7,
        output_dir="unused",
    )


@pytest.fixture(scope="session")
def golden_run_dir(tmp_path_factory, golden_config):
    """Tiny single-round run backing the live-play golden trial."""
    run_dir = tmp_path_factory.mktemp("runs") / "golden"
    run_evolution(golden_config, run_dir)
    return run_dir
