import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"


def ucr_pair(name):
    from tsdict.data import read_ucr_split

    return read_ucr_split(DATA / f"{name}_TRAIN.tsv", DATA / f"{name}_TEST.tsv")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def italy():
    return ucr_pair("ItalyPowerDemand")


@pytest.fixture
def toy():
    """Six short series, three per class, with distinct shapes."""
    from tsdict.data import LabeledDataset

    g = np.random.default_rng(7)
    t = np.arange(24)
    X = [np.sin(t / 2.0) + 0.1 * g.normal(size=24) for _ in range(3)]
    X += [np.sign(np.sin(t / 3.0)) + 0.1 * g.normal(size=24) for _ in range(3)]
    return LabeledDataset(np.array(X), np.array([0, 0, 0, 1, 1, 1]))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
