import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from zshar import data, model

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="session")
def acceptance_fixture(acceptance_dir):
    """The canonical fixture: 8 classes, 3 super-classes, 40 samples/class, seed 1."""
    out = acceptance_dir / "fixture"
    data.synth_generate(data.SynthConfig(seed=1), out)
    return out / "manifest.json"


@pytest.fixture(scope="session")
def acceptance_run(acceptance_dir, acceptance_fixture):
    """One full default-config training + evaluation on fold 0 (timed)."""
    import time

    dataset = data.load_dataset(acceptance_fixture)
    folds = data.kfold_split(dataset.classes, dataset.superclasses,
                             folds=4, unseen_per_fold=3, seed=1)
    fold = folds[0]
    config = model.TrainConfig(seed=1)
    start = time.monotonic()
    params, log = model.train(dataset, fold, config)
    result = model.evaluate_fold(dataset, fold, params)
    elapsed = time.monotonic() - start
    return {
        "dataset": dataset,
        "fold": fold,
        "config": config,
        "params": params,
        "log": log,
        "result": result,
        "elapsed": elapsed,
    }
