import numpy as np
import pytest

from coac.regression import fit
from coac.simulate import ExperimentConfig, generate_dataset

MASTER_SEED = 20260814

# Shared Monte Carlo setting reused by several statistical tests: fits at
# the true order on 1000 simulated datasets of length 200, noise 0.2.
MC_TRIALS = 1000
MC_N = 200
MC_SIGMA_SQ = 0.2
MC_TRUE_ORDER = 5


@pytest.fixture(scope="session")
def mc_config() -> ExperimentConfig:
    return ExperimentConfig(master_seed=MASTER_SEED)


@pytest.fixture(scope="session")
def mc_datasets(mc_config):
    return [
        generate_dataset(mc_config, MC_N, MC_SIGMA_SQ, t) for t in range(MC_TRIALS)
    ]


@pytest.fixture(scope="session")
def mc_fits(mc_config, mc_datasets):
    return [fit(ds, MC_TRUE_ORDER, mc_config.kernel) for ds in mc_datasets]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def write_csv_dataset(path, dataset) -> str:
    cols = "x,y,y_bar\n" if dataset.y_bar is not None else "x,y\n"
    with open(path, "w") as fh:
        fh.write(cols)
        for i in range(dataset.n):
            row = [repr(float(dataset.x[i])), repr(float(dataset.y[i]))]
            if dataset.y_bar is not None:
                row.append(repr(float(dataset.y_bar[i])))
            fh.write(",".join(row) + "\n")
    return str(path)
