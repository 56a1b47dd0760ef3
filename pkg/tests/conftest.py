import numpy as np
import pytest

from herdcluster import data, load_table


@pytest.fixture(scope="session")
def scores_table():
    return load_table(data.scores_path())


@pytest.fixture(scope="session")
def synthetic_table():
    return load_table(data.synthetic_path())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path
