import numpy as np
import pytest

from dataset.loader import load_dataset_text
from scripts.make_synthetic import make_bipartite_dataset, make_variety_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def small_csv() -> str:
    return "a,b,label\n1,2,x\n2,4,y\n3,5,x\n"


@pytest.fixture
def small_dataset(small_csv):
    return load_dataset_text(small_csv, "label")


@pytest.fixture(scope="session")
def variety_frame():
    return make_variety_dataset()


@pytest.fixture(scope="session")
def variety_csv(tmp_path_factory, variety_frame):
    path = tmp_path_factory.mktemp("data") / "variety.csv"
    variety_frame.to_csv(path, index=False, lineterminator="\n")
    return path


@pytest.fixture(scope="session")
def bipartite_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "bipartite.csv"
    make_bipartite_dataset().to_csv(path, index=False, lineterminator="\n")
    return path
