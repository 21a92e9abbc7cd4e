import io

import numpy as np
import pytest

from logembed.graph import load_edge_list
from logembed.evaluation import scale_free_graph


@pytest.fixture
def triangle():
    return load_edge_list(io.BytesIO(b"a b\nb c\nc a\n"))


@pytest.fixture
def star5():
    return load_edge_list(io.BytesIO(b"hub s1\nhub s2\nhub s3\nhub s4\n"))


@pytest.fixture
def path3():
    return load_edge_list(io.BytesIO(b"a b\nb c\n"))


@pytest.fixture(scope="session")
def ba500():
    return scale_free_graph(500, 3, 42)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
