import numpy as np
import pytest

from ctqw import graphs, spectra


def random_connected_graph(rng, n_min=4, n_max=13):
    """Erdos-Renyi draw, rejected until connected."""
    while True:
        n = int(rng.integers(n_min, n_max))
        p = rng.uniform(0.3, 0.7)
        a = (rng.random((n, n)) < p).astype(np.uint8)
        a = np.triu(a, 1)
        a = a + a.T
        try:
            return graphs.from_adjacency(a)
        except graphs.GraphValidationError:
            continue


@pytest.fixture
def s3_table():
    """Character table of S3: classes (e, transpositions, 3-cycles)."""
    chars = np.array(
        [
            [1, 1, 1],
            [1, -1, 1],
            [2, 0, -1],
        ],
        dtype=np.complex128,
    )
    return spectra.CharacterTable(class_sizes=[1, 3, 2], dims=[1, 1, 2], chars=chars)
