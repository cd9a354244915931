import os
from pathlib import Path

import pytest

from helpers import make_graph

# Real-data tests look here unless the environment points elsewhere.
CORA_DIR = Path(os.environ.get("CORA_DIR",
                               Path(__file__).resolve().parent.parent / "data" / "cora"))


def cora_available():
    return all((CORA_DIR / name).exists()
               for name in ("edges.txt", "features.csv", "labels.txt"))


@pytest.fixture
def path5():
    """Path graph 0-1-2-3-4 with scalar position features."""
    return make_graph([(0, 1), (1, 2), (2, 3), (3, 4)],
                      [[0.0], [1.0], [2.0], [3.0], [4.0]])


@pytest.fixture
def triangle_plus_isolate():
    """A triangle on nodes 0..2 and an isolated node 3."""
    return make_graph([(0, 1), (0, 2), (1, 2)],
                      [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]])


@pytest.fixture
def bridged_triangles():
    """Two feature-separated triangles joined by a single bridge edge."""
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]
    feats = [[0.0, 0.0], [0.1, 0.0], [0.0, 0.1],
             [5.0, 5.0], [5.1, 5.0], [5.0, 5.1]]
    return make_graph(edges, feats, [0, 0, 0, 1, 1, 1])
