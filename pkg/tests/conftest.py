import numpy as np
import pytest

from semvid.embedding import load_embeddings
from semvid.synth import random_space


@pytest.fixture
def tiny_space(tmp_path):
    """Two-word table: a=(1,0,0) as-is, b=(0,2,0) normalized at load."""
    path = tmp_path / "tiny.txt"
    path.write_text("2 3\na 1 0 0\nb 0 2 0\n", encoding="utf-8")
    return load_embeddings(path)


@pytest.fixture
def space50():
    return random_space(np.random.default_rng(1234), 50, 8)
