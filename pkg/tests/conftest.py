import numpy as np
import pytest

from cpse.container import Container, WeightTensor


def assert_containers_equal(a: Container, b: Container) -> None:
    assert a.version == b.version
    assert len(a.layers) == len(b.layers)
    for ta, tb in zip(a.layers, b.layers):
        assert ta.name == tb.name
        assert ta.shape == tb.shape
        assert ta.dtype == tb.dtype
        assert ta.data.tobytes() == tb.data.tobytes()
    assert a.graph == b.graph


def random_container(shapes, seed=0, prefix="layer") -> Container:
    rng = np.random.default_rng(seed)
    layers = [
        WeightTensor.from_array(f"{prefix}{i}", rng.standard_normal(shape))
        for i, shape in enumerate(shapes)
    ]
    return Container(version=1, layers=layers)


@pytest.fixture
def small_container():
    return random_container([(6, 4), (8, 6), (5, 5)], seed=42)
