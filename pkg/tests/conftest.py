import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--refresh-golden",
        action="store_true",
        default=False,
        help="rewrite the stored fig3/fig4 golden checksums instead of asserting them",
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20130213)
