import numpy as np
import pytest

# subclass sizes of the worked examples: one view, two classes of 8 and 9
# samples; and two views where class 2 splits 3/4 in one view and 4/3 in
# the other
SINGLE_EXAMPLE = [[3, 5], [4, 5]]
MULTIVIEW_EXAMPLE = [[[2, 2], [3, 4]], [[2, 2], [4, 3]]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, n, shift=1.0):
    a = rng.normal(size=(n, n))
    return a @ a.T + shift * np.eye(n)
