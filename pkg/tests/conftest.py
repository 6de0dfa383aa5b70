import numpy as np
import pytest

from ncstokes.mesh import build_masked, build_rectangular, parse_mask

# 3x3 grid missing its top-right square: the smallest valid non-rectangle
L3_TEXT = "110\n111\n111"

# 6x6 square missing a 1x3 notch at the top right: has interior squares of
# both colors next to a reentrant corner
NOTCH_TEXT = "111110\n111110\n111110\n111111\n111111\n111111"


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)


@pytest.fixture
def mesh3():
    return build_rectangular(3, 3, 1.0 / 3)


@pytest.fixture
def mesh4():
    return build_rectangular(4, 4, 0.25)


@pytest.fixture
def mesh8():
    return build_rectangular(8, 8, 1.0 / 8)


@pytest.fixture
def l_mesh():
    return build_masked(parse_mask(L3_TEXT), 0.5)


@pytest.fixture
def notched_mesh():
    return build_masked(parse_mask(NOTCH_TEXT), 0.25)
