"""Shared fixtures: a handful of small states and channels used across files."""

import numpy as np
import pytest

from entropics.core import (density_matrix, depolarizing_channel,
                            identity_channel, maximally_entangled_state,
                            random_channel, random_state)


@pytest.fixture
def qubit_mixed():
    return density_matrix(np.diag([0.5, 0.5]))


@pytest.fixture
def qutrit_state():
    return density_matrix(np.diag([0.5, 0.3, 0.2]))


@pytest.fixture
def bell():
    return maximally_entangled_state(2)


@pytest.fixture
def id2():
    return identity_channel(2)


@pytest.fixture
def dep2():
    return depolarizing_channel(2, 1.0)


@pytest.fixture
def rand3():
    return random_channel(3, 3, seed=11)


@pytest.fixture
def rand3_state():
    return random_state(3, seed=12)
