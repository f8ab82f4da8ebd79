import numpy as np
import pytest

from entgroups.statecore import named_state


def generic3_params(seed):
    """Seeded positive amplitudes and a phase for the five-term normal form."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.2, 1.0, 5)
    x /= np.linalg.norm(x)
    return dict(zip("abcde", x), phi=float(rng.uniform(0.3, 2.8)))


def generic3(seed=0):
    return named_state("generic3", generic3_params(seed))


def ace_special():
    return named_state("ace", {"a": np.sqrt(0.5), "c": np.sqrt(0.3), "e": np.sqrt(0.2)})


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
