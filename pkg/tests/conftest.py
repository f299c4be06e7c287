import numpy as np
import pytest


class ForcedRng:
    """Stand-in for SeededRng that replays fixed uniforms."""

    def __init__(self, *values):
        self._values = list(values)

    def uniforms(self, size):
        out, self._values = self._values[:size], self._values[size:]
        return np.array(out, dtype=float)


@pytest.fixture
def forced_rng():
    return ForcedRng
