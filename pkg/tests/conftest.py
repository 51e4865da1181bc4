import numpy as np
import pytest

from siegel.iwasawa import UnimodularIntMatrix


def random_sl(rng: np.random.Generator, n: int) -> np.ndarray:
    """Gaussian-entry matrix rescaled to determinant +1."""
    while True:
        g = rng.standard_normal((n, n))
        d = np.linalg.det(g)
        if abs(d) > 1e-8:
            break
    g /= abs(d) ** (1.0 / n)
    if np.linalg.det(g) < 0:
        g[:, -1] *= -1.0
    return g


def random_unimodular(rng: np.random.Generator, n: int, height_cap: int = 10,
                      steps: int = 12) -> UnimodularIntMatrix:
    """Random SL(n,Z) element built from elementary shears and swaps,
    rejecting whenever an entry would exceed the cap."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        kind = rng.integers(0, 2)
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        trial = [row[:] for row in m]
        if kind == 0:
            c = int(rng.integers(1, 3)) * (1 if rng.integers(0, 2) else -1)
            for r in range(n):
                trial[r][j] += c * trial[r][i]
        else:
            for r in range(n):
                trial[r][i], trial[r][j] = trial[r][j], -trial[r][i]
        if max(abs(x) for row in trial for x in row) <= height_cap:
            m = trial
    return UnimodularIntMatrix.from_rows(m)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240614)
