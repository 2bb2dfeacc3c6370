"""Shared hypothesis strategies and small random constructors."""
import numpy as np
from hypothesis import strategies as st

from zonal_minkowski.zonal import ZonalFunction, ZonalMeasure

dims = st.integers(2, 6)
seeds = st.integers(0, 2 ** 32 - 1)


def random_function(n: int, rng, N: int = 32, degree: int = 12, decay: float = 1.0) -> ZonalFunction:
    c = np.zeros(N + 1)
    c[: degree + 1] = rng.normal(size=degree + 1) / (1 + np.arange(degree + 1)) ** decay
    return ZonalFunction(n, c)


def random_measure(n: int, rng, N: int = 32, atoms: int | None = None) -> ZonalMeasure:
    k = int(rng.integers(0, 4)) if atoms is None else atoms
    ts = rng.uniform(-1, 1, size=k)
    if k and rng.random() < 0.5:
        ts[0] = rng.choice([-1.0, 1.0])
    return ZonalMeasure(random_function(n, rng, N), tuple(zip(ts, rng.normal(size=k))))


@st.composite
def measures(draw, n=None):
    n = draw(dims) if n is None else n
    return random_measure(n, np.random.default_rng(draw(seeds)))
