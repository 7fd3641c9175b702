import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_compatible(rng, d, terms=None):
    """Random tail-dependence matrix built directly as a unit-diagonal cone combination.

    sum_k a_k p_k p_k^T is scaled so its largest diagonal entry is 1, then each
    remaining diagonal gap is filled by a singleton e_i e_i^T term.
    """
    terms = terms or 2 * d
    lam = np.zeros((d, d))
    for _ in range(terms):
        p = rng.integers(0, 2, size=d)
        lam += rng.random() * np.outer(p, p)
    top = np.diag(lam).max()
    if top > 0:
        lam /= top
    np.fill_diagonal(lam, 1.0)
    return lam


def random_diag_dominant(rng, d):
    """Unit-diagonal nonnegative symmetric matrix with off-diagonal row sums <= 1."""
    a = np.triu(rng.random((d, d)), 1)
    a = a + a.T
    rows = a.sum(axis=1)
    a = a / max(rows.max(), 1.0) * rng.random()
    np.fill_diagonal(a, 1.0)
    return a
