import numpy as np
import pytest
from numpy.testing import assert_array_equal

from tailcompat import _pykernels, kernels
from tailcompat.estimator import ranks

try:
    from tailcompat import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _brute_entering(ymat, d, tol, start=1):
    for p in range(start, 1 << d):
        idx = [i for i in range(d) if p >> i & 1]
        if sum(ymat[i, j] for i in idx for j in idx if i <= j) > tol:
            return p
    return -1


def test_backend_reported():
    assert kernels.BACKEND in kernels.available_backends()
    assert "python" in kernels.available_backends()


@pytest.mark.parametrize("d", [1, 3, 6, 9])
def test_python_pricing_matches_brute_force(d, rng):
    for _ in range(20):
        y = np.ascontiguousarray(rng.normal(size=(d, d)) - 0.8)
        for start in (1, max(1, (1 << d) // 2)):
            assert _pykernels.first_entering_column(y, d, 1e-11, start) == _brute_entering(y, d, 1e-11, start)


def test_python_counts_match_brute_force(rng):
    r = ranks(rng.random((300, 4)))
    k = 40
    low = r <= k
    want = np.array([[np.sum(low[:, i] & low[:, j]) for j in range(4)] for i in range(4)])
    assert_array_equal(_pykernels.coexceedance_counts(np.ascontiguousarray(r), k), want)


@needs_ext
@pytest.mark.parametrize("d", [2, 5, 8, 12])
def test_pricing_parity(d, rng):
    for _ in range(20):
        y = np.ascontiguousarray(rng.normal(size=(d, d)) - 0.5)
        for start in (1, 3, (1 << d) - 1):
            assert _ckernels.first_entering_column(y, d, 1e-11, start) == \
                _pykernels.first_entering_column(y, d, 1e-11, start)


@needs_ext
def test_counts_parity(rng):
    r = np.ascontiguousarray(ranks(rng.random((5000, 5))))
    for k in (1, 17, 1250):
        assert_array_equal(_ckernels.coexceedance_counts(r, k), _pykernels.coexceedance_counts(r, k))


def test_env_var_forces_python():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from tailcompat import kernels; print(kernels.BACKEND)"],
        env={"TAILCOMPAT_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
