"""Compiled and pure-Python kernels must agree."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewnerkit import _pykernels, kernels

try:
    from loewnerkit import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def _cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@needs_c
@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 3), st.integers(1, 3),
       st.integers(0, 2**31 - 1))
def test_loewner_blocks_parity(q, k, p, m, seed):
    rng = np.random.default_rng(seed)
    mu, lam = 1j * rng.uniform(0, 10, q) + 0.5, 1j * rng.uniform(0, 10, k) - 0.5
    v, w = _cplx(rng, q, p, m), _cplx(rng, k, p, m)
    L0, Ls0 = _pykernels.loewner_blocks(mu, v, lam, w)
    L1, Ls1 = _ckernels.loewner_blocks(mu, v, lam, w)
    np.testing.assert_allclose(np.asarray(L1), L0, rtol=1e-14, atol=1e-15)
    np.testing.assert_allclose(np.asarray(Ls1), Ls0, rtol=1e-14, atol=1e-15)


@needs_c
@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_cauchy_parity(n1, n2, seed):
    rng = np.random.default_rng(seed)
    x, y = _cplx(rng, n1) - 3, _cplx(rng, n2) + 3
    np.testing.assert_allclose(np.asarray(_ckernels.cauchy(x, y)), _pykernels.cauchy(x, y),
                               rtol=1e-15)


@needs_c
@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.booleans(), st.integers(0, 2**31 - 1))
def test_bary_eval_parity(k, strict, seed):
    rng = np.random.default_rng(seed)
    nodes = 1j * np.sort(rng.uniform(0.5, 10, k))
    vals, wts = _cplx(rng, k), _cplx(rng, k)
    s = np.concatenate([_cplx(rng, 20), nodes[:1]])
    a = _pykernels.bary_eval_siso(nodes, vals, wts, s, strict, 1e-14)
    b = np.asarray(_ckernels.bary_eval_siso(nodes, vals, wts, s, strict, 1e-14))
    np.testing.assert_allclose(b, a, rtol=1e-13)
    assert b[-1] == vals[0]


def test_pure_fallback_selected(monkeypatch):
    import importlib

    monkeypatch.setenv("LOEWNERKIT_PURE", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("LOEWNERKIT_PURE")
        importlib.reload(kernels)
