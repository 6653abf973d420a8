"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them loop by loop.
"""
import numpy as np


def loewner_blocks(mu, v, lam, w):
    """Block Loewner and shifted Loewner matrices.

    Parameters
    ----------
    mu : (q,) complex
        Left nodes.
    v : (q, p, m) complex
        Left values.
    lam : (k,) complex
        Right nodes.
    w : (k, p, m) complex
        Right values.

    Returns
    -------
    L, Ls : (q*p, k*m) complex
    """
    mu = np.asarray(mu, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    q, p, m = v.shape
    k = lam.shape[0]
    den = mu[:, None] - lam[None, :]
    num = v[:, None, :, :] - w[None, :, :, :]
    snum = (mu[:, None, None, None] * v[:, None, :, :]
            - lam[None, :, None, None] * w[None, :, :, :])
    L = num / den[:, :, None, None]
    Ls = snum / den[:, :, None, None]
    # (q, k, p, m) -> (q, p, k, m)
    L = L.transpose(0, 2, 1, 3).reshape(q * p, k * m)
    Ls = Ls.transpose(0, 2, 1, 3).reshape(q * p, k * m)
    return L, Ls


def cauchy(x, y):
    """Cauchy matrix ``C[i, j] = 1 / (x[i] - y[j])``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return 1.0 / (x[:, None] - y[None, :])


def bary_eval_siso(nodes, values, weights, s, strictly_proper, tol):
    """Evaluate a scalar barycentric form at many points.

    Points within ``tol * (1 + |node|)`` of a node return that node's value.
    """
    nodes = np.asarray(nodes, dtype=complex)
    values = np.asarray(values, dtype=complex)
    weights = np.asarray(weights, dtype=complex)
    s = np.asarray(s, dtype=complex)
    diff = s[:, None] - nodes[None, :]
    near = np.abs(diff) <= tol * (1.0 + np.abs(nodes))[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        cc = 1.0 / diff
        num = cc @ (weights * values)
        den = cc @ weights
        if strictly_proper:
            den = den + 1.0
        out = num / den
    hit = near.any(axis=1)
    if hit.any():
        idx = near.argmax(axis=1)
        out[hit] = values[idx[hit]]
    return out
