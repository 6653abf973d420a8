"""CUR/DEIM selection of interpolation points and the least-squares Loewner fit."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .loewner import build_pencil, numerical_rank, partition
from .models import STRICTLY_PROPER, BarycentricModel

LEFT_ONLY = "left_only"
RIGHT_ONLY = "right_only"
MERGED = "merged_alternate"
MODES = (LEFT_ONLY, RIGHT_ONLY, MERGED)


def deim(U, k=None, groups=None):
    """DEIM row selection from the columns of ``U``.

    With ``groups`` (an integer label per row) at most one row per label is
    picked: rows sharing a label with an earlier pick are masked out.
    """
    U = np.asarray(U)
    n, r = U.shape
    k = r if k is None else k
    if k > n:
        raise ValidationError(f"cannot select {k} rows from {n}")
    allowed = np.ones(n, dtype=bool)
    idx = []
    for j in range(k):
        u = U[:, j]
        if idx:
            P = np.array(idx)
            c = np.linalg.lstsq(U[P, :j], u[P], rcond=None)[0]
            res = u - U[:, :j] @ c
        else:
            res = u
        score = np.where(allowed, np.abs(res), -1.0)
        i = int(np.argmax(score))
        if score[i] < 0:
            raise ValidationError("ran out of distinct groups during DEIM selection")
        idx.append(i)
        if groups is None:
            allowed[i] = False
        else:
            allowed &= groups != groups[i]
    return np.array(idx, dtype=int)


@dataclass(frozen=True, eq=False)
class CurResult:
    row_indices: np.ndarray
    col_indices: np.ndarray
    C: np.ndarray
    U: np.ndarray
    R: np.ndarray
    left_points: np.ndarray | None = None
    right_points: np.ndarray | None = None

    def reconstruct(self):
        return self.C @ self.U @ self.R


def _cur_from_indices(X, rows, cols):
    C = X[:, cols]
    R = X[rows, :]
    # U = C^+ X R^+ via least squares
    T = np.linalg.lstsq(C, X, rcond=None)[0]
    U = np.linalg.lstsq(R.conj().T, T.conj().T, rcond=None)[0].conj().T
    return C, U, R


def cur_decompose(X, k, row_groups=None, col_groups=None):
    """CUR factorization with DEIM-selected rows and columns.

    ``C`` and ``R`` are exact column/row subsets of ``X``;
    ``U = C^+ X R^+`` minimizes ``||X - C U R||_F`` for that choice.
    """
    X = np.asarray(X)
    if k < 1 or k > min(X.shape):
        raise ValidationError(f"rank {k} must be in [1, {min(X.shape)}]")
    W, s, Vh = np.linalg.svd(X, full_matrices=False)
    nrank = int(np.sum(s > max(X.shape) * np.finfo(float).eps * s[0])) if s[0] > 0 else 0
    if k > nrank:
        warnings.warn(f"CUR rank {k} exceeds numerical rank {nrank}; reconstruction may be poor",
                      stacklevel=2)
    rows = deim(W[:, :k], k, row_groups)
    cols = deim(Vh[:k].conj().T, k, col_groups)
    C, U, R = _cur_from_indices(X, rows, cols)
    return CurResult(rows, cols, C, U, R)


@dataclass(frozen=True)
class PointPostprocess:
    mode: str = MERGED

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown point mode {self.mode!r}; use one of {MODES}")


def _merge_alternate(left, right, k):
    allp = np.concatenate([right, left])
    order = np.lexsort((allp.real, allp.imag))
    return allp[order][0::2][:k]


def postprocess_points(left, right, k, mode):
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    if mode == LEFT_ONLY:
        nu = left
    elif mode == RIGHT_ONLY:
        nu = right
    else:
        nu = _merge_alternate(left, right, k)
    _, first = np.unique(nu, return_index=True)
    nu = nu[np.sort(first)]
    if len(nu) < k:
        raise ValidationError(f"only {len(nu)} distinct interpolation points after merging, need {k}")
    return nu[:k]


def select_points(pen, k, pp=PointPostprocess()):
    """Interpolation points from a CUR decomposition of the plain Loewner matrix.

    Rows of ``L`` map to left samples and columns to right samples; with
    MIMO blocks at most one row (column) per sample is taken. Returns
    ``(nu, cur)`` with ``nu`` the ``k`` chosen points.
    """
    q, kk = pen.left_points.size, pen.right_points.size
    if k > min(q, kk):
        raise ValidationError(f"cannot select {k} points from a {q} x {kk} sample pencil")
    rg = np.repeat(np.arange(q), pen.p)
    cg = np.repeat(np.arange(kk), pen.m)
    cur = cur_decompose(pen.L, k, row_groups=rg, col_groups=cg)
    mu = pen.left_points[cur.row_indices // pen.p]
    lam = pen.right_points[cur.col_indices // pen.m]
    cur = CurResult(cur.row_indices, cur.col_indices, cur.C, cur.U, cur.R, mu, lam)
    return postprocess_points(mu, lam, k, pp.mode), cur


def _closest_index(points, targets):
    idx = []
    for t in targets:
        i = int(np.argmin(np.abs(points - t)))
        if abs(points[i] - t) > 1e-12 * (1 + abs(t)):
            raise ValidationError(f"point {t} is not a sample point")
        idx.append(i)
    return np.array(idx, dtype=int)


def choose_nodes(d, k, pp=PointPostprocess()):
    """Indices of ``k`` interpolation samples chosen by CUR.

    With conjugate-closed data only upper-half-plane samples enter the CUR
    step (``k/2`` of them, ``k`` must be even) and each chosen sample is
    followed by its conjugate.
    """
    paired = d.is_conjugate_closed() and np.any(d.points.imag != 0)
    if paired:
        if k % 2:
            raise ValidationError("conjugate-closed data need an even number of nodes")
        upper = np.flatnonzero(d.points.imag > 0)
        if np.any(d.points.imag == 0):
            raise ValidationError("real sample points are not supported with conjugate pairing")
        sub = d.subset(upper)
        want = k // 2
    else:
        sub, want = d, k
    if want < 1:
        raise ValidationError("need at least one interpolation point")
    pen = build_pencil(partition(sub, "alternate"))
    nu, _ = select_points(pen, want, pp)
    idx = _closest_index(d.points, nu)
    if paired:
        partner = d.conjugate_partner()
        idx = np.array([i for j in idx for i in (j, partner[j])], dtype=int)
    return idx


def mimo_ls_weights(nodes, node_values, chi, chi_values):
    """Weight blocks from the linearized least-squares problem.

    Solves ``sum_i (H(chi_j) - H_i) / (chi_j - nu_i) W_i = -H(chi_j)`` for all
    ``j`` in the least-squares sense (minimum norm if rank deficient).
    Returns ``(weights, rank)`` with ``weights`` shaped ``(k, m, m)``.
    """
    nodes = np.asarray(nodes, dtype=complex)
    chi = np.asarray(chi, dtype=complex)
    hv = np.asarray(node_values, dtype=complex)
    hc = np.asarray(chi_values, dtype=complex)
    if hv.ndim == 1:
        hv = hv.reshape(-1, 1, 1)
    if hc.ndim == 1:
        hc = hc.reshape(-1, 1, 1)
    k, p, m = hv.shape
    h = chi.size
    if h == 0:
        raise ValidationError("no samples left for the least-squares fit")
    den = chi[:, None] - nodes[None, :]
    blocks = (hc[:, None] - hv[None, :]) / den[:, :, None, None]
    Lmat = blocks.transpose(0, 2, 1, 3).reshape(h * p, k * m)
    rhs = -hc.reshape(h * p, m)
    omega, _, rank, _ = np.linalg.lstsq(Lmat, rhs, rcond=None)
    return omega.reshape(k, m, m), int(rank)


def ls_loewner_fit(d, k, pp=PointPostprocess(), nodes_index=None):
    """Strictly proper barycentric model on ``k`` CUR-selected nodes with
    least-squares weights over the remaining samples."""
    n = len(d)
    if not 1 <= k < n:
        raise ValidationError(f"need 1 <= k < N, got k={k}, N={n}")
    idx = choose_nodes(d, k, pp) if nodes_index is None else np.asarray(nodes_index, dtype=int)
    rest = np.setdiff1d(np.arange(n), idx)
    weights, rank = mimo_ls_weights(d.points[idx], d.values[idx], d.points[rest], d.values[rest])
    info = {"method": "ls-loewner", "node_index": idx.tolist(), "ls_rank": rank,
            "rank_deficient": rank < k * d.m}
    return BarycentricModel(d.points[idx], d.values[idx], weights, form=STRICTLY_PROPER, info=info)


def default_order(pen, tau=1e-12):
    """Node count from the numerical rank of the Loewner matrix."""
    return numerical_rank(pen.L, tau) // max(pen.m, 1)


__all__ = ["CurResult", "PointPostprocess", "cur_decompose", "deim", "select_points",
           "choose_nodes", "mimo_ls_weights", "ls_loewner_fit", "postprocess_points",
           "default_order"]
