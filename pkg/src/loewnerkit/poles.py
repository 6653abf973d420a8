"""Pole placement in barycentric coordinates, eigenvalue dominance, and the
automatic/peak-guided pole and node choice.

``intrusive_pp_oracle`` needs the full system matrices and exists to check
``place_poles`` in tests.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import kernels
from .barycentric import freqresp
from .cur import PointPostprocess, choose_nodes
from .errors import IllConditionedError, NodeCollisionError, NumericalError, ValidationError
from .loewner import DEFAULT_TAU, loewner_from_data
from .models import STRICTLY_PROPER, BarycentricModel, StateSpaceModel

CAUCHY_COND_LIMIT = 1e14
RE_EPS = 1e-12


def cauchy_matrix(zeta, lam):
    """``C[i, j] = 1 / (zeta_i - lambda_j)``."""
    return np.asarray(kernels.cauchy(zeta, lam))


def place_poles(nodes, node_values, poles):
    """Weights that put the poles of the strictly proper SISO form at ``poles``.

    Solves ``Cauchy(poles, nodes) w = -1`` by pivoted LU. The resulting model
    interpolates ``node_values`` at ``nodes``; its condition estimate is in
    ``info['cauchy_cond']``.
    """
    lam = np.asarray(nodes, dtype=complex).reshape(-1)
    zeta = np.asarray(poles, dtype=complex).reshape(-1)
    h = np.asarray(node_values, dtype=complex).reshape(-1)
    k = lam.size
    if zeta.size != k or h.size != k:
        raise ValidationError(f"need equally many nodes, values and poles, got {k}, {h.size}, {zeta.size}")
    if len(np.unique(lam)) != k or len(np.unique(zeta)) != k:
        raise ValidationError("nodes and poles must each be distinct")
    gap = np.abs(zeta[:, None] - lam[None, :])
    if np.any(gap == 0):
        i, j = np.argwhere(gap == 0)[0]
        raise NodeCollisionError(f"pole {zeta[i]} coincides with node {lam[j]}", pair=(int(i), int(j)))
    Cm = cauchy_matrix(zeta, lam)
    cond = float(np.linalg.cond(Cm))
    if not cond <= CAUCHY_COND_LIMIT:
        closest = np.unravel_index(np.argmin(gap), gap.shape)
        raise IllConditionedError(
            f"Cauchy matrix condition {cond:.2e} > {CAUCHY_COND_LIMIT:.0e}; closest pole/node pair "
            f"{zeta[closest[0]]} / {lam[closest[1]]}, min pole gap "
            f"{_min_gap(zeta):.2e}, min node gap {_min_gap(lam):.2e}", cond=cond)
    w = sla.solve(Cm, -np.ones(k, dtype=complex))
    info = {"method": "lfpp", "cauchy_cond": cond, "placed_poles": zeta.copy()}
    return BarycentricModel(lam, h, w, form=STRICTLY_PROPER, info=info)


def _min_gap(z):
    if z.size < 2:
        return np.inf
    g = np.abs(z[:, None] - z[None, :])
    return float(np.min(g[~np.eye(z.size, dtype=bool)]))


@dataclass(frozen=True, eq=False)
class DominanceTable:
    eigenvalues: np.ndarray
    dominance: np.ndarray
    stable: np.ndarray
    excluded: np.ndarray

    def __len__(self):
        return self.eigenvalues.size


def dominance(mdl):
    """Rank the finite eigenvalues of ``(A, E)`` by dominance.

    ``d_i = |C x_i| |y_i^H B| |alpha_i| / |Re alpha_i|`` with right/left
    eigenvectors scaled so that ``y_i^H E x_i = 1`` (SISO; for MIMO the
    2-norm of the residue matrix is used). Eigenvalues with
    ``|Re| < 1e-12`` are excluded with a warning.
    """
    A = np.asarray(mdl.A)
    E = mdl.E_matrix
    alpha, vl, vr = sla.eig(A, E, left=True, right=True)
    finite = np.isfinite(alpha)
    alpha, vl, vr = alpha[finite], vl[:, finite], vr[:, finite]
    keep = np.abs(alpha.real) >= RE_EPS
    if not keep.all():
        warnings.warn(f"{int((~keep).sum())} eigenvalue(s) with |Re| < {RE_EPS} excluded "
                      "from the dominance ranking", stacklevel=2)
    excluded = alpha[~keep]
    alpha, vl, vr = alpha[keep], vl[:, keep], vr[:, keep]
    d = np.empty(alpha.size)
    for i in range(alpha.size):
        x, y = vr[:, i], vl[:, i]
        scale = y.conj() @ E @ x
        res = np.outer(mdl.C @ x, y.conj() @ mdl.B) / scale
        d[i] = np.linalg.norm(res, 2) * abs(alpha[i]) / abs(alpha[i].real)
    order = np.argsort(-d, kind="stable")
    return DominanceTable(alpha[order], d[order], alpha[order].real < 0, excluded)


def _pick_conjugate_closed(cands, k):
    """First ``k`` candidates (in order) keeping the set closed under conjugation."""
    chosen = []
    used = np.zeros(cands.size, dtype=bool)
    for i, z in enumerate(cands):
        if used[i] or len(chosen) >= k:
            continue
        if abs(z.imag) <= 1e-12 * (1 + abs(z)):
            chosen.append(complex(z.real))
            used[i] = True
            continue
        if len(chosen) + 2 > k:
            continue
        partner = np.flatnonzero(~used & (np.abs(cands - np.conj(z)) <= 1e-8 * (1 + abs(z))))
        partner = partner[partner != i]
        if partner.size:
            used[partner[0]] = True
        used[i] = True
        up = z if z.imag > 0 else np.conj(z)
        chosen += [up, np.conj(up)]
    return np.array(chosen, dtype=complex)


def _node_values(d, idx, source, loewner):
    if source == "data":
        return d.values[idx, 0, 0]
    return freqresp(loewner, d.points[idx])[:, 0, 0]


def lfapp_fit(d, k, stable_only=True, mode="auto", peaks=None, pp=PointPostprocess(),
              tau=DEFAULT_TAU, node_values="model", loewner=None):
    """Loewner surrogate with automatically chosen poles and nodes (SISO).

    ``auto``: poles are the ``k`` most dominant eigenvalues of the Loewner
    model, nodes come from CUR. ``modified``: one pole per entry of ``peaks``
    (frequencies in rad/s) -- the eigenvalue whose imaginary part is nearest,
    plus its conjugate for conjugate-closed data -- and nodes at the sample of
    smallest ``|H|`` between consecutive pole frequencies (the last interval
    runs to the top of the band). ``node_values`` is ``"model"`` (Loewner
    model evaluated at the nodes) or ``"data"``.
    """
    if not d.is_siso:
        raise ValidationError("pole placement is SISO only")
    if k < 1:
        raise ValidationError("k must be >= 1")
    if node_values not in ("model", "data"):
        raise ValidationError("node_values must be 'model' or 'data'")
    paired = d.is_conjugate_closed() and bool(np.any(d.points.imag != 0))
    if loewner is None:
        loewner = loewner_from_data(d, tau=tau, real=paired)
    table = dominance(loewner)
    cands = table.eigenvalues
    if stable_only:
        cands = cands[cands.real < 0]

    if mode == "auto":
        zeta = _pick_conjugate_closed(cands, k) if paired else cands[:k]
        if zeta.size < k:
            raise NumericalError(f"only {zeta.size} usable dominant eigenvalues available, need {k}")
        idx = choose_nodes(d, k, pp)
    elif mode == "modified":
        if not peaks:
            raise ValidationError("modified mode needs a list of peak frequencies")
        zeta, idx = _peak_guided(d, cands, np.asarray(peaks, dtype=float), paired)
        if zeta.size != k:
            raise ValidationError(f"{len(peaks)} peaks give {zeta.size} poles, but k={k}")
    else:
        raise ValidationError(f"unknown LFaPP mode {mode!r}")

    b = place_poles(d.points[idx], _node_values(d, idx, node_values, loewner), zeta)
    info = dict(b.info)
    info.update(method="lfapp", mode=mode, node_index=np.asarray(idx).tolist(),
                loewner_order=loewner.order, stable_only=stable_only)
    return BarycentricModel(b.nodes, b.values, b.weights, form=STRICTLY_PROPER, info=info)


def _peak_guided(d, cands, peaks, paired):
    if cands.size == 0:
        raise NumericalError("Loewner model has no candidate eigenvalues")
    avail = np.ones(cands.size, dtype=bool)
    upper = []
    for w in peaks:
        dist = np.where(avail, np.abs(np.abs(cands.imag) - abs(w)), np.inf)
        i = int(np.argmin(dist))
        if not np.isfinite(dist[i]):
            raise NumericalError("not enough eigenvalues to match every peak")
        z = cands[i]
        z = complex(z.real, abs(z.imag))
        avail[np.abs(cands - z) <= 1e-8 * (1 + abs(z))] = False
        avail[np.abs(cands - np.conj(z)) <= 1e-8 * (1 + abs(z))] = False
        upper.append(z)
    upper = np.array(upper)
    freqs = np.sort(np.abs(upper.imag))
    omega = d.points.imag
    amp = np.abs(d.values[:, 0, 0])
    cand_idx = np.flatnonzero(omega > 0) if paired else np.arange(len(d))
    top = omega[cand_idx].max()
    bounds = list(zip(freqs[:-1], freqs[1:])) + [(freqs[-1], top + 1)]
    chosen = []
    for lo, hi in bounds:
        sel = cand_idx[(np.abs(omega[cand_idx]) > lo) & (np.abs(omega[cand_idx]) < hi)]
        sel = np.setdiff1d(sel, chosen)
        if sel.size == 0:
            raise ValidationError(f"no sample between pole frequencies {lo:g} and {hi:g}")
        chosen.append(int(sel[np.argmin(amp[sel])]))
    if paired:
        partner = d.conjugate_partner()
        idx = np.array([i for j in chosen for i in (j, partner[j])], dtype=int)
        zeta = np.array([z for u in upper for z in (u, np.conj(u))])
    else:
        idx = np.array(chosen, dtype=int)
        zeta = upper
    return zeta, idx


def intrusive_pp_oracle(mdl, nodes, poles):
    """Projection-based pole placement on a known SISO descriptor model.

    Builds ``V = [(l_j E - A)^{-1} B]``, a row ``c`` with ``c V = 0`` (from
    the null space of ``V^H``), and ``W^H`` with rows ``c (z_i E - A)^{-1}``;
    returns the projected model with ``E`` eliminated.
    """
    lam = np.asarray(nodes, dtype=complex).reshape(-1)
    zeta = np.asarray(poles, dtype=complex).reshape(-1)
    k = lam.size
    A, E, B, C = mdl.A, mdl.E_matrix, mdl.B, mdl.C
    n = A.shape[0]
    if mdl.m != 1 or mdl.p != 1:
        raise ValidationError("oracle is SISO only")
    if k >= n:
        raise NumericalError(f"no null-space row for k={k} >= n={n}; oracle unavailable")
    V = np.column_stack([np.linalg.solve(l * E - A, B[:, 0]) for l in lam])
    U, _, _ = np.linalg.svd(V, full_matrices=True)
    c = U[:, -1].conj()
    if np.linalg.norm(c @ V) > 1e-8 * np.linalg.norm(V):
        raise NumericalError("null-space row not found; oracle unavailable")
    Wh = np.vstack([np.linalg.solve((z * E - A).T, c) for z in zeta])
    Et, At, Bt, Ct = Wh @ E @ V, Wh @ A @ V, Wh @ B, C @ V
    Ab = np.linalg.solve(Et, At)
    Bb = np.linalg.solve(Et, Bt)
    return StateSpaceModel(A=Ab, B=Bb, C=Ct,
                           info={"method": "intrusive-pp", "E_tilde": Et, "A_tilde": At})
