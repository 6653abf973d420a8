"""State-space realization of barycentric forms, the three evaluation paths,
and realification of conjugate-paired models."""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import ConjugateInconsistencyError, EvaluationError, ValidationError
from .models import PROPER, STRICTLY_PROPER, BarycentricModel, StateSpaceModel

NODE_TOL = 1e-14
COND_LIMIT = 1e14
REALIFY_TOL = 1e-10


def realize(b):
    """State-space form ``(A, B, C)`` of a strictly proper barycentric model.

    ``C = [H_1 ... H_k]``, ``B`` stacks the weight blocks and
    ``A = diag(nodes) (x) I_m - B (1^T (x) I_m)``; the order is ``k*m``.
    """
    if b.form != STRICTLY_PROPER:
        raise ValidationError("only the strictly proper form has this realization")
    k, m = b.k, b.m
    Lam = np.kron(np.diag(b.nodes), np.eye(m))
    B = b.weights.reshape(k * m, m)
    R = np.kron(np.ones((1, k)), np.eye(m))
    A = Lam - B @ R
    C = np.concatenate(list(b.values), axis=1) if k else np.zeros((b.p, 0), complex)
    info = {"nodes": b.nodes.copy(), "block": m}
    info.update({key: val for key, val in b.info.items() if key not in info})
    return StateSpaceModel(A=A, B=B, C=C, info=info)


def _rcond(M):
    lu, piv = sla.lu_factor(M, check_finite=False)
    anorm = np.linalg.norm(M, 1)
    if anorm == 0:
        return 0.0, lu, piv
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, _ = gecon(lu, anorm, norm="1")
    return float(rcond), lu, piv


def eval_state_space(mdl, s):
    """``C (sE - A)^{-1} B`` via an LU solve; refuses when cond(sE - A) > 1e14."""
    M = s * mdl.E_matrix - mdl.A
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        rcond, lu, piv = _rcond(M)
    if not rcond > 1.0 / COND_LIMIT:
        raise EvaluationError(f"sE - A is singular or ill-conditioned at s={s}", s=s)
    return mdl.C @ sla.lu_solve((lu, piv), mdl.B, check_finite=False)


def _node_hit(nodes, s):
    hit = np.flatnonzero(np.abs(s - nodes) <= NODE_TOL * (1.0 + np.abs(nodes)))
    return int(hit[0]) if hit.size else None


def eval_barycentric(b, s):
    """Evaluate the barycentric form at one point.

    Returns the node value when ``s`` is within ``1e-14 (1 + |node|)`` of a node.
    """
    if b.k == 0:
        fill = b.empty_value if b.form == PROPER else 0.0
        return np.full((b.p, b.m), fill, dtype=complex)
    hit = _node_hit(b.nodes, s)
    if hit is not None:
        return b.values[hit].copy()
    c = 1.0 / (s - b.nodes)
    num = np.einsum("i,ipm,imn->pn", c, b.values, b.weights)
    den = np.einsum("i,imn->mn", c, b.weights)
    if b.form == STRICTLY_PROPER:
        den = den + np.eye(b.m)
    if b.m == 1:
        if den[0, 0] == 0 or abs(den[0, 0]) <= 1e-14 * (1 + np.sum(np.abs(c * b.weights[:, 0, 0]))):
            raise EvaluationError(f"barycentric denominator vanishes at s={s}", s=s)
        return num / den[0, 0]
    if np.linalg.cond(den) > COND_LIMIT:
        raise EvaluationError(f"barycentric denominator singular at s={s}", s=s)
    return np.linalg.solve(den.T, num.T).T


def eval_woodbury(b, s):
    """``C Ls^{-1} B (I + R Ls^{-1} B)^{-1}`` with ``Ls = sI - Lambda``."""
    if b.form != STRICTLY_PROPER:
        raise ValidationError("Woodbury evaluation applies to the strictly proper form")
    if _node_hit(b.nodes, s) is not None:
        raise ValidationError(f"s={s} coincides with a node")
    k, m = b.k, b.m
    C = np.concatenate(list(b.values), axis=1)
    B = b.weights.reshape(k * m, m)
    R = np.kron(np.ones((1, k)), np.eye(m))
    inv_diag = np.repeat(1.0 / (s - b.nodes), m)
    LsB = inv_diag[:, None] * B
    X = R @ LsB
    G = np.eye(m) + X
    if np.linalg.cond(G) > COND_LIMIT:
        raise EvaluationError(f"I + R Ls^-1 B is singular at s={s}", s=s)
    return np.linalg.solve(G.T, (C @ LsB).T).T


def freqresp(model, points):
    """Evaluate a state-space or barycentric model at many points -> ``(N, p, m)``."""
    points = np.asarray(points, dtype=complex).reshape(-1)
    if isinstance(model, BarycentricModel):
        if model.k and model.m == 1 and model.p == 1:
            out = kernels.bary_eval_siso(model.nodes, model.values[:, 0, 0],
                                         model.weights[:, 0, 0], points,
                                         model.form == STRICTLY_PROPER, NODE_TOL)
            out = np.asarray(out)
            bad = ~np.isfinite(out)
            if bad.any():
                s = points[np.flatnonzero(bad)[0]]
                raise EvaluationError(f"barycentric denominator vanishes at s={s}", s=s)
            return out.reshape(-1, 1, 1)
        return np.array([eval_barycentric(model, s) for s in points])
    return np.array([eval_state_space(model, s) for s in points])


def polish_poles(ev, nodes, weights, iters=8):
    """Newton steps on ``1 + sum_i w_i / (s - l_i) = 0`` starting from ``ev``.

    The realized ``A = Lambda - w 1^T`` can have badly conditioned
    eigenvalues when the weights are large, while the roots are far better
    determined by ``(nodes, w)`` themselves. A step is kept only while it
    lowers the secular residual and stays closer to its start than to any
    other eigenvalue.
    """
    ev = np.array(ev, dtype=complex)
    nodes = np.asarray(nodes, dtype=complex)
    w = np.asarray(weights, dtype=complex).reshape(-1)
    if ev.size < 1 or nodes.size == 0:
        return ev
    gap = np.abs(ev[:, None] - ev[None, :]) + np.diag(np.full(ev.size, np.inf))
    reach = 0.5 * gap.min(axis=1) if ev.size > 1 else np.full(1, np.inf)

    def secular(z):
        c = 1.0 / (z[:, None] - nodes[None, :])
        return 1.0 + c @ w, -(c * c) @ w

    z = ev.copy()
    with np.errstate(all="ignore"):
        f, fp = secular(z)
        for _ in range(iters):
            znew = z - f / fp
            fn, fpn = secular(znew)
            ok = np.isfinite(znew) & (np.abs(fn) < np.abs(f)) & (np.abs(znew - ev) < reach)
            if not ok.any():
                break
            z = np.where(ok, znew, z)
            f = np.where(ok, fn, f)
            fp = np.where(ok, fpn, fp)
    return z


def poles(model):
    """Finite poles of a model (eigenvalues of ``(A, E)`` or of the realized form).

    For SISO strictly proper barycentric models the eigenvalues are polished
    with :func:`polish_poles`.
    """
    if isinstance(model, BarycentricModel):
        if model.form != STRICTLY_PROPER:
            raise ValidationError("poles of the proper form are not computed here")
        ev = np.linalg.eigvals(realize(model).A)
        if model.m == 1:
            ev = polish_poles(ev, model.nodes, model.weights[:, 0, 0])
        return ev
    if model.E is None:
        return np.linalg.eigvals(model.A)
    w = sla.eigvals(model.A, model.E)
    return w[np.isfinite(w)]


def pairing_matrix(pairs, block):
    """``I_pairs (x) (1/sqrt 2) [[I, I], [-iI, iI]]`` with ``block x block`` identities."""
    I = np.eye(block)
    T = np.block([[I, I], [-1j * I, 1j * I]]) / np.sqrt(2.0)
    return np.kron(np.eye(pairs), T)


def check_pairing(nodes, rtol=1e-12):
    nodes = np.asarray(nodes, dtype=complex)
    if len(nodes) % 2:
        raise ValidationError("realification needs an even number of nodes")
    a, b = nodes[0::2], nodes[1::2]
    if np.any(a.imag == 0):
        raise ValidationError("realification needs non-real nodes in (s, conj(s)) pairs")
    if np.any(np.abs(b - np.conj(a)) > rtol * (1 + np.abs(a))):
        raise ValidationError("nodes are not ordered as adjacent conjugate pairs")


def _strip_imag(name, X, tol):
    scale = max(1.0, float(np.max(np.abs(X)))) if X.size else 1.0
    resid = float(np.max(np.abs(X.imag))) if X.size else 0.0
    if resid > tol * scale:
        raise ConjugateInconsistencyError(
            f"realified {name} keeps imaginary part {resid:.3e}; data are not conjugate-consistent")
    return X.real.copy(), resid


def realify(mdl, nodes=None, block=None, tol=REALIFY_TOL):
    """Real equivalent of a model built on conjugate-paired nodes.

    The state is assumed ordered as ``[x(s1), x(conj s1), x(s2), ...]`` in
    blocks of ``block`` (default ``m``). Applies ``A -> J A J^H``,
    ``B -> J B``, ``C -> C J^H`` (and ``E`` like ``A``). The largest stripped
    imaginary part is recorded in ``info['imag_residue']``.
    """
    if nodes is None:
        nodes = mdl.info.get("nodes")
    if block is None:
        block = mdl.info.get("block", mdl.m)
    r = mdl.order
    if nodes is not None:
        check_pairing(nodes)
        if len(nodes) * block != r:
            raise ValidationError(f"{len(nodes)} nodes x block {block} != order {r}")
    if r % (2 * block):
        raise ValidationError(f"order {r} is not a whole number of conjugate pairs of size {block}")
    J = pairing_matrix(r // (2 * block), block)
    Jh = J.conj().T
    A, ra = _strip_imag("A", J @ mdl.A @ Jh, tol)
    B, rb = _strip_imag("B", J @ mdl.B, tol)
    C, rc = _strip_imag("C", mdl.C @ Jh, tol)
    E, re_ = (None, 0.0) if mdl.E is None else _strip_imag("E", J @ mdl.E @ Jh, tol)
    info = dict(mdl.info)
    info["imag_residue"] = max(ra, rb, rc, re_)
    info["real"] = True
    return StateSpaceModel(A=A, B=B, C=C, E=E, info=info)
