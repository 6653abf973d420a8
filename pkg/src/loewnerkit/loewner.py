"""Loewner pencils from partitioned data and the surrogates built from them."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .barycentric import check_pairing, pairing_matrix
from .errors import NodeCollisionError, SingularPencilError, ValidationError
from .models import StateSpaceModel

DEFAULT_TAU = 1e-12


@dataclass(frozen=True, eq=False)
class Partition:
    """Left data ``(mu_i, v_i)`` and right data ``(lambda_j, w_j)``."""

    left_points: np.ndarray
    left_values: np.ndarray
    right_points: np.ndarray
    right_values: np.ndarray
    left_index: np.ndarray | None = None
    right_index: np.ndarray | None = None

    def __post_init__(self):
        mu = np.asarray(self.left_points, dtype=complex).reshape(-1)
        lam = np.asarray(self.right_points, dtype=complex).reshape(-1)
        v = np.asarray(self.left_values, dtype=complex)
        w = np.asarray(self.right_values, dtype=complex)
        if v.ndim == 1:
            v = v.reshape(-1, 1, 1)
        if w.ndim == 1:
            w = w.reshape(-1, 1, 1)
        if v.shape[0] != mu.size or w.shape[0] != lam.size or v.shape[1:] != w.shape[1:]:
            raise ValidationError("partition points and values have inconsistent shapes")
        if len(np.unique(mu)) != mu.size or len(np.unique(lam)) != lam.size:
            raise ValidationError("nodes must be distinct within each side")
        if np.intersect1d(mu, lam).size:
            raise ValidationError("left and right node sets must be disjoint")
        for name, val in (("left_points", mu), ("right_points", lam),
                          ("left_values", v), ("right_values", w)):
            object.__setattr__(self, name, val)

    @property
    def q(self):
        return self.left_points.size

    @property
    def k(self):
        return self.right_points.size


def _units(d):
    """Group dataset indices into conjugate-pair units (singletons otherwise)."""
    partner = d.conjugate_partner()
    seen = np.zeros(len(d), dtype=bool)
    units = []
    for i in range(len(d)):
        if seen[i]:
            continue
        j = partner[i]
        if j >= 0 and j != i and not seen[j]:
            a, b = (i, j) if d.points[i].imag >= 0 else (j, i)
            units.append([a, b])
            seen[[i, j]] = True
        else:
            units.append([i])
            seen[i] = True
    return units


def partition(d, scheme="alternate", left=None, right=None):
    """Split a dataset into left and right data.

    ``alternate`` alternates conjugate-pair units between the sides starting
    on the left (each pair stored as ``(s, conj s)``); ``half_half`` puts the
    first ``ceil(N/2)`` samples left; ``custom`` takes explicit ``left``
    (and optionally ``right``) index lists. Odd counts favour the left side.
    """
    n = len(d)
    if n < 2:
        raise ValidationError("need at least 2 samples to partition")
    if scheme == "alternate":
        units = _units(d)
        li = [i for u in units[0::2] for i in u]
        ri = [i for u in units[1::2] for i in u]
    elif scheme == "half_half":
        h = (n + 1) // 2
        li, ri = list(range(h)), list(range(h, n))
    elif scheme == "custom":
        if left is None:
            raise ValidationError("custom partition needs left indices")
        li = [int(i) for i in left]
        ri = [i for i in range(n) if i not in set(li)] if right is None else [int(i) for i in right]
        if set(li) & set(ri):
            raise ValidationError(f"custom indices overlap: {sorted(set(li) & set(ri))}")
        if len(set(li)) != len(li) or len(set(ri)) != len(ri):
            raise ValidationError("custom indices repeat")
        if sorted(li + ri) != list(range(n)):
            raise ValidationError("custom indices must cover the dataset")
    else:
        raise ValidationError(f"unknown partition scheme {scheme!r}")
    if not li or not ri:
        raise ValidationError("both partition sides must be nonempty")
    li, ri = np.array(li), np.array(ri)
    return Partition(d.points[li], d.values[li], d.points[ri], d.values[ri],
                     left_index=li, right_index=ri)


@dataclass(frozen=True, eq=False)
class LoewnerPencil:
    """Block Loewner pencil.

    ``L, Ls``: ``(q p, k m)``; ``V``: ``(q p, m)``; ``W``: ``(p, k m)``;
    ``M = diag(mu) (x) I_p``; ``Lam = diag(lambda) (x) I_m``.
    """

    L: np.ndarray
    Ls: np.ndarray
    V: np.ndarray
    W: np.ndarray
    left_points: np.ndarray
    right_points: np.ndarray
    p: int
    m: int
    real: bool = False

    @property
    def M(self):
        return np.kron(np.diag(self.left_points), np.eye(self.p))

    @property
    def Lam(self):
        return np.kron(np.diag(self.right_points), np.eye(self.m))

    @property
    def ones_left(self):
        """``1_q (x) I_p``."""
        return np.kron(np.ones((self.left_points.size, 1)), np.eye(self.p))

    @property
    def ones_right(self):
        """``1_k^T (x) I_m``."""
        return np.kron(np.ones((1, self.right_points.size)), np.eye(self.m))


def build_pencil(part):
    mu, lam = part.left_points, part.right_points
    gap = np.abs(mu[:, None] - lam[None, :])
    if np.any(gap == 0):
        i, j = np.argwhere(gap == 0)[0]
        raise NodeCollisionError(f"left node mu[{i}] equals right node lambda[{j}] = {mu[i]}",
                                 pair=(int(i), int(j)))
    L, Ls = kernels.loewner_blocks(mu, part.left_values, lam, part.right_values)
    q, p, m = part.left_values.shape
    k = lam.size
    V = part.left_values.reshape(q * p, m)
    W = part.right_values.transpose(1, 0, 2).reshape(p, k * m)
    return LoewnerPencil(L=np.asarray(L), Ls=np.asarray(Ls), V=V, W=W,
                         left_points=mu, right_points=lam, p=p, m=m)


def sylvester_residuals(pen):
    """Relative residuals of the two Sylvester equations and the shift relation.

    Returns ``(r_L, r_Ls, r_shift)`` where ``r_L`` is
    ``||M L - L Lam - V 1^T + 1 W||_F`` over ``||L||_F ||M||_2 + ||V||_F``
    and ``r_Ls``, ``r_shift`` are analogous for ``Ls``.
    """
    M, Lam, Ir, Il = pen.M, pen.Lam, pen.ones_right, pen.ones_left
    L, Ls, V, W = pen.L, pen.Ls, pen.V, pen.W
    nM = np.linalg.norm(M, 2) if M.size else 0.0
    nLam = np.linalg.norm(Lam, 2) if Lam.size else 0.0
    fro = np.linalg.norm
    r1 = fro(M @ L - L @ Lam - V @ Ir + Il @ W)
    r1 /= max(fro(L) * nM + fro(V), np.finfo(float).tiny)
    r2 = fro(M @ Ls - Ls @ Lam - M @ V @ Ir + Il @ W @ Lam)
    r2 /= max(fro(Ls) * nM + nM * fro(V) + fro(W) * nLam, np.finfo(float).tiny)
    r3a = fro(Ls - L @ Lam - V @ Ir)
    r3b = fro(Ls - M @ L - Il @ W)
    r3 = max(r3a, r3b) / max(fro(Ls) + fro(L) * max(nM, nLam) + fro(V) + fro(W),
                             np.finfo(float).tiny)
    return r1, r2, r3


def realify_pencil(pen):
    """Real pencil from conjugate-paired left and right nodes.

    Left blocks use ``J_p``, right blocks ``J_m``:
    ``L -> J_p L J_m^H``, ``V -> J_p V``, ``W -> W J_m^H``.
    """
    check_pairing(pen.left_points)
    check_pairing(pen.right_points)
    Jl = pairing_matrix(pen.left_points.size // 2, pen.p)
    Jr = pairing_matrix(pen.right_points.size // 2, pen.m).conj().T

    def real(X, tol=1e-10):
        scale = max(1.0, float(np.max(np.abs(X))))
        if np.max(np.abs(X.imag)) > tol * scale:
            raise ValidationError("pencil data are not conjugate-consistent")
        return X.real.copy()

    return LoewnerPencil(L=real(Jl @ pen.L @ Jr), Ls=real(Jl @ pen.Ls @ Jr),
                         V=real(Jl @ pen.V), W=real(pen.W @ Jr),
                         left_points=pen.left_points, right_points=pen.right_points,
                         p=pen.p, m=pen.m, real=True)


def numerical_rank(X, tau):
    """Number of singular values ``>= tau * sigma_max``."""
    sv = np.linalg.svd(X, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv >= tau * sv[0]))


def unprocessed_model(pen, probes=3, seed=0):
    """``E = -L, A = -Ls, B = V, C = W`` for a square, regular pencil."""
    if pen.L.shape[0] != pen.L.shape[1]:
        raise ValidationError(f"unprocessed model needs a square pencil, got {pen.L.shape}")
    E, A = -pen.L, -pen.Ls
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.max(np.abs(np.concatenate([pen.left_points, pen.right_points])))))
    conds = []
    for _ in range(probes):
        s = scale * (rng.standard_normal() + 1j * rng.standard_normal())
        conds.append(np.linalg.cond(s * E - A))
    if min(conds) > 1e14:
        raise SingularPencilError(
            "Loewner pencil (L, Ls) looks singular; use SVD truncation (truncated_model)")
    return StateSpaceModel(A=A, B=pen.V.copy(), C=pen.W.copy(), E=E,
                           info={"method": "loewner", "order": A.shape[0]})


def truncated_model(pen, r=None, tau=None):
    """Project the pencil onto its dominant singular subspaces.

    Uses left singular vectors ``X`` of ``[L Ls]`` and right singular vectors
    ``Y`` of ``[L; Ls]``: ``E = -X^H L Y``, ``A = -X^H Ls Y``, ``B = X^H V``,
    ``C = W Y``. Give either an order ``r`` or a relative tolerance ``tau``.
    With ``tau`` the order is the smaller of the two numerical ranks; an ``r``
    above the numerical rank at ``1e-12`` is clamped with a warning.
    """
    if (r is None) == (tau is None):
        raise ValidationError("give exactly one of r or tau")
    X1, s1, _ = np.linalg.svd(np.hstack([pen.L, pen.Ls]), full_matrices=False)
    _, s2, Y2h = np.linalg.svd(np.vstack([pen.L, pen.Ls]), full_matrices=False)
    rmax = min(X1.shape[1], Y2h.shape[0])

    def rank(sv, t):
        return int(np.sum(sv >= t * sv[0])) if sv.size and sv[0] > 0 else 0

    if tau is not None:
        if not tau > 0:
            raise ValidationError("tau must be positive")
        r1, r2 = rank(s1, tau), rank(s2, tau)
        r_used = min(r1, r2)
    else:
        if r < 1:
            raise ValidationError("order must be >= 1")
        r1, r2 = rank(s1, DEFAULT_TAU), rank(s2, DEFAULT_TAU)
        limit = min(r1, r2, rmax)
        r_used = int(r)
        if r_used > limit:
            warnings.warn(f"requested order {r} exceeds numerical rank {limit}; clamped",
                          stacklevel=2)
            r_used = limit
    r_used = max(r_used, 1)
    X = X1[:, :r_used]
    Y = Y2h[:r_used].conj().T
    E = -X.conj().T @ pen.L @ Y
    A = -X.conj().T @ pen.Ls @ Y
    B = X.conj().T @ pen.V
    C = pen.W @ Y
    info = {
        "method": "loewner-svd",
        "order": r_used,
        "requested": r if tau is None else None,
        "tau": tau,
        "rank_rows": r1,
        "rank_cols": r2,
        "singular_values": s1.tolist(),
        "singular_values_cols": s2.tolist(),
    }
    if pen.real:
        A, B, C, E = A.real, B.real, C.real, E.real
    return StateSpaceModel(A=A, B=B, C=C, E=E, info=info)


def loewner_from_data(d, r=None, tau=None, real=True, scheme="alternate"):
    """Partition, build, optionally realify, then truncate: the Loewner-SVD surrogate."""
    part = partition(d, scheme)
    pen = build_pencil(part)
    if real:
        try:
            pen = realify_pencil(pen)
        except ValidationError:
            pass
    if r is None and tau is None:
        tau = DEFAULT_TAU
    return truncated_model(pen, r=r, tau=tau)
