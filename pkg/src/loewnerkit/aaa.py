"""Greedy barycentric fitting (AAA) in the classic and strictly proper forms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError
from .models import PROPER, STRICTLY_PROPER, BarycentricModel

CLASSIC = "classic"


@dataclass(frozen=True)
class AaaConfig:
    """Settings for :func:`aaa_fit`.

    ``max_order`` caps the number of support points. ``conjugate_pairs=None``
    turns pairing on whenever the data contain conjugate partners (conjugate
    points carrying conjugate values).
    """

    tol: float = 1e-13
    max_order: int = 100
    variant: str = CLASSIC
    error_kind: str = "relative"
    conjugate_pairs: bool | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("AAA tolerance must be positive")
        if self.max_order < 1:
            raise ValidationError("max_order must be >= 1")
        if self.variant not in (CLASSIC, STRICTLY_PROPER):
            raise ValidationError(f"unknown AAA variant {self.variant!r}")
        if self.error_kind not in ("absolute", "relative"):
            raise ValidationError(f"unknown error kind {self.error_kind!r}")


def _siso(d):
    if not d.is_siso:
        raise ValidationError("AAA here is SISO only; fit MIMO data with ls_loewner_fit")
    if len(d) < 2:
        raise ValidationError("AAA needs at least 2 samples")
    return d.points, d.values[:, 0, 0]


def aaa_fit(d, cfg=AaaConfig()):
    """Fit a barycentric rational function by greedy support-point selection.

    Starts from the sample mean, repeatedly makes the worst-fit sample a
    support point (smallest index on ties) and recomputes the weights on the
    remaining samples: the smallest right singular vector of the Loewner
    matrix for ``classic``, the least-squares solution of
    ``Loewner @ w = -f`` for ``strictly_proper``.
    """
    z, f = _siso(d)
    n = len(z)
    strict = cfg.variant == STRICTLY_PROPER
    partner = d.conjugate_partner()
    # only points whose values are also conjugate count as pairs
    fscale = max(1.0, float(np.max(np.abs(f))))
    bad = (partner < 0) | (np.abs(f[partner] - np.conj(f)) > 1e-12 * fscale)
    partner = np.where(bad, -1, partner)
    pairs = cfg.conjugate_pairs
    if pairs is None:
        pairs = bool(np.any((partner >= 0) & (z.imag != 0)))
    scale = float(np.max(np.abs(f))) if cfg.error_kind == "relative" else 1.0
    scale = scale or 1.0

    mean = complex(np.mean(f))
    approx = np.full(n, mean)
    support = []
    free = np.ones(n, dtype=bool)
    weights = np.zeros(0, complex)
    history = []
    converged = False
    rank_deficient = False

    while True:
        if not free.any():
            break
        err = np.where(free, np.abs(f - approx), -np.inf) / scale
        j = int(np.argmax(err))
        history.append(float(err[j]))
        if err[j] <= cfg.tol:
            converged = True
            break
        if len(support) >= cfg.max_order:
            break
        support.append(j)
        free[j] = False
        pj = partner[j]
        if pairs and pj >= 0 and pj != j and free[pj] and len(support) < cfg.max_order:
            support.append(int(pj))
            free[pj] = False
        zs, fs = z[support], f[support]
        zr, fr = z[free], f[free]
        loew = (fr[:, None] - fs[None, :]) / (zr[:, None] - zs[None, :])
        if not free.any():
            # nothing left to fit: any weights interpolate the support values
            weights = np.full(len(support), 1.0 / np.sqrt(len(support)), dtype=complex)
        elif strict:
            weights, _, rank, _ = np.linalg.lstsq(loew, -fr, rcond=None)
            rank_deficient |= rank < len(support)
        else:
            _, _, vh = np.linalg.svd(loew, full_matrices=True)
            weights = vh[-1].conj()
        approx = np.asarray(kernels.bary_eval_siso(zs, fs, weights, z, strict, 1e-14))
        approx[support] = fs

    info = {
        "method": "aaa-sp" if strict else "aaa",
        "converged": converged,
        "error_history": history,
        "support_index": list(support),
        "rank_deficient": rank_deficient,
    }
    if not support:
        return BarycentricModel(np.zeros(0, complex), np.zeros((0, 1, 1)), np.zeros((0, 1, 1)),
                                form=PROPER, empty_value=mean, info=info)
    return BarycentricModel(z[support], f[support], weights,
                            form=STRICTLY_PROPER if strict else PROPER, info=info)


def aaa_fit_strictly_proper(d, cfg=None):
    """:func:`aaa_fit` with a ``1`` added to the denominator (strictly proper result)."""
    if cfg is None:
        cfg = AaaConfig(variant=STRICTLY_PROPER)
    elif cfg.variant != STRICTLY_PROPER:
        cfg = AaaConfig(cfg.tol, cfg.max_order, STRICTLY_PROPER, cfg.error_kind,
                        cfg.conjugate_pairs)
    return aaa_fit(d, cfg)
