"""One entry point per fitting method, shared by the CLI and the sweeps."""
from __future__ import annotations

import math

import numpy as np

from .aaa import AaaConfig, aaa_fit
from .barycentric import freqresp, realify, realize
from .cur import PointPostprocess, default_order, ls_loewner_fit
from .dataset import conjugate_close
from .errors import LoewnerKitError, ValidationError
from .loewner import DEFAULT_TAU, build_pencil, loewner_from_data, partition
from .metrics import linf_error
from .models import STRICTLY_PROPER
from .poles import lfapp_fit, place_poles

METHODS = ("loewner-svd", "ls-loewner", "aaa", "aaa-sp", "lfpp", "lfapp")


def prepare(d, real=True):
    """Conjugate-close ``d`` when a real model is wanted and possible.

    Returns ``(dataset, paired)``.
    """
    if not real:
        return d, False
    if np.any(d.points.real < 0) or np.any(d.points.imag == 0):
        return d, False
    return conjugate_close(d), True


def close_points(z):
    """Append the conjugate after every upper-half-plane entry not already paired."""
    out = []
    z = [complex(x) for x in z]
    for x in z:
        if x.imag < 0 and x.conjugate() in z:
            continue
        out.append(x)
        if x.imag != 0:
            out.append(x.conjugate())
    return np.array(out, dtype=complex)


def _finish(b, paired):
    """Realize a strictly proper barycentric model, realified when paired."""
    ss = realize(b)
    if paired:
        ss = realify(ss)
    return ss


def _nodes_k(order, d, paired):
    if order % d.m:
        raise ValidationError(f"order {order} is not a multiple of m={d.m}")
    k = order // d.m
    if paired and k % 2:
        raise ValidationError(f"real models need an even node count; order {order} gives k={k}")
    return k


def fit(d, method, order=None, tau=None, select="merged_alternate", poles=None, nodes=None,
        peaks=None, mode="auto", stable_only=True, real=True, node_values="model",
        aaa_tol=1e-13):
    """Fit ``d`` with one of :data:`METHODS` and return the surrogate model."""
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; choose from {METHODS}")
    d, paired = prepare(d, real)
    pp = PointPostprocess(select)
    if method == "loewner-svd":
        return loewner_from_data(d, r=order, tau=tau, real=paired)
    if method == "ls-loewner":
        if order is None:
            pen = build_pencil(partition(d))
            k = max(default_order(pen, tau or DEFAULT_TAU), 1)
            if paired and k % 2:
                k += 1
        else:
            k = _nodes_k(order, d, paired)
        return _finish(ls_loewner_fit(d, k, pp), paired)
    if method in ("aaa", "aaa-sp"):
        if not d.is_siso:
            raise ValidationError("AAA is SISO only")
        variant = "classic" if method == "aaa" else STRICTLY_PROPER
        cfg = AaaConfig(tol=aaa_tol, max_order=order or 100, variant=variant)
        b = aaa_fit(d, cfg)
        if method == "aaa" or b.form != STRICTLY_PROPER:
            return b
        return _finish(b, paired and b.k % 2 == 0)
    if method == "lfpp":
        if poles is None or nodes is None:
            raise ValidationError("lfpp needs both poles and nodes")
        lam = close_points(nodes) if paired else np.asarray(nodes, dtype=complex)
        zeta = close_points(poles) if paired else np.asarray(poles, dtype=complex)
        if node_values == "data":
            idx = [int(np.argmin(np.abs(d.points - z))) for z in lam]
            if np.any(np.abs(d.points[idx] - lam) > 1e-9 * (1 + np.abs(lam))):
                raise ValidationError("node_values='data' needs nodes on the sampling grid")
            h = d.values[idx, 0, 0]
        else:
            h = freqresp(loewner_from_data(d, tau=tau or DEFAULT_TAU, real=paired), lam)[:, 0, 0]
        return _finish(place_poles(lam, h, zeta), paired)
    # lfapp
    k = order if order is not None else (2 * len(peaks) if paired and peaks else None)
    if k is None:
        raise ValidationError("lfapp needs an order (or a peak list)")
    b = lfapp_fit(d, k, stable_only=stable_only, mode=mode, peaks=peaks, pp=pp,
                  tau=tau or DEFAULT_TAU, node_values=node_values)
    return _finish(b, paired)


def sweep(d, methods, orders, real=True, **kwargs):
    """``eps(r)`` for each method and order; failures give NaN.

    For MIMO data only orders that are multiples of ``m`` are attempted.
    Returns a list of ``(method, r, eps)``.
    """
    rows = []
    for method in methods:
        for r in orders:
            if d.m > 1 and r % d.m:
                continue
            try:
                model = fit(d, method, order=int(r), real=real, **kwargs)
                eps = linf_error(d, model)
            except (LoewnerKitError, np.linalg.LinAlgError, ArithmeticError):
                eps = math.nan
            rows.append((method, int(r), eps))
    return rows
