"""Error metrics on the sampling grid, pole reports and fit reports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .barycentric import freqresp, poles, realize
from .errors import EvaluationError
from .models import BarycentricModel
from .poles import dominance

SKIP_TOL = 1e-12


def _norms(blocks):
    """Spectral norm of each ``(p, m)`` block."""
    if blocks.shape[1] == 1 or blocks.shape[2] == 1:
        return np.sqrt(np.sum(np.abs(blocks) ** 2, axis=(1, 2)))
    return np.linalg.norm(blocks, 2, axis=(1, 2))


def model_nodes(model):
    if isinstance(model, BarycentricModel):
        return model.nodes
    nodes = model.info.get("nodes")
    return np.zeros(0, complex) if nodes is None else np.asarray(nodes, dtype=complex)


def node_mask(points, nodes, tol=SKIP_TOL):
    nodes = np.asarray(nodes, dtype=complex)
    if nodes.size == 0:
        return np.zeros(len(points), dtype=bool)
    gap = np.abs(points[:, None] - nodes[None, :])
    return np.any(gap <= tol * (1 + np.abs(nodes))[None, :], axis=1)


def _abs_errors(reference, model):
    try:
        approx = freqresp(model, reference.points)
    except EvaluationError as exc:
        raise EvaluationError(f"model evaluation failed at s={exc.s}", s=exc.s) from None
    return _norms(reference.values - approx), _norms(reference.values)


def linf_error(reference, model):
    """``max_i ||H(s_i) - Hr(s_i)||_2 / max_i ||H(s_i)||_2`` over the data grid."""
    err, ref = _abs_errors(reference, model)
    return float(err.max() / ref.max())


def pointwise_errors(reference, model, skip_nodes=False):
    """List of ``(s, relative error)`` with relative error ``||H - Hr||_2 / ||H||_2`` per point."""
    err, ref = _abs_errors(reference, model)
    keep = np.ones(len(reference), dtype=bool)
    if skip_nodes:
        keep = ~node_mask(reference.points, model_nodes(model))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(ref > 0, err / ref, np.where(err > 0, np.inf, 0.0))
    return [(complex(s), float(r)) for s, r, k in zip(reference.points, rel, keep) if k]


@dataclass
class PoleInfo:
    value: complex
    stable: bool
    dominance: float | None = None

    def to_dict(self):
        d = {"re": self.value.real, "im": self.value.imag, "stable": self.stable}
        if self.dominance is not None:
            d["dominance"] = self.dominance
        return d


def pole_report(model, with_dominance=False):
    """Finite poles with stability flags (``Re < 0``) and the count of infinite ones.

    Returns ``(poles, n_infinite)``.
    """
    if isinstance(model, BarycentricModel):
        ev = poles(model)
        n_inf = 0
        model = realize(model)
    elif model.E is None:
        ev = np.linalg.eigvals(model.A)
        n_inf = 0
    else:
        ev = sla.eigvals(model.A, model.E)
        n_inf = int(np.sum(~np.isfinite(ev)))
        ev = ev[np.isfinite(ev)]
    table = dominance(model) if with_dominance else None
    out = []
    for z in ev[np.argsort(ev.imag, kind="stable")]:
        z = complex(z)
        d = None
        if table is not None and len(table):
            i = int(np.argmin(np.abs(table.eigenvalues - z)))
            if abs(table.eigenvalues[i] - z) <= 1e-6 * (1 + abs(z)):
                d = float(table.dominance[i])
        out.append(PoleInfo(z, z.real < 0, d))
    return out, n_inf


@dataclass
class FitReport:
    method: str
    order: int
    points: np.ndarray
    abs_errors: np.ndarray
    ref_norms: np.ndarray
    poles: list = field(default_factory=list)
    infinite_poles: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def rel_errors(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.ref_norms > 0, self.abs_errors / self.ref_norms, np.inf)

    @property
    def epsilon(self):
        return float(self.abs_errors.max() / self.ref_norms.max())

    @property
    def stable(self):
        return all(p.stable for p in self.poles)

    def to_dict(self):
        return {
            "method": self.method,
            "order": self.order,
            "epsilon": self.epsilon,
            "stable": self.stable,
            "omega": self.points.imag.tolist(),
            "sigma": self.points.real.tolist(),
            "abs_err": self.abs_errors.tolist(),
            "ref_norm": self.ref_norms.tolist(),
            "poles": [p.to_dict() for p in self.poles],
            "infinite_poles": self.infinite_poles,
            "diagnostics": _jsonable(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d):
        pts = np.asarray(d.get("sigma", [0.0] * len(d["omega"]))) + 1j * np.asarray(d["omega"])
        poles = [PoleInfo(complex(p["re"], p["im"]), p["stable"], p.get("dominance"))
                 for p in d.get("poles", [])]
        return cls(d["method"], d["order"], pts, np.asarray(d["abs_err"]),
                   np.asarray(d["ref_norm"]), poles, d.get("infinite_poles", 0),
                   d.get("diagnostics", {}))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict()))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega", "abs_err", "rel_err"])
        for s, a, r in zip(self.points, self.abs_errors, self.rel_errors):
            w.writerow([f"{s.imag:.17g}", f"{a:.17g}", f"{r:.17g}"])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def fit_report(reference, model, method=None, with_dominance=False):
    err, ref = _abs_errors(reference, model)
    poles, n_inf = pole_report(model, with_dominance) if _has_poles(model) else ([], 0)
    diag = {k: v for k, v in model.info.items()
            if k in ("singular_values", "singular_values_cols", "rank_rows", "rank_cols",
                     "cauchy_cond", "ls_rank", "rank_deficient", "converged", "imag_residue",
                     "tau", "requested", "nodes", "node_index", "loewner_order")}
    return FitReport(method or model.info.get("method", "unknown"), model.order, reference.points,
                     err, ref, poles, n_inf, diag)


def _has_poles(model):
    return not (isinstance(model, BarycentricModel) and model.form != "strictly_proper")
