"""Model containers and their JSON serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataFormatError, ValidationError

STRICTLY_PROPER = "strictly_proper"
PROPER = "proper"


def _pairs(a):
    """Complex array -> nested lists with complex scalars as ``[re, im]``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_pairs(x) for x in a]


def _unpairs(obj, ndim, what):
    try:
        a = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f"{what}: not a numeric array ({exc})") from None
    if a.ndim != ndim + 1 or a.shape[-1] != 2:
        raise DataFormatError(f"{what}: expected {ndim}-d array of [re, im] pairs, "
                              f"got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Descriptor realization ``H(s) = C (sE - A)^{-1} B``.

    ``E is None`` means identity. ``info`` carries provenance and diagnostics
    (method, singular values, node list, ...) and is not part of the math.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    E: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A))
        B = np.atleast_2d(np.asarray(self.B))
        C = np.atleast_2d(np.asarray(self.C))
        r = A.shape[0]
        if A.shape != (r, r):
            raise ValidationError(f"A must be square, got {A.shape}")
        if B.shape[0] != r:
            raise ValidationError(f"B has {B.shape[0]} rows, expected {r}")
        if C.shape[1] != r:
            raise ValidationError(f"C has {C.shape[1]} columns, expected {r}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        if self.E is not None:
            E = np.atleast_2d(np.asarray(self.E))
            if E.shape != (r, r):
                raise ValidationError(f"E must be {r}x{r}, got {E.shape}")
            object.__setattr__(self, "E", E)

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    @property
    def E_matrix(self):
        return np.eye(self.order) if self.E is None else self.E

    @property
    def is_real(self):
        mats = [self.A, self.B, self.C] + ([] if self.E is None else [self.E])
        return all(not np.iscomplexobj(x) or not np.any(x.imag) for x in mats)

    def to_dict(self):
        d = {}
        if self.E is not None:
            d["E"] = _pairs(self.E)
        d.update(A=_pairs(self.A), B=_pairs(self.B), C=_pairs(self.C))
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            A = _unpairs(d["A"], 2, "A")
            B = _unpairs(d["B"], 2, "B")
            C = _unpairs(d["C"], 2, "C")
        except KeyError as exc:
            raise DataFormatError(f"state-space model missing key {exc}") from None
        E = _unpairs(d["E"], 2, "E") if "E" in d else None
        mats = [A, B, C] + ([E] if E is not None else [])
        if all(not np.any(x.imag) for x in mats):
            A, B, C = A.real, B.real, C.real
            E = None if E is None else E.real
        return cls(A=A, B=B, C=C, E=E)


@dataclass(frozen=True, eq=False)
class BarycentricModel:
    """Rational function in barycentric form on ``k`` nodes.

    ``weights`` has shape ``(k, m, m)``; SISO weights are ``1x1`` blocks.
    The strictly proper form is::

        H(s) = (sum_i H_i W_i / (s - l_i)) (I + sum_i W_i / (s - l_i))^{-1}

    The proper (classic AAA) form drops the identity from the denominator and
    is SISO only. ``empty_value`` is the constant returned by a proper model
    with no nodes.
    """

    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    form: str = STRICTLY_PROPER
    empty_value: complex = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=complex).reshape(-1)
        k = nodes.shape[0]
        values = np.asarray(self.values, dtype=complex)
        weights = np.asarray(self.weights, dtype=complex)
        if values.ndim == 1:
            values = values.reshape(k, 1, 1)
        if weights.ndim == 1:
            weights = weights.reshape(k, 1, 1)
        if values.ndim != 3 or values.shape[0] != k:
            raise ValidationError(f"values must be (k, p, m) with k={k}, got {values.shape}")
        if weights.ndim != 3 or weights.shape[0] != k or weights.shape[1] != weights.shape[2]:
            raise ValidationError(f"weights must be (k, m, m) with k={k}, got {weights.shape}")
        if k and weights.shape[1] != values.shape[2]:
            raise ValidationError("weight blocks must be m x m with m the input count")
        if len(np.unique(nodes)) != k:
            raise ValidationError("barycentric nodes must be distinct")
        if self.form not in (STRICTLY_PROPER, PROPER):
            raise ValidationError(f"unknown form {self.form!r}")
        if self.form == PROPER and k and values.shape[1:] != (1, 1):
            raise ValidationError("proper barycentric form is SISO only")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @property
    def k(self):
        return self.nodes.shape[0]

    @property
    def p(self):
        return self.values.shape[1] if self.k else 1

    @property
    def m(self):
        return self.values.shape[2] if self.k else 1

    @property
    def order(self):
        return self.k * self.m

    def to_dict(self):
        d = {
            "nodes": _pairs(self.nodes),
            "values": _pairs(self.values),
            "weights": _pairs(self.weights),
            "form": self.form,
        }
        if self.form == PROPER and self.k == 0:
            d["empty_value"] = _pairs(self.empty_value)
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            nodes = _unpairs(d["nodes"], 1, "nodes") if d["nodes"] else np.zeros(0, complex)
            k = nodes.shape[0]
            values = _unpairs(d["values"], 3, "values") if k else np.zeros((0, 1, 1), complex)
            weights = _unpairs(d["weights"], 3, "weights") if k else np.zeros((0, 1, 1), complex)
        except KeyError as exc:
            raise DataFormatError(f"barycentric model missing key {exc}") from None
        empty = d.get("empty_value", [0.0, 0.0])
        return cls(nodes=nodes, values=values, weights=weights,
                   form=d.get("form", STRICTLY_PROPER),
                   empty_value=complex(empty[0], empty[1]))


def save_model(model, path):
    Path(path).write_text(json.dumps(model.to_dict()))


def model_from_dict(d):
    if "nodes" in d:
        return BarycentricModel.from_dict(d)
    if "A" in d:
        return StateSpaceModel.from_dict(d)
    raise DataFormatError("unrecognized model file: expected 'A' or 'nodes' key")


def load_model(path):
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc}") from None
    return model_from_dict(d)
