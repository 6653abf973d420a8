"""Frequency-response datasets: container, file I/O, conjugate closure, noise,
and synthetic stable test systems."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConjugateInconsistencyError, DataFormatError, ValidationError
from .models import StateSpaceModel

CONJ_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FrequencyDataset:
    """Samples ``H(s_i)`` of a ``p x m`` transfer function.

    ``points`` has shape ``(N,)``, ``values`` shape ``(N, p, m)``. SISO values
    may be passed as a flat ``(N,)`` array.
    """

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).reshape(-1)
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1, 1)
        if vals.ndim != 3:
            raise ValidationError(f"values must be (N, p, m), got shape {vals.shape}")
        if vals.shape[0] != pts.shape[0]:
            raise ValidationError(f"{pts.shape[0]} points but {vals.shape[0]} values")
        if len(np.unique(pts)) != len(pts):
            raise ValidationError("sample points must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.points.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    @property
    def m(self):
        return self.values.shape[2]

    @property
    def is_siso(self):
        return self.p == 1 and self.m == 1

    @property
    def omega(self):
        return self.points.imag

    def subset(self, indices):
        idx = np.asarray(indices, dtype=int)
        return FrequencyDataset(self.points[idx], self.values[idx])

    def conjugate_partner(self):
        """Index of each point's conjugate in the dataset, or -1.

        Real points are their own partner.
        """
        pts = self.points
        lookup = {complex(z): i for i, z in enumerate(pts)}
        out = np.full(len(pts), -1, dtype=int)
        for i, z in enumerate(pts):
            out[i] = lookup.get(complex(np.conj(z)), -1)
        return out

    def is_conjugate_closed(self, rtol=CONJ_RTOL):
        partner = self.conjugate_partner()
        if np.any(partner < 0):
            return False
        scale = max(1.0, float(np.max(np.abs(self.values)))) if len(self) else 1.0
        err = np.abs(self.values[partner] - np.conj(self.values))
        return bool(np.all(err <= rtol * scale))

    def upper_indices(self):
        """Indices of points with ``Im(s) >= 0``, in dataset order."""
        return np.flatnonzero(self.points.imag >= 0)


# ---------------------------------------------------------------- file I/O

def _csv_columns(p, m):
    cols = ["omega"]
    for j in range(1, m + 1):
        for i in range(1, p + 1):
            cols += [f"re_{i}_{j}", f"im_{i}_{j}"]
    return cols


def _parse_header(header):
    if not header or header[0].strip() != "omega":
        raise DataFormatError("CSV header must start with 'omega'", row=None)
    idx = []
    for name in header[1:]:
        parts = name.strip().split("_")
        if len(parts) != 3 or parts[0] not in ("re", "im"):
            raise DataFormatError(f"bad CSV column name {name!r}")
        try:
            idx.append((int(parts[1]), int(parts[2])))
        except ValueError:
            raise DataFormatError(f"bad CSV column name {name!r}") from None
    if not idx:
        raise DataFormatError("CSV header has no value columns")
    p = max(i for i, _ in idx)
    m = max(j for _, j in idx)
    if [c.strip() for c in header] != _csv_columns(p, m):
        raise DataFormatError(f"CSV columns must be {_csv_columns(p, m)}")
    return p, m


def _read_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataFormatError("no samples")
    p, m = _parse_header(rows[0])
    ncol = 1 + 2 * p * m
    if len(rows) == 1:
        raise DataFormatError("no samples")
    omega = np.empty(len(rows) - 1)
    vals = np.empty((len(rows) - 1, p, m), dtype=complex)
    for r, row in enumerate(rows[1:]):
        if len(row) != ncol:
            raise DataFormatError(f"expected {ncol} fields, got {len(row)}", row=r)
        try:
            nums = [float(c) for c in row]
        except ValueError as exc:
            raise DataFormatError(str(exc), row=r) from None
        omega[r] = nums[0]
        flat = np.array(nums[1::2]) + 1j * np.array(nums[2::2])
        vals[r] = flat.reshape(m, p).T
    return 1j * omega, vals


def _read_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DataFormatError("JSON dataset must be an object")
    try:
        m, p, samples = int(doc["m"]), int(doc["p"]), doc["samples"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"JSON dataset needs integer 'm', 'p' and 'samples': {exc}") from None
    if not samples:
        raise DataFormatError("no samples")
    pts = np.empty(len(samples), dtype=complex)
    vals = np.empty((len(samples), p, m), dtype=complex)
    for r, smp in enumerate(samples):
        try:
            s = np.asarray(smp["s"], dtype=float)
            h = np.asarray(smp["H"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"bad sample: {exc}", row=r) from None
        if s.shape != (2,):
            raise DataFormatError("'s' must be [re, im]", row=r)
        if h.shape == (p * m, 2):
            vals[r] = (h[:, 0] + 1j * h[:, 1]).reshape(m, p).T
        elif h.shape == (p, m, 2):
            vals[r] = h[..., 0] + 1j * h[..., 1]
        else:
            raise DataFormatError(f"'H' has shape {h.shape}, expected ({p * m}, 2)", row=r)
        pts[r] = s[0] + 1j * s[1]
    return pts, vals


def _infer_format(path, fmt):
    if fmt:
        fmt = fmt.lower()
    else:
        fmt = Path(path).suffix.lower().lstrip(".")
    if fmt not in ("csv", "json"):
        raise DataFormatError(f"unknown dataset format {fmt!r}; use csv or json")
    return fmt


def load_dataset(path, format=None, hz=False):
    """Read a dataset from CSV or JSON.

    With ``hz=True`` the stored frequencies are in Hz and are scaled by 2*pi.
    """
    fmt = _infer_format(path, format)
    text = Path(path).read_text()
    pts, vals = _read_csv(text) if fmt == "csv" else _read_json(text)
    if hz:
        pts = pts * (2 * math.pi)
    try:
        return FrequencyDataset(pts, vals)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def dataset_to_json(d):
    samples = []
    for z, h in zip(d.points, d.values):
        flat = h.T.reshape(-1)
        samples.append({"s": [float(z.real), float(z.imag)],
                        "H": [[float(c.real), float(c.imag)] for c in flat]})
    return json.dumps({"m": d.m, "p": d.p, "samples": samples})


def dataset_to_csv(d):
    if np.any(d.points.real != 0):
        raise ValidationError("CSV stores omega only; all points must lie on the imaginary axis")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_csv_columns(d.p, d.m))
    for z, h in zip(d.points, d.values):
        row = [f"{z.imag:.17g}"]
        for c in h.T.reshape(-1):
            row += [f"{c.real:.17g}", f"{c.imag:.17g}"]
        w.writerow(row)
    return buf.getvalue()


def save_dataset(d, path, format=None):
    fmt = _infer_format(path, format)
    text = dataset_to_csv(d) if fmt == "csv" else dataset_to_json(d)
    Path(path).write_text(text)


# ---------------------------------------------------------------- transforms

def conjugate_close(d, rtol=CONJ_RTOL):
    """Add the missing conjugate of every non-real sample.

    Each added conjugate is placed right after its partner, so a dataset of
    upper-half-plane samples becomes ``[s1, conj(s1), s2, conj(s2), ...]``.
    """
    if np.any(d.points.real < 0):
        raise ValidationError("conjugate_close: points in the open left half-plane")
    scale = max(1.0, float(np.max(np.abs(d.values))))
    partner = d.conjugate_partner()
    for i, j in enumerate(partner):
        if j >= 0 and np.max(np.abs(d.values[j] - np.conj(d.values[i]))) > rtol * scale:
            raise ConjugateInconsistencyError(
                f"sample at s={d.points[i]} has a conjugate partner with non-conjugate value")
    pts, vals = [], []
    for i, z in enumerate(d.points):
        pts.append(z)
        vals.append(d.values[i])
        if partner[i] < 0:
            pts.append(np.conj(z))
            vals.append(np.conj(d.values[i]))
    return FrequencyDataset(np.array(pts), np.array(vals))


@dataclass(frozen=True)
class NoiseSpec:
    """Multiplicative complex Gaussian noise ``H <- H (1 + Z)``.

    ``var`` is the total variance of ``Z``; real and imaginary parts each get
    ``var / 2``.
    """

    var: float
    mean: complex = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.var >= 0 and math.isfinite(self.var)):
            raise ValidationError(f"noise variance must be finite and >= 0, got {self.var}")


def draw_noise(shape, spec):
    rng = np.random.default_rng(spec.seed)
    sd = math.sqrt(spec.var / 2.0)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return spec.mean + sd * z


def add_noise(d, spec):
    """Perturb every entry as ``H(s_i)(1 + Z_i)``.

    Noise is drawn for samples with ``Im(s) >= 0``; a lower-half-plane sample
    whose conjugate is present receives the conjugate of its partner's noisy
    value, so conjugate-closed data stays conjugate-closed.
    """
    if spec.var == 0 and spec.mean == 0:
        return FrequencyDataset(d.points.copy(), d.values.copy())
    upper = d.upper_indices()
    z = draw_noise((len(upper), d.p, d.m), spec)
    vals = d.values.copy()
    vals[upper] = d.values[upper] * (1.0 + z)
    partner = d.conjugate_partner()
    for i in np.flatnonzero(d.points.imag < 0):
        j = partner[i]
        if j >= 0:
            vals[i] = np.conj(vals[j])
        else:
            zi = draw_noise((d.p, d.m), NoiseSpec(spec.var, spec.mean, spec.seed + 1 + int(i)))
            vals[i] = d.values[i] * (1.0 + zi)
    return FrequencyDataset(d.points.copy(), vals)


# ---------------------------------------------------------------- synthetic

def transfer_samples(model, points):
    """``C (sE - A)^{-1} B`` at each point, by linear solves."""
    E = model.E_matrix
    out = np.empty((len(points), model.p, model.m), dtype=complex)
    for i, s in enumerate(points):
        out[i] = model.C @ np.linalg.solve(s * E - model.A, model.B)
    return out


def random_stable_poles(order, rng, band=(1.0, 10.0), damping=(0.01, 0.3)):
    """Poles closed under conjugation with ``Re < 0``.

    Natural frequencies are log-uniform in ``band``, damping ratios uniform
    in ``damping``. An odd order gets one real pole.
    """
    lo, hi = band
    npair, odd = divmod(order, 2)
    w0 = np.exp(rng.uniform(np.log(lo), np.log(hi), npair))
    zeta = rng.uniform(damping[0], damping[1], npair)
    upper = -zeta * w0 + 1j * w0 * np.sqrt(1 - zeta ** 2)
    poles = []
    for z in np.sort_complex(upper):
        poles += [z, np.conj(z)]
    if odd:
        poles.append(-np.exp(rng.uniform(np.log(lo), np.log(hi))))
    return np.array(poles, dtype=complex)


def real_model_from_poles(poles, m, p, rng):
    """Random real ``(A, B, C)`` whose eigenvalues are ``poles`` (conjugate-closed)."""
    order = len(poles)
    A = np.zeros((order, order))
    i = 0
    while i < order:
        z = poles[i]
        if abs(z.imag) > 0:
            A[i:i + 2, i:i + 2] = [[z.real, z.imag], [-z.imag, z.real]]
            i += 2
        else:
            A[i, i] = z.real
            i += 1
    Q, _ = np.linalg.qr(rng.standard_normal((order, order)))
    A = Q @ A @ Q.T
    B = rng.standard_normal((order, m))
    C = rng.standard_normal((p, order))
    return StateSpaceModel(A=A, B=B, C=C, info={"poles": np.asarray(poles)})


def generate_synthetic(order, m, p, grid, seed, damping=(0.01, 0.3)):
    """Random real stable LTI model and its samples at ``s = i*omega``.

    Returns ``(dataset, model)``. Natural frequencies are spread over the
    range of ``|grid|`` so the response has features inside the band.
    """
    if order < 1:
        raise ValidationError("order must be >= 1")
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValidationError("grid must be nonempty")
    if len(np.unique(grid)) != grid.size:
        raise ValidationError("grid frequencies must be distinct")
    rng = np.random.default_rng(seed)
    mag = np.abs(grid[grid != 0]) if np.any(grid != 0) else np.array([1.0])
    lo, hi = float(mag.min()), float(mag.max())
    if hi / lo < 1.01:
        lo, hi = lo / 2, hi * 2
    poles = random_stable_poles(order, rng, (lo, hi), damping)
    model = real_model_from_poles(poles, m, p, rng)
    points = 1j * grid
    return FrequencyDataset(points, transfer_samples(model, points)), model
