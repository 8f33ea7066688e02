"""Sampled Lagrangian graphs over box grids: per-point geometry and the PDE
residuals standing in for Hamiltonian minimality and conformal Maslov form.

The lifted angle field psi = sum arctan(lambda_k) is globally single-valued
(each critical angle is a principal arctan), so no unwrapping happens
anywhere.  Residual stencils are divergence-form central differences; they
vanish identically, not just to truncation order, on any u whose psi field
is constant.  Residual fields live on the interior two cells from the
boundary; boundary entries are NaN.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .expr import Expression, eval_jet, JetValue
from .grassmann import GaussPoint, plane_from_hessian, tube_deviation

__all__ = [
    "GridDomain",
    "JetGrid",
    "PointAnalysis",
    "FieldReport",
    "sample_domain",
    "analyze_point",
    "laplace_beltrami_residual",
    "mean_curvature_norm",
    "cmf_residual",
    "field_report",
    "write_grid_csv",
    "load_grid_csv",
    "CMF_MIN_RESOLUTION",
]

CMF_MIN_RESOLUTION = 7  # Lie-derivative stencils reach three cells deep


@dataclass(frozen=True)
class GridDomain:
    """Axis-aligned box sampled on a regular grid, at least 5 points per axis."""

    lower: tuple
    upper: tuple
    resolution: tuple

    def __init__(self, lower, upper, resolution):
        lo = tuple(float(v) for v in np.atleast_1d(lower))
        hi = tuple(float(v) for v in np.atleast_1d(upper))
        res = tuple(int(v) for v in np.atleast_1d(resolution))
        if not len(lo) == len(hi) == len(res):
            raise ValueError(
                f"lower/upper/resolution lengths differ: {len(lo)}, {len(hi)}, {len(res)}"
            )
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError(f"box is empty: lower {lo}, upper {hi}")
        if any(m < 5 for m in res):
            raise ValueError(f"resolution must be >= 5 per axis, got {res}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "resolution", res)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def spacing(self) -> tuple:
        return tuple(
            (h - l) / (m - 1) for l, h, m in zip(self.lower, self.upper, self.resolution)
        )

    def axes(self) -> list:
        return [
            np.linspace(l, h, m)
            for l, h, m in zip(self.lower, self.upper, self.resolution)
        ]

    def point(self, index) -> np.ndarray:
        axes = self.axes()
        return np.array([axes[a][i] for a, i in enumerate(index)])


@dataclass
class JetGrid:
    """Jets of u on every grid point, in row-major (C) order over the axes."""

    domain: GridDomain
    values: np.ndarray    # res
    gradients: np.ndarray  # res + (n,)
    hessians: np.ndarray   # res + (n, n)


@dataclass
class PointAnalysis:
    """Geometry of the graph's tangent plane at one point."""

    hessian: np.ndarray
    metric: np.ndarray       # g = I + Hess^2
    gauss: GaussPoint
    delta_u: float           # sqrt(det g) = prod sec(theta_k) >= 1
    tube_dev: float


@dataclass
class FieldReport:
    """Grid fields plus scalar summaries (each an extremum of its field)."""

    domain: GridDomain
    psi_field: np.ndarray
    delta_u_field: np.ndarray
    tube_dev_field: np.ndarray
    lambda_min_field: np.ndarray
    hmin_residual_field: np.ndarray
    mean_curvature_norm_field: np.ndarray
    cmf_residual_field: np.ndarray | None
    summaries: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)


def sample_domain(dom: GridDomain, e: Expression) -> JetGrid:
    """Evaluate exact jets of e at every grid point of dom."""
    if e.dim != dom.dim:
        raise ValueError(f"expression dim {e.dim} != domain dim {dom.dim}")
    n = dom.dim
    res = dom.resolution
    axes = dom.axes()
    values = np.empty(res)
    gradients = np.empty(res + (n,))
    hessians = np.empty(res + (n, n))
    for idx in np.ndindex(*res):
        p = np.array([axes[a][i] for a, i in enumerate(idx)])
        jet = eval_jet(e, p)
        values[idx] = jet.value
        gradients[idx] = jet.gradient
        hessians[idx] = jet.hessian
    return JetGrid(domain=dom, values=values, gradients=gradients, hessians=hessians)


def _check_delta_identity(det_g, lam, where: str):
    """sqrt(det(I+H^2)) must match prod sqrt(1+lambda^2) and prod sec(arctan lambda)."""
    a = np.sqrt(det_g)
    b = np.prod(np.sqrt(1.0 + lam * lam), axis=-1)
    c = np.prod(1.0 / np.cos(np.arctan(lam)), axis=-1)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.maximum(np.abs(b), np.abs(c))))
    worst = max(
        float((np.abs(a - b) / scale).max()),
        float((np.abs(a - c) / scale).max()),
    )
    if worst > 1e-10:
        raise ArithmeticError(
            f"volume-element identity violated in {where}: relative spread {worst:.3e}"
        )
    return a


def analyze_point(jet: JetValue) -> PointAnalysis:
    """Tangent-plane geometry from one jet: metric, Gauss point, volume element."""
    H = np.asarray(jet.hessian, dtype=float)
    gauss = plane_from_hessian(H)
    metric = np.eye(H.shape[0]) + H @ H
    delta = _check_delta_identity(np.linalg.det(metric), gauss.lambdas, "analyze_point")
    return PointAnalysis(
        hessian=H,
        metric=metric,
        gauss=gauss,
        delta_u=float(delta),
        tube_dev=tube_deviation(gauss.thetas),
    )


# ---------------------------------------------------------------------------
# stencils
# ---------------------------------------------------------------------------

def _central(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order central difference along one axis; NaN at that axis' edges."""
    d = (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)
    edge = [slice(None)] * f.ndim
    edge[axis] = 0
    d[tuple(edge)] = np.nan
    edge[axis] = -1
    d[tuple(edge)] = np.nan
    return d


def _mask_depth(f: np.ndarray, dim: int, depth: int) -> np.ndarray:
    out = f.copy()
    for axis in range(dim):
        edge = [slice(None)] * out.ndim
        for cut in (slice(0, depth), slice(-depth, None)):
            edge[axis] = cut
            out[tuple(edge)] = np.nan
    return out


class _Geometry:
    """Shared per-grid fields: angles, metric, inverse, volume factor."""

    def __init__(self, grid: JetGrid):
        n = grid.domain.dim
        H = grid.hessians
        self.dim = n
        self.spacing = grid.domain.spacing
        self.lam = np.linalg.eigvalsh(H)
        self.thetas = np.arctan(self.lam)
        self.psi = self.thetas.sum(axis=-1)
        self.g = np.eye(n) + np.einsum("...ij,...jk->...ik", H, H)
        self.ginv = np.linalg.inv(self.g)
        self.det_g = np.linalg.det(self.g)
        self.sqrt_det_g = np.sqrt(self.det_g)

    def grad_psi(self) -> np.ndarray:
        return np.stack(
            [_central(self.psi, a, self.spacing[a]) for a in range(self.dim)], axis=-1
        )


def laplace_beltrami_residual(grid: JetGrid) -> np.ndarray:
    """Delta_g psi in divergence form; H-minimality holds iff this vanishes.

    Valid on the interior two cells deep; NaN elsewhere.  Exactly zero
    (not merely small) wherever the psi field is constant.
    """
    return _laplace_beltrami(_Geometry(grid))


def _laplace_beltrami(geo: _Geometry) -> np.ndarray:
    dpsi = geo.grad_psi()
    flux = geo.sqrt_det_g[..., None] * np.einsum("...ij,...j->...i", geo.ginv, dpsi)
    div = sum(_central(flux[..., a], a, geo.spacing[a]) for a in range(geo.dim))
    return div / geo.sqrt_det_g


def mean_curvature_norm(grid: JetGrid) -> np.ndarray:
    """|H| = |grad_g psi|_g on the interior (masked to the same depth as the
    residual fields so all summaries range over one region)."""
    return _mean_curvature(_Geometry(grid))


def _mean_curvature(geo: _Geometry) -> np.ndarray:
    dpsi = geo.grad_psi()
    sq = np.einsum("...ij,...i,...j->...", geo.ginv, dpsi, dpsi)
    return _mask_depth(np.sqrt(sq), geo.dim, 2)


def cmf_residual(grid: JetGrid) -> np.ndarray:
    """Pointwise norm of the traceless part of L_X g for X = grad_g psi.

    Zero exactly when JH is a conformal field on the sampled graph.  Needs
    at least 7 points per axis: the Lie derivative consumes derivatives of
    quantities that are themselves centered differences.
    """
    if min(grid.domain.resolution) < CMF_MIN_RESOLUTION:
        raise ValueError(
            f"cmf_residual needs resolution >= {CMF_MIN_RESOLUTION} per axis, "
            f"got {grid.domain.resolution}"
        )
    return _cmf(_Geometry(grid))


def _cmf(geo: _Geometry) -> np.ndarray:
    n = geo.dim
    dpsi = geo.grad_psi()
    X = np.einsum("...ij,...j->...i", geo.ginv, dpsi)
    dg = np.stack([_central(geo.g, a, geo.spacing[a]) for a in range(n)], axis=0)
    dX = np.stack([_central(X, a, geo.spacing[a]) for a in range(n)], axis=0)
    lie = np.einsum("...k,k...ij->...ij", X, dg)
    lie = lie + np.einsum("...kj,i...k->...ij", geo.g, dX)
    lie = lie + np.einsum("...ik,j...k->...ij", geo.g, dX)
    div = sum(
        _central(geo.sqrt_det_g * X[..., a], a, geo.spacing[a]) for a in range(n)
    ) / geo.sqrt_det_g
    dev = lie - (2.0 / n) * div[..., None, None] * geo.g
    return np.sqrt(np.einsum("...ij,...ij->...", dev, dev))


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

def _extremum(field_arr: np.ndarray, domain: GridDomain, mode: str):
    """(value, witness coordinates) of the requested extremum, NaN-aware."""
    if mode == "min":
        flat_idx = np.nanargmin(field_arr)
        value = float(field_arr.flat[flat_idx])
    else:
        mag = np.abs(field_arr) if mode == "sup" else field_arr
        flat_idx = np.nanargmax(mag)
        value = float(mag.flat[flat_idx])
    index = np.unravel_index(flat_idx, field_arr.shape)
    return value, tuple(float(v) for v in domain.point(index))


def _mean_hessian(H_flat: np.ndarray) -> np.ndarray:
    # a bitwise-constant Hessian field has itself as mean, exactly
    if np.all(H_flat == H_flat[0]):
        return H_flat[0]
    return H_flat.mean(axis=0)


def field_report(grid: JetGrid) -> FieldReport:
    """All derived fields plus the scalar summaries used by theorem checks.

    Summaries (each recomputable as an extremum of the matching field):
    min_eigen, sup_delta_u, sup_tube_dev, sup_hmin_residual,
    sup_cmf_residual (when resolution permits), sup_mean_curv,
    affinity_residual, isotropy_residual, hess_sup_norm.
    """
    dom = grid.domain
    n = dom.dim
    geo = _Geometry(grid)

    delta_u = _check_delta_identity(geo.det_g, geo.lam, "field_report")

    spread = geo.thetas - geo.thetas.mean(axis=-1, keepdims=True)
    tube = np.sqrt(np.sum(spread * spread, axis=-1))
    isotropic = geo.thetas.max(axis=-1) == geo.thetas.min(axis=-1)
    tube[isotropic] = 0.0

    hmin = _laplace_beltrami(geo)
    mean_curv = _mean_curvature(geo)
    cmf = _cmf(geo) if min(dom.resolution) >= CMF_MIN_RESOLUTION else None

    H = grid.hessians
    H_flat = H.reshape(-1, n, n)
    mean_H = _mean_hessian(H_flat)
    affinity = np.sqrt(np.einsum("...ij,...ij->...", H - mean_H, H - mean_H))
    trace = np.einsum("...ii->...", H) / n
    traceless = H - trace[..., None, None] * np.eye(n)
    isotropy = np.sqrt(np.einsum("...ij,...ij->...", traceless, traceless))
    hess_norm = np.sqrt(np.einsum("...ij,...ij->...", H, H))

    report = FieldReport(
        domain=dom,
        psi_field=geo.psi,
        delta_u_field=delta_u,
        tube_dev_field=tube,
        lambda_min_field=geo.lam[..., 0],
        hmin_residual_field=hmin,
        mean_curvature_norm_field=mean_curv,
        cmf_residual_field=cmf,
    )

    entries = [
        ("min_eigen", geo.lam[..., 0], "min"),
        ("sup_delta_u", delta_u, "max"),
        ("sup_tube_dev", tube, "max"),
        ("sup_hmin_residual", hmin, "sup"),
        ("sup_mean_curv", mean_curv, "sup"),
        ("affinity_residual", affinity, "max"),
        ("isotropy_residual", isotropy, "max"),
        ("hess_sup_norm", hess_norm, "max"),
    ]
    if cmf is not None:
        entries.insert(4, ("sup_cmf_residual", cmf, "sup"))
    for name, arr, mode in entries:
        value, witness = _extremum(arr, dom, mode)
        report.summaries[name] = value
        report.witnesses[name] = witness
    return report


# ---------------------------------------------------------------------------
# CSV exchange
# ---------------------------------------------------------------------------

def _csv_columns(n: int) -> list:
    cols = [f"x{k}" for k in range(1, n + 1)]
    cols.append("u")
    cols += [f"g{k}" for k in range(1, n + 1)]
    cols += [f"h{i}{j}" for i in range(1, n + 1) for j in range(i, n + 1)]
    return cols


_DERIVED_COLUMNS = [
    "psi",
    "delta_u",
    "tube_dev",
    "lambda_min",
    "hmin_residual",
    "cmf_residual",
    "mean_curvature",
]


def _fmt(v: float) -> str:
    if v != v:  # NaN: field undefined at this point
        return ""
    return "%.12g" % v


def write_grid_csv(grid: JetGrid, path, report: FieldReport | None = None):
    """One row per grid point, row-major: coordinates, jet, derived fields."""
    dom = grid.domain
    n = dom.dim
    header = _csv_columns(n) + (_DERIVED_COLUMNS if report is not None else [])
    axes = dom.axes()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for idx in np.ndindex(*dom.resolution):
            row = [_fmt(axes[a][i]) for a, i in enumerate(idx)]
            row.append(_fmt(grid.values[idx]))
            row += [_fmt(v) for v in grid.gradients[idx]]
            H = grid.hessians[idx]
            row += [_fmt(H[i, j]) for i in range(n) for j in range(i, n)]
            if report is not None:
                cmf = (
                    report.cmf_residual_field[idx]
                    if report.cmf_residual_field is not None
                    else float("nan")
                )
                row += [
                    _fmt(report.psi_field[idx]),
                    _fmt(report.delta_u_field[idx]),
                    _fmt(report.tube_dev_field[idx]),
                    _fmt(report.lambda_min_field[idx]),
                    _fmt(report.hmin_residual_field[idx]),
                    _fmt(cmf),
                    _fmt(report.mean_curvature_norm_field[idx]),
                ]
            writer.writerow(row)


def load_grid_csv(path) -> JetGrid:
    """Rebuild a JetGrid from the CSV layout written by write_grid_csv.

    Rows must enumerate a complete box grid in row-major order; derived
    columns, if present, are ignored (they are recomputed on analysis).
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        rows = [row for row in reader if row]
    n = 0
    while f"x{n + 1}" in header:
        n += 1
    if n == 0:
        raise ValueError(f"{path}: no coordinate columns x1..xn found")
    expected = _csv_columns(n)
    if header[: len(expected)] != expected:
        raise ValueError(
            f"{path}: header must start with {expected}, got {header[: len(expected)]}"
        )
    if not rows:
        raise ValueError(f"{path}: no data rows")

    data = np.array([[float(cell) for cell in row[: len(expected)]] for row in rows])
    points = data[:, :n]

    axes = [np.unique(points[:, a]) for a in range(n)]
    res = tuple(len(ax) for ax in axes)
    if math.prod(res) != len(rows):
        raise ValueError(
            f"{path}: {len(rows)} rows do not form a full {res} grid"
        )
    dom = GridDomain(
        lower=[ax[0] for ax in axes],
        upper=[ax[-1] for ax in axes],
        resolution=res,
    )
    grid_axes = dom.axes()
    scale = max(abs(ax).max() for ax in grid_axes) + 1.0
    for row_i, idx in enumerate(np.ndindex(*res)):
        for a, i in enumerate(idx):
            if abs(points[row_i, a] - grid_axes[a][i]) > 1e-9 * scale:
                raise ValueError(
                    f"{path}: row {row_i + 2} is out of row-major grid order"
                )

    values = data[:, n].reshape(res)
    gradients = data[:, n + 1 : 2 * n + 1].reshape(res + (n,))
    hess = np.empty(res + (n, n))
    col = 2 * n + 1
    for i in range(n):
        for j in range(i, n):
            tri = data[:, col].reshape(res)
            hess[..., i, j] = tri
            hess[..., j, i] = tri
            col += 1
    return JetGrid(domain=dom, values=values, gradients=gradients, hessians=hess)
