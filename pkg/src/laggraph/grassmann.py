"""Lagrangian planes in C^n as symmetric unitary matrices, and the geometry
of the determinant fibration U(n)/SO(n) -> S^1.

A tangent plane of a Lagrangian graph is encoded canonically by
V = S diag(e^{i theta_k}) S^T with S in SO(n) and theta_k = arctan(lambda_k)
the critical angles of the Hessian eigenvalues.  V is a matrix function of
the Hessian alone, so every comparison here is on V, never on eigenframes.

Distances between such representatives use the tr(A B*) metric, normalized
so the scalar-matrix geodesic t -> e^{it/sqrt(n)} I is unit speed and the
diagonal fiber geodesic t -> diag(e^{it theta_k}) has speed sqrt(sum theta^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GaussPoint",
    "FiberPoint",
    "SelfTestCheck",
    "SelfTestReport",
    "GeometryError",
    "BranchError",
    "plane_from_hessian",
    "det_fiber",
    "sigma",
    "project_to_fiber0",
    "coset_distance",
    "tube_deviation",
    "component_index",
    "is_lagrangian",
    "submersion_selftest",
]


class GeometryError(ValueError):
    """Invalid geometric input or failed internal consistency check."""


class BranchError(GeometryError):
    """Quotient has an eigenvalue at -1: outside the principal-log branch."""


@dataclass
class GaussPoint:
    """Canonical data of one Lagrangian plane.

    lambdas ascending, frame in SO(n), thetas = arctan(lambdas),
    psi = sum(thetas), rep = frame @ diag(e^{i thetas}) @ frame.T,
    component = the sheet index l with psi - 2 pi l in (-pi, pi].
    """

    dim: int
    lambdas: np.ndarray
    frame: np.ndarray
    thetas: np.ndarray
    psi: float
    rep: np.ndarray
    component: int


@dataclass
class FiberPoint:
    """Point of the standard fiber F0 = SU(n)/SO(n): det(rep) = 1, angles sum to 0."""

    rep: np.ndarray
    angles: np.ndarray


@dataclass
class SelfTestCheck:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class SelfTestReport:
    dim: int
    checks: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "checks": [c.as_dict() for c in self.checks],
            "all_passed": self.all_passed,
        }


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------

def _require_symmetric(H: np.ndarray, tol: float):
    defect = float(np.abs(H - H.T).max()) if H.size else 0.0
    scale = 1.0 + (float(np.abs(H).max()) if H.size else 0.0)
    if defect > tol * scale:
        raise GeometryError(f"matrix is not symmetric: asymmetry {defect:.3e}")


def _require_symmetric_unitary(M: np.ndarray, tol: float, what: str):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise GeometryError(f"{what} must be a square matrix, got shape {M.shape}")
    sym = float(np.abs(M - M.T).max())
    uni = float(np.abs(M @ M.conj().T - np.eye(M.shape[0])).max())
    if sym > tol or uni > tol:
        raise GeometryError(
            f"{what} is not symmetric unitary (asymmetry {sym:.3e}, unitarity defect {uni:.3e})"
        )


def _require_admissible_angles(thetas: np.ndarray):
    if thetas.size and float(np.abs(thetas).max()) >= math.pi / 2:
        raise GeometryError("critical angles must lie in (-pi/2, pi/2)")


def _centered(values: np.ndarray) -> np.ndarray:
    # mean of a bitwise-constant vector is that constant, exactly
    if np.all(values == values[0]):
        return np.zeros_like(values)
    return values - values.mean()


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def component_index(thetas) -> int:
    """Sheet index l: the unique integer with sum(thetas) - 2 pi l in (-pi, pi]."""
    t = np.asarray(thetas, dtype=float).reshape(-1)
    _require_admissible_angles(t)
    psi = float(t.sum())
    return math.ceil((psi - math.pi) / (2.0 * math.pi))


def plane_from_hessian(H) -> GaussPoint:
    """Canonical plane data from a symmetric Hessian H = S diag(lambda) S^T."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise GeometryError(f"Hessian must be square, got shape {H.shape}")
    _require_symmetric(H, 1e-12)
    n = H.shape[0]
    lam, S = np.linalg.eigh(0.5 * (H + H.T))
    S = np.array(S)
    if np.linalg.det(S) < 0.0:
        S[:, -1] = -S[:, -1]
    thetas = np.arctan(lam)
    psi = float(thetas.sum())
    V = (S * np.exp(1j * thetas)) @ S.T
    V = 0.5 * (V + V.T)
    point = GaussPoint(
        dim=n,
        lambdas=lam,
        frame=S,
        thetas=thetas,
        psi=psi,
        rep=V,
        component=component_index(thetas),
    )
    _validate_gauss_point(point)
    return point


def _validate_gauss_point(g: GaussPoint):
    n = g.dim
    frame_defect = max(
        float(np.abs(g.frame @ g.frame.T - np.eye(n)).max()),
        abs(float(np.linalg.det(g.frame)) - 1.0),
    )
    if frame_defect > 1e-10:
        raise GeometryError(f"eigen-decomposition failed: frame defect {frame_defect:.3e}")
    _require_symmetric_unitary(g.rep, 1e-10, "plane representative")
    if abs(np.linalg.det(g.rep) - np.exp(1j * g.psi)) > 1e-10:
        raise GeometryError("det(V) does not match e^{i psi}")
    # attainable sheet range for the centered window, given |psi| < n pi / 2
    bound = math.ceil((n - 2) / 4)
    if not -bound <= g.component <= bound:
        raise GeometryError(f"component index {g.component} out of range for n={n}")


def det_fiber(g: GaussPoint) -> complex:
    """Image of the plane under the fibration: det(V), which equals e^{i psi}."""
    return complex(np.linalg.det(g.rep))


def sigma(t: float, n: int) -> np.ndarray:
    """The horizontal scalar-matrix geodesic diag(e^{it/sqrt(n)}), arc-length in t."""
    if n < 1:
        raise GeometryError(f"n must be positive, got {n}")
    return np.exp(1j * t / math.sqrt(n)) * np.eye(n, dtype=complex)


def project_to_fiber0(g: GaussPoint) -> FiberPoint:
    """Pull the plane back along sigma into the standard fiber F0 (det = 1)."""
    rep = np.exp(-1j * g.psi / g.dim) * g.rep
    angles = g.thetas - g.psi / g.dim
    if abs(np.linalg.det(rep) - 1.0) > 1e-10:
        raise GeometryError("projected representative does not have det 1")
    return FiberPoint(rep=rep, angles=angles)


def coset_distance(A, B, branch_tol: float = 1e-6) -> float:
    """Distance between cosets given by symmetric unitary representatives.

    Computed from the principal eigenvalue arguments phi_k of conj(A) @ B as
    sqrt(sum phi_k^2); valid within the injectivity radius.  An eigenvalue
    within branch_tol of -1 raises BranchError instead of picking a branch.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    _require_symmetric_unitary(A, 1e-10, "first argument")
    _require_symmetric_unitary(B, 1e-10, "second argument")
    if A.shape != B.shape:
        raise GeometryError(f"shape mismatch: {A.shape} vs {B.shape}")
    w = np.linalg.eigvals(A.conj() @ B)
    if np.any(np.abs(w + 1.0) < branch_tol):
        raise BranchError("quotient eigenvalue at -1: outside the principal branch")
    phi = np.angle(w)
    return float(np.sqrt(np.sum(phi * phi)))


def tube_deviation(thetas) -> float:
    """Centered angle spread sqrt(sum (theta_k - mean)^2).

    Equals the fiber distance from the base point of the plane projected to
    F0, whenever the centered angles stay inside the principal branch.
    """
    t = np.asarray(thetas, dtype=float).reshape(-1)
    _require_admissible_angles(t)
    c = _centered(t)
    return float(np.sqrt(np.sum(c * c)))


def is_lagrangian(basis, tol: float = 1e-8) -> bool:
    """True iff the column span of a 2n x n basis is a Lagrangian n-plane.

    Uses the canonical symplectic form on R^{2n} = C^n written in (x, y)
    blocks: omega((a, b), (c, d)) = a.d - b.c.
    """
    M = np.asarray(basis, dtype=float)
    if M.ndim != 2 or M.shape[0] != 2 * M.shape[1]:
        raise GeometryError(f"basis must be 2n x n, got shape {M.shape}")
    n = M.shape[1]
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise GeometryError("rank-deficient basis")
    X, Y = M[:n], M[n:]
    pairing = X.T @ Y - Y.T @ X
    return float(np.abs(pairing).max()) <= tol * max(1.0, float(sv[0]) ** 2)


# ---------------------------------------------------------------------------
# fibration self-tests
# ---------------------------------------------------------------------------

def _so_coset_defect(A: np.ndarray) -> float:
    """How far a matrix is from lying in SO(n) itself (the coset of identity)."""
    R = A.real
    return max(
        float(np.abs(A.imag).max()),
        float(np.abs(R @ R.T - np.eye(A.shape[0])).max()),
        abs(float(np.linalg.det(R)) - 1.0),
    )


def _random_special_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0.0:
        Q[:, -1] = -Q[:, -1]
    return Q


def _random_fiber_point(n: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    a = scale * rng.standard_normal(n)
    a -= a.mean()
    R = _random_special_orthogonal(n, rng)
    return (R * np.exp(1j * a)) @ R.T


def submersion_selftest(n: int, seed: int = 1618) -> SelfTestReport:
    """Numerically exercise the fibration's claimed properties for one n.

    Six checks: constant dilation sqrt(n) of det along sigma, closure of
    sigma at t = 2 pi sqrt(n) as a coset, n-fold winding of det(sigma),
    orthogonality of sigma'(0) to the fiber directions, det = 1 along fiber
    geodesics, and the local product form of the metric over an arc.
    Failures are recorded in the report, never raised.
    """
    if not 2 <= n <= 5:
        raise GeometryError(f"selftest supports 2 <= n <= 5, got {n}")
    rng = np.random.default_rng(seed)
    sqrt_n = math.sqrt(n)
    period = 2.0 * math.pi * sqrt_n
    report = SelfTestReport(dim=n)

    def record(name, measured, expected, tolerance):
        report.checks.append(
            SelfTestCheck(
                name=name,
                measured=float(measured),
                expected=float(expected),
                tolerance=float(tolerance),
                passed=abs(float(measured) - float(expected)) <= float(tolerance),
            )
        )

    # (a) |d/dt det sigma| = sqrt(n), numeric derivative at spread-out times
    h = 1e-5
    worst = sqrt_n
    for t in np.linspace(0.1, 0.9 * period, 16):
        rate = abs(
            (np.linalg.det(sigma(t + h, n)) - np.linalg.det(sigma(t - h, n))) / (2.0 * h)
        )
        if abs(rate - sqrt_n) > abs(worst - sqrt_n):
            worst = rate
    record("dilation_factor", worst, sqrt_n, 1e-6)

    # (b) sigma closes after one period, as a coset of SO(n)
    record("geodesic_closure", _so_coset_defect(sigma(period, n)), 0.0, 1e-8)

    # (c) det(sigma) winds n times over one closed period
    ts = np.linspace(0.0, period, 4096)
    dets = np.array([np.linalg.det(sigma(t, n)) for t in ts])
    phase = np.unwrap(np.angle(dets))
    record("winding_number", (phase[-1] - phase[0]) / (2.0 * math.pi), float(n), 1e-6)

    # (d) sigma'(0) is tr(AB*)-orthogonal to traceless diagonal fiber directions
    dsig = (sigma(h, n) - sigma(-h, n)) / (2.0 * h)
    worst = 0.0
    for _ in range(8):
        a = rng.standard_normal(n)
        a -= a.mean()
        T = 1j * np.diag(a)
        worst = max(worst, abs(np.trace(dsig @ T.conj().T)))
    record("fiber_orthogonality", worst, 0.0, 1e-12)

    # (e) fiber geodesics diag(e^{it theta}), sum theta = 0, keep det = 1
    worst = 0.0
    for _ in range(8):
        a = rng.standard_normal(n)
        a -= a.mean()
        for t in np.linspace(0.0, 2.0 * math.pi, 64):
            worst = max(worst, abs(np.linalg.det(np.diag(np.exp(1j * t * a))) - 1.0))
    record("fiber_totally_geodesic", worst, 0.0, 1e-10)

    # (f) local product metric: d(V0 sigma(s), W0 sigma(t))^2 = d(V0, W0)^2 + (s-t)^2
    worst = 0.0
    for _ in range(8):
        V0 = _random_fiber_point(n, rng, 0.25)
        W0 = _random_fiber_point(n, rng, 0.25)
        s, t = rng.uniform(-0.5, 0.5, size=2)
        lhs = coset_distance(V0 @ sigma(s, n), W0 @ sigma(t, n)) ** 2
        rhs = coset_distance(V0, W0) ** 2 + (s - t) ** 2
        worst = max(worst, abs(lhs - rhs))
    record("local_product_metric", worst, 0.0, 1e-6)

    return report
