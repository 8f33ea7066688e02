import math

import numpy as np
import pytest
import scipy.linalg

from laggraph import (
    BranchError,
    GeometryError,
    component_index,
    coset_distance,
    det_fiber,
    is_lagrangian,
    plane_from_hessian,
    project_to_fiber0,
    sigma,
    submersion_selftest,
    tube_deviation,
)
from helpers import random_symmetric


def rep_oracle(H):
    """Matrix-function form of the canonical representative:
    V = (I + iH) (I + H^2)^{-1/2}, independent of any eigenframe."""
    n = H.shape[0]
    inv_sqrt = np.linalg.inv(scipy.linalg.sqrtm(np.eye(n) + H @ H))
    return (np.eye(n) + 1j * H) @ inv_sqrt


def random_so(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, -1] = -Q[:, -1]
    return Q


class TestPlaneFromHessian:
    def test_zero_hessian_is_base_plane(self):
        for n in (2, 3, 4):
            g = plane_from_hessian(np.zeros((n, n)))
            np.testing.assert_allclose(g.rep, np.eye(n), atol=1e-14)
            assert g.psi == 0.0
            assert g.component == 0
            np.testing.assert_array_equal(g.thetas, np.zeros(n))

    def test_saddle_hessian(self):
        g = plane_from_hessian(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(g.thetas, [-math.pi / 4, math.pi / 4], atol=1e-15)
        assert abs(g.psi) <= 1e-15
        eig = np.sort_complex(np.linalg.eigvals(g.rep))
        np.testing.assert_allclose(
            eig, np.sort_complex(np.exp([-1j * math.pi / 4, 1j * math.pi / 4])), atol=1e-12
        )
        assert abs(np.linalg.det(g.rep) - 1.0) <= 1e-12

    def test_isotropic_hessian(self):
        g = plane_from_hessian(np.eye(3))
        np.testing.assert_allclose(g.rep, np.exp(1j * math.pi / 4) * np.eye(3), atol=1e-12)
        assert abs(g.psi - 3 * math.pi / 4) <= 1e-12
        assert tube_deviation(g.thetas) == 0.0

    def test_frame_is_special_orthogonal(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(2, 5))
            g = plane_from_hessian(random_symmetric(rng, n))
            np.testing.assert_allclose(g.frame @ g.frame.T, np.eye(n), atol=1e-12)
            assert abs(np.linalg.det(g.frame) - 1.0) <= 1e-12
            assert np.all(np.diff(g.lambdas) >= 0.0)

    def test_rep_matches_matrix_function_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 5))
            H = random_symmetric(rng, n)
            g = plane_from_hessian(H)
            np.testing.assert_allclose(g.rep, rep_oracle(H), atol=1e-10)

    def test_rep_equivariance(self):
        # V(R^T H R) = R^T V(H) R: comparisons live on V, never on frames
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(2, 5))
            H = random_symmetric(rng, n)
            R = random_so(rng, n)
            left = plane_from_hessian(R.T @ H @ R).rep
            right = R.T @ plane_from_hessian(H).rep @ R
            np.testing.assert_allclose(left, right, atol=1e-8)

    def test_degenerate_spectrum_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = 4
            R = random_so(rng, n)
            lam = np.array([-0.7, 1.3, 1.3, 1.3])
            H = (R * lam) @ R.T
            # rotate the eigenbasis inside the repeated eigenspace
            block = np.eye(n)
            block[1:, 1:] = random_so(rng, 3)
            H2 = (R @ block * lam) @ (R @ block).T
            V1 = plane_from_hessian(0.5 * (H + H.T)).rep
            V2 = plane_from_hessian(0.5 * (H2 + H2.T)).rep
            np.testing.assert_allclose(V1, V2, atol=1e-9)

    def test_rejects_asymmetric(self):
        with pytest.raises(GeometryError, match="symmetric"):
            plane_from_hessian(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestDetFiber:
    def test_base_plane(self):
        assert det_fiber(plane_from_hessian(np.zeros((3, 3)))) == pytest.approx(1.0)

    def test_saddle(self):
        val = det_fiber(plane_from_hessian(np.diag([1.0, -1.0])))
        assert abs(val - 1.0) <= 1e-12

    def test_identity_hessian_gives_i(self):
        val = det_fiber(plane_from_hessian(np.eye(2)))
        assert abs(val - 1j) <= 1e-12

    def test_commutes_with_lift(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            g = plane_from_hessian(random_symmetric(rng, n))
            assert abs(det_fiber(g) - np.exp(1j * g.psi)) < 1e-10


class TestSigma:
    def test_identity_at_zero(self):
        np.testing.assert_array_equal(sigma(0.0, 3), np.eye(3, dtype=complex))

    def test_determinant_winds_at_rate_sqrt_n(self):
        rng = np.random.default_rng(5)
        for n in (2, 3, 4):
            for t in rng.uniform(-10, 10, size=100):
                d = np.linalg.det(sigma(t, n))
                assert abs(d - np.exp(1j * math.sqrt(n) * t)) <= 1e-10

    def test_closes_after_one_period(self):
        for n in (2, 3, 4, 5):
            close = sigma(2 * math.pi * math.sqrt(n), n)
            assert np.abs(close - np.eye(n)).max() <= 1e-10


class TestProjectToFiber0:
    def test_isotropic_projects_to_base(self):
        f = project_to_fiber0(plane_from_hessian(0.8 * np.eye(3)))
        np.testing.assert_allclose(f.rep, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(f.angles, 0.0, atol=1e-12)

    def test_saddle_already_in_fiber(self):
        g = plane_from_hessian(np.diag([1.0, -1.0]))
        f = project_to_fiber0(g)
        np.testing.assert_allclose(f.rep, g.rep, atol=1e-14)
        np.testing.assert_allclose(sorted(f.angles), [-math.pi / 4, math.pi / 4], atol=1e-14)

    def test_single_tilt(self):
        g = plane_from_hessian(np.diag([2.0, 0.0, 0.0]))
        f = project_to_fiber0(g)
        psi = math.atan(2.0)
        np.testing.assert_allclose(
            sorted(f.angles), sorted([math.atan(2.0) - psi / 3, -psi / 3, -psi / 3]), atol=1e-12
        )
        assert abs(np.linalg.det(f.rep) - 1.0) <= 1e-10

    def test_always_lands_in_fiber(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            f = project_to_fiber0(plane_from_hessian(random_symmetric(rng, n)))
            assert abs(np.linalg.det(f.rep) - 1.0) <= 1e-10
            assert abs(f.angles.sum()) <= 1e-12


class TestCosetDistance:
    def test_coincident(self):
        assert coset_distance(np.eye(4), np.eye(4)) == 0.0

    def test_diagonal_fiber_pair(self):
        # plane angles (2t, -2t) sit at distance 2 sqrt(2) t from the base plane
        t = 0.3
        B = np.diag(np.exp([2j * t, -2j * t]))
        assert coset_distance(np.eye(2), B) == pytest.approx(2 * math.sqrt(2) * t, abs=1e-12)

    def test_sigma_is_unit_speed(self):
        rng = np.random.default_rng(7)
        for n in (2, 3, 4):
            for _ in range(20):
                t = float(rng.uniform(-0.9, 0.9) * math.pi * math.sqrt(n))
                assert coset_distance(np.eye(n), sigma(t, n)) == pytest.approx(abs(t), abs=1e-10)

    def test_matches_arc_length_of_sampled_geodesic(self):
        # independent oracle: integrate the tr(A B*) norm of the pulled-back
        # velocity conj(C) C' along C(t) = diag(e^{i t theta})
        rng = np.random.default_rng(8)
        for _ in range(5):
            theta = rng.uniform(-1.0, 1.0, size=3)

            def curve(t):
                return np.diag(np.exp(1j * t * theta))

            h = 1e-6
            ts = np.linspace(0.0, 1.0, 201)
            speeds = []
            for t in ts:
                vel = np.conj(curve(t)) @ ((curve(t + h) - curve(t - h)) / (2 * h))
                speeds.append(math.sqrt(np.trace(vel @ vel.conj().T).real))
            length = np.trapezoid(speeds, ts)
            assert coset_distance(np.eye(3), curve(1.0)) == pytest.approx(length, abs=1e-6)

    def test_branch_error_near_minus_one(self):
        ang = math.pi - 1e-8
        B = np.diag(np.exp([1j * ang, -1j * ang]))
        with pytest.raises(BranchError):
            coset_distance(np.eye(2), B)

    def test_rejects_non_unitary(self):
        with pytest.raises(GeometryError, match="symmetric unitary"):
            coset_distance(np.eye(2), 2.0 * np.eye(2))


class TestTubeDeviation:
    def test_isotropic_exact_zero(self):
        assert tube_deviation([0.3, 0.3, 0.3]) == 0.0
        assert tube_deviation([0.1, 0.1]) == 0.0

    def test_saddle_hits_small_radius(self):
        val = tube_deviation([math.pi / 4, -math.pi / 4])
        assert abs(val - math.pi / (2 * math.sqrt(2))) <= 1e-12

    def test_arithmetic(self):
        assert tube_deviation([0.1, 0.2, 0.3]) == pytest.approx(math.sqrt(0.02), abs=1e-15)

    def test_matches_fiber_distance(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            thetas = rng.uniform(-0.49 * math.pi, 0.49 * math.pi, size=n)
            g = plane_from_hessian(np.diag(np.tan(thetas)))
            f = project_to_fiber0(g)
            d = coset_distance(np.eye(n), f.rep)
            assert abs(d - tube_deviation(g.thetas)) <= 1e-8

    def test_bounded_by_uncentered_sum(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            n = int(rng.integers(2, 6))
            thetas = rng.uniform(-1.4, 1.4, size=n)
            assert tube_deviation(thetas) <= math.sqrt(np.sum(thetas**2)) + 1e-15

    def test_rejects_out_of_range(self):
        with pytest.raises(GeometryError, match="pi/2"):
            tube_deviation([1.6, 0.0])


class TestComponentIndex:
    def test_base(self):
        assert component_index([0.0, 0.0, 0.0]) == 0

    def test_positive_sheet(self):
        assert component_index([0.45 * math.pi] * 5) == 1

    def test_negative_sheet(self):
        assert component_index([-0.45 * math.pi] * 5) == -1

    def test_range_over_admissible_grid(self):
        # exhaustive check that the centered-window index stays on the
        # attainable sheets |l| <= ceil((n-2)/4) for every admissible angle
        for n in (2, 3, 4):
            values = np.arange(-0.49 * math.pi, 0.49 * math.pi + 1e-12, 0.07 * math.pi)
            grids = np.meshgrid(*([values] * n), indexing="ij")
            bound = math.ceil((n - 2) / 4)
            for thetas in zip(*(g.ravel() for g in grids)):
                l = component_index(thetas)
                psi = float(np.sum(thetas))
                assert -bound <= l <= bound
                assert -math.pi < psi - 2 * math.pi * l <= math.pi


class TestIsLagrangian:
    def test_graph_of_symmetric_map(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 5))
            H = random_symmetric(rng, n)
            basis = np.vstack([np.eye(n), H])
            assert is_lagrangian(basis)
            # span-invariance under column mixing
            mix = rng.uniform(-1, 1, size=(n, n)) + 2 * np.eye(n)
            assert is_lagrangian(basis @ mix)

    def test_complex_line_is_not(self):
        # span(e1, J e1) in C^2
        basis = np.zeros((4, 2))
        basis[0, 0] = 1.0  # e1
        basis[2, 1] = 1.0  # J e1
        assert not is_lagrangian(basis)

    def test_non_symmetric_graph_is_not(self):
        M = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert not is_lagrangian(np.vstack([np.eye(2), M]))

    def test_rank_deficient_raises(self):
        basis = np.zeros((4, 2))
        basis[0] = [1.0, 1.0]
        basis[2] = [0.5, 0.5]
        with pytest.raises(GeometryError, match="rank"):
            is_lagrangian(basis)


class TestSubmersionSelftest:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_all_checks_pass(self, n):
        report = submersion_selftest(n)
        assert report.all_passed, [c.as_dict() for c in report.checks if not c.passed]
        names = [c.name for c in report.checks]
        assert names == [
            "dilation_factor",
            "geodesic_closure",
            "winding_number",
            "fiber_orthogonality",
            "fiber_totally_geodesic",
            "local_product_metric",
        ]

    def test_winding_is_exactly_n(self):
        for n in (2, 3, 4):
            report = submersion_selftest(n)
            winding = next(c for c in report.checks if c.name == "winding_number")
            assert round(winding.measured) == n

    def test_pass_flag_matches_tolerance(self):
        report = submersion_selftest(3)
        for c in report.checks:
            assert c.passed == (abs(c.measured - c.expected) <= c.tolerance)

    def test_out_of_scale_dim(self):
        with pytest.raises(GeometryError, match="2 <= n <= 5"):
            submersion_selftest(7)
