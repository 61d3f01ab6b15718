import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helixdipoles.errors import GridError
from helixdipoles.linalg import lowest_eigenpairs
from helixdipoles.threebody import (
    EXCHANGE_GROUP,
    FIRST_MINIMUM_XY,
    JacobiAngles,
    WedgeGrid2D,
    angles_from_jacobi,
    assemble_hamiltonian_2d,
    jacobi_from_angles,
    pair_distance_expectations,
    pair_separations,
    solve_three_body,
    symmetrize_wavefunction,
)

TWO_PI = 2.0 * math.pi

# dense references computed before the build on the small wedge
# (x_max=12, y_max=16, beta=1, h=R, half-cell edge cushion)
MINI_E_DX05 = [-0.490597362, -0.222958816, -0.172283341, -0.055358708]
MINI_E_DX04 = [-0.486053327, -0.220748474, -0.170036187, -0.051638463]
MINI_E_DX02 = [-0.477138053, -0.216388829, -0.165248734, -0.045238210]

# production-box references from an independent shift-invert solver run
# before the build (same operator definition)
PROD_BETA1_E = [-0.4754838, -0.2441071]
PROD_BETA1_D = (1.0137, 1.0137, 2.0273)
PROD_BETA2_E0 = -1.4391000
PROD_BETA2_D = (0.9987, 0.9987, 1.9973)
PROD_BETA025_E0 = -0.0285792
PROD_BETA025_D = (1.5454, 1.5468, 3.0922)


class TestJacobiTransform:
    def test_chain_configuration(self):
        j = jacobi_from_angles(2.0 * TWO_PI, TWO_PI, 0.0)
        assert j.x == pytest.approx(math.sqrt(2.0) * math.pi, rel=1e-14)
        assert j.y == pytest.approx(math.sqrt(6.0) * math.pi, rel=1e-14)

    def test_coincident_particles_map_to_origin(self):
        j = jacobi_from_angles(3.3, 3.3, 3.3)
        assert (j.x, j.y) == (0.0, 0.0)
        assert j.z == pytest.approx(math.sqrt(3.0) * 3.3, rel=1e-14)

    @given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50))
    def test_orthogonality(self, p1, p2, p3):
        j = jacobi_from_angles(p1, p2, p3)
        assert j.x**2 + j.y**2 + j.z**2 == pytest.approx(
            p1**2 + p2**2 + p3**2, rel=1e-12, abs=1e-12
        )

    def test_roundtrip(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            angles = rng.uniform(-40.0, 40.0, size=3)
            back = angles_from_jacobi(jacobi_from_angles(*angles))
            np.testing.assert_allclose(back, angles, atol=1e-12)

    def test_zero_maps_to_zero(self):
        assert angles_from_jacobi(JacobiAngles(0.0, 0.0, 0.0)) == (0.0, 0.0, 0.0)

    def test_pair_separations_at_peak(self):
        x, y = FIRST_MINIMUM_XY
        phi12, phi23, phi13 = pair_separations(x, y)
        assert phi12 == pytest.approx(TWO_PI, rel=1e-14)
        assert phi23 == pytest.approx(TWO_PI, rel=1e-14)
        assert phi13 == pytest.approx(2.0 * TWO_PI, rel=1e-14)


class TestWedgeGrid:
    def test_active_nodes_inside_wedge(self):
        grid = WedgeGrid2D(12.0, 16.0, 0.4)
        assert np.all(grid.y - grid.x / math.sqrt(3.0) > 0.0)
        assert np.all(grid.x > 0.0)
        assert np.all(grid.x < 12.0)
        assert np.all(grid.y < 16.0)

    def test_margins(self):
        mx, my = WedgeGrid2D(30.0, 40.0, 0.1).margin_windings()
        assert mx > 5.0 and my > 5.0
        mx, my = WedgeGrid2D(12.0, 16.0, 0.4).margin_windings()
        assert mx < 5.0

    def test_small_box_rejected_unless_allowed(self):
        grid = WedgeGrid2D(12.0, 16.0, 0.4)
        with pytest.raises(GridError):
            assemble_hamiltonian_2d(grid, 1.0, 1.0)
        assemble_hamiltonian_2d(grid, 1.0, 1.0, allow_small_box=True)

    def test_invalid(self):
        with pytest.raises(GridError):
            WedgeGrid2D(-1.0, 16.0, 0.4)
        with pytest.raises(GridError):
            WedgeGrid2D(12.0, 16.0, 0.4, edge_cushion=1.5)


class TestAssembly2D:
    def test_diagonal_at_chain_peak(self):
        # adjacent pairs sit one winding apart (V = -1 each); the outer pair
        # is two windings apart where V(4 pi) = -1/8 exactly
        grid = WedgeGrid2D(30.0, 40.0, 0.1)
        op = assemble_hamiltonian_2d(grid, 1.0, 1.0)
        x0, y0 = FIRST_MINIMUM_XY
        i = int(np.argmin((grid.x - x0) ** 2 + (grid.y - y0) ** 2))
        potential_part = op.diagonal()[i] - 2.0 / grid.spacing**2
        assert potential_part == pytest.approx(-2.125, abs=0.05)

    def test_symmetry(self):
        grid = WedgeGrid2D(12.0, 16.0, 0.4)
        op = assemble_hamiltonian_2d(grid, 1.0, 1.0, allow_small_box=True)
        op.validate()

    def test_free_wedge_spectrum_positive(self):
        grid = WedgeGrid2D(12.0, 16.0, 0.4)
        op = assemble_hamiltonian_2d(grid, 0.0, 1.0, allow_small_box=True)
        res = lowest_eigenpairs(op, 4, 1e-11)
        assert np.all(res.values > 0.0)


class TestMiniWedgeReferences:
    def test_dense_reference_dx05(self):
        grid = WedgeGrid2D(12.0, 16.0, 0.5)
        op = assemble_hamiltonian_2d(grid, 1.0, 1.0, allow_small_box=True)
        res = lowest_eigenpairs(op, 4, 1e-12, method="dense")
        np.testing.assert_allclose(res.values, MINI_E_DX05, atol=1e-8)

    def test_dense_reference_dx04(self, mini_wedge_solves):
        _, dense, _ = mini_wedge_solves
        np.testing.assert_allclose(dense.values, MINI_E_DX04, atol=1e-8)

    def test_lanczos_reference_dx02(self):
        # cross-route: package Lanczos against the frozen dense reference
        grid = WedgeGrid2D(12.0, 16.0, 0.2)
        op = assemble_hamiltonian_2d(grid, 1.0, 1.0, allow_small_box=True)
        res = lowest_eigenpairs(op, 4, 1e-11, method="lanczos")
        np.testing.assert_allclose(res.values, MINI_E_DX02, atol=1e-8)

    def test_iterative_matches_dense(self, mini_wedge_solves):
        grid, dense, lanczos = mini_wedge_solves
        np.testing.assert_allclose(lanczos.values, dense.values, atol=1e-9)
        w = grid.spacing  # rescale quadrature-normalized columns to unit 2-norm
        for i in range(4):
            du, dl = dense.vectors[:, i] * w, lanczos.vectors[:, i] * w
            assert min(np.linalg.norm(du - dl), np.linalg.norm(du + dl)) < 1e-6


class TestProductionSolves:
    def test_beta1_energies_and_distances(self, three_body_beta1):
        np.testing.assert_allclose(three_body_beta1.energies, PROD_BETA1_E, atol=1e-6)
        np.testing.assert_allclose(three_body_beta1.distances, PROD_BETA1_D, atol=5e-4)

    def test_beta1_peak_at_chain_configuration(self, three_body_beta1):
        grid = three_body_beta1.grid
        psi0 = three_body_beta1.wavefunction(0)
        peak = int(np.argmax(np.abs(psi0)))
        x0, y0 = FIRST_MINIMUM_XY
        assert abs(grid.x[peak] - x0) <= 0.1
        assert abs(grid.y[peak] - y0) <= 0.1

    def test_beta1_first_excited_sign_change(self, three_body_beta1):
        # amplitude near the one-winding chain has the opposite sign of the
        # amplitude where one outer particle sits two windings away
        grid = three_body_beta1.grid
        psi1 = three_body_beta1.wavefunction(1)

        def value_at(px, py):
            return psi1[int(np.argmin((grid.x - px) ** 2 + (grid.y - py) ** 2))]

        one_winding = value_at(*FIRST_MINIMUM_XY)
        two_windings_a = value_at(4.0 * math.pi / math.sqrt(2.0),
                                  8.0 * math.pi / math.sqrt(6.0))
        two_windings_b = value_at(math.sqrt(2.0) * math.pi,
                                  10.0 * math.pi / math.sqrt(6.0))
        assert one_winding * two_windings_a < 0.0
        assert one_winding * two_windings_b < 0.0

    def test_beta2(self, three_body_beta2):
        assert three_body_beta2.energies[0] == pytest.approx(PROD_BETA2_E0, abs=1e-6)
        np.testing.assert_allclose(three_body_beta2.distances, PROD_BETA2_D, atol=5e-4)

    def test_beta025(self, three_body_beta025):
        assert three_body_beta025.energies[0] == pytest.approx(PROD_BETA025_E0, abs=1e-6)
        np.testing.assert_allclose(three_body_beta025.distances, PROD_BETA025_D, atol=5e-4)

    def test_distance_additivity_and_positivity(self, three_body_beta1,
                                                three_body_beta2, three_body_beta025):
        for sol in (three_body_beta1, three_body_beta2, three_body_beta025):
            d12, d23, d13 = sol.distances
            assert d13 == pytest.approx(d12 + d23, abs=1e-10)
            assert d12 > 0.0 and d23 > 0.0

    def test_chain_mirror_symmetry(self, three_body_beta1, three_body_beta2):
        for sol in (three_body_beta1, three_body_beta2):
            d12, d23, _ = sol.distances
            assert abs(d12 - d23) < 0.02

    def test_excited_state_distances(self, three_body_beta1):
        d12, d23, d13 = pair_distance_expectations(three_body_beta1, state=1)
        assert d13 == pytest.approx(d12 + d23, abs=1e-10)
        assert d12 > 0.0 and d23 > 0.0

    def test_wedge_dirichlet_suppression(self, three_body_beta1):
        # the repulsive cores push amplitude away from the mask edges
        grid = three_body_beta1.grid
        psi0 = np.abs(three_body_beta1.wavefunction(0))
        edge = np.zeros(grid.n_active, dtype=bool)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            edge |= grid._index[grid.ii + di, grid.jj + dj] < 0
        assert psi0[edge].max() < 0.05 * psi0.max()

    def test_quadrature_norm(self, three_body_beta1):
        w = three_body_beta1.grid.spacing**2
        norms = w * np.sum(three_body_beta1.eigen.vectors**2, axis=0)
        np.testing.assert_allclose(norms, 1.0, atol=1e-10)


class TestMonotonicLocalization:
    def test_pair_distance_decreases_with_coupling(self):
        grid = WedgeGrid2D(60.0, 60.0, 0.25)
        d12 = []
        for beta in (0.25, 0.5, 1.0, 2.0):
            sol = solve_three_body(grid, beta, 1.0, 1, tol=1e-8)
            d12.append(sol.distances[0])
        assert all(a > b for a, b in zip(d12, d12[1:]))


class TestSymmetrization:
    def test_boson_invariant_under_group(self, three_body_beta1):
        # the diagonal of the product-grid evaluation gives point-wise samples
        rng = np.random.default_rng(17)
        pts = rng.uniform(-15.0, 15.0, size=(2, 500))
        base, _ = symmetrize_wavefunction(three_body_beta1, "boson", pts[0], pts[1])
        base = np.diagonal(base)
        for mat, _ in EXCHANGE_GROUP[1:]:
            gx, gy = mat @ pts
            moved, _ = symmetrize_wavefunction(three_body_beta1, "boson", gx, gy)
            np.testing.assert_allclose(np.diagonal(moved), base, atol=1e-6)

    def test_fermion_vanishes_on_coincidence_lines(self, three_body_beta1):
        t = np.linspace(0.5, 12.0, 40)
        on_line_x = np.zeros_like(t)  # the line x = 0
        psi, _ = symmetrize_wavefunction(three_body_beta1, "fermion", on_line_x, t)
        assert np.max(np.abs(np.diagonal(psi))) < 1e-9
        # the line y = x / sqrt(3)
        psi2, _ = symmetrize_wavefunction(
            three_body_beta1, "fermion", t, t / math.sqrt(3.0)
        )
        assert np.max(np.abs(np.diagonal(psi2))) < 1e-9

    def test_three_copy_structure(self, three_body_beta1):
        # the in-wedge peak reappears at its rotated images with equal value
        x0, y0 = FIRST_MINIMUM_XY
        val0 = symmetrize_wavefunction(
            three_body_beta1, "boson", np.array([x0]), np.array([y0])
        )[0][0, 0]
        assert val0 > 0.0
        for mat, _ in EXCHANGE_GROUP[1:3]:
            gx, gy = mat @ np.array([x0, y0])
            val = symmetrize_wavefunction(
                three_body_beta1, "boson", np.array([gx]), np.array([gy])
            )[0][0, 0]
            assert val == pytest.approx(val0, rel=1e-10)

    def test_outside_box_flagged(self, three_body_beta1):
        psi, n_outside = symmetrize_wavefunction(
            three_body_beta1, "boson", np.array([100.0]), np.array([5.0])
        )
        assert n_outside == 1
        assert psi[0, 0] == 0.0

    def test_statistics_validated(self, three_body_beta1):
        with pytest.raises(ValueError):
            symmetrize_wavefunction(three_body_beta1, "majorana",
                                    np.array([1.0]), np.array([2.0]))
