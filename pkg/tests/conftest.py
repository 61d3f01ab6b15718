"""Shared fixtures; the production-size three-body solves are expensive and
session-scoped so the acceptance criteria and module tests reuse them."""

import numpy as np
import pytest

from helixdipoles.threebody import WedgeGrid2D, solve_three_body
from helixdipoles.twobody import Grid1D, solve_two_body


@pytest.fixture(scope="session")
def two_body_beta1():
    """Default-grid solve at beta=1, h=R; six states cover the bound set."""
    return solve_two_body(Grid1D(), beta=1.0, ratio=1.0, k=6)


@pytest.fixture(scope="session")
def three_body_beta1():
    grid = WedgeGrid2D(x_max=30.0, y_max=40.0, spacing=0.1)
    return solve_three_body(grid, beta=1.0, ratio=1.0, k=2, tol=1e-9)


@pytest.fixture(scope="session")
def three_body_beta2():
    grid = WedgeGrid2D(x_max=30.0, y_max=40.0, spacing=0.1)
    return solve_three_body(grid, beta=2.0, ratio=1.0, k=1, tol=1e-9)


@pytest.fixture(scope="session")
def three_body_beta025():
    grid = WedgeGrid2D(x_max=60.0, y_max=90.0, spacing=0.15)
    return solve_three_body(grid, beta=0.25, ratio=1.0, k=1, tol=1e-9)


@pytest.fixture(scope="session")
def mini_wedge_solves():
    """Iterative and dense solves of the same small wedge operator."""
    from helixdipoles.linalg import lowest_eigenpairs
    from helixdipoles.threebody import assemble_hamiltonian_2d

    grid = WedgeGrid2D(x_max=12.0, y_max=16.0, spacing=0.4)
    op = assemble_hamiltonian_2d(grid, 1.0, 1.0, allow_small_box=True)
    dense = lowest_eigenpairs(op, 4, 1e-12, method="dense",
                              quadrature_weight=grid.spacing**2)
    lanczos = lowest_eigenpairs(op, 4, 1e-12, method="lanczos",
                                quadrature_weight=grid.spacing**2)
    return grid, dense, lanczos
