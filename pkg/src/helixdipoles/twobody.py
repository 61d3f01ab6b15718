"""Relative motion of two dipoles on the helix: spectra and wave functions.

The relative coordinate is the angular separation ``phi > 0``; the hard
repulsive core at coincidence and a far wall at ``phi = L`` impose Dirichlet
boundaries, so the problem reduces to a 1D box with the reduced pair
potential scaled by the coupling ``beta``.  Energies are reported in the
natural unit hbar^2 / (mu alpha^2) with mu the reduced pair mass and alpha
the helix arc parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .linalg import DEFAULT_SEED, EigenResult, SymmetricSparseOperator, lowest_eigenpairs
from .potential import reduced_potential, validate_geometry

#: A state counts as bound when its reduced energy is below this threshold;
#: shallower negative states are numerically box-sensitive.
BOUND_THRESHOLD = -1e-3

#: Spacings above this under-resolve the winding-scale potential wells.
MAX_SPACING = 0.2

STATISTICS = ("boson", "fermion")


@dataclass(frozen=True)
class Grid1D:
    """Uniform interior grid on (0, phi_max) with implied zero boundaries."""

    phi_max: float = 100.0
    n_points: int = 9999

    phi_min = 0.0

    def __post_init__(self) -> None:
        if self.phi_max <= 0 or self.n_points < 3:
            raise GridError("need phi_max > 0 and at least 3 interior points")

    @classmethod
    def from_spacing(cls, phi_max: float = 100.0, spacing: float = 0.01) -> "Grid1D":
        return cls(phi_max=phi_max, n_points=int(round(phi_max / spacing)) - 1)

    @property
    def spacing(self) -> float:
        return self.phi_max / (self.n_points + 1)

    @property
    def nodes(self) -> np.ndarray:
        """Interior node positions; the endpoints 0 and phi_max are excluded."""
        return self.spacing * np.arange(1, self.n_points + 1)


@dataclass
class TwoBodySolution:
    """Eigenpairs of the relative-motion problem at one coupling strength."""

    beta: float
    ratio: float
    grid: Grid1D
    eigen: EigenResult
    bound_count: int
    statistics: str = "boson"

    @property
    def energies(self) -> np.ndarray:
        return self.eigen.values

    def wavefunction(self, state: int = 0) -> np.ndarray:
        return self.eigen.vectors[:, state]


def assemble_hamiltonian_1d(
    grid: Grid1D, beta: float, ratio: float
) -> SymmetricSparseOperator:
    """Tridiagonal operator -1/2 d^2/dphi^2 + beta * V(phi) on the interior nodes.

    Second-order central differences; the Dirichlet walls are encoded by the
    absence of the boundary nodes.  ``beta = 0`` gives the bare box.
    """
    validate_geometry(ratio)
    if beta < 0:
        raise ValueError("coupling strength beta must be >= 0")
    dx = grid.spacing
    if dx > MAX_SPACING:
        raise GridError(
            f"spacing {dx:g} > {MAX_SPACING} under-resolves the potential wells"
        )
    diag = 1.0 / dx**2 + beta * reduced_potential(grid.nodes, ratio)
    off = np.full(grid.n_points - 1, -0.5 / dx**2)
    return SymmetricSparseOperator.from_tridiagonal(diag, off)


def solve_two_body(
    grid: Grid1D,
    beta: float,
    ratio: float,
    k: int,
    *,
    statistics: str = "boson",
    tol: float = 1e-9,
    method: str = "auto",
    seed: int = DEFAULT_SEED,
) -> TwoBodySolution:
    """Lowest ``k`` states of the half-line relative-motion problem.

    The returned wave functions live on ``grid.nodes`` (phi > 0 only) and are
    unit-normalized under the trapezoidal grid quadrature.
    """
    if statistics not in STATISTICS:
        raise ValueError(f"statistics must be one of {STATISTICS}")
    op = assemble_hamiltonian_1d(grid, beta, ratio)
    eigen = lowest_eigenpairs(
        op, k, tol,
        method=method, seed=seed,
        quadrature_weight=grid.spacing, grid_handle=grid,
    )
    bound_count = int(np.sum(eigen.values < BOUND_THRESHOLD))
    return TwoBodySolution(
        beta=beta, ratio=ratio, grid=grid, eigen=eigen,
        bound_count=bound_count, statistics=statistics,
    )


def extend_full_line(
    sol: TwoBodySolution,
    statistics: str | None = None,
    state: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Extend a half-line eigenstate to (-L, L) by exchange symmetry.

    Bosons get the even extension, fermions the odd one (continuous at 0
    because the wave function vanishes there).  Returns node positions over
    the full line, endpoints included, and the wave function renormalized to
    unit full-line quadrature norm.
    """
    statistics = statistics or sol.statistics
    if statistics not in STATISTICS:
        raise ValueError(f"statistics must be one of {STATISTICS}")
    psi_half = sol.wavefunction(state)
    sign = 1.0 if statistics == "boson" else -1.0
    grid = sol.grid
    phi = np.concatenate([-grid.nodes[::-1], [0.0], grid.nodes])
    phi = np.concatenate([[-grid.phi_max], phi, [grid.phi_max]])
    psi = np.concatenate([[0.0], sign * psi_half[::-1], [0.0], psi_half, [0.0]])
    norm = math.sqrt(grid.spacing * float(np.sum(psi**2)))
    return phi, psi / norm


@dataclass
class BetaScanRow:
    """One row of a coupling-strength scan; ``error`` set if the solve failed."""

    beta: float
    energies: np.ndarray | None
    bound_count: int | None
    error: str | None = None


def scan_beta(
    betas,
    grid: Grid1D,
    ratio: float,
    k: int,
    *,
    tol: float = 1e-9,
    method: str = "auto",
    seed: int = DEFAULT_SEED,
) -> list[BetaScanRow]:
    """Independent solves for each coupling in ``betas``, in input order.

    Failures are recorded per row and do not abort the scan.
    """
    betas = list(betas)
    if not betas:
        raise ValueError("betas must be non-empty")
    rows: list[BetaScanRow] = []
    for beta in betas:
        try:
            sol = solve_two_body(grid, beta, ratio, k,
                                 tol=tol, method=method, seed=seed)
            rows.append(BetaScanRow(beta, sol.energies, sol.bound_count))
        except Exception as exc:  # per-row error capture, scan continues
            rows.append(BetaScanRow(beta, None, None, error=str(exc)))
    return rows
