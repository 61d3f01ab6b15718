"""Experiment runner: configuration, orchestration and CSV/summary export.

Every subcommand writes three kinds of artifact into the run directory:
``metadata.txt`` (the parsed configuration echoed verbatim, plus solver seed,
tolerances and library versions), one or more CSV data files, and
``summary.txt`` with the headline numbers.  In deterministic mode (the
default) repeated runs produce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 invalid geometry,
4 eigensolver non-convergence (partial outputs are kept and flagged).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import build_size_scan, fit_harmonic_size, size_energy_product
from .errors import ConvergenceError, GeometryError, GridError
from .linalg import DEFAULT_SEED
from .potential import find_minima, reduced_potential, validate_geometry
from .threebody import WedgeGrid2D, solve_three_body, symmetrize_wavefunction
from .twobody import Grid1D, extend_full_line, scan_beta, solve_two_body

TWO_PI = 2.0 * math.pi

#: Environment variable overriding the default output directory.
OUTDIR_ENV = "HELIX_DIPOLES_OUTDIR"

PROBLEMS = ("potential", "two-body", "three-body", "scan", "fit")


@dataclass
class RunConfig:
    """Flat run configuration; every field has a default.

    ``x_max``/``y_max``/``spacing_2d`` default to ``None`` ("auto"), resolved
    per coupling strength: (30, 40, 0.1) for beta >= 1 and (60, 90, 0.15)
    below (weakly bound states need the larger box).
    """

    problem: str = "two-body"
    ratio: float = 1.0
    beta: float = 1.0
    betas: tuple[float, ...] = ()
    product_betas: tuple[float, ...] = ()
    box_length: float = 100.0
    spacing_1d: float = 0.01
    x_max: float | None = None
    y_max: float | None = None
    spacing_2d: float | None = None
    k_states: int = 4
    statistics: str = "boson"
    phi_max: float = 3.0 * TWO_PI
    n_samples: int = 2000
    out_dir: str = "runs"
    deterministic: bool = True
    seed: int = DEFAULT_SEED
    tol: float = 1e-9
    solver: str = "auto"
    allow_small_box: bool = False
    symmetrize: bool = False
    sample_extent: float = 25.0
    sample_spacing: float = 0.25
    emit_full_line: bool = False
    physical: bool = False
    mass_kg: float = 0.0
    radius_m: float = 0.0

    def energy_unit_joules(self) -> float:
        """Energy quantum hbar^2 / (mu alpha^2) for the configured geometry."""
        from scipy.constants import hbar

        if self.mass_kg <= 0.0 or self.radius_m <= 0.0:
            raise ValueError("physical mode needs positive mass_kg and radius_m")
        mu = self.mass_kg / 2.0
        alpha_sq = self.radius_m**2 * (1.0 + self.ratio**2 / (2.0 * math.pi) ** 2)
        return hbar**2 / (mu * alpha_sq)

    def resolved_box(self) -> tuple[float, float, float]:
        if self.beta >= 1.0:
            auto = (30.0, 40.0, 0.1)
        else:
            auto = (60.0, 90.0, 0.15)
        return (
            self.x_max if self.x_max is not None else auto[0],
            self.y_max if self.y_max is not None else auto[1],
            self.spacing_2d if self.spacing_2d is not None else auto[2],
        )

    def to_items(self) -> list[tuple[str, str]]:
        """Serialize every field as (key, value-string), round-trip exact."""
        return [(f.name, _format_value(getattr(self, f.name))) for f in fields(self)]

    @classmethod
    def from_items(cls, items: dict[str, str]) -> "RunConfig":
        """Inverse of :meth:`to_items`; unknown keys are rejected."""
        kwargs = {}
        known = {f.name: f for f in fields(cls)}
        for key, raw in items.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[key] = _parse_value(raw, cls.__dataclass_fields__[key].type)
        return cls(**kwargs)


def _format_value(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    return str(value)


def _parse_value(raw: str, type_hint: str):
    raw = raw.strip()
    if "None" in type_hint:  # optional float
        return None if raw in ("auto", "") else float(raw)
    if type_hint == "bool":
        if raw not in ("true", "false"):
            raise ValueError(f"expected true/false, got {raw!r}")
        return raw == "true"
    if type_hint == "int":
        return int(raw)
    if type_hint == "float":
        return float(raw)
    if type_hint.startswith("tuple"):
        return tuple(float(tok) for tok in raw.split(",") if tok.strip())
    return raw


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` file; '#' starts a comment."""
    items: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {line!r}")
        key, _, value = line.partition("=")
        items[key.strip()] = value.strip()
    return items


def _fmt(x) -> str:
    """Floats at 12 significant digits with '.' decimal point."""
    if isinstance(x, (float, np.floating)):
        return f"{x:.12g}"
    return str(x)


def emit_csv(header: list[str], rows, path: str | Path) -> None:
    """Write rows as CSV with a header line; floats at 12 significant digits."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc


def emit_summary(record: dict, path: str | Path) -> None:
    """Write a line-oriented ``key = value`` text record."""
    path = Path(path)
    try:
        with path.open("w") as fh:
            for key, value in record.items():
                fh.write(f"{key} = {_fmt(value)}\n")
    except OSError as exc:
        raise OSError(f"cannot write summary {path}: {exc}") from exc


def _write_metadata(cfg: RunConfig, out: Path, extra: dict) -> None:
    record = dict(cfg.to_items())
    record["package_version"] = __version__
    record["numpy_version"] = np.__version__
    import scipy

    record["scipy_version"] = scipy.__version__
    record.update(extra)
    emit_summary(record, out / "metadata.txt")


def _eigen_summary(eigen) -> dict:
    return {
        "solver_method": eigen.method,
        "solver_seed": "none" if eigen.seed is None else eigen.seed,
        "max_residual_norm": float(eigen.residual_norms.max()),
        "matvec_count": eigen.n_matvec,
    }


def _append_physical(cfg: RunConfig, energies, summary: dict) -> None:
    """Attach SI energies (unit hbar^2 / mu alpha^2) when requested."""
    if not cfg.physical:
        return
    unit = cfg.energy_unit_joules()
    summary["energy_unit_joules"] = unit
    for m, e in enumerate(energies):
        summary[f"E{m}_joules"] = float(e) * unit


def _run_potential(cfg: RunConfig, out: Path) -> dict:
    validate_geometry(cfg.ratio)
    step = cfg.phi_max / cfg.n_samples
    phi = step * np.arange(1, cfg.n_samples + 1)
    values = reduced_potential(phi, cfg.ratio)
    emit_csv(
        ["phi_over_2pi", "V_reduced"],
        zip(phi / TWO_PI, values),
        out / "data.csv",
    )
    minima = find_minima(cfg.ratio, max(1, int(cfg.phi_max / TWO_PI) + 1))
    summary: dict = {"ratio": cfg.ratio, "n_minima_in_range": len(minima)}
    for m in minima[:5]:
        summary[f"minimum_{m.winding_index}_phi"] = m.phi_k
        summary[f"minimum_{m.winding_index}_value"] = m.value
    return summary


def _run_two_body(cfg: RunConfig, out: Path) -> dict:
    grid = Grid1D.from_spacing(cfg.box_length, cfg.spacing_1d)
    sol = solve_two_body(
        grid, cfg.beta, cfg.ratio, cfg.k_states,
        statistics=cfg.statistics, tol=cfg.tol, method=cfg.solver, seed=cfg.seed,
    )
    header = ["phi"] + [f"psi{m}" for m in range(cfg.k_states)]
    emit_csv(
        header,
        zip(grid.nodes, *(sol.wavefunction(m) for m in range(cfg.k_states))),
        out / "wavefunctions.csv",
    )
    if cfg.emit_full_line:
        columns = [extend_full_line(sol, state=m) for m in range(cfg.k_states)]
        emit_csv(
            header,
            zip(columns[0][0], *(psi for _, psi in columns)),
            out / "wavefunctions_full_line.csv",
        )
    peak = grid.nodes[int(np.argmax(np.abs(sol.wavefunction(0))))]
    summary: dict = {"beta": cfg.beta, "ratio": cfg.ratio,
                     "bound_count": sol.bound_count, "peak_phi": peak}
    for m, e in enumerate(sol.energies):
        summary[f"E{m}"] = float(e)
    _append_physical(cfg, sol.energies, summary)
    summary.update(_eigen_summary(sol.eigen))
    return summary


def _run_three_body(cfg: RunConfig, out: Path) -> dict:
    x_max, y_max, spacing = cfg.resolved_box()
    grid = WedgeGrid2D(x_max=x_max, y_max=y_max, spacing=spacing)
    sol = solve_three_body(
        grid, cfg.beta, cfg.ratio, cfg.k_states,
        tol=cfg.tol, method=cfg.solver, seed=cfg.seed,
        allow_small_box=cfg.allow_small_box,
    )
    psi0 = sol.wavefunction(0)
    emit_csv(["x", "y", "psi"], zip(grid.x, grid.y, psi0), out / "wavefunction2d.csv")
    peak = int(np.argmax(np.abs(psi0)))
    d12, d23, d13 = sol.distances
    summary: dict = {
        "beta": cfg.beta, "ratio": cfg.ratio,
        "x_max": x_max, "y_max": y_max, "spacing": spacing,
        "n_active_nodes": grid.n_active,
        "peak_x": grid.x[peak], "peak_y": grid.y[peak],
        "dist_12_windings": d12, "dist_23_windings": d23, "dist_13_windings": d13,
    }
    for m, e in enumerate(sol.energies):
        summary[f"E{m}"] = float(e)
    _append_physical(cfg, sol.energies, summary)
    if cfg.symmetrize:
        samples = np.arange(
            -cfg.sample_extent, cfg.sample_extent + 0.5 * cfg.sample_spacing,
            cfg.sample_spacing,
        )
        psi_map, n_outside = symmetrize_wavefunction(sol, cfg.statistics, samples, samples)
        xg, yg = np.meshgrid(samples, samples, indexing="ij")
        emit_csv(
            ["x", "y", "psi"],
            zip(xg.ravel(), yg.ravel(), psi_map.ravel()),
            out / "symmetrized.csv",
        )
        summary["symmetrize_statistics"] = cfg.statistics
        summary["samples_outside_box"] = n_outside
    summary.update(_eigen_summary(sol.eigen))
    return summary


def _run_scan(cfg: RunConfig, out: Path) -> dict:
    betas = cfg.betas or tuple(round(0.1 * i, 10) for i in range(1, 15))
    grid = Grid1D.from_spacing(cfg.box_length, cfg.spacing_1d)
    rows = scan_beta(betas, grid, cfg.ratio, cfg.k_states,
                     tol=cfg.tol, method=cfg.solver, seed=cfg.seed)
    header = ["beta"] + [f"E{m}" for m in range(cfg.k_states)] + ["bound_count"]
    csv_rows = []
    failures = []
    for row in rows:
        if row.error is None:
            csv_rows.append([row.beta, *row.energies, row.bound_count])
        else:
            csv_rows.append([row.beta] + ["nan"] * cfg.k_states + [-1])
            failures.append((row.beta, row.error))
    emit_csv(header, csv_rows, out / "scan.csv")
    summary: dict = {"ratio": cfg.ratio, "n_rows": len(rows), "n_failed": len(failures)}
    for beta, err in failures:
        summary[f"error_beta_{_fmt(beta)}"] = err
    return summary


def _run_fit(cfg: RunConfig, out: Path) -> dict:
    betas = cfg.betas or (5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0)
    grid = Grid1D.from_spacing(cfg.box_length, cfg.spacing_1d)
    rows = build_size_scan(betas, grid, cfg.ratio,
                           tol=cfg.tol, method=cfg.solver, seed=cfg.seed)
    emit_csv(
        ["beta", "E0", "phi2", "phi0"],
        [[r.beta, r.energy, r.phi2, r.phi0] for r in rows],
        out / "size_scan.csv",
    )
    fit = fit_harmonic_size(rows, beta_range=(min(betas), max(betas)))
    mean_phi2 = float(np.mean([r.phi2 for r in rows]))
    summary: dict = {
        "ratio": cfg.ratio,
        "fit_c1": fit.c1, "fit_c2": fit.c2,
        "fit_residual_rms": fit.residual_rms,
        "fit_relative_rms": fit.residual_rms / mean_phi2,
        "beta_min": fit.beta_range[0], "beta_max": fit.beta_range[1],
    }
    if cfg.product_betas:
        prows = build_size_scan(cfg.product_betas, grid, cfg.ratio,
                                tol=cfg.tol, method=cfg.solver, seed=cfg.seed)
        table = size_energy_product(prows)
        emit_csv(["E", "product"], table, out / "product.csv")
        summary["n_product_rows"] = len(prows)
    return summary


_RUNNERS = {
    "potential": _run_potential,
    "two-body": _run_two_body,
    "three-body": _run_three_body,
    "scan": _run_scan,
    "fit": _run_fit,
}


def run(cfg: RunConfig) -> int:
    """Execute one configured problem; returns the process exit code."""
    if cfg.problem not in PROBLEMS:
        print(f"error: unknown problem {cfg.problem!r}", file=sys.stderr)
        return 2
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 2

    try:
        summary = _RUNNERS[cfg.problem](cfg, out)
    except GeometryError as exc:
        print(f"error: invalid geometry: {exc}", file=sys.stderr)
        _write_metadata(cfg, out, {"status": "geometry_error", "error": str(exc)})
        return 3
    except (GridError, ValueError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        _write_metadata(cfg, out, {"status": "config_error", "error": str(exc)})
        return 2
    except ConvergenceError as exc:
        print(f"error: eigensolver did not converge: {exc}", file=sys.stderr)
        record: dict = {"status": "not_converged", "error": str(exc)}
        if exc.result is not None:  # best-effort eigenvalues, flagged
            values = np.asarray(exc.result[0], dtype=float)
            for m, e in enumerate(values):
                record[f"E{m}_unconverged"] = float(e)
        _write_metadata(cfg, out, {"status": "not_converged", "error": str(exc)})
        emit_summary(record, out / "summary.txt")
        return 4

    summary["status"] = "ok"
    emit_summary(summary, out / "summary.txt")
    _write_metadata(cfg, out, {"status": "ok"})
    return 0


def _add_physical(p: argparse.ArgumentParser) -> None:
    p.add_argument("--physical", action="store_true", default=None,
                   help="also report energies in joules (needs mass and radius)")
    p.add_argument("--mass-kg", dest="mass_kg", type=float, help="particle mass [kg]")
    p.add_argument("--radius-m", dest="radius_m", type=float, help="helix radius [m]")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--ratio", type=float, help="pitch-to-radius ratio h/R")
    p.add_argument("--out-dir", help=f"output directory (or ${OUTDIR_ENV})")
    p.add_argument("--seed", type=int, help="eigensolver start-vector seed")
    p.add_argument("--tol", type=float, help="eigensolver residual tolerance")
    p.add_argument("--solver", choices=("auto", "dense", "tridiagonal", "lanczos"),
                   help="eigensolver path")
    p.add_argument("--deterministic", action="store_true", default=None,
                   help="fixed seeds and serial execution (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="helix-dipoles",
        description="Bound states of aligned dipoles in a helical trap.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="problem", required=True)

    p = sub.add_parser("potential", help="reduced pair potential curve and minima")
    _add_common(p)
    p.add_argument("--phi-max", type=float, help="largest separation sampled")
    p.add_argument("--n-samples", type=int, help="number of curve samples")

    p = sub.add_parser("two-body", help="two-dipole spectrum and wave functions")
    _add_common(p)
    p.add_argument("--beta", type=float, help="coupling strength")
    p.add_argument("--box-length", type=float, help="half-line box size L")
    p.add_argument("--spacing", dest="spacing_1d", type=float, help="grid spacing")
    p.add_argument("--k", dest="k_states", type=int, help="number of states")
    p.add_argument("--statistics", choices=("boson", "fermion"))
    p.add_argument("--full-line", dest="emit_full_line", action="store_true",
                   default=None, help="also export symmetry-extended wave functions")
    _add_physical(p)

    p = sub.add_parser("three-body", help="three-dipole wedge solve")
    _add_common(p)
    p.add_argument("--beta", type=float, help="coupling strength")
    p.add_argument("--x-max", dest="x_max", type=float, help="box extent in x")
    p.add_argument("--y-max", dest="y_max", type=float, help="box extent in y")
    p.add_argument("--spacing", dest="spacing_2d", type=float, help="grid spacing")
    p.add_argument("--k", dest="k_states", type=int, help="number of states")
    p.add_argument("--statistics", choices=("boson", "fermion"))
    p.add_argument("--allow-small-box", action="store_true", default=None,
                   help="skip the five-winding wall-clearance check")
    p.add_argument("--symmetrize", action="store_true", default=None,
                   help="export the full-plane (anti)symmetrized wave function")
    p.add_argument("--sample-extent", type=float, help="symmetrized sampling half-width")
    p.add_argument("--sample-spacing", type=float, help="symmetrized sampling step")
    _add_physical(p)

    p = sub.add_parser("scan", help="two-body spectrum vs coupling strength")
    _add_common(p)
    p.add_argument("--betas", help="comma-separated coupling values")
    p.add_argument("--box-length", type=float, help="half-line box size L")
    p.add_argument("--spacing", dest="spacing_1d", type=float, help="grid spacing")
    p.add_argument("--k", dest="k_states", type=int, help="states per coupling")

    p = sub.add_parser("fit", help="ground-state size scaling and fit")
    _add_common(p)
    p.add_argument("--betas", help="comma-separated couplings for the fit")
    p.add_argument("--product-betas", dest="product_betas",
                   help="comma-separated weak couplings for the size-energy product")
    p.add_argument("--box-length", type=float, help="half-line box size L")
    p.add_argument("--spacing", dest="spacing_1d", type=float, help="grid spacing")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Layer defaults < config file < environment < explicit flags."""
    items: dict[str, str] = {}
    if getattr(args, "config", None):
        items = parse_config_file(args.config)
    cfg = RunConfig.from_items(items) if items else RunConfig()

    env_out = os.environ.get(OUTDIR_ENV)
    if env_out:
        cfg.out_dir = env_out

    cfg.problem = args.problem
    for name in (f.name for f in fields(RunConfig)):
        value = getattr(args, name, None)
        if value is None:
            continue
        if name in ("betas", "product_betas") and isinstance(value, str):
            value = tuple(float(tok) for tok in value.split(",") if tok.strip())
        setattr(cfg, name, value)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (OSError, ValueError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
