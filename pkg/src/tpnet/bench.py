"""Experiment harness: single cells, basis-count sweeps and table regeneration."""
from __future__ import annotations

import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InvalidSpecError, UnknownProblemError
from .problems import catalog
from .reference_values import reference_l_inf
from .solvers import SolverConfig, compute_errors, parse_architecture, save_solution, solve

DESK_LIMITS = {1: 3600, 2: 3600, 4: 2500, 5: 2500, 6: 2500, 7: 3600, 8: 2500}
TABLE_PROBLEMS = {1: "func2d", 2: "helmholtz2d", 4: "heat", 5: "wave", 6: "burgers", 7: "poisson_hd", 8: "diffusion"}
TABLE_ARCHITECTURES = ("hlconc", "tp-elm", "tp-mlp", "tp-resnet")
SWEEP_COUNTS = tuple(k * k for k in range(10, 101, 10))


@dataclass(frozen=True)
class ExperimentConfig:
    """One problem, one architecture, a list of widths and a list of seeds.

    ``widths`` holds ``p`` for tensor-product architectures and ``M`` for
    ``hlconc``.  ``solver`` carries every other solve option; its ``p`` and
    ``seed`` are overwritten per cell.
    """

    problem: str
    architecture: str
    widths: Tuple[int, ...]
    seeds: Tuple[int, ...]
    solver: SolverConfig = field(default_factory=SolverConfig)
    problem_params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "architecture", parse_architecture(self.architecture))
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.widths:
            raise InvalidSpecError("widths: need at least one p (or M)")
        if not self.seeds:
            raise InvalidSpecError("seeds: need at least one seed")
        catalog(self.problem, **self.problem_params)  # raises UnknownProblemError

    def cells(self) -> List[SolverConfig]:
        """Cell configs in deterministic ``(width, seed)`` order."""
        return [replace(self.solver, architecture=self.architecture, p=w, seed=s)
                for w in self.widths for s in self.seeds]


def run_cell(problem_name: str, config: SolverConfig, problem_params=None, save_path=None) -> dict:
    """Solve one cell and return a report row; failures fill the ``error`` cell.

    With ``save_path`` the fitted solution is also written there.
    """
    row = {
        "problem": problem_name, "arch": config.architecture,
        "p": "" if config.architecture == "hlconc" else config.p,
        "M": config.n_basis, "seed": config.seed, "btm_blocks": config.btm_blocks, "error": "",
    }
    try:
        problem = catalog(problem_name, **(problem_params or {}))
        solution = solve(problem, config)
        report = compute_errors(solution, problem)
        if save_path is not None:
            save_solution(solution, save_path)
        row.update({
            "L_inf": report.l_inf, "L_2": report.l_2, "time_s": solution.wall_time,
            "rank": solution.effective_rank, "residual": solution.residual_norm,
            "picard_iters": solution.picard_iterations,
        })
    except Exception as exc:  # one bad cell must not sink the whole sweep
        row["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        row["traceback"] = traceback.format_exc()
    return row


def _run_star(args):
    return run_cell(*args)


def run_cells(tasks: Sequence[tuple], jobs: int = 1) -> List[dict]:
    """Run ``(problem, SolverConfig, params)`` tasks, preserving input order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [run_cell(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_star, tasks))


def run(config: ExperimentConfig, jobs: int = 1) -> List[dict]:
    tasks = [(config.problem, cell, config.problem_params) for cell in config.cells()]
    return run_cells(tasks, jobs)


# -- table regeneration ----------------------------------------------------------

@dataclass(frozen=True)
class TableCell:
    table: int
    problem: str
    config: SolverConfig
    reference_key: object
    problem_params: Dict[str, float] = field(default_factory=dict)


def _width_for(arch: str, m: int) -> int:
    if arch == "hlconc":
        return m
    p = math.isqrt(m)
    if p * p != m:
        raise InvalidSpecError(f"M={m} is not a perfect square")
    return p


def table_cells(table: int, scale: str = "desk", seeds: Sequence[int] = (0, 1, 2)) -> List[TableCell]:
    """Enumerate the cells of one results table.

    ``desk`` keeps cells with ``M`` up to 3600 (2500 for the space-time
    problems) and uses reduced grids; ``full`` uses the published settings.
    """
    table = int(table)
    if table == 3:
        raise InvalidSpecError("table 3 compares external methods (FEM, RFM, ...) and is not supported")
    if table not in TABLE_PROBLEMS:
        raise InvalidSpecError(f"unknown table {table}; choose from {sorted(TABLE_PROBLEMS)}")
    if scale not in ("desk", "full"):
        raise InvalidSpecError(f"unknown scale {scale!r}")
    desk = scale == "desk"
    cells = []
    if table in (1, 2, 4, 5, 6):
        problem = catalog(TABLE_PROBLEMS[table])
        grid = problem.defaults.desk_grid if desk else problem.defaults.grid
        counts = [m for m in SWEEP_COUNTS if not desk or m <= DESK_LIMITS[table]]
        for arch in TABLE_ARCHITECTURES:
            for m in counts:
                for s in seeds:
                    cfg = SolverConfig(arch, _width_for(arch, m), seed=s, grid=grid)
                    cells.append(TableCell(table, problem.name, cfg, m))
    elif table == 7:
        dims = (5, 7) if desk else (5, 7, 10, 15)
        for d in dims:
            for arch in TABLE_ARCHITECTURES:
                m = 2500 if (arch == "hlconc" or desk) else 10000
                for s in seeds:
                    cfg = SolverConfig(arch, _width_for(arch, m), seed=s)
                    published = (arch == "hlconc" and m == 2500) or (arch != "hlconc" and m == 10000)
                    cells.append(TableCell(table, f"poisson_hd_d{d}", cfg, d if published else None))
    else:
        m = DESK_LIMITS[8] if desk else 10000
        blocks = catalog("diffusion").defaults.btm_blocks
        for arch in TABLE_ARCHITECTURES:
            for btm in ("off", "on"):
                for s in seeds:
                    cfg = SolverConfig(arch, _width_for(arch, m), seed=s, btm_blocks=blocks if btm == "on" else 1)
                    cells.append(TableCell(table, "diffusion", cfg, btm if m == 10000 else None))
    return cells


def sweep_table(table: int, scale: str = "desk", seeds: Sequence[int] = (0, 1, 2), jobs: int = 1,
                overrides: Optional[dict] = None) -> List[dict]:
    """Rows for every cell of ``table`` with the published L-infinity alongside."""
    cells = table_cells(table, scale, seeds)
    if overrides:
        cells = [replace(c, config=replace(c.config, **overrides)) for c in cells]
    rows = run_cells([(c.problem, c.config, c.problem_params) for c in cells], jobs)
    for cell, row in zip(cells, rows):
        row["table"] = cell.table
        key = cell.reference_key
        row["reference_L_inf"] = None if key is None else reference_l_inf(cell.table, cell.config.architecture, key)
    return rows


__all__ = [
    "ExperimentConfig", "TableCell", "UnknownProblemError", "run", "run_cell", "run_cells",
    "sweep_table", "table_cells",
]
