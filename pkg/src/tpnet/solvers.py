"""Linear solves, Picard iteration, block time-marching and error metrics."""
from __future__ import annotations

import json
import struct
import time
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np

from .basis import Basis, NetworkBasis, TensorBasis
from .errors import BlockFailure, DomainError, InputError, InvalidSpecError, TPNetError
from .lstsq import LSTSQ_DRIVERS, LstsqResult, SvdFactorization, solve_lstsq
from .problems import PdeProblem, assemble_linear_system
from .sampling import BOUNDARY_TOL, CollocationSet, sample_lhs, sample_uniform_grid
from .subnetworks import (
    params_from_bytes,
    params_to_bytes,
)

MACHINE_EPS = float(np.finfo(np.float64).eps)
ARCHITECTURES = ("tp-elm", "tp-mlp", "tp-resnet", "hlconc")
_W0_STREAM = 0x5749  # extra entropy word for the Picard starting vector


def parse_architecture(name: str) -> str:
    """Canonical architecture label; accepts ``elm`` as well as ``tp-elm``."""
    key = str(name).strip().lower().replace("_", "-")
    if key in ARCHITECTURES:
        return key
    if "tp-" + key in ARCHITECTURES:
        return "tp-" + key
    raise InvalidSpecError(f"unknown architecture {name!r}; choose from {', '.join(ARCHITECTURES)}")


@dataclass(frozen=True)
class SolverConfig:
    """Everything that determines a solve besides the problem itself.

    ``p`` is the subnetwork output width for tensor-product architectures
    (``M = p**2``) and the total basis count ``M`` for ``hlconc``.
    Fields left as ``None`` (``init``, ``grid``, ``normalize_inputs``,
    ``lstsq_driver``) fall back to the problem's defaults.  With time
    blocks, ``grid`` is the grid of each block.  ``rcond`` is relative to
    the largest singular value.
    """

    architecture: str = "tp-elm"
    p: int = 40
    init: Optional[str] = None
    seed: int = 0
    grid: Optional[Tuple[int, ...]] = None
    lhs: Optional[Tuple[int, int]] = None
    picard_kmax: int = 100
    picard_eps: float = 1e-16
    w0_init: str = "xavier"
    btm_blocks: int = 1
    rcond: Optional[float] = MACHINE_EPS
    ridge: float = 0.0
    equilibrate: bool = False
    row_scale: bool = True
    lstsq_driver: Optional[str] = None
    normalize_inputs: Optional[bool] = None

    def __post_init__(self):
        object.__setattr__(self, "architecture", parse_architecture(self.architecture))
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(int(g) for g in self.grid))
        if self.lhs is not None:
            object.__setattr__(self, "lhs", tuple(int(v) for v in self.lhs))
        if int(self.p) < 1:
            raise InvalidSpecError("p must be positive")
        if int(self.picard_kmax) < 1:
            raise InvalidSpecError("picard_kmax must be at least 1")
        if not self.picard_eps > 0:
            raise InvalidSpecError("picard_eps must be positive")
        if int(self.btm_blocks) < 1:
            raise InvalidSpecError("btm_blocks must be at least 1")
        if self.ridge < 0:
            raise InvalidSpecError("ridge must be non-negative")
        if self.lstsq_driver is not None and self.lstsq_driver not in LSTSQ_DRIVERS:
            raise InvalidSpecError(f"unknown lstsq driver {self.lstsq_driver!r}")
        if self.w0_init.lower() not in ("xavier", "kaiming"):
            raise InvalidSpecError(f"unknown w0 init {self.w0_init!r}")

    @property
    def n_basis(self) -> int:
        return self.p if self.architecture == "hlconc" else self.p * self.p

    def lstsq_options(self):
        return dict(rcond=self.rcond, ridge=self.ridge, equilibrate=self.equilibrate, row_scale=self.row_scale)

    def solve_options(self, problem_default="gelsd"):
        return dict(self.lstsq_options(), driver=self.lstsq_driver or problem_default)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        for key in ("grid", "lhs"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        return cls(**data)


@dataclass
class PicardInfo:
    iterations: int
    increments: List[float]
    converged: bool
    warning: Optional[str] = None

    @property
    def final_increment(self):
        return self.increments[-1] if self.increments else float("nan")


@dataclass
class Block:
    t_start: float
    t_end: float
    solution: "Solution"


@dataclass
class Solution:
    """A fitted field ``u(x) = Phi(x) . w``, or an ordered list of time blocks."""

    problem_name: str
    config: SolverConfig
    basis: Optional[Basis] = None
    coefficients: Optional[np.ndarray] = None
    lstsq: Optional[LstsqResult] = None
    picard: Optional[PicardInfo] = None
    collocation: Optional[CollocationSet] = None
    blocks: List[Block] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def is_blocked(self):
        return bool(self.blocks)

    @property
    def effective_rank(self):
        if self.is_blocked:
            return min(b.solution.effective_rank for b in self.blocks)
        return self.lstsq.effective_rank

    @property
    def residual_norm(self):
        if self.is_blocked:
            return float(np.sqrt(sum(b.solution.residual_norm ** 2 for b in self.blocks)))
        return self.lstsq.residual_norm

    @property
    def picard_iterations(self):
        if self.is_blocked:
            return sum(b.solution.picard_iterations for b in self.blocks)
        return self.picard.iterations if self.picard else 0


@dataclass
class ErrorReport:
    l_inf: float
    l_2: float
    n_eval: int
    wall_time: float


# -- building blocks -----------------------------------------------------------

def block_seed(master: int, index: int) -> int:
    """Seed of time block ``index``; block 0 keeps the master seed."""
    if index == 0:
        return int(master)
    return int(np.random.SeedSequence((int(master), int(index))).generate_state(1, np.uint64)[0])


def build_basis(config: SolverConfig, dim: int, seed: int, init: str, bounds=None) -> Basis:
    if config.architecture == "hlconc":
        return NetworkBasis.from_seed("hlconc", dim, config.p, init, seed, bounds=bounds)
    arch = config.architecture[len("tp-"):]
    return TensorBasis.from_seed(arch, dim, config.p, init, seed, bounds=bounds)


def initial_coefficients(count: int, scheme: str, seed: int) -> np.ndarray:
    """Picard starting vector drawn as the weights of a ``1 x count`` layer."""
    rng = np.random.default_rng((int(seed), _W0_STREAM))
    if scheme.lower() == "kaiming":
        return rng.normal(0.0, np.sqrt(2.0 / count), size=count)
    bound = np.sqrt(6.0 / (count + 1))
    return rng.uniform(-bound, bound, size=count)


def picard_iterate(solve: Callable[[np.ndarray], np.ndarray], rhs: Callable[[np.ndarray], np.ndarray],
                   w0, kmax: int = 100, eps: float = 1e-16):
    """Fixed-point loop ``w_{k+1} = solve(rhs(w_k))``.

    Stops once ``||w_{k+1} - w_k||_2 < eps`` or after ``kmax`` updates.
    Returns ``(w, PicardInfo)``; non-convergence sets ``info.warning`` and
    emits a :class:`RuntimeWarning` rather than raising.
    """
    w = np.asarray(w0, dtype=np.float64)
    increments = []
    converged = False
    for _ in range(int(kmax)):
        w_next = solve(rhs(w))
        if not np.all(np.isfinite(w_next)):
            raise TPNetError("Picard iterate became non-finite")
        increments.append(float(np.linalg.norm(w_next - w)))
        w = w_next
        if increments[-1] < eps:
            converged = True
            break
    info = PicardInfo(len(increments), increments, converged)
    if not converged:
        info.warning = f"Picard did not converge in {kmax} iterations; last increment {increments[-1]:.3e}"
        warnings.warn(info.warning, RuntimeWarning, stacklevel=2)
    return w, info


def _sample(problem: PdeProblem, config: SolverConfig, domain=None) -> CollocationSet:
    domain = domain or problem.domain
    d = problem.defaults
    if d.sampling == "lhs" and config.grid is None:
        n_int, n_b = config.lhs if config.lhs is not None else (d.lhs_interior, d.lhs_boundary)
        return sample_lhs(domain, n_int, n_b, config.seed)
    return sample_uniform_grid(domain, config.grid if config.grid is not None else d.grid)


def _solve_on(problem: PdeProblem, config: SolverConfig, colloc: CollocationSet, seed: int, domain) -> Solution:
    """Steps 1-5 on one domain: basis, assembly, least squares (and Picard)."""
    t0 = time.perf_counter()
    init = config.init or problem.defaults.init
    normalize = problem.defaults.normalize_inputs if config.normalize_inputs is None else config.normalize_inputs
    bounds = domain.bounds if normalize else None
    basis = build_basis(config, domain.dim, seed, init, bounds)
    system = assemble_linear_system(problem, basis, colloc)
    if not problem.is_nonlinear:
        result = solve_lstsq(system.A, system.F, **config.solve_options(problem.defaults.lstsq_driver))
        w, picard = result.coefficients, None
    else:
        fact = SvdFactorization(system.A, **config.lstsq_options())
        n_r = system.n_interior
        interior_field = basis.field_evaluator(colloc.interior)
        source = system.F[:n_r].copy()

        def rhs(w):
            F = system.F.copy()
            F[:n_r] = source - problem.nonlinear(colloc.interior, interior_field(w))
            return F

        w0 = initial_coefficients(basis.count, config.w0_init, seed)
        w, picard = picard_iterate(fact.solve, rhs, w0, config.picard_kmax, config.picard_eps)
        residual = float(np.linalg.norm(system.A @ w - rhs(w)))
        result = LstsqResult(w, residual, fact.rank, fact.rcond, time.perf_counter() - t0)
    return Solution(problem.name, config, basis, w, result, picard, colloc,
                    wall_time=time.perf_counter() - t0)


# -- public solvers ------------------------------------------------------------

def solve_linear(problem: PdeProblem, config: SolverConfig) -> Solution:
    if problem.is_nonlinear:
        raise InvalidSpecError(f"{problem.name} has a nonlinear term; use solve_nonlinear_picard")
    return _solve_on(problem, config, _sample(problem, config), config.seed, problem.domain)


def solve_nonlinear_picard(problem: PdeProblem, config: SolverConfig) -> Solution:
    """Picard linearisation: the nonlinear term is moved to the right-hand side.

    The system matrix is factorised once; every iteration only rebuilds the
    interior right-hand side ``f - N[u_k]``.
    """
    if not problem.is_nonlinear:
        raise InvalidSpecError(f"{problem.name} is linear; use solve_linear")
    return _solve_on(problem, config, _sample(problem, config), config.seed, problem.domain)


def block_time_march(problem: PdeProblem, config: SolverConfig) -> Solution:
    """Solve on ``btm_blocks`` consecutive time windows of equal length.

    Block ``k`` covers ``(t_k, t_{k+1}]`` (block 0 also owns ``t_0``), is
    sampled with the full configured grid and uses freshly drawn
    subnetworks.  Its initial rows take their data from the
    previous block's solution at ``t_k``: every initial operator (value and,
    for second-order problems, time derivative) is applied to that field.
    """
    if not problem.is_time_dependent:
        raise InvalidSpecError(f"{problem.name} has no time axis")
    if problem.defaults.sampling == "lhs" and config.grid is None:
        raise InvalidSpecError("block time-marching needs grid sampling")
    t_start = time.perf_counter()
    n_blocks = int(config.btm_blocks)
    edges = np.linspace(problem.domain.t0, problem.domain.t_final, n_blocks + 1)
    blocks = []
    current = problem
    for k in range(n_blocks):
        domain = problem.domain.time_window(edges[k], edges[k + 1])
        block_problem = replace(current, domain=domain)
        colloc = _sample(block_problem, config, domain)
        try:
            sol = _solve_on(block_problem, config, colloc, block_seed(config.seed, k), domain)
        except TPNetError as exc:
            raise BlockFailure(f"block {k} failed: {exc}", k) from exc
        blocks.append(Block(float(edges[k]), float(edges[k + 1]), sol))
        current = problem.with_initial_data([_chained_data(sol, ic.operator) for ic in problem.initial])
    return Solution(problem.name, config, blocks=blocks, wall_time=time.perf_counter() - t_start)


def _chained_data(sol: Solution, operator):
    def data(points):
        return operator.apply_field(sol.basis.field(sol.coefficients, points))

    return data


def solve(problem: PdeProblem, config: SolverConfig) -> Solution:
    """Dispatch to block marching, Picard or the plain linear solve."""
    if config.btm_blocks > 1:
        return block_time_march(problem, config)
    if problem.is_nonlinear:
        return solve_nonlinear_picard(problem, config)
    return solve_linear(problem, config)


# -- evaluation ----------------------------------------------------------------

def _route(solution: Solution, points):
    t = points[:, -1]
    edges = np.array([solution.blocks[0].t_start] + [b.t_end for b in solution.blocks])
    if np.any(t < edges[0] - BOUNDARY_TOL) or np.any(t > edges[-1] + BOUNDARY_TOL):
        raise DomainError("time coordinate outside all blocks")
    # t_k itself belongs to block k-1; searchsorted(side="left") does exactly that
    return np.clip(np.searchsorted(edges[1:-1], t, side="left"), 0, len(solution.blocks) - 1)


def evaluate(solution: Solution, points) -> np.ndarray:
    """Field values ``Phi(x) . w`` at ``points``; blocked solutions are routed by time."""
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if not solution.is_blocked:
        return solution.basis.field(solution.coefficients, x).value
    idx = _route(solution, x)
    out = np.empty(len(x))
    for k, block in enumerate(solution.blocks):
        mask = idx == k
        if np.any(mask):
            out[mask] = evaluate(block.solution, x[mask])
    return out


def default_eval_points(solution: Solution) -> np.ndarray:
    """The training points.

    For a blocked solve these are the union over blocks; the initial face of
    block ``k > 0`` is skipped since it repeats the end face of block ``k-1``.
    """
    if not solution.is_blocked:
        if solution.collocation is None:
            raise InputError("solution carries no training points; pass eval_points")
        return solution.collocation.points
    if any(b.solution.collocation is None for b in solution.blocks):
        raise InputError("solution carries no training points; pass eval_points")
    parts = [solution.blocks[0].solution.collocation.initial]
    for block in solution.blocks:
        c = block.solution.collocation
        parts += [c.interior, c.boundary]
    return np.concatenate(parts, axis=0)


def error_metrics(approx, exact):
    err = np.abs(np.asarray(approx, dtype=np.float64) - np.asarray(exact, dtype=np.float64))
    if err.size == 0:
        return 0.0, 0.0
    return float(err.max()), float(np.sqrt(np.sum(err * err)))


def compute_errors(solution: Solution, problem: PdeProblem, eval_points=None) -> ErrorReport:
    """Max-abs and unnormalised root-sum-of-squares error against the exact solution."""
    if problem.exact is None:
        raise InputError(f"{problem.name} has no exact solution")
    pts = default_eval_points(solution) if eval_points is None else np.atleast_2d(eval_points)
    l_inf, l_2 = error_metrics(evaluate(solution, pts), problem.exact(pts))
    return ErrorReport(l_inf, l_2, len(pts), solution.wall_time)


# -- serialization ---------------------------------------------------------------

_MAGIC = b"TPSOL\x00"
_FORMAT_VERSION = 1


def _basis_header(basis: Basis):
    return {
        "kind": "tensor" if isinstance(basis, TensorBasis) else "network",
        "center": None if basis.center is None else basis.center.tolist(),
        "halfwidth": None if basis.halfwidth is None else basis.halfwidth.tolist(),
    }


def _leaf_header(sol: Solution):
    r = sol.lstsq
    return {
        "basis": _basis_header(sol.basis),
        "count": int(sol.basis.count),
        "lstsq": {"residual_norm": r.residual_norm, "effective_rank": r.effective_rank,
                  "rcond_used": r.rcond_used, "wall_time": r.wall_time},
        "picard": None if sol.picard is None else asdict(sol.picard),
        "wall_time": sol.wall_time,
    }


def _leaves(solution: Solution):
    if solution.is_blocked:
        return [b.solution for b in solution.blocks]
    return [solution]


def solution_to_bytes(solution: Solution) -> bytes:
    """Self-describing container: JSON header, subnetwork params, coefficients.

    Layout: magic, ``<H`` version, ``<I`` header length, UTF-8 JSON header,
    then per leaf solution each subnetwork container as ``<Q`` length + bytes
    followed by the little-endian float64 coefficients.
    """
    leaves = _leaves(solution)
    header = {
        "problem": solution.problem_name,
        "config": solution.config.to_dict(),
        "wall_time": solution.wall_time,
        "blocks": [[b.t_start, b.t_end] for b in solution.blocks],
        "leaves": [_leaf_header(s) for s in leaves],
    }
    raw = json.dumps(header, sort_keys=True).encode("utf-8")
    parts = [_MAGIC, struct.pack("<HI", _FORMAT_VERSION, len(raw)), raw]
    for leaf in leaves:
        for _, params in leaf.basis.subnetworks():
            blob = params_to_bytes(params)
            parts += [struct.pack("<Q", len(blob)), blob]
        parts.append(np.asarray(leaf.coefficients, dtype="<f8").tobytes())
    return b"".join(parts)


def solution_from_bytes(data: bytes) -> Solution:
    if not data.startswith(_MAGIC):
        raise InputError("not a tpnet solution file")
    pos = len(_MAGIC)
    version, n = struct.unpack_from("<HI", data, pos)
    if version != _FORMAT_VERSION:
        raise InputError(f"unsupported solution format version {version}")
    pos += struct.calcsize("<HI")
    header = json.loads(data[pos:pos + n].decode("utf-8"))
    pos += n
    config = SolverConfig.from_dict(header["config"])

    def read_params():
        nonlocal pos
        (size,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        params = params_from_bytes(data[pos:pos + size])
        pos += size
        return params

    leaves = []
    for meta in header["leaves"]:
        b = meta["basis"]
        center = None if b["center"] is None else np.array(b["center"])
        halfwidth = None if b["halfwidth"] is None else np.array(b["halfwidth"])
        if b["kind"] == "tensor":
            p1, p2 = read_params(), read_params()
            basis = TensorBasis((p1.spec, p1), (p2.spec, p2), center, halfwidth)
        else:
            p1 = read_params()
            basis = NetworkBasis((p1.spec, p1), center, halfwidth)
        count = meta["count"]
        w = np.frombuffer(data, dtype="<f8", count=count, offset=pos).astype(np.float64)
        pos += 8 * count
        lq = meta["lstsq"]
        result = LstsqResult(w, lq["residual_norm"], lq["effective_rank"], lq["rcond_used"], lq["wall_time"])
        picard = None if meta["picard"] is None else PicardInfo(**meta["picard"])
        leaves.append(Solution(header["problem"], config, basis, w, result, picard, wall_time=meta["wall_time"]))
    if not header["blocks"]:
        return leaves[0]
    blocks = [Block(t0, t1, leaf) for (t0, t1), leaf in zip(header["blocks"], leaves)]
    return Solution(header["problem"], config, blocks=blocks, wall_time=header["wall_time"])


def save_solution(solution: Solution, path) -> None:
    with open(path, "wb") as fh:
        fh.write(solution_to_bytes(solution))


def load_solution(path) -> Solution:
    with open(path, "rb") as fh:
        return solution_from_bytes(fh.read())
