"""PDE problem definitions, the benchmark catalog and system assembly.

Every catalog problem ships its exact solution together with source,
boundary and initial data written out in closed form (no numerical
differentiation).  The derivations are given next to each builder.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .basis import Basis, FieldJet
from .errors import UnknownProblemError
from .operators import LinearOperator, d1, d2, identity, laplacian
from .sampling import CollocationSet, Domain, sample_lhs, sample_uniform_grid

PointFn = Callable[[np.ndarray], np.ndarray]
NonlinearFn = Callable[[np.ndarray, FieldJet], np.ndarray]


@dataclass(frozen=True)
class InitialCondition:
    """One row block on the ``t = t0`` face: ``operator u = data``."""

    operator: LinearOperator
    data: PointFn


@dataclass(frozen=True)
class ProblemDefaults:
    sampling: str = "grid"              # "grid" or "lhs"
    grid: Tuple[int, ...] = ()
    desk_grid: Tuple[int, ...] = ()
    lhs_interior: int = 0
    lhs_boundary: int = 0
    init: str = "kaiming"
    btm_blocks: int = 1
    normalize_inputs: bool = False
    lstsq_driver: str = "gelsd"


@dataclass(frozen=True)
class PdeProblem:
    """``L u + N[u] = f`` in the domain, ``B u = g`` on the spatial boundary,
    and optional initial row blocks on the ``t = t0`` face."""

    name: str
    domain: Domain
    interior_op: LinearOperator
    boundary_op: LinearOperator
    source: PointFn
    boundary_data: PointFn
    initial: Tuple[InitialCondition, ...] = ()
    nonlinear: Optional[NonlinearFn] = None
    exact: Optional[PointFn] = None
    defaults: ProblemDefaults = field(default_factory=ProblemDefaults)
    params: dict = field(default_factory=dict)

    @property
    def is_nonlinear(self):
        return self.nonlinear is not None

    @property
    def is_time_dependent(self):
        return self.domain.time

    def with_initial_data(self, data_fns: Sequence[PointFn]) -> "PdeProblem":
        """Copy with the initial-condition right-hand sides replaced in order."""
        ics = tuple(InitialCondition(ic.operator, fn) for ic, fn in zip(self.initial, data_fns))
        return replace(self, initial=ics)

    def sample(self, grid=None, seed=0, lhs=None) -> CollocationSet:
        d = self.defaults
        if d.sampling == "lhs" and grid is None:
            n_int, n_b = lhs if lhs is not None else (d.lhs_interior, d.lhs_boundary)
            return sample_lhs(self.domain, n_int, n_b, seed)
        return sample_uniform_grid(self.domain, grid if grid is not None else d.grid)


@dataclass
class LinearSystem:
    A: np.ndarray
    F: np.ndarray
    n_interior: int
    n_boundary: int
    n_initial_rows: int


def _fill(basis: Basis, op: LinearOperator, pts, out):
    if len(pts) == 0:
        return
    basis.design_matrix(op, pts, out=out)


def assemble_linear_system(problem: PdeProblem, basis: Basis, colloc: CollocationSet) -> LinearSystem:
    """Stack interior (L), boundary (B) and initial row blocks with matching data.

    The nonlinear term, if any, is not included here; see the Picard solver.
    """
    for op in [problem.interior_op, problem.boundary_op] + [ic.operator for ic in problem.initial]:
        op.check_dim(basis.dim)
    n_r, n_b, n_0 = len(colloc.interior), len(colloc.boundary), len(colloc.initial)
    n_ic = len(problem.initial) if n_0 else 0
    n_rows = n_r + n_b + n_ic * n_0
    A = np.empty((n_rows, basis.count))
    F = np.empty(n_rows)
    _fill(basis, problem.interior_op, colloc.interior, A[:n_r])
    F[:n_r] = problem.source(colloc.interior) if n_r else 0.0
    _fill(basis, problem.boundary_op, colloc.boundary, A[n_r:n_r + n_b])
    F[n_r:n_r + n_b] = problem.boundary_data(colloc.boundary) if n_b else 0.0
    row = n_r + n_b
    if n_0:
        for ic in problem.initial:
            _fill(basis, ic.operator, colloc.initial, A[row:row + n_0])
            F[row:row + n_0] = ic.data(colloc.initial)
            row += n_0
    return LinearSystem(A, F, n_r, n_b, n_ic * n_0)


# -- catalog -----------------------------------------------------------------

def _func2d():
    # u = sin(pi x) sin(4 pi y); plain fitting: value rows at every grid point.
    def u(x):
        return np.sin(np.pi * x[:, 0]) * np.sin(4 * np.pi * x[:, 1])

    return PdeProblem(
        "func2d", Domain((-1, -1), (1, 1)), identity(), identity(), u, u, exact=u,
        defaults=ProblemDefaults(grid=(101, 101), desk_grid=(101, 101), init="kaiming"),
    )


def _helmholtz2d(a1=1.0, a2=4.0, k=1.0):
    # Δu + k²u = q with u = sin(a1 π x) sin(a2 π y)
    # => q = (k² - (a1 π)² - (a2 π)²) u
    def u(x):
        return np.sin(a1 * np.pi * x[:, 0]) * np.sin(a2 * np.pi * x[:, 1])

    def q(x):
        return (k ** 2 - (a1 * np.pi) ** 2 - (a2 * np.pi) ** 2) * u(x)

    return PdeProblem(
        "helmholtz2d", Domain((-1, -1), (1, 1)), laplacian(2) + k ** 2 * identity(), identity(), q, u,
        exact=u, defaults=ProblemDefaults(grid=(101, 101), desk_grid=(101, 101), init="kaiming"),
        params={"a1": a1, "a2": a2, "k": k},
    )


def _heat():
    # u = 2 e^{-t} sin(πx/2) sin(πy/2): u_t = -u, Δu = -(π²/2) u
    # => f = u_t - Δu = (π²/2 - 1) u
    def u(x):
        return 2.0 * np.exp(-x[:, 2]) * np.sin(0.5 * np.pi * x[:, 0]) * np.sin(0.5 * np.pi * x[:, 1])

    def f(x):
        return (0.5 * np.pi ** 2 - 1.0) * u(x)

    return PdeProblem(
        "heat", Domain((0, 0, 0), (1, 1, 1), time=True), d1(2) - laplacian(2), identity(), f, u,
        initial=(InitialCondition(identity(), u),), exact=u,
        defaults=ProblemDefaults(grid=(51, 51, 51), desk_grid=(31, 31, 31), init="xavier"),
    )


def _wave():
    # u = S(x) S(y) S(t), S(s) = sin(πs/2): u_tt = -(π²/4) u, Δu = -(π²/2) u
    # => f = u_tt - Δu = (π²/4) u;  u(x,y,0) = 0;  u_t(x,y,0) = (π/2) S(x) S(y)
    def s(v):
        return np.sin(0.5 * np.pi * v)

    def u(x):
        return s(x[:, 0]) * s(x[:, 1]) * s(x[:, 2])

    def f(x):
        return 0.25 * np.pi ** 2 * u(x)

    def velocity(x):
        return 0.5 * np.pi * s(x[:, 0]) * s(x[:, 1]) * np.cos(0.5 * np.pi * x[:, 2])

    return PdeProblem(
        "wave", Domain((0, 0, 0), (1, 1, 1), time=True), d2(2) - laplacian(2), identity(), f, u,
        initial=(InitialCondition(identity(), u), InitialCondition(d1(2), velocity)), exact=u,
        defaults=ProblemDefaults(grid=(51, 51, 51), desk_grid=(31, 31, 31), init="xavier"),
    )


def _burgers(zeta=1.0):
    # u = 1/(1+e^s), s = (x+y-t)/(2ζ); with q = u(1-u):
    # u_x = u_y = -q/(2ζ), u_t = q/(2ζ), u_xx = u_yy = q(1-2u)/(4ζ²)
    # u_t + u(u_x+u_y) - ζΔu = q/(2ζ) (1 - 2u - (1-2u)) = 0
    def u(x):
        return 1.0 / (1.0 + np.exp((x[:, 0] + x[:, 1] - x[:, 2]) / (2.0 * zeta)))

    def zero(x):
        return np.zeros(len(x))

    def convection(x, fld):
        return fld.value * (fld.grad[:, 0] + fld.grad[:, 1])

    return PdeProblem(
        "burgers", Domain((0, 0, 0), (1, 1, 1), time=True), d1(2) - zeta * laplacian(2), identity(),
        zero, u, initial=(InitialCondition(identity(), u),), nonlinear=convection, exact=u,
        defaults=ProblemDefaults(grid=(51, 51, 51), desk_grid=(31, 31, 31), init="xavier"),
        params={"zeta": zeta},
    )


def _poisson_hd(dim=5):
    # u = s² + sin s, s = mean(x): ∂²u/∂x_i² = (2 - sin s)/d²
    # => -Δu = (sin s - 2)/d
    def mean(x):
        return x.mean(axis=1)

    def u(x):
        s = mean(x)
        return s ** 2 + np.sin(s)

    def f(x):
        return (np.sin(mean(x)) - 2.0) / dim

    return PdeProblem(
        f"poisson_hd_d{dim}", Domain((-1,) * dim, (1,) * dim), -laplacian(dim), identity(), f, u, exact=u,
        defaults=ProblemDefaults(sampling="lhs", lhs_interior=10000, lhs_boundary=200 * dim, init="xavier",
                                 lstsq_driver="qr"),
        params={"d": dim},
    )


def _diffusion(nu=0.01, t_final=10.0):
    # u = X(x) T(t) with X(s) = T(s) = 2cos(πs+π/5) + (3/2)cos(2πs-3π/5)
    # f = u_t - ν u_xx = X T' - ν X'' T
    def X(s):
        return 2.0 * np.cos(np.pi * s + np.pi / 5) + 1.5 * np.cos(2 * np.pi * s - 3 * np.pi / 5)

    def dX(s):
        return -2.0 * np.pi * np.sin(np.pi * s + np.pi / 5) - 3.0 * np.pi * np.sin(2 * np.pi * s - 3 * np.pi / 5)

    def ddX(s):
        return -2.0 * np.pi ** 2 * np.cos(np.pi * s + np.pi / 5) - 6.0 * np.pi ** 2 * np.cos(2 * np.pi * s - 3 * np.pi / 5)

    def u(x):
        return X(x[:, 0]) * X(x[:, 1])

    def f(x):
        return X(x[:, 0]) * dX(x[:, 1]) - nu * ddX(x[:, 0]) * X(x[:, 1])

    return PdeProblem(
        "diffusion", Domain((0, 0), (5, t_final), time=True), d1(1) - nu * d2(0), identity(), f, u,
        initial=(InitialCondition(identity(), u),), exact=u,
        defaults=ProblemDefaults(grid=(101, 101), desk_grid=(101, 101), init="xavier", btm_blocks=10,
                                 normalize_inputs=True),
        params={"nu": nu, "t_final": t_final},
    )


_CATALOG = {
    "func2d": _func2d,
    "helmholtz2d": _helmholtz2d,
    "heat": _heat,
    "wave": _wave,
    "burgers": _burgers,
    "poisson_hd": _poisson_hd,
    "diffusion": _diffusion,
}


def problem_names():
    return sorted(_CATALOG)


def catalog(name: str, **params) -> PdeProblem:
    """Build a benchmark problem by name; keyword arguments override its constants.

    ``poisson_hd`` takes ``dim`` (default 5); ``diffusion`` takes ``nu`` and
    ``t_final``; ``helmholtz2d`` takes ``a1``, ``a2``, ``k``; ``burgers`` takes
    ``zeta``.
    """
    key = name
    if name.startswith("poisson_hd_d"):
        key, params = "poisson_hd", {"dim": int(name[len("poisson_hd_d"):]), **params}
    try:
        builder = _CATALOG[key]
    except KeyError:
        raise UnknownProblemError(f"unknown problem {name!r}; choose from {', '.join(problem_names())}") from None
    return builder(**params)
