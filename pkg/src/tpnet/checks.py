"""Self-checks: derivative oracles and solver property suites.

Every check compares the library against something computed independently:
finite differences, a hand-built SVD, or a hand-written polynomial basis.
Results come back as :class:`CheckResult` records so that the CLI can print
them and the test suite can assert on them.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List

import numpy as np

from .basis import Basis, TensorBasis
from .lstsq import solve_lstsq
from .operators import identity, laplacian
from .problems import PdeProblem, assemble_linear_system, catalog, problem_names
from .sampling import Domain, sample_uniform_grid
from .solvers import (
    SolverConfig,
    build_basis,
    evaluate,
    solve,
    solve_linear,
    solve_nonlinear_picard,
)
from .subnetworks import JetBatch, SubnetworkSpec, eval_jets, eval_values, init_subnetwork, params_to_bytes

GRAD_TOL = 1e-6
DIAG2_TOL = 1e-4


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3e} (tol {self.tolerance:.1e}) {self.detail}".rstrip()


def _result(name, value, tol, detail=""):
    return CheckResult(name, bool(value <= tol), float(value), tol, detail)


# -- finite differences ----------------------------------------------------------

def fd_jets(fn, x, h1=1e-3, h2=1e-3):
    """Fourth-order central differences of ``fn: (N, d) -> (N, k)``.

    Returns ``(grad, diag2)`` shaped ``(N, k, d)``.
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[1]
    f0 = np.asarray(fn(x))
    grad = np.empty(f0.shape + (d,))
    diag2 = np.empty(f0.shape + (d,))
    for i in range(d):
        e = np.zeros(d)
        e[i] = h1
        fp1, fm1, fp2, fm2 = fn(x + e), fn(x - e), fn(x + 2 * e), fn(x - 2 * e)
        grad[..., i] = (8 * (fp1 - fm1) - (fp2 - fm2)) / (12 * h1)
        if h2 != h1:
            e[i] = h2
            fp1, fm1, fp2, fm2 = fn(x + e), fn(x - e), fn(x + 2 * e), fn(x - 2 * e)
        diag2[..., i] = (16 * (fp1 + fm1) - (fp2 + fm2) - 30 * f0) / (12 * h2 * h2)
    return grad, diag2


def _rel_err(a, b):
    scale = max(float(np.max(np.abs(b))), 1e-12)
    return float(np.max(np.abs(a - b))) / scale


def _random_spec(arch, rng):
    dim = int(rng.integers(1, 4))
    width = int(rng.integers(2, 9))
    seed = int(rng.integers(0, 2 ** 63))
    init = "kaiming" if rng.random() < 0.5 else "xavier"
    spec = SubnetworkSpec.default(arch, dim, width, init, seed)
    return spec, init_subnetwork(spec)


def derivative_checks(n_cases: int = 100, seed: int = 0) -> List[CheckResult]:
    """Analytic jets versus finite differences.

    Each architecture and the tensor-product basis get ``n_cases`` random
    (seed, point) cases; the reported value is the worst relative error.
    """
    rng = np.random.default_rng(seed)
    results = []
    families = ["ELM", "MLP", "ResNet", "HLConc", "tensor"]
    for fam in families:
        worst_g = worst_h = 0.0
        for _ in range(n_cases):
            if fam == "tensor":
                arch = ["ELM", "MLP", "ResNet"][int(rng.integers(0, 3))]
                dim = int(rng.integers(1, 4))
                basis = TensorBasis.from_seed(arch, dim, int(rng.integers(2, 6)), "xavier", int(rng.integers(0, 2 ** 63)))
                x = rng.uniform(-1, 1, size=(1, dim))
                jet = basis.jets(x)
                fn = basis.values
            else:
                spec, params = _random_spec(fam, rng)
                x = rng.uniform(-1, 1, size=(1, spec.input_dim))
                jet = eval_jets(spec, params, x)

                def fn(y, spec=spec, params=params):
                    return eval_values(spec, params, y)
            g, h = fd_jets(fn, x)
            worst_g = max(worst_g, _rel_err(jet.grad, g))
            worst_h = max(worst_h, _rel_err(jet.diag2, h))
        label = "tensor-basis" if fam == "tensor" else fam
        results.append(_result(f"{label} first derivatives", worst_g, GRAD_TOL, f"({n_cases} cases)"))
        results.append(_result(f"{label} second derivatives", worst_h, DIAG2_TOL, f"({n_cases} cases)"))
    return results


# -- an injected basis with known derivatives ----------------------------------------

class MonomialBasis(Basis):
    """Products of powers, one column per exponent tuple.

    ``exponents`` is a list of length-``dim`` integer tuples; ``(0, 2)`` is
    ``y**2``.  Derivatives are written out by hand, independent of the
    network code.
    """

    def __init__(self, exponents):
        self.exponents = np.asarray(exponents, dtype=int)
        self.count, self.dim = self.exponents.shape

    def jets(self, points) -> JetBatch:
        x = np.atleast_2d(np.asarray(points, dtype=np.float64))
        n, d = x.shape
        e = self.exponents

        def mono(powers):
            out = np.ones((n, self.count))
            for i in range(d):
                out *= np.where(powers[:, i] >= 0, x[:, i:i + 1] ** np.maximum(powers[:, i], 0), 0.0)
            return out

        values = mono(e)
        grad = np.empty((n, self.count, d))
        diag2 = np.empty((n, self.count, d))
        for i in range(d):
            shifted = e.copy()
            shifted[:, i] -= 1
            grad[:, :, i] = e[:, i] * mono(shifted)
            shifted[:, i] -= 1
            diag2[:, :, i] = e[:, i] * (e[:, i] - 1) * mono(shifted)
        return JetBatch(values, grad, diag2)


# -- property suite -------------------------------------------------------------

def _determinism():
    problem = catalog("func2d")
    config = SolverConfig("tp-resnet", 8, seed=3, grid=(21, 21))
    a, b = solve(problem, config), solve(problem, config)
    # wall times differ between runs, so compare weights and coefficients only
    same = a.coefficients.tobytes() == b.coefficients.tobytes() and all(
        params_to_bytes(pa) == params_to_bytes(pb)
        for (_, pa), (_, pb) in zip(a.basis.subnetworks(), b.basis.subnetworks())
    )
    return _result("determinism: bit-identical coefficients", 0.0 if same else 1.0, 0.0)


def _basis_count():
    bad = 0
    for arch in ("tp-elm", "tp-mlp", "tp-resnet"):
        for p in (1, 3, 7, 12):
            basis = build_basis(SolverConfig(arch, p), 2, 0, "xavier")
            bad += basis.count != p * p or basis.values(np.zeros((1, 2))).shape != (1, p * p)
    return _result("basis size M = p^2", float(bad), 0.0)


def _span_reproduction():
    basis = TensorBasis.from_seed("ResNet", 2, 6, "xavier", 11)
    colloc = sample_uniform_grid(Domain((-1, -1), (1, 1)), (25, 25))
    phi = basis.values(colloc.points)
    w = np.random.default_rng(5).standard_normal(basis.count)
    target = phi @ w
    fit = solve_lstsq(phi, target)
    return _result("span reproduction residual", float(np.max(np.abs(phi @ fit.coefficients - target))), 1e-10)


def _minimum_norm():
    rng = np.random.default_rng(7)
    worst = 0.0
    for n, m, r in ((40, 12, 5), (30, 30, 17), (15, 25, 9)):
        u, _ = np.linalg.qr(rng.standard_normal((n, r)))
        v, _ = np.linalg.qr(rng.standard_normal((m, r)))
        s = np.logspace(0, -3, r)
        A = (u * s) @ v.T
        F = rng.standard_normal(n)
        expected = v @ ((u.T @ F) / s)
        got = solve_lstsq(A, F).coefficients
        worst = max(worst, float(np.max(np.abs(got - expected))) / float(np.max(np.abs(expected))))
    return _result("minimum-norm lstsq on rank-deficient A", worst, 1e-10)


def manufactured_poisson():
    """``lap u = 2`` on the unit square, ``u = 0.5 + x - x^2 + 2 y^2``."""
    def u(x):
        return 0.5 + x[:, 0] - x[:, 0] ** 2 + 2 * x[:, 1] ** 2

    return PdeProblem("manufactured", Domain((0, 0), (1, 1)), laplacian(2), identity(),
                      lambda x: np.full(len(x), 2.0), u, exact=u)


def _manufactured():
    problem = manufactured_poisson()
    basis = MonomialBasis([(0, 0), (1, 0), (2, 0), (0, 2)])
    colloc = sample_uniform_grid(problem.domain, (9, 9))
    system = assemble_linear_system(problem, basis, colloc)
    w = solve_lstsq(system.A, system.F).coefficients
    pts = colloc.points
    err = float(np.max(np.abs(basis.values(pts) @ w - problem.exact(pts))))
    return _result("manufactured solution in span", err, 1e-10)


def fd_field(fn, x, h=1e-3):
    """:class:`FieldJet` of a scalar function by finite differences."""
    from .basis import FieldJet

    def vec(y):
        return np.asarray(fn(y))[:, None]

    g, d2 = fd_jets(vec, x, h, h)
    return FieldJet(np.asarray(fn(x)), g[:, 0, :], d2[:, 0, :])


def catalog_residuals(name, n_points=200, seed=0, **params):
    """Max residuals of the exact solution in the equation, on the boundary and initially."""
    problem = catalog(name, **params)
    rng = np.random.default_rng(seed)
    lo, hi = problem.domain.bounds
    margin = 0.01 * (hi - lo)
    x = rng.uniform(lo + margin, hi - margin, size=(n_points, problem.domain.dim))
    fld = fd_field(problem.exact, x)
    lhs = problem.interior_op.apply_field(fld)
    if problem.nonlinear is not None:
        lhs = lhs + problem.nonlinear(x, fld)
    scale = max(1.0, float(np.max(np.abs(problem.source(x)))))
    out = {"interior": float(np.max(np.abs(lhs - problem.source(x)))) / scale}
    colloc = sample_uniform_grid(problem.domain, (5,) * problem.domain.dim)
    xb = colloc.boundary
    out["boundary"] = float(np.max(np.abs(problem.boundary_data(xb) - problem.exact(xb))))
    if problem.initial:
        x0 = colloc.initial
        fld0 = fd_field(problem.exact, x0)
        out["initial"] = max(float(np.max(np.abs(ic.operator.apply_field(fld0) - ic.data(x0))))
                             for ic in problem.initial)
    return out


def _catalog_consistency():
    worst, where = 0.0, ""
    for name in problem_names():
        variants = [{"dim": d} for d in (5, 7)] if name == "poisson_hd" else [{}]
        for params in variants:
            for role, value in catalog_residuals(name, **params).items():
                if value > worst:
                    worst, where = value, f"{name} {role}"
    return _result("catalog self-consistency", worst, 1e-6, f"(worst: {where})")


def _degenerate_picard():
    heat = catalog("heat")
    frozen = replace(heat, nonlinear=lambda x, fld: np.zeros(len(x)))
    config = SolverConfig("tp-elm", 8, seed=2, grid=(9, 9, 9))
    lin = solve_linear(heat, config)
    pic = solve_nonlinear_picard(frozen, config)
    pts = lin.collocation.points
    diff = float(np.max(np.abs(evaluate(lin, pts) - evaluate(pic, pts))))
    detail = f"(Picard iterations {pic.picard.iterations}, converged {pic.picard.converged})"
    ok = pic.picard.iterations == 2 and pic.picard.converged
    res = _result("zero nonlinearity: Picard equals linear solve", diff, 1e-8, detail)
    res.passed = res.passed and ok
    return res


def property_checks() -> List[CheckResult]:
    return [
        _determinism(),
        _basis_count(),
        _span_reproduction(),
        _minimum_norm(),
        _manufactured(),
        _catalog_consistency(),
        _degenerate_picard(),
    ]


def run_all(n_cases: int = 100, seed: int = 0) -> List[CheckResult]:
    return derivative_checks(n_cases, seed) + property_checks()
