import warnings

import numpy as np
import pytest

from tpnet.checks import MonomialBasis
from tpnet.errors import BlockFailure, DomainError, InputError, InvalidSpecError
from tpnet.lstsq import solve_lstsq
from tpnet.operators import d2, identity
from tpnet.problems import PdeProblem, assemble_linear_system, catalog
from tpnet.sampling import Domain, sample_uniform_grid
from tpnet.solvers import (
    ErrorReport,
    Solution,
    SolverConfig,
    block_seed,
    block_time_march,
    compute_errors,
    default_eval_points,
    error_metrics,
    evaluate,
    initial_coefficients,
    load_solution,
    parse_architecture,
    picard_iterate,
    save_solution,
    solution_from_bytes,
    solution_to_bytes,
    solve,
    solve_linear,
    solve_nonlinear_picard,
)


def zero(x):
    return np.zeros(len(x))


def test_config_validation():
    with pytest.raises(InvalidSpecError):
        SolverConfig(picard_kmax=0)
    with pytest.raises(InvalidSpecError):
        SolverConfig(picard_eps=0)
    with pytest.raises(InvalidSpecError):
        SolverConfig(btm_blocks=0)
    with pytest.raises(InvalidSpecError):
        SolverConfig("cnn")
    assert parse_architecture("ResNet") == "tp-resnet"
    assert SolverConfig("hlconc", 400).n_basis == 400
    assert SolverConfig("tp-mlp", 20).n_basis == 400
    cfg = SolverConfig("tp-elm", 7, grid=[5, 5], lhs=(10, 4))
    assert SolverConfig.from_dict(cfg.to_dict()) == cfg


def test_zero_problem():
    problem = PdeProblem("zero", Domain((0, 0), (1, 1)), d2(0) + d2(1), identity(), zero, zero, exact=zero)
    sol = solve_linear(problem, SolverConfig("tp-elm", 5, grid=(6, 6)))
    assert np.all(sol.coefficients == 0)
    assert sol.residual_norm == 0
    assert compute_errors(sol, problem).l_inf == 0


def test_1d_poisson_with_polynomial_basis():
    # -u'' = 2 on (-1, 1), u(+-1) = 0  =>  u = 1 - x^2
    def u(x):
        return 1 - x[:, 0] ** 2

    problem = PdeProblem("poisson1d", Domain((-1,), (1,)), -1.0 * d2(0), identity(),
                         lambda x: np.full(len(x), 2.0), u, exact=u)
    basis = MonomialBasis([(0,), (1,), (2,)])
    colloc = sample_uniform_grid(problem.domain, [11])
    s = assemble_linear_system(problem, basis, colloc)
    lsq = solve_lstsq(s.A, s.F)
    sol = Solution("poisson1d", SolverConfig(), basis, lsq.coefficients, lsq, collocation=colloc)
    assert compute_errors(sol, problem).l_inf <= 1e-12


def test_scalar_picard_sequence():
    # A = [1], f = 1, N[u] = u / 2  =>  w_{k+1} = 1 - w_k / 2  ->  2/3
    seq = [0.0]
    for _ in range(60):
        seq.append(1 - seq[-1] / 2)
    w, info = picard_iterate(lambda F: F.copy(), lambda w: 1 - w / 2, np.array([0.0]), kmax=200, eps=1e-15)
    assert w[0] == pytest.approx(2 / 3, abs=1e-15)
    assert info.converged
    expected_increments = np.abs(np.diff(seq))[:info.iterations]
    np.testing.assert_allclose(info.increments, expected_increments, rtol=1e-12, atol=1e-17)


def test_picard_warning_on_non_convergence():
    with pytest.warns(RuntimeWarning, match="did not converge"):
        _, info = picard_iterate(lambda F: F, lambda w: 1 - w / 2, np.array([0.0]), kmax=3, eps=1e-16)
    assert not info.converged and info.iterations == 3 and "2.500e-01" in info.warning


def test_degenerate_nonlinearity_matches_linear_solve():
    heat = catalog("heat")
    frozen = PdeProblem(**{**heat.__dict__, "nonlinear": lambda x, f: np.zeros(len(x))})
    cfg = SolverConfig("tp-elm", 8, seed=1, grid=(9, 9, 9))
    lin = solve_linear(heat, cfg)
    pic = solve_nonlinear_picard(frozen, cfg)
    assert pic.picard.iterations == 2 and pic.picard.converged
    assert pic.picard.increments[-1] == 0.0
    pts = lin.collocation.points
    np.testing.assert_allclose(evaluate(pic, pts), evaluate(lin, pts), atol=1e-9)


def test_solver_dispatch_errors():
    with pytest.raises(InvalidSpecError):
        solve_linear(catalog("burgers"), SolverConfig(p=3, grid=(4, 4, 4)))
    with pytest.raises(InvalidSpecError):
        solve_nonlinear_picard(catalog("heat"), SolverConfig(p=3, grid=(4, 4, 4)))
    with pytest.raises(InvalidSpecError):
        block_time_march(catalog("func2d"), SolverConfig(p=3, btm_blocks=2))


def test_small_burgers_picard():
    problem = catalog("burgers")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sol = solve(problem, SolverConfig("tp-elm", 10, grid=(11, 11, 11), picard_kmax=30))
    info = sol.picard
    tail = info.increments[-3:]
    assert info.converged or info.warning is not None
    assert info.converged or all(b <= a * (1 + 1e-9) for a, b in zip(tail, tail[1:])) or info.warning
    assert compute_errors(sol, problem).l_inf < 1e-4


def test_initial_coefficients_rules():
    w = initial_coefficients(10000, "xavier", 3)
    bound = np.sqrt(6 / 10001)
    assert np.all(np.abs(w) <= bound) and abs(w.var() / (bound ** 2 / 3) - 1) < 0.05
    assert np.array_equal(w, initial_coefficients(10000, "xavier", 3))
    k = initial_coefficients(10000, "kaiming", 3)
    assert abs(k.var() / (2 / 10000) - 1) < 0.05


def test_single_block_equals_linear_solve():
    problem = catalog("heat")
    cfg = SolverConfig("tp-elm", 6, seed=4, grid=(7, 7, 7))
    one = block_time_march(problem, cfg)
    lin = solve_linear(problem, cfg)
    assert len(one.blocks) == 1
    assert one.blocks[0].solution.coefficients.tobytes() == lin.coefficients.tobytes()


def test_block_seeds():
    assert block_seed(7, 0) == 7
    seeds = {block_seed(7, k) for k in range(10)}
    assert len(seeds) == 10
    assert block_seed(7, 3) == block_seed(7, 3)


def _two_block_heat():
    problem = catalog("heat")
    sol = block_time_march(problem, SolverConfig("tp-elm", 12, seed=0, grid=(9, 9, 9), btm_blocks=2))
    return problem, sol


def test_block_continuity_bookkeeping():
    problem, sol = _two_block_heat()
    first, second = sol.blocks[0].solution, sol.blocks[1].solution
    assert sol.blocks[0].t_end == sol.blocks[1].t_start == 0.5
    x0 = second.collocation.initial
    initial_residual = np.max(np.abs(evaluate(second, x0) - evaluate(first, x0)))
    # the continuity gap at the grid points is exactly the initial-row residual
    fld = second.basis.field(second.coefficients, x0).value
    np.testing.assert_allclose(fld, evaluate(second, x0), rtol=0, atol=0)
    rng = np.random.default_rng(0)
    xr = np.column_stack([rng.uniform(0, 1, 100), rng.uniform(0, 1, 100), np.full(100, 0.5)])
    gap = np.abs(first.basis.field(first.coefficients, xr).value - fld_at(second, xr))
    assert np.max(gap) <= 10 * initial_residual + 1e-8


def fld_at(sol, x):
    return sol.basis.field(sol.coefficients, x).value


def test_blocked_routing():
    problem, sol = _two_block_heat()
    x = np.array([[0.3, 0.4, 0.0], [0.3, 0.4, 0.5], [0.3, 0.4, 0.5 + 1e-9], [0.3, 0.4, 1.0]])
    b0, b1 = sol.blocks[0].solution, sol.blocks[1].solution
    out = evaluate(sol, x)
    expected = [fld_at(b0, x[:2]), fld_at(b1, x[2:])]  # t_k belongs to the earlier block
    np.testing.assert_allclose(out, np.concatenate(expected), rtol=1e-13)
    assert abs(out[1] - fld_at(b1, x[1:2])[0]) > 1e-12
    with pytest.raises(DomainError):
        evaluate(sol, np.array([[0.3, 0.4, 1.5]]))
    pts = default_eval_points(sol)
    assert len(pts) == len(np.unique(pts, axis=0))
    assert compute_errors(sol, problem).l_inf < 1e-3


def test_block_failure_reports_index():
    heat = catalog("heat")

    def source(x):
        out = heat.source(x)
        out[x[:, 2] > 0.75] = np.nan
        return out

    bad = PdeProblem(**{**heat.__dict__, "source": source})
    with pytest.raises(BlockFailure) as info:
        block_time_march(bad, SolverConfig("tp-elm", 4, grid=(5, 5, 5), btm_blocks=4))
    assert info.value.block_index == 3


def test_evaluate_one_hot_and_zero():
    problem = catalog("func2d")
    sol = solve_linear(problem, SolverConfig("tp-mlp", 4, grid=(6, 6)))
    x = np.random.default_rng(1).uniform(-1, 1, (9, 2))
    phi = sol.basis.values(x)
    for j in (0, 5, 15):
        e = np.zeros(16)
        e[j] = 1
        sol.coefficients = e
        np.testing.assert_array_equal(evaluate(sol, x), phi[:, j])
    sol.coefficients = np.zeros(16)
    assert np.all(evaluate(sol, x) == 0)
    w = np.random.default_rng(2).standard_normal(16)
    sol.coefficients = w
    naive = np.array([sum(phi[k, j] * w[j] for j in range(16)) for k in range(9)])
    np.testing.assert_allclose(evaluate(sol, x), naive, rtol=1e-14, atol=1e-14)


def test_error_metrics():
    assert error_metrics([1, 2, 3], [1, 2, 3]) == (0.0, 0.0)
    assert error_metrics(np.ones(4) + 1, np.ones(4)) == (1.0, 2.0)


def test_metrics_against_independent_script():
    problem = catalog("helmholtz2d")
    sol = solve_linear(problem, SolverConfig("tp-mlp", 12, seed=2, grid=(31, 31)))
    report = compute_errors(sol, problem)
    pts = sol.collocation.points
    diff = evaluate(sol, pts) - np.sin(np.pi * pts[:, 0]) * np.sin(4 * np.pi * pts[:, 1])
    assert report.l_inf == pytest.approx(np.abs(diff).max(), rel=1e-14)
    assert report.l_2 == pytest.approx(np.sqrt((diff ** 2).sum()), rel=1e-14)
    assert report.l_2 >= report.l_inf >= 0
    assert report.n_eval == 31 * 31


def test_training_points_reproduce_residual():
    problem = catalog("helmholtz2d")
    sol = solve_linear(problem, SolverConfig("tp-elm", 10, grid=(21, 21)))
    s = assemble_linear_system(problem, sol.basis, sol.collocation)
    assert np.linalg.norm(s.A @ sol.coefficients - s.F) == pytest.approx(sol.residual_norm, rel=1e-10)


def test_errors_need_exact_and_points():
    problem = PdeProblem("noexact", Domain((0,), (1,)), identity(), identity(), zero, zero)
    sol = solve_linear(problem, SolverConfig("tp-elm", 2, grid=[5]))
    with pytest.raises(InputError):
        compute_errors(sol, problem)
    loaded = solution_from_bytes(solution_to_bytes(sol))
    with pytest.raises(InputError):
        default_eval_points(loaded)


def test_reproducible_error_report():
    problem = catalog("func2d")
    cfg = SolverConfig("tp-resnet", 8, seed=9, grid=(21, 21))
    a = compute_errors(solve(problem, cfg), problem)
    b = compute_errors(solve(problem, cfg), problem)
    assert (a.l_inf, a.l_2) == (b.l_inf, b.l_2)


def test_error_decreases_with_basis_size():
    problem = catalog("func2d")

    def median(p):
        return np.median([compute_errors(solve(problem, SolverConfig("tp-elm", p, seed=s)), problem).l_inf
                          for s in range(5)])

    assert median(40) * 100 <= median(10)


def test_hlconc_baseline_parity():
    problem = catalog("func2d")
    sol = solve(problem, SolverConfig("hlconc", 400, seed=0))
    assert compute_errors(sol, problem).l_inf <= 1e-2


@pytest.mark.parametrize("blocked", [False, True])
def test_solution_round_trip(tmp_path, blocked):
    if blocked:
        problem, sol = _two_block_heat()
    else:
        problem = catalog("func2d")
        sol = solve(problem, SolverConfig("tp-resnet", 5, seed=3, grid=(11, 11)))
    path = tmp_path / "sol.tpsol"
    save_solution(sol, path)
    back = load_solution(path)
    x = default_eval_points(sol)
    assert evaluate(back, x).tobytes() == evaluate(sol, x).tobytes()
    assert back.config == sol.config
    assert back.effective_rank == sol.effective_rank
    assert back.residual_norm == sol.residual_norm
    with pytest.raises(InputError):
        solution_from_bytes(b"garbage")


def test_hlconc_and_normalized_round_trip():
    problem = catalog("diffusion", t_final=1.0)
    sol = solve(problem, SolverConfig("hlconc", 20, grid=(6, 6)))
    back = solution_from_bytes(solution_to_bytes(sol))
    x = default_eval_points(sol)
    np.testing.assert_array_equal(evaluate(back, x), evaluate(sol, x))
    assert isinstance(compute_errors(back, problem, x), ErrorReport)
