"""``tpnet`` command line: ``solve``, ``sweep`` and ``check``.

Settings come from three layers, later ones winning: a ``key=value``
config file (``--config``), the ``TPNET_SEED`` environment variable (seed
only) and explicit flags.  Reports are CSV on stdout unless ``--out`` is
given.  Exit status is 0 on success, 1 if any cell failed (the CSV is still
written, with the ``error`` column filled in) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

from .bench import ExperimentConfig, run, run_cell, sweep_table
from .csvio import REPORT_COLUMNS, SWEEP_COLUMNS, write_report
from .errors import TPNetError
from .solvers import ARCHITECTURES, SolverConfig, parse_architecture

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
SEED_ENV = "TPNET_SEED"


class UsageError(Exception):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


# -- value parsers ----------------------------------------------------------------

def parse_int_list(text, field):
    """``"10,20,30"``, ``"10:100:10"`` (inclusive) or a mix of both."""
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        try:
            if ":" in part:
                bits = [int(b) for b in part.split(":")]
                if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] <= 0):
                    raise ValueError
                start, stop = bits[0], bits[1]
                step = bits[2] if len(bits) == 3 else 1
                out.extend(range(start, stop + 1, step))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(field, f"cannot parse {text!r} as an integer list") from None
    if not out:
        raise UsageError(field, "list is empty")
    return out


def parse_grid(text, field="grid"):
    parts = str(text).lower().replace("x", ",").split(",")
    try:
        grid = tuple(int(p) for p in parts if p.strip())
    except ValueError:
        raise UsageError(field, f"cannot parse {text!r}; use e.g. 101x101") from None
    if not grid or any(g < 2 for g in grid):
        raise UsageError(field, "need at least 2 points per axis")
    return grid


def parse_float(text, field):
    try:
        return float(text)
    except ValueError:
        raise UsageError(field, f"not a number: {text!r}") from None


def parse_int(text, field):
    try:
        return int(text)
    except ValueError:
        raise UsageError(field, f"not an integer: {text!r}") from None


def parse_rcond(text):
    if str(text).lower() in ("default", "none", ""):
        return None
    return parse_float(text, "rcond")


def parse_bool(text, field):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise UsageError(field, f"not a boolean: {text!r}")


def read_config_file(path):
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError("config", f"cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("config", f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


# -- argument parser ------------------------------------------------------------

_SOLVE_KEYS = (
    "problem", "arch", "p", "m", "seed", "seeds", "grid", "lhs", "init", "picard_kmax", "picard_eps",
    "btm_blocks", "rcond", "ridge", "driver", "row_scale", "normalize", "jobs", "out",
)
_SWEEP_KEYS = (
    "table", "scale", "seeds", "seed", "init", "picard_kmax", "picard_eps", "rcond", "ridge",
    "driver", "row_scale", "jobs", "out",
)


def _add_solver_flags(sp):
    sp.add_argument("--init", choices=("kaiming", "xavier"), help="weight initialisation (default: per problem)")
    sp.add_argument("--picard-kmax", dest="picard_kmax", help="maximum Picard iterations (default 100)")
    sp.add_argument("--picard-eps", dest="picard_eps", help="Picard increment tolerance (default 1e-16)")
    sp.add_argument("--rcond", help="relative singular value cutoff; 'default' means eps*max(N, M)")
    sp.add_argument("--ridge", help="Tikhonov parameter (default 0)")
    sp.add_argument("--driver", choices=("gelsd", "gelsy", "qr"), help="least-squares driver")
    sp.add_argument("--row-scale", dest="row_scale", help="scale equations to unit norm (true/false)")
    sp.add_argument("--jobs", help="cells solved in parallel (default 1)")
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--config", help="key=value file; flags override it")


def build_parser():
    parser = argparse.ArgumentParser(prog="tpnet", description="Tensor-product randomized-basis PDE solver")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve one problem for a list of widths and seeds")
    sp.add_argument("--problem", help="catalog problem, e.g. func2d, heat, poisson_hd_d5")
    sp.add_argument("--arch", help=f"one of {', '.join(ARCHITECTURES)}")
    sp.add_argument("--p", help="subnetwork widths: 40 | 10,20 | 10:100:10; for hlconc M = p^2")
    sp.add_argument("--m", help="basis counts M (perfect squares for tensor-product architectures)")
    sp.add_argument("--seed", help="single master seed")
    sp.add_argument("--seeds", help="seed list, e.g. 0,1,2 or 0:4")
    sp.add_argument("--grid", help="uniform grid per axis, e.g. 101x101 (per block with --btm-blocks)")
    sp.add_argument("--lhs", help="LHS interior,boundary counts, e.g. 10000,1000")
    sp.add_argument("--btm-blocks", dest="btm_blocks", help="time blocks for block time-marching (default 1)")
    sp.add_argument("--normalize", help="map inputs to [-1,1] before the subnetworks (true/false)")
    sp.add_argument("--save", help="write the fitted solution here (single cell only)")
    _add_solver_flags(sp)

    sw = sub.add_parser("sweep", help="regenerate one results table")
    sw.add_argument("--table", help="table id: 1, 2, 4, 5, 6, 7 or 8")
    sw.add_argument("--scale", choices=("desk", "full"), help="desk (default) or full")
    sw.add_argument("--seeds", help="seed list (default 0,1,2)")
    sw.add_argument("--seed", help="single seed")
    _add_solver_flags(sw)

    ck = sub.add_parser("check", help="run the derivative and property oracle suites")
    ck.add_argument("--cases", type=int, default=100, help="random cases per architecture (default 100)")
    ck.add_argument("--seed", type=int, default=0)
    return parser


def merge_settings(args, keys, environ=None):
    """Config file, then ``TPNET_SEED``, then flags."""
    environ = os.environ if environ is None else environ
    settings = {}
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
        unknown = sorted(set(settings) - set(keys) - {"config"})
        if unknown:
            raise UsageError(unknown[0], f"unknown key in {args.config}")
    env_seed = environ.get(SEED_ENV)
    if env_seed is not None and env_seed.strip():
        parse_int(env_seed, SEED_ENV)
        settings.pop("seeds", None)
        settings["seed"] = env_seed.strip()
    flags = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    if "seed" in flags or "seeds" in flags:
        settings.pop("seed", None)
        settings.pop("seeds", None)
    settings.update(flags)
    return settings


def _seeds(settings, default):
    if "seeds" in settings and "seed" in settings:
        raise UsageError("seeds", "give either --seed or --seeds, not both")
    if "seeds" in settings:
        return parse_int_list(settings["seeds"], "seeds")
    if "seed" in settings:
        return [parse_int(settings["seed"], "seed")]
    return list(default)


def _solver_overrides(settings):
    out = {}
    if "init" in settings:
        init = settings["init"].lower()
        if init not in ("kaiming", "xavier"):
            raise UsageError("init", f"unknown scheme {settings['init']!r}")
        out["init"] = init
    if "picard_kmax" in settings:
        out["picard_kmax"] = parse_int(settings["picard_kmax"], "picard_kmax")
    if "picard_eps" in settings:
        out["picard_eps"] = parse_float(settings["picard_eps"], "picard_eps")
    if "rcond" in settings:
        out["rcond"] = parse_rcond(settings["rcond"])
    if "ridge" in settings:
        out["ridge"] = parse_float(settings["ridge"], "ridge")
    if "driver" in settings:
        out["lstsq_driver"] = settings["driver"]
    if "row_scale" in settings:
        out["row_scale"] = parse_bool(settings["row_scale"], "row_scale")
    return out


def _widths(settings, arch):
    if "p" in settings and "m" in settings:
        raise UsageError("p", "give either --p or --m, not both")
    if "m" in settings:
        ms = parse_int_list(settings["m"], "m")
        if arch == "hlconc":
            return ms
        ps = []
        for m in ms:
            p = math.isqrt(m)
            if m < 1 or p * p != m:
                raise UsageError("m", f"M={m} is not a perfect square; tensor-product bases have M = p^2")
            ps.append(p)
        return ps
    ps = parse_int_list(settings.get("p", "40"), "p")
    if any(p < 1 for p in ps):
        raise UsageError("p", "widths must be positive")
    return [p * p for p in ps] if arch == "hlconc" else ps


def experiment_from_settings(settings) -> ExperimentConfig:
    if "problem" not in settings:
        raise UsageError("problem", "required")
    try:
        arch = parse_architecture(settings.get("arch", "tp-elm"))
    except TPNetError as exc:
        raise UsageError("arch", str(exc)) from None
    solver = _solver_overrides(settings)
    if "grid" in settings:
        solver["grid"] = parse_grid(settings["grid"])
    if "lhs" in settings:
        counts = parse_int_list(settings["lhs"], "lhs")
        if len(counts) != 2:
            raise UsageError("lhs", "expected interior,boundary")
        solver["lhs"] = tuple(counts)
    if "btm_blocks" in settings:
        solver["btm_blocks"] = parse_int(settings["btm_blocks"], "btm_blocks")
    if "normalize" in settings:
        solver["normalize_inputs"] = parse_bool(settings["normalize"], "normalize")
    widths = _widths(settings, arch)
    seeds = _seeds(settings, [0])
    try:
        base = SolverConfig(arch, widths[0], **solver)
    except TPNetError as exc:
        raise UsageError(_field_of(exc), str(exc)) from None
    try:
        return ExperimentConfig(settings["problem"], arch, widths, seeds, base)
    except TPNetError as exc:
        raise UsageError("problem", str(exc)) from None


def _field_of(exc):
    # SolverConfig messages start with the offending field name
    first = str(exc).split(" ", 1)[0]
    return first if first in _SOLVE_KEYS else "config"


def _jobs(settings):
    jobs = parse_int(settings.get("jobs", "1"), "jobs")
    if jobs < 1:
        raise UsageError("jobs", "must be at least 1")
    return jobs


def _emit(rows, columns, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_report(rows, fh, columns)
    else:
        write_report(rows, sys.stdout, columns)
        sys.stdout.flush()
    failed = [r for r in rows if r.get("error")]
    for r in failed:
        print(f"tpnet: cell {r['problem']} {r['arch']} M={r['M']} seed={r['seed']} failed: {r['error']}",
              file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_solve(args, environ=None):
    settings = merge_settings(args, _SOLVE_KEYS, environ)
    config = experiment_from_settings(settings)
    jobs = _jobs(settings)
    if args.save:
        if len(config.cells()) != 1:
            raise UsageError("save", "needs exactly one width and one seed")
        rows = [run_cell(config.problem, config.cells()[0], config.problem_params, args.save)]
    else:
        rows = run(config, jobs)
    return _emit(rows, REPORT_COLUMNS, settings.get("out"))


def cmd_sweep(args, environ=None):
    settings = merge_settings(args, _SWEEP_KEYS, environ)
    if "table" not in settings:
        raise UsageError("table", "required")
    table = parse_int(settings["table"], "table")
    scale = settings.get("scale", "desk")
    if scale not in ("desk", "full"):
        raise UsageError("scale", f"expected desk or full, got {scale!r}")
    seeds = _seeds(settings, (0, 1, 2))
    overrides = _solver_overrides(settings)
    try:
        rows = sweep_table(table, scale, seeds, _jobs(settings), overrides)
    except TPNetError as exc:
        raise UsageError("table", str(exc)) from None
    return _emit(rows, SWEEP_COLUMNS, settings.get("out"))


def cmd_check(args, environ=None):
    from .checks import run_all

    results = run_all(args.cases, args.seed)
    for r in results:
        print(r.line())
    n_failed = sum(not r.passed for r in results)
    print(f"{len(results) - n_failed}/{len(results)} checks passed")
    return EXIT_OK if n_failed == 0 else EXIT_FAILED


def main(argv=None, environ=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"solve": cmd_solve, "sweep": cmd_sweep, "check": cmd_check}[args.command]
    try:
        return handler(args, environ)
    except UsageError as exc:
        print(f"tpnet {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
