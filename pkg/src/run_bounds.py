"""
Ranking Bounds CLI
==================
One sub-command per job:

    lower-exact      solve the full lower LP, certify it, write files
    upper-exact      solve the full upper LP over every dominant pair
    upper-search     local search for an upper bound on a large grid
    lower-heuristic  local search over paths, then certification
    lower-certify    certify a stored or reference price grid
    verify           run a property suite
    tables           print collected table rows (optionally computing exact ones)

Exit codes: 0 ok, 1 property violation, 2 resource refusal, 3 backend failure.
"""

import argparse
import sys
import time
from pathlib import Path

# Add src to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from gamma.price_grid import exponential_price_grid
from gridpaths.grid_paths import GridDims
from lpcore.build_lower_lp import build_lower_lp
from lpcore.build_upper_lp import build_upper_lp
from lpcore.extract_price_grid import extract_price_grid
from lpcore.solve_lp import solve
from persist.solution_files import (
    SolutionFile,
    TableRow,
    append_table_rows,
    load_constraint_set,
    load_solution,
    pivot_table_rows,
    read_table_rows,
    save_solution,
    solution_path,
    write_iteration_csv,
)
from search.certify_lower import certify_lower_report
from search.local_search import SearchOptions, local_search_lower, local_search_upper
from search.warm_start import binding_set, initial_lower_set, project_set, warm_start, warm_start_ladder
from utils.config import (
    CERTIFY_PATH_BUDGET,
    CHECKPOINTS_SUBDIR,
    DEFAULT_SEED,
    REPAIR_TOLERANCE,
    RESULTS_DIR,
    SEARCH_ADD_THRESHOLD,
    SEARCH_CONVERGENCE_EPSILON,
    SEARCH_MAX_ITERATIONS,
    SEARCH_REMOVAL_SLACK,
    SOLUTIONS_SUBDIR,
    SOLVER_BACKENDS,
    TABLE_ROWS_FILE,
    TABLES_SUBDIR,
)
from utils.errors import (
    EXIT_BACKEND_FAILURE,
    EXIT_OK,
    EXIT_PROPERTY_VIOLATION,
    EXIT_RESOURCE_REFUSAL,
    CertificationBudgetError,
    InfeasiblePriceGridError,
    InvalidInstanceError,
    InvalidPathError,
    ModelTooLargeError,
    SearchError,
    SolverBackendError,
)
from validate.verify_properties import SUITE_CHOICES, run_suite

# |LP value - certificate| allowed for an exact lower solve
CERTIFY_AGREEMENT = REPAIR_TOLERANCE


# =============================================================================
# HELPERS
# =============================================================================

def _results(args) -> Path:
    return Path(args.results_dir) if args.results_dir else PROJECT_ROOT / RESULTS_DIR


def _provenance(args, backend=None, seconds=None) -> dict:
    return {"command": " ".join(sys.argv), "seed": getattr(args, "seed", None),
            "backend": backend, "seconds": seconds}


def _write_results(args, solution: SolutionFile, rows):
    root = _results(args)
    save_solution(solution, solution_path(root / SOLUTIONS_SUBDIR, solution.mode, solution.dims))
    append_table_rows(rows, root / TABLES_SUBDIR / TABLE_ROWS_FILE)


def _search_options(args, checkpoint_path=None) -> SearchOptions:
    return SearchOptions(
        convergence_epsilon=args.epsilon,
        add_threshold=args.add_threshold,
        removal_slack=args.removal_slack,
        max_iterations=args.max_iterations,
        iteration_time_budget=args.iteration_time,
        backend=args.backend,
        checkpoint_path=checkpoint_path,
    )


def _certified_row(grid, dims, budget, start) -> TableRow:
    """certified-lower, or uncertified-lower with the partial minimum when the budget runs out."""
    try:
        cert = certify_lower_report(grid, budget)
    except CertificationBudgetError as e:
        print(f"⚠️  {e}")
        return TableRow(dims.m, dims.n, max(0.0, min(1.0, e.partial_min)), "uncertified-lower",
                        time.time() - start)
    print(f"✅ Certified lower bound {cert.value:.6f} on {dims} "
          f"({cert.checked:,} paths, worst {cert.worst_path})")
    return TableRow(dims.m, dims.n, max(0.0, cert.value), "certified-lower", time.time() - start)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_lower_exact(args) -> int:
    dims = GridDims(args.m or args.n, args.n)
    start = time.time()
    problem = build_lower_lp(dims, dedupe_h=args.dedupe_h, force=args.force)
    sol = solve(problem, backend=args.backend)
    grid = extract_price_grid(sol, dims)

    cert = certify_lower_report(grid, args.budget)
    gap = abs(cert.value - sol.objective)
    if gap > CERTIFY_AGREEMENT:
        print(f"❌ LP value {sol.objective:.9f} and certificate {cert.value:.9f} differ by {gap:.2e}")
        return EXIT_PROPERTY_VIOLATION
    print(f"✅ Certificate agrees with the LP value ({gap:.1e})")

    S = binding_set(problem, sol)
    S.add(cert.worst_path)
    seconds = time.time() - start
    solution = SolutionFile("lower", dims, sol.objective, grid, S, "exact-lower",
                            _provenance(args, sol.backend, seconds))
    _write_results(args, solution, [TableRow(dims.m, dims.n, sol.objective, "exact-lower", seconds)])
    print(f"📊 lower bound on {dims}: {sol.objective:.6f}")
    return EXIT_OK


def cmd_upper_exact(args) -> int:
    dims = GridDims(args.m or args.n, args.n)
    start = time.time()
    problem = build_upper_lp(dims, force=args.force)
    sol = solve(problem, backend=args.backend)
    grid = extract_price_grid(sol, dims)
    seconds = time.time() - start
    solution = SolutionFile("upper", dims, sol.objective, grid, binding_set(problem, sol), "exact-upper",
                            _provenance(args, sol.backend, seconds))
    _write_results(args, solution, [TableRow(dims.m, dims.n, sol.objective, "exact-upper", seconds)])
    print(f"📊 upper bound on {dims}: {sol.objective:.6f}")
    return EXIT_OK


def _search_start(family: str, dims: GridDims, init, opts):
    """Start set on dims: as stored, doubled, projected, or from the ladder."""
    if init is None:
        return warm_start_ladder(family, dims, opts)
    S = load_constraint_set(init)
    if S.family != family:
        raise InvalidPathError(f"{init} holds a {S.family} set, expected {family}")
    if S.dims == dims:
        return S
    if S.dims.doubled() == dims:
        print(f"📊 Warm start: upscaling {len(S):,} members from {S.dims} to {dims}")
        return warm_start(S)
    print(f"📊 Warm start: projecting {len(S):,} members from {S.dims} to {dims}")
    return project_set(S, dims)


def _run_search(args, family: str, dims: GridDims, S0_factory, search):
    root = _results(args)
    checkpoint = root / CHECKPOINTS_SUBDIR / f"{family}_{dims.m}x{dims.n}.json"
    iterations_csv = root / TABLES_SUBDIR / f"iterations_{family}_{dims.m}x{dims.n}.csv"
    opts = _search_options(args, checkpoint)

    resume = checkpoint if args.resume else None
    if resume is not None and not checkpoint.exists():
        raise SearchError(f"no checkpoint at {checkpoint}")
    S0 = None if resume is not None else S0_factory(opts)
    try:
        report = search(dims, S0, opts, resume_from=resume)
    except SearchError as e:
        if e.history:
            write_iteration_csv(e.history, iterations_csv)
        raise
    write_iteration_csv(report.history, iterations_csv)
    if not report.converged:
        print(f"⚠️  Search stopped before convergence; Gamma* = {report.gamma:.6f} is still a valid {family} value")
    return report


def cmd_upper_search(args) -> int:
    dims = GridDims(args.m or args.n, args.n)
    start = time.time()
    report = _run_search(args, "upper", dims,
                         lambda opts: _search_start("upper", dims, args.init, opts), local_search_upper)
    seconds = time.time() - start
    solution = SolutionFile("upper", dims, report.gamma, report.grid, report.constraint_set, "search-upper",
                            _provenance(args, args.backend, seconds))
    _write_results(args, solution, [TableRow(dims.m, dims.n, report.gamma, "search-upper", seconds)])
    print(f"📊 upper bound on {dims}: {report.gamma:.6f} after {report.iterations} iterations, "
          f"|S| = {len(report.constraint_set):,}")
    return EXIT_OK


def cmd_lower_heuristic(args) -> int:
    dims = GridDims(args.m or args.n, args.n)
    start = time.time()
    def start_set(opts):
        if args.init:
            return _search_start("lower", dims, args.init, opts)
        return initial_lower_set(dims, opts)

    report = _run_search(args, "lower", dims, start_set, local_search_lower)
    heuristic_seconds = time.time() - start

    rows = [TableRow(dims.m, dims.n, report.gamma, "heuristic-lower", heuristic_seconds),
            _certified_row(report.grid, dims, args.budget, start)]
    solution = SolutionFile("lower", dims, report.gamma, report.grid, report.constraint_set, "heuristic-lower",
                            _provenance(args, args.backend, heuristic_seconds))
    _write_results(args, solution, rows)
    print(f"📊 heuristic lower value on {dims}: {report.gamma:.6f}, {rows[1].mode}: {rows[1].value:.6f}")
    return EXIT_OK


def cmd_lower_certify(args) -> int:
    start = time.time()
    if args.solution:
        grid = load_solution(args.solution).grid
    else:
        if not args.n:
            raise InvalidPathError("--reference exponential needs --n (and optionally --m)")
        grid = exponential_price_grid(GridDims(args.m or args.n, args.n))
    dims = grid.dims
    row = _certified_row(grid, dims, args.budget, start)
    append_table_rows([row], _results(args) / TABLES_SUBDIR / TABLE_ROWS_FILE)
    return EXIT_OK


def cmd_verify(args) -> int:
    ok = run_suite(args.suite, seed=args.seed, dump_dir=args.dump_dir)
    return EXIT_OK if ok else EXIT_PROPERTY_VIOLATION


def _parse_dims(text: str) -> GridDims:
    m, n = text.lower().split("x")
    return GridDims(int(m), int(n))


def cmd_tables(args) -> int:
    table_file = _results(args) / TABLES_SUBDIR / TABLE_ROWS_FILE
    dims_list = [_parse_dims(d) for d in args.dims] if args.dims else None

    for d in dims_list or []:
        for mode in args.compute or []:
            sub = argparse.Namespace(**vars(args), m=d.m, n=d.n, dedupe_h=False, budget=CERTIFY_PATH_BUDGET)
            code = COMPUTE[mode](sub)
            if code != EXIT_OK:
                return code

    if not table_file.exists():
        print(f"❌ No table rows at {table_file}")
        return EXIT_PROPERTY_VIOLATION
    print(f"📥 Reading {table_file}...")
    table = pivot_table_rows(read_table_rows(table_file), dims_list)
    print(table.to_string(float_format=lambda x: f"{x:.6f}", na_rep="-"))
    return EXIT_OK


COMPUTE = {"lower-exact": cmd_lower_exact, "upper-exact": cmd_upper_exact}


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=SOLVER_BACKENDS, default=None,
                        help="LP backend (default: RANKING_LP_SOLVER)")
    common.add_argument("--force", action="store_true", help="build models over the memory cap")
    common.add_argument("--results-dir", default=None, help="root for written files")

    dims = argparse.ArgumentParser(add_help=False)
    dims.add_argument("--m", type=int, help="stages")
    dims.add_argument("--n", type=int, required=True, help="ranks")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--init", default=None, help="solution, checkpoint or constraint-set JSON")
    search.add_argument("--resume", action="store_true", help="continue from this grid's checkpoint")
    search.add_argument("--epsilon", type=float, default=SEARCH_CONVERGENCE_EPSILON)
    search.add_argument("--add-threshold", type=float, default=SEARCH_ADD_THRESHOLD)
    search.add_argument("--removal-slack", type=float, default=SEARCH_REMOVAL_SLACK)
    search.add_argument("--max-iterations", type=int, default=SEARCH_MAX_ITERATIONS)
    search.add_argument("--iteration-time", type=float, default=None, help="seconds per LP solve")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--budget", type=int, default=CERTIFY_PATH_BUDGET, help="paths to enumerate")

    parser = argparse.ArgumentParser(description="Bounds on Ranking under independent random arrivals")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lower-exact", parents=[common, dims, budget])
    p.add_argument("--dedupe-h", action="store_true", help="share h variables between paths")
    p.set_defaults(func=cmd_lower_exact)

    p = sub.add_parser("upper-exact", parents=[common, dims])
    p.set_defaults(func=cmd_upper_exact)

    p = sub.add_parser("upper-search", parents=[common, dims, search])
    p.set_defaults(func=cmd_upper_search)

    p = sub.add_parser("lower-heuristic", parents=[common, dims, search, budget])
    p.set_defaults(func=cmd_lower_heuristic)

    p = sub.add_parser("lower-certify", parents=[common, budget])
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--solution", help="SolutionFile whose grid to certify")
    source.add_argument("--reference", choices=["exponential"], help="built-in price grid")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_lower_certify)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--suite", choices=SUITE_CHOICES, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--dump-dir", default=None, help="where counterexamples go")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tables", parents=[common])
    p.add_argument("--dims", nargs="*", help="grids as MxN, e.g. 1x1 2x2 1x100")
    p.add_argument("--compute", nargs="*", choices=sorted(COMPUTE), help="solve these modes first")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    print(f"🚀 {args.command}")
    print("=" * 50)
    try:
        return args.func(args)
    except ModelTooLargeError as e:
        print(f"❌ Refused: {e}")
        return EXIT_RESOURCE_REFUSAL
    except CertificationBudgetError as e:
        print(f"❌ Refused: {e}")
        return EXIT_RESOURCE_REFUSAL
    except (SolverBackendError, SearchError) as e:
        print(f"❌ Backend failure: {e}")
        return EXIT_BACKEND_FAILURE
    except (InvalidPathError, InfeasiblePriceGridError, InvalidInstanceError, ValueError) as e:
        print(f"❌ {e}")
        return EXIT_PROPERTY_VIOLATION


# =============================================================================
# MAIN
# =============================================================================

if __name__ == "__main__":
    sys.exit(main())
