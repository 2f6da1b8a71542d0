"""Command-line front end.

Exit status: 0 success, 2 unreadable or malformed input, 3 invalid
arguments, 4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .core import (
    InvariantError,
    MatrixMarketError,
    Permutation,
    PermutationError,
    load_matrix_market,
    num_diagonals,
    read_permutations,
    write_matrix_market,
    write_permutations,
)
from .elimination import CostModel, select_and_plan
from .emulator import estimate_time, permuted_pipeline
from .exact import DEFAULT_LIMIT, exact_cbs2d, export_ilp
from .harness import HarnessConfig, Variant, LEVEL_NAMES, discover, leaderboard, run_batch, worker_count
from .optimizer import OptimizerConfig, write_trace
from .orderings import ORDERINGS
from .pipeline import GRAPH_ORDERINGS, OPT_LEVELS, SYMMETRIZATIONS, Pipeline, best_of
from .synth import SynthSpec, chebyshev_like, generate, write_instance

log = logging.getLogger("diagpack")

EXIT_IO, EXIT_VALIDATION, EXIT_INVARIANT = 2, 3, 4
TIMING_FIELDS = ("elapsed_s",)


class UsageError(ValueError):
    pass


def _dump(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _out_dir(args) -> str:
    d = args.out or "."
    os.makedirs(d, exist_ok=True)
    return d


# ---------------------------------------------------------------------------
# argument groups
# ---------------------------------------------------------------------------


def _add_selection(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ordering", default="rcm", choices=ORDERINGS + ("all",))
    p.add_argument("--sym", default="pattern", choices=SYMMETRIZATIONS + ("both",))
    p.add_argument("--all-orderings", action="store_true", help="shorthand for --ordering all --sym both")
    p.add_argument("--nev", type=int, default=50, help="eigenvectors for the spectral ordering")
    p.add_argument("--seed", type=int, default=0)


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--opt", default="3opt", choices=OPT_LEVELS)
    p.add_argument("--budget", type=float, default=3600.0, help="seconds per optimization run")
    p.add_argument("--beta", type=int, default=3, help="candidate-queue slack")
    p.add_argument("--gamma", type=int, default=100, help="maximum number of passes")


def _add_cost(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tcmult", type=float, default=CostModel.t_cmult)
    p.add_argument("--trot", type=float, default=CostModel.t_rot)
    p.add_argument("--slots", type=int, default=CostModel.slots)


def _cost(args) -> CostModel:
    return CostModel(t_cmult=args.tcmult, t_rot=args.trot, slots=args.slots)


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(max_passes=args.gamma, slack=args.beta, time_budget=args.budget, seed=args.seed)


def _pipelines(args, opt: str) -> list:
    orderings = [args.ordering]
    syms = [args.sym]
    if args.all_orderings or args.ordering == "all":
        orderings = ["natural"] + list(GRAPH_ORDERINGS)
    if args.all_orderings or args.sym == "both":
        syms = list(SYMMETRIZATIONS)
    cfg = _optimizer_config(args) if opt != "none" else OptimizerConfig()
    out = []
    for o in orderings:
        for s in (["pattern"] if o == "natural" else syms):
            out.append(Pipeline(o, s, opt, cfg, args.nev, args.seed))
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_order(args) -> int:
    A = load_matrix_market(args.matrix)
    best, results = best_of(A, _pipelines(args, "none"))
    out = _out_dir(args)
    perm = os.path.join(out, _stem(args.matrix) + ".perm")
    write_permutations(best.pr, best.pc, perm)
    _dump({
        "ordering": best.ordering, "sym": best.sym, "num_diags": best.final_diags,
        "natural_diags": num_diagonals(A), "lower_bound": A.max_degree(), "permutation_file": perm,
    })
    return 0


def cmd_optimize(args) -> int:
    A = load_matrix_market(args.matrix)
    cm = _cost(args)
    best, results = best_of(A, _pipelines(args, args.opt))
    out = _out_dir(args)
    stem = _stem(args.matrix)
    plan = None
    if args.eliminate:
        full = best_pipeline(args, best)
        plan = select_and_plan(A, cm, full.with_budget(min(args.budget, 60.0)), final_optimize=full)
        if not plan.profitable:
            plan = None
    res = best if plan is None else plan.core_result
    init = num_diagonals(A)
    final = res.final_diags
    write_permutations(res.pr, res.pc, os.path.join(out, stem + ".perm"))
    write_trace(res.trace, os.path.join(out, stem + ".trace.jsonl"))
    summary = {
        "matrix": os.path.basename(args.matrix),
        "n": A.n,
        "nnz": A.nnz,
        "lower_bound": A.max_degree(),
        "ordering": best.ordering,
        "sym": best.sym,
        "opt": args.opt,
        "init_diags": init,
        "ordered_diags": best.init_diags,
        "final_diags": final,
        "reduction_factor": round(init / final, 4) if final else None,
        "estimated_spmv_us": round(estimate_time(final, A.n, cm, plan), 3),
        "elimination": plan.to_json() if plan is not None else None,
        "singletons": [
            {"ordering": r.ordering, "sym": r.sym, "init_diags": r.init_diags, "final_diags": r.final_diags}
            for r in results
        ],
        "elapsed_s": round(sum(r.elapsed_s for r in results), 3),
    }
    _dump(summary, os.path.join(out, stem + ".summary.json"))
    return 0


def best_pipeline(args, best) -> Pipeline:
    return Pipeline(best.ordering, best.sym, args.opt, _optimizer_config(args), args.nev, args.seed)


def cmd_eliminate(args) -> int:
    A = load_matrix_market(args.matrix)
    cm = _cost(args)
    orderings = _pipelines(args, args.opt)
    if len(orderings) != 1:
        raise UsageError("eliminate takes a single --ordering/--sym pair")
    inner = orderings[0].with_budget(min(args.budget, 60.0))
    plan = select_and_plan(A, cm, inner, patience=args.patience,
                           final_optimize=orderings[0])
    out = _out_dir(args)
    _dump(plan.to_json(), os.path.join(out, _stem(args.matrix) + ".plan.json"))
    return 0


def cmd_exact(args) -> int:
    A = load_matrix_market(args.matrix)
    if args.ilp:
        export_ilp(A, args.ilp)
    if A.n > args.limit:
        raise UsageError(f"n={A.n} exceeds --limit {args.limit}")
    res = exact_cbs2d(A, args.limit, "brute-force" if args.brute_force else "branch-and-bound")
    _dump(res.to_json(), args.json)
    return 0


def cmd_synth(args) -> int:
    out = _out_dir(args)
    if args.chebyshev:
        A = chebyshev_like(args.n or 261, args.dense_rows, seed=args.scramble_seed)
        path = os.path.join(out, f"cheb_n{A.n}_r{args.dense_rows}.mtx")
        write_matrix_market(A, path, comment="circulant core with full leading rows")
        _dump({"matrix_file": path, "n": A.n, "nnz": A.nnz})
        return 0
    spec = SynthSpec(args.n or 1000, args.ell, args.noise, args.seed)
    inst = generate(spec)
    meta = write_instance(inst, spec, out)
    _dump(meta)
    return 0


def cmd_verify(args) -> int:
    A = load_matrix_market(args.matrix, mode="valued")
    if args.perm:
        pr, pc = read_permutations(args.perm)
        if pr.n != A.n:
            raise UsageError("permutation size does not match the matrix")
    else:
        pr = pc = Permutation.identity(A.n)
    rng = np.random.default_rng(args.seed)
    x = rng.standard_normal(A.n)
    y, ops = permuted_pipeline(A, pr, pc, x)
    ref = A.to_scipy() @ x
    err = float(np.max(np.abs(y - ref))) if A.n else 0.0
    _dump({
        "max_abs_err": err,
        "ops": ops.to_json(),
        "estimated_us": round(estimate_time(ops.mults, A.n, _cost(args)), 3),
    })
    return 0


def cmd_bench(args) -> int:
    paths = discover(args.source)
    if not paths:
        raise UsageError(f"no .mtx files found in {args.source}")
    cfg = HarnessConfig(optimizer=_optimizer_config(args), nev=args.nev, cost=_cost(args))
    variants = None
    if not (args.ordering == "all" or args.all_orderings):
        syms = list(SYMMETRIZATIONS) if args.sym == "both" else [args.sym]
        variants = [Variant("-", "natural", lv) for lv in LEVEL_NAMES.values()]
        if args.ordering != "natural":
            variants += [Variant(s, args.ordering, lv) for s in syms for lv in LEVEL_NAMES.values()]
    results = run_batch(paths, _out_dir(args), variants, cfg, force=args.force,
                        workers=args.threads or worker_count())
    board = leaderboard(results)
    for row in board:
        log.info("%-22s wins=%d rank=%.2f", row.variant, row.wins, row.avg_rank)
    _dump({"matrices": len(paths), "results": len(results), "out": os.path.abspath(_out_dir(args))})
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diagpack", description="Reorder sparse matrices into few cyclic diagonals.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("order", help="compute an initial ordering")
    p.add_argument("matrix")
    p.add_argument("--out", help="output directory")
    _add_selection(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("optimize", help="ordering followed by local search")
    p.add_argument("matrix")
    p.add_argument("--out", help="output directory")
    p.add_argument("--eliminate", action="store_true", help="try dense row/column elimination")
    _add_selection(p)
    _add_search(p)
    _add_cost(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("eliminate", help="plan dense row/column elimination")
    p.add_argument("matrix")
    p.add_argument("--out", help="output directory")
    p.add_argument("--patience", type=int, default=10)
    _add_selection(p)
    _add_search(p)
    _add_cost(p)
    p.set_defaults(func=cmd_eliminate)

    p = sub.add_parser("exact", help="optimal diagonal count for a small matrix")
    p.add_argument("matrix")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--ilp", help="also write the LP-format model here")
    p.add_argument("--json", help="also write the result here")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("synth", help="generate a synthetic instance")
    p.add_argument("--n", type=int, default=None, help="order (1000, or 261 with --chebyshev)")
    p.add_argument("--ell", type=int, default=10)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chebyshev", action="store_true", help="circulant core under full leading rows")
    p.add_argument("--dense-rows", type=int, default=4)
    p.add_argument("--scramble-seed", type=int, default=None)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check the diagonal-wise product against a direct one")
    p.add_argument("matrix")
    p.add_argument("--perm", help="permutation file")
    p.add_argument("--seed", type=int, default=0)
    _add_cost(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="evaluate variants over a directory or manifest")
    p.add_argument("source")
    p.add_argument("--out", default="bench_out")
    p.add_argument("--force", action="store_true", help="recompute finished results")
    p.add_argument("--threads", type=int, default=None)
    _add_selection(p)
    _add_search(p)
    _add_cost(p)
    p.set_defaults(func=cmd_bench, ordering="all", sym="both", budget=60.0)
    return ap


def _validate(args) -> None:
    for name in ("budget",):
        if hasattr(args, name) and not getattr(args, name) > 0:
            raise UsageError(f"--{name} must be positive")
    for name in ("beta",):
        if hasattr(args, name) and getattr(args, name) < 0:
            raise UsageError(f"--{name} must be >= 0")
    for name in ("gamma", "patience", "limit"):
        if hasattr(args, name) and getattr(args, name) < 1:
            raise UsageError(f"--{name} must be >= 1")
    if hasattr(args, "nev") and args.nev < 2:
        raise UsageError("--nev must be >= 2")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        _validate(args)
        return args.func(args)
    except (OSError, MatrixMarketError, PermutationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
