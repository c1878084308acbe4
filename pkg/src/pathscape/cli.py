"""Command-line entry point.

Every invocation emits one JSON record per result line on stdout
(`--csv PATH` mirrors the same records to a CSV file).  Records carry
the full parameter set, master seed, and RNG stream construction tag,
so any stochastic line can be reproduced bit-exactly from the record
alone; only the wall-time field varies between identical reruns.

Exit codes: 0 success, 1 failed verification checks, 2 parameter
errors, 3 budget exhaustion.  Errors are mirrored as JSON on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__, cascade, hypercube, mc, moments, recursion, stats, tree, verify
from .parallel import ENV_THREADS
from .rng import PHILOX_TAG, SPLITMIX_TAG, derive_seed

DEFAULT_SEED = verify.DEFAULT_SEED

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARAMS = 2
EXIT_BUDGET = 3


@dataclass(frozen=True)
class ExperimentRecord:
    """One emitted result row."""

    command: str
    params: dict
    seed: int | None
    rng: str | None
    stats: dict
    wall_time_s: float
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


class _Parser(argparse.ArgumentParser):
    """argparse with machine-readable errors and exit code 2."""

    def error(self, message):
        print(json.dumps({"error": "parameters", "message": message}), file=sys.stderr)
        raise SystemExit(EXIT_PARAMS)


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, (list, tuple)):
        out[prefix] = json.dumps(obj, default=_jsonable)
    else:
        out[prefix] = obj


def _write_csv(path: str, records: list[ExperimentRecord]) -> None:
    rows = []
    columns: list[str] = []
    for rec in records:
        flat: dict = {}
        _flatten("", asdict(rec), flat)
        for key in flat:
            if key not in columns:
                columns.append(key)
        rows.append(flat)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


# --- root-value regime flags -----------------------------------------------


def _add_x_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--x", type=float, default=None, help="origin/root value in [0, 1]")
    g.add_argument(
        "--X-scaled", dest="x_scaled", type=float, default=None,
        help="X with x = X/dim",
    )
    g.add_argument(
        "--logscaled", type=float, default=None,
        help="X with x = (ln dim + X)/dim",
    )


def _resolve_x(args) -> tuple[float, str]:
    if args.x_scaled is not None:
        return args.x_scaled / args.dim, "x=X/L"
    if args.logscaled is not None:
        return (math.log(args.dim) + args.logscaled) / args.dim, "x=(lnL+X)/L"
    return (args.x if args.x is not None else 0.0), "x"


def _summary(values) -> dict:
    s = stats.moment_summary(stats.Sample.from_values(values))
    return {
        "n": s.n,
        "mean": s.mean,
        "variance": s.variance,
        "mean_stderr": s.mean_stderr,
        "variance_stderr": s.variance_stderr,
    }


# --- subcommand handlers; each returns (stats dict, rng tag or None) --------


def _cmd_hypercube(args):
    x, regime = _resolve_x(args)
    if args.action == "count":
        if args.samples == 1:
            land = hypercube.generate_hypercube(args.dim, x, args.seed)
            return {"theta": hypercube.count_open_paths(land)}, PHILOX_TAG
        thetas = mc.hypercube_theta_batch(
            args.dim, x, args.seed, args.samples, threads=args.threads
        )
        return _summary(thetas.astype(float)), PHILOX_TAG
    if args.action == "exists":
        hits = 0
        for r in range(args.samples):
            land = hypercube.generate_hypercube(args.dim, x, args.seed, replica=r)
            hits += bool(hypercube.path_exists(land))
        if args.samples == 1:
            return {"exists": bool(hits)}, PHILOX_TAG
        p = hits / args.samples
        se = math.sqrt(p * (1.0 - p) / args.samples)
        return {"estimate": p, "stderr": se, "n": args.samples}, PHILOX_TAG
    # thetak
    vals = mc.hypercube_theta_k_batch(
        args.dim, x, args.k, args.seed, args.samples,
        factorized=args.factorized, threads=args.threads,
    )
    out = _summary(vals) if args.samples > 1 else {"theta_k": float(vals[0])}
    out["k"] = args.k
    return out, PHILOX_TAG


def _cmd_tree(args):
    x, regime = _resolve_x(args)
    if args.action == "sample":
        thetas = mc.tree_theta_batch(
            args.dim, x, args.seed, args.samples, budget=args.budget, threads=args.threads
        )
        if args.samples == 1:
            return {"theta": int(thetas[0])}, SPLITMIX_TAG
        return _summary(thetas.astype(float)), SPLITMIX_TAG
    if args.action == "thetak":
        vals = mc.tree_theta_k_batch(
            args.dim, x, args.k, args.seed, args.samples,
            budget=args.budget, threads=args.threads,
        )
        out = _summary(vals) if args.samples > 1 else {"theta_k": float(vals[0])}
        out["k"] = args.k
        return out, SPLITMIX_TAG
    # exists
    est = tree.tree_existence_mc(args.dim, x, args.samples, args.seed, args.budget)
    return asdict(est), SPLITMIX_TAG


def _cmd_moments(args):
    a = args.action
    if a == "first":
        x, _ = _resolve_x(args)
        return {"mean": moments.expected_paths(args.dim, x)}, None
    if a == "second":
        x, _ = _resolve_x(args)
        return {"second_moment": moments.second_moment_tree(args.dim, x)}, None
    if a == "var-star":
        v = moments.var_star_tree(args.dim)
        return {"var_star": v, "var_star_over_L": v / args.dim}, None
    if a == "cond-var":
        x, _ = _resolve_x(args)
        v = moments.cond_var_tree(args.dim, x, args.k)
        return {"cond_var": v, "cond_var_over_L2": v / args.dim**2, "k": args.k}, None
    if a == "limits":
        if args.logscaled is not None:
            sm = moments.scaled_limits(args.dim, args.logscaled, moments.REGIME_LOG_OVER_L)
        elif args.x_scaled is not None:
            sm = moments.scaled_limits(args.dim, args.x_scaled, moments.REGIME_X_OVER_L)
        else:
            raise ValueError("limits requires --X-scaled or --logscaled")
        return asdict(sm), None
    if a == "a-coeff":
        return {
            "q": args.q,
            "a": moments.a_coeff(args.dim, args.q),
            "log_a": moments.log_a_coeff(args.dim, args.q),
        }, None
    if a == "q0":
        return {"q0": moments.q0(args.dim)}, None
    if a == "pair-tree":
        x, _ = _resolve_x(args)
        return {
            "q": args.q,
            "pair_count": moments.tree_pair_count(args.dim, args.q),
            "open_prob": moments.pair_open_prob_tree(args.dim, args.q, x),
        }, None
    if a == "pair-cube":
        x, _ = _resolve_x(args)
        return {
            "p": args.p,
            "q": args.q,
            "open_prob": moments.pair_open_prob_hypercube(args.dim, args.p, args.q, x),
        }, None
    if a == "bn":
        return {"n": args.n, "B": moments.indecomposable_count(args.n)}, None
    # pstar-bound
    return {"bound": moments.pstar_upper_bound(args.dim)}, None


def _cmd_recursion(args):
    a = args.action
    if a == "gf":
        gf = recursion.tree_gf(args.mu, args.levels, args.grid)
        return {"G": float(gf(args.at)), "at": args.at}, None
    if a == "pexist":
        gf = recursion.existence_prob(args.levels, args.grid)
        return {
            "p": float(gf(args.at)),
            "at": args.at,
            "p_star": float(np.trapezoid(gf.values, dx=gf.step)),
        }, None
    if a == "fk":
        gf = recursion.fk_iterate(args.k, args.zmax, args.grid)
        sup = float(np.abs(gf.values - 1.0 / (1.0 + gf.xs)).max())
        return {"F_k": float(gf(args.at)), "at": args.at, "sup_gap_to_limit": sup}, None
    # delta-check
    report = recursion.delta_bound_check(args.k, args.zmax, args.grid)
    return asdict(report) | {"ok": report.ok}, None


def _cmd_cascade(args):
    if args.action == "sample":
        params = cascade.CascadeParams(args.k, args.delta, args.seed, samples=args.samples)
        batch = cascade.sample_cascade_batch(params)
        if batch.budget_hits == args.samples:
            raise tree.BudgetExceededError("all cascade realizations exceeded atom budget")
        out = _summary(batch.ys) if len(batch.ys) > 1 else {"y": float(batch.ys[0])}
        out |= {
            "mean_bias": batch.mean_bias,
            "mean_atoms": batch.mean_atoms,
            "budget_hits": batch.budget_hits,
        }
        return out, PHILOX_TAG
    # ks
    report = cascade.cascade_limit_check(args.k, args.delta, args.samples, args.seed)
    return asdict(report), PHILOX_TAG


def _cmd_verify(args, records: list[ExperimentRecord], t0: float) -> int:
    results = verify.run_battery(
        args.battery, seed=args.seed, scale=args.scale, threads=args.threads
    )
    all_passed = True
    for res in results:
        all_passed = all_passed and res.passed
        print(res.line(), file=sys.stderr)
        records.append(
            ExperimentRecord(
                command=f"verify.{args.battery}",
                params={"battery": args.battery, "scale": args.scale},
                seed=args.seed,
                rng=PHILOX_TAG,
                stats={
                    "criterion": res.criterion,
                    "passed": res.passed,
                    "observed": res.observed,
                    "expected": res.expected,
                    "details": res.details,
                },
                wall_time_s=time.perf_counter() - t0,
            )
        )
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


# --- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="pathscape", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="group", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--csv", default=None, help="mirror records to this CSV file")
    common.add_argument(
        "--threads", type=int, default=None,
        help=f"worker processes (fallback: ${ENV_THREADS})",
    )
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    hc = sub.add_parser("hypercube", parents=[common])
    hc.add_argument("action", choices=["count", "exists", "thetak"])
    hc.add_argument("--dim", type=int, required=True)
    _add_x_flags(hc)
    hc.add_argument("--k", type=int, default=1)
    hc.add_argument("--samples", type=int, default=1)
    hc.add_argument("--factorized", action="store_true")
    hc.set_defaults(handler=_cmd_hypercube)

    tr = sub.add_parser("tree", parents=[common])
    tr.add_argument("action", choices=["sample", "thetak", "exists"])
    tr.add_argument("--dim", type=int, required=True)
    _add_x_flags(tr)
    tr.add_argument("--k", type=int, default=1)
    tr.add_argument("--samples", type=int, default=1)
    tr.add_argument("--budget", type=int, default=tree.DEFAULT_NODE_BUDGET)
    tr.set_defaults(handler=_cmd_tree)

    mo = sub.add_parser("moments", parents=[common])
    mo.add_argument(
        "action",
        choices=[
            "first", "second", "var-star", "cond-var", "limits", "a-coeff",
            "q0", "pair-tree", "pair-cube", "bn", "pstar-bound",
        ],
    )
    mo.add_argument("--dim", type=int, default=None)
    _add_x_flags(mo)
    mo.add_argument("--k", type=int, default=1)
    mo.add_argument("--q", type=int, default=0)
    mo.add_argument("--p", type=int, default=0)
    mo.add_argument("--n", type=int, default=1)
    mo.set_defaults(handler=_cmd_moments)

    re_ = sub.add_parser("recursion", parents=[common])
    re_.add_argument("action", choices=["gf", "pexist", "fk", "delta-check"])
    re_.add_argument("--grid", type=int, default=2**13)
    re_.add_argument("--zmax", type=float, default=10.0)
    re_.add_argument("--mu", type=float, default=1.0)
    re_.add_argument("--levels", type=int, default=100)
    re_.add_argument("--k", type=int, default=1)
    re_.add_argument("--at", type=float, default=0.0, help="evaluation point (x or z)")
    re_.set_defaults(handler=_cmd_recursion)

    ca = sub.add_parser("cascade", parents=[common])
    ca.add_argument("action", choices=["sample", "ks"])
    ca.add_argument("--k", type=int, required=True, help="generations")
    ca.add_argument("--delta", type=float, default=1e-6)
    ca.add_argument("--samples", type=int, default=1)
    ca.set_defaults(handler=_cmd_cascade)

    ve = sub.add_parser("verify", parents=[common])
    ve.add_argument("battery", choices=sorted(verify.BATTERIES))
    ve.add_argument(
        "--scale", type=float, default=1.0,
        help="multiplier on Monte Carlo sample counts",
    )
    ve.set_defaults(handler=None)

    return parser


def _record_params(args) -> dict:
    skip = {"group", "action", "handler", "csv", "seed"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    records: list[ExperimentRecord] = []

    try:
        if args.group == "verify":
            code = _cmd_verify(args, records, t0)
        else:
            result, rng_tag = args.handler(args)
            records.append(
                ExperimentRecord(
                    command=f"{args.group}.{args.action}",
                    params=_record_params(args),
                    seed=getattr(args, "seed", None),
                    rng=rng_tag,
                    stats=result,
                    wall_time_s=time.perf_counter() - t0,
                )
            )
            code = EXIT_OK
    except (ValueError, KeyError) as exc:
        print(json.dumps({"error": "parameters", "message": str(exc)}), file=sys.stderr)
        return EXIT_PARAMS
    except tree.BudgetExceededError as exc:
        print(json.dumps({"error": "budget", "message": str(exc)}), file=sys.stderr)
        return EXIT_BUDGET

    for rec in records:
        print(rec.to_json())
    if args.csv:
        _write_csv(args.csv, records)
    return code


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
