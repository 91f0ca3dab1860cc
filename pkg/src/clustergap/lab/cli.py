"""Command line entry point: ``clustergap <subcommand>``.

Exit codes: 0 success, 1 invariant failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ..cluster import ALGORITHMS, BudgetError, run_algorithm
from ..lowdegree.alpha import all_alphas
from ..lowdegree.moments import EnumerationError, cumulant_table_csv
from ..metrics import kmeans_criterion, misclassification_error
from ..model import MixtureInstance, PackingError, Prior
from .config import ConfigError, load_config
from .recovery import curve_to_csv, isotonic_residual, recovery_curve
from .report import lowdegree_report
from .sweep import make_instance, records_to_csv, run_sweep
from .verify import SUITES, verify

log = logging.getLogger("clustergap")

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _strict(d: dict, allowed: set, required: set) -> dict:
    d = dict(d)
    if d.pop("schema_version", None) != 1:
        raise ConfigError("schema_version must be 1")
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    missing = sorted(required - set(d))
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    return d


def cmd_generate(args) -> int:
    params = {"prior": args.prior, "n": args.n, "p": args.p, "K": args.K,
              "delta_bar_sq": args.delta_bar_sq, "sigma": args.sigma}
    if args.config:
        params.update(_strict(_read_json(args.config), set(params), set()))
    try:
        inst = make_instance(params["prior"], int(params["n"]), int(params["p"]), int(params["K"]),
                             float(params["delta_bar_sq"]), float(params["sigma"]), args.seed)
    except (ValueError, PackingError) as exc:
        raise ConfigError(str(exc)) from exc
    _emit(inst.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_cluster(args) -> int:
    try:
        inst = MixtureInstance.from_json(Path(args.input).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load instance: {exc}") from exc
    K = args.K or inst.K
    try:
        est = run_algorithm(args.algorithm, inst.data, K, seed=args.seed, time_budget=args.time_budget)
    except BudgetError as exc:
        raise ConfigError(str(exc)) from exc
    doc = {"algorithm": args.algorithm, "K": K, "labels": est.labels.tolist(),
           "criterion": kmeans_criterion(inst.data, est),
           "err": misclassification_error(est, inst.labels) if K == inst.K else None}
    _emit(json.dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    out = args.out or config.output_path
    records = run_sweep(config, threads=args.threads, record_runtime=args.timing)
    text = records_to_csv(records)
    _emit(text, out)
    if args.figure and out:
        from .figures import figure_path, plot_sweep
        plot_sweep(records, figure_path(out))
    bad = [r for r in records if r.err is not None and not 0.0 <= r.err <= 1.0]
    return EXIT_INVARIANT if bad else EXIT_OK


def cmd_lowdegree(args) -> int:
    if args.cumulant_table:
        alphas = [a for a in all_alphas(args.n, args.p, args.max_size, min_size=1)]
        try:
            Path(args.cumulant_table).write_text(cumulant_table_csv(alphas, args.K))
        except EnumerationError as exc:
            raise ConfigError(str(exc)) from exc
    doc = lowdegree_report(args.n, args.p, args.K, args.delta_bar_sq, args.D, args.samples, args.seed)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_recovery(args) -> int:
    params = {"n": args.n, "p": args.p, "K": args.K, "delta_grid": args.delta_grid,
              "algorithm": args.algorithm, "trials": args.trials, "sigma": args.sigma}
    if args.config:
        params.update(_strict(_read_json(args.config), set(params), set()))
    if params["algorithm"] not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {params['algorithm']!r}")
    if not params["delta_grid"]:
        raise ConfigError("delta_grid must be nonempty")
    try:
        points = recovery_curve(int(params["n"]), int(params["p"]), int(params["K"]),
                                [float(x) for x in params["delta_grid"]], params["algorithm"],
                                int(params["trials"]), args.seed, float(params["sigma"]),
                                threads=args.threads)
    except (PackingError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    _emit(curve_to_csv(points), args.out)
    if args.figure and args.out:
        from .figures import figure_path, plot_recovery
        plot_recovery(points, figure_path(args.out), title=params["algorithm"])
    resid = isotonic_residual([p.exact_recovery_rate for p in points])
    if resid >= 0.05:
        log.warning("recovery curve not monotone: isotonic residual %.3f", resid)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify(args.suite, seed=args.seed or 0)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clustergap", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=_u64, default=seed_default)
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--threads", type=int, default=1)

    g = sub.add_parser("generate", help="sample one mixture instance as JSON")
    common(g)
    g.add_argument("--prior", default=Prior.BERNOULLI_HYPERCUBE.value, choices=[x.value for x in Prior])
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--p", type=int, default=10)
    g.add_argument("--K", type=int, default=2)
    g.add_argument("--delta-bar-sq", type=float, default=4.0)
    g.add_argument("--sigma", type=float, default=1.0)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cluster", help="cluster an instance JSON")
    common(c)
    c.add_argument("input", help="instance JSON from `generate`")
    c.add_argument("--algorithm", default="lloyd", choices=ALGORITHMS)
    c.add_argument("--K", type=int)
    c.add_argument("--time-budget", type=float)
    c.set_defaults(func=cmd_cluster)

    s = sub.add_parser("sweep", help="run a sweep config and write CSV")
    common(s, seed_default=None)
    s.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms (not reproducible)")
    s.add_argument("--figure", action="store_true", help="also write a PNG next to the CSV")
    s.set_defaults(func=cmd_sweep)

    ld = sub.add_parser("lowdegree", help="low-degree bound vs oracles as JSON")
    common(ld)
    ld.add_argument("--n", type=int, default=4)
    ld.add_argument("--p", type=int, default=4)
    ld.add_argument("--K", type=int, default=2)
    ld.add_argument("--delta-bar-sq", type=float, default=0.1)
    ld.add_argument("--D", type=int, default=2)
    ld.add_argument("--samples", type=int, default=20000)
    ld.add_argument("--cumulant-table", help="also write exact cumulants as CSV")
    ld.add_argument("--max-size", type=int, default=3)
    ld.set_defaults(func=cmd_lowdegree)

    r = sub.add_parser("recovery", help="exact-recovery rate curve as CSV")
    common(r)
    r.add_argument("--n", type=int, default=48)
    r.add_argument("--p", type=int, default=192)
    r.add_argument("--K", type=int, default=3)
    r.add_argument("--delta-grid", type=float, nargs="+", default=[0.1, 10.0, 40.0, 80.0, 125.0])
    r.add_argument("--algorithm", default="single_linkage", choices=ALGORITHMS)
    r.add_argument("--trials", type=int, default=20)
    r.add_argument("--sigma", type=float, default=1.0)
    r.add_argument("--figure", action="store_true")
    r.set_defaults(func=cmd_recovery)

    v = sub.add_parser("verify", help="run invariant suites, JSON report")
    common(v)
    v.add_argument("--suite", default="all", choices=SUITES)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
