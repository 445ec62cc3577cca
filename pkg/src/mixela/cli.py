"""Command-line entry point.

Exit codes: 0 success, 1 runtime or data error, 2 usage or configuration error.
stdout receives one JSON summary line; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import zlib
from pathlib import Path

import numpy as np

from . import analysis, performance, selection
from .encoding import ENCODINGS
from .features import featurize, features_of_design, read_features, write_features
from .problems import get_problem
from .sampling import DEFAULT_SAMPLE_FACTOR, read_design, sample_design, write_design
from .space import SpaceError, dump_space, load_space

log = logging.getLogger("mixela")


class UsageError(Exception):
    pass


def repetition_seed(seed: int, instance_id: str, repetition: int) -> int:
    """Independent per-(instance, repetition) seed; shared by both encodings."""
    ss = np.random.SeedSequence([seed, zlib.crc32(instance_id.encode()), repetition])
    return int(ss.generate_state(1)[0])


def _existing(path: str | None, flag: str) -> Path:
    if path is None:
        raise UsageError(f"{flag} is required")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{flag}: no such file {path}")
    return p


def _problems(names):
    if not names:
        raise UsageError("give at least one --problem")
    try:
        return [get_problem(n) for n in names]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _encodings(choice: str) -> list[str]:
    return list(ENCODINGS) if choice == "both" else [choice.upper()]


def _summary(**fields) -> None:
    print(json.dumps(fields, sort_keys=True))


def cmd_sample(args) -> None:
    (problem,) = _problems([args.problem])
    n = args.n or int(args.sample_factor * problem.space.dim)
    design = sample_design(problem, n, args.seed)
    write_design(design, problem.space, args.out)
    if args.space_out:
        dump_space(problem.space, args.space_out)
    _summary(command="sample", problem=problem.instance_id, rows=design.n, out=args.out)


def cmd_featurize(args) -> None:
    encodings = _encodings(args.encoding)
    vectors = []
    if args.space or args.design:
        try:
            space = load_space(_existing(args.space, "--space"))
        except SpaceError as exc:
            raise UsageError(str(exc)) from None
        design = read_design(_existing(args.design, "--design"), space)
        for rep in range(args.reps):
            seed = repetition_seed(args.seed, space.name, rep)
            for enc in encodings:
                vectors.append(features_of_design(design, space, enc, seed, space.name, rep))
    else:
        for problem in _problems(args.problem):
            n = int(args.sample_factor * problem.space.dim)
            for rep in range(args.reps):
                seed = repetition_seed(args.seed, problem.instance_id, rep)
                for enc in encodings:
                    vectors.append(featurize(problem, enc, n, seed, rep))
                log.info("featurized %s repetition %d", problem.instance_id, rep)
    write_features(vectors, args.out)
    _summary(command="featurize", vectors=len(vectors), rows=len(vectors) * 40, out=args.out)


def cmd_solve_rs(args) -> None:
    traces = []
    for problem in _problems(args.problem):
        budget = int(args.budget_factor * problem.space.dim)
        for run in range(args.runs):
            seed = repetition_seed(args.seed, problem.instance_id, run)
            traces.append(performance.run_random_search(problem, budget, seed, run_id=run))
    performance.write_traces(traces, args.out)
    _summary(command="solve-rs", runs=len(traces), out=args.out)


def cmd_perf(args) -> None:
    traces = performance.read_traces(_existing(args.traces, "--traces"))
    budgets = None
    if args.budget is not None:
        budgets = {t.instance_id: args.budget for t in traces}
    records = performance.performance_table(traces, budgets)
    performance.write_perf(records, args.out)
    _summary(command="perf", records=len(records), out=args.out)


def cmd_select(args) -> None:
    vectors = read_features(_existing(args.features, "--features"))
    records = performance.read_perf(_existing(args.perf, "--perf"))
    enc = args.encoding.upper()
    vectors = [v for v in vectors if v.encoding == enc]
    if not vectors:
        raise UsageError(f"no {enc} feature vectors in {args.features}")
    n_inst = len({v.instance_id for v in vectors})
    if not 2 <= args.folds <= n_inst:
        raise UsageError(f"--folds {args.folds} needs between 2 and {n_inst} instances")
    report = selection.run_selection(vectors, records, args.folds, args.seed,
                                     args.sample_factor, args.trees)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _summary(command="select", accuracy=report["cv_accuracy"], model_ert=report["model_ert"],
             gap_closure=report["gap_closure"], features=len(report["features"]), out=args.out)


def cmd_analyze(args) -> None:
    vectors = read_features(_existing(args.features, "--features"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    te, oh = analysis.by_key(vectors, "TE"), analysis.by_key(vectors, "OH")
    if te and oh:
        report = analysis.encoding_correlations(te, oh)
        analysis.write_correlations(report, out / "correlations.csv")
        written.append("correlations.csv")
    instances, _, M = analysis.mean_per_instance(vectors, args.encoding.upper())
    if not 1 <= args.k <= len(instances):
        raise UsageError(f"--k {args.k} must lie in [1, {len(instances)}]")
    labels = analysis.ward_cluster(M, args.k)
    analysis.write_clusters(instances, labels, out / "clusters.csv")
    written.append("clusters.csv")
    _summary(command="analyze", instances=len(instances), k=args.k, written=written, out=str(out))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixela", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)

    p = sub.add_parser("sample", help="draw a uniform initial design of a built-in problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--sample-factor", type=float, default=DEFAULT_SAMPLE_FACTOR)
    p.add_argument("--space-out", help="also write the space as JSON")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("featurize", help="compute the 40 features per repetition")
    p.add_argument("--problem", action="append", help="built-in name, repeatable (e.g. sphere:3)")
    p.add_argument("--space", help="space JSON of an externally evaluated design")
    p.add_argument("--design", help="design CSV matching --space")
    p.add_argument("--encoding", choices=["oh", "te", "both"], default="te")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--sample-factor", type=float, default=DEFAULT_SAMPLE_FACTOR)
    common(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("solve-rs", help="random-search baseline traces")
    p.add_argument("--problem", action="append")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--budget-factor", type=float, default=performance.DEFAULT_BUDGET_FACTOR)
    common(p)
    p.set_defaults(func=cmd_solve_rs)

    p = sub.add_parser("perf", help="targets and ERT per (instance, algorithm)")
    p.add_argument("--traces", required=True)
    p.add_argument("--budget", type=int, help="per-run budget; default is the longest trace per instance")
    common(p, seed=False)
    p.set_defaults(func=cmd_perf)

    p = sub.add_parser("select", help="feature selection, CV and ERT scoring of a selector")
    p.add_argument("--features", required=True)
    p.add_argument("--perf", required=True)
    p.add_argument("--encoding", choices=["oh", "te"], default="te")
    p.add_argument("--folds", type=int, default=selection.DEFAULT_FOLDS)
    p.add_argument("--trees", type=int, default=selection.DEFAULT_TREES)
    p.add_argument("--sample-factor", type=float, default=DEFAULT_SAMPLE_FACTOR)
    common(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("analyze", help="encoding correlations and ward clustering")
    p.add_argument("--features", required=True)
    p.add_argument("--encoding", choices=["oh", "te"], default="te")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    for name in ("reps", "runs", "trees"):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) < 1:
            parser.error(f"--{name} must be positive")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"mixela {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, SpaceError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"mixela {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
