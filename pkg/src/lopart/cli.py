"""Command-line interface.

Subcommands: solve, evaluate, learn, cv, bench, serve.  Exit codes:
0 success, 1 usage error, 2 input/validation error, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import bench as bench_mod
from . import crossval, formats
from .core import (
    LabelValidationError,
    lopart,
    lopart_infinite,
    opart,
    validate_labels,
)
from .metrics import classify_label, total_errors
from .penalty import (
    METHODS,
    PenaltyModel,
    best_constant,
    compute_error_curve,
    fit_linear2,
    scale_interval,
    target_interval,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    # Usage problems exit with code 1; argparse's default of 2 is
    # reserved for input validation failures.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_penalty(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"penalty must be a number or 'inf', got {text!r}") from None
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"penalty must be >= 0 or 'inf', got {text!r}")
    return value


def _parse_methods(text: str) -> tuple[str, ...]:
    methods = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise ValueError(
            f"methods must be a comma list from {', '.join(METHODS)}, got {text!r}"
        )
    return methods


def _build_parser() -> _Parser:
    parser = _Parser(prog="lopart", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="segment one sequence")
    solve.add_argument("--data", required=True, help="data CSV (one value per line)")
    solve.add_argument("--labels", help="labels CSV (start,end,changes)")
    solve.add_argument("--penalty", required=True, help="penalty >= 0, or 'inf'")
    solve.add_argument("--algorithm", required=True, choices=("opart", "lopart"))
    solve.add_argument("--out", help="segments CSV output path")
    solve.add_argument("--precision", type=int, default=6)
    solve.set_defaults(func=cmd_solve)

    evaluate = sub.add_parser("evaluate", help="score labels against a model")
    evaluate.add_argument("--data", required=True)
    evaluate.add_argument("--labels", required=True)
    evaluate.add_argument("--segments", help="segments CSV to score")
    evaluate.add_argument("--penalty", help="solve fresh at this penalty instead")
    evaluate.add_argument("--algorithm", choices=("opart", "lopart"), default="lopart")
    evaluate.add_argument("--out", help="evaluation CSV output path")
    evaluate.add_argument("--precision", type=int, default=6)
    evaluate.set_defaults(func=cmd_evaluate)

    learn = sub.add_parser("learn", help="fit penalty models on a corpus")
    learn.add_argument("corpus", help="directory of <id>.data.csv/<id>.labels.csv")
    learn.add_argument("--methods", default=",".join(METHODS))
    learn.add_argument("--out", help="model file output path")
    learn.add_argument("--precision", type=int, default=17)
    learn.set_defaults(func=cmd_learn)

    cv = sub.add_parser("cv", help="cross-validated comparison on a corpus")
    cv.add_argument("corpus")
    cv.add_argument("--k", type=int, default=2)
    cv.add_argument("--mode", choices=("random", "sequential"), default="random")
    cv.add_argument("--seed", type=int, default=0)
    cv.add_argument("--methods", default=",".join(METHODS))
    cv.add_argument("--out", required=True, help="report CSV output path")
    cv.add_argument("--precision", type=int, default=6)
    cv.set_defaults(func=cmd_cv)

    bench = sub.add_parser("bench", help="time the solvers on simulated data")
    bench.add_argument("--n-values", required=True, help="comma list, e.g. 1000,10000")
    bench.add_argument("--density", type=float, default=0.0, help="labels per point")
    bench.add_argument("--repeats", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", help="timing CSV output path")
    bench.add_argument("--precision", type=int, default=6)
    bench.set_defaults(func=cmd_bench)

    serve = sub.add_parser("serve", help="run the interactive labeling service")
    serve.add_argument("corpus", nargs="?", help="optional corpus to preload")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def cmd_solve(args) -> int:
    penalty = _parse_penalty(args.penalty)
    seq = formats.read_data(args.data)
    if args.algorithm == "opart":
        if args.labels:
            print("warning: --labels ignored by the unconstrained solver",
                  file=sys.stderr)
        if math.isinf(penalty):
            raise ValueError("the unconstrained solver needs a finite penalty")
        seg = opart(seq, penalty)
    else:
        labels = (
            formats.read_labels(args.labels, seq.n)
            if args.labels
            else validate_labels([], seq.n)
        )
        seg = lopart_infinite(seq, labels) if math.isinf(penalty) else lopart(
            seq, labels, penalty
        )
    print(f"cost: {formats.fmt(seg.cost, args.precision)}")
    print("changepoints: " + " ".join(str(c) for c in seg.changepoints))
    if args.out:
        formats.write_segments(args.out, seg, seq.n, args.precision)
        base, _ = os.path.splitext(args.out)
        formats.write_changepoints(base + ".changepoints.csv", seg.changepoints)
    return 0


def cmd_evaluate(args) -> int:
    seq = formats.read_data(args.data)
    labels = formats.read_labels(args.labels, seq.n)
    if (args.segments is None) == (args.penalty is None):
        raise ValueError("provide exactly one of --segments or --penalty")
    if args.segments:
        changepoints = formats.segments_to_changepoints(
            formats.read_segments(args.segments)
        )
    else:
        penalty = _parse_penalty(args.penalty)
        if args.algorithm == "opart":
            if math.isinf(penalty):
                raise ValueError("the unconstrained solver needs a finite penalty")
            seg = opart(seq, penalty)
        elif math.isinf(penalty):
            seg = lopart_infinite(seq, labels)
        else:
            seg = lopart(seq, labels, penalty)
        changepoints = list(seg.changepoints)
    outcomes = [
        classify_label(lab, changepoints, i) for i, lab in enumerate(labels.labels)
    ]
    counts = total_errors(labels, changepoints)
    for outcome in outcomes:
        print(f"label {outcome.label_index}: {outcome.status} "
              f"({outcome.predicted_changes} predicted)")
    print(f"totals: fp={counts.fp} fn={counts.fn} tp={counts.tp} "
          f"labels={counts.total_labels}")
    if args.out:
        formats.write_evaluation(args.out, outcomes, counts)
    return 0


def cmd_learn(args) -> int:
    methods = _parse_methods(args.methods)
    corpus = formats.load_corpus(args.corpus)
    curves = [
        compute_error_curve(item.data, item.labels, item.sequence_id)
        for item in corpus
    ]
    models: list[PenaltyModel] = []
    for method in methods:
        if method == "bic0":
            models.append(PenaltyModel("bic0", 1.0, 0.0))
        elif method == "constant1":
            models.append(best_constant(curves))
        else:
            features = [math.log(math.log(c.n)) for c in curves]
            intervals = [
                scale_interval(target_interval(c), math.log(10.0)) for c in curves
            ]
            models.append(fit_linear2(features, intervals))
    for model in models:
        print(f"{model.method}: w={formats.fmt(model.w, args.precision)} "
              f"b={formats.fmt(model.b, args.precision)}")
    if args.out:
        formats.write_models(args.out, models, args.precision)
    return 0


def cmd_cv(args) -> int:
    methods = _parse_methods(args.methods)
    corpus = formats.load_corpus(args.corpus)
    assignments = crossval.corpus_fold_assignments(
        corpus, args.k, args.mode, args.seed
    )
    rows: list[crossval.ReportRow] = []
    for item in corpus:
        rows.extend(
            crossval.best_penalty_analysis(
                item.data, item.labels, assignments[item.sequence_id]
            )
        )
    predicted_rows, roc = crossval.predicted_penalty_analysis(
        corpus, assignments, methods
    )
    rows.extend(predicted_rows)
    rows.sort(key=lambda r: (r.sequence_id, r.split, r.algorithm, r.method))
    formats.write_report(args.out, rows, args.precision)
    base, _ = os.path.splitext(args.out)
    formats.write_roc(base + ".roc.csv", roc, args.precision)
    print(f"wrote {len(rows)} report rows for {len(corpus)} sequences")
    return 0


def cmd_bench(args) -> int:
    try:
        n_values = tuple(int(part) for part in args.n_values.split(",") if part)
    except ValueError:
        raise ValueError(f"--n-values must be comma-separated integers, "
                         f"got {args.n_values!r}") from None
    config = bench_mod.BenchConfig(
        n_values=n_values,
        scheme=bench_mod.Density(args.density),
        repeats=args.repeats,
        seed=args.seed,
    )
    rows = bench_mod.run_benchmark(config)
    print("algorithm,n,m,median_seconds,q25,q75")
    for r in rows:
        print(f"{r.algorithm},{r.n},{r.m},{formats.fmt(r.median_seconds, args.precision)},"
              f"{formats.fmt(r.q25, args.precision)},{formats.fmt(r.q75, args.precision)}")
    if args.out:
        formats.write_timing(args.out, rows, args.precision)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    corpus = formats.load_corpus(args.corpus) if args.corpus else None
    app = create_app(corpus=corpus, static_dir=_default_static_dir())
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="info")
    return 0


def _default_static_dir() -> str | None:
    candidate = os.path.join(os.getcwd(), "frontend", "dist")
    return candidate if os.path.isdir(candidate) else None


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return args.func(args)
    except (formats.FormatError, LabelValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
