"""Command-line entry point: ``otw {dist,knn,cluster,verify,bench,synth,train}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 property-sweep failure.
Every JSON document carries a ``schema`` key naming its schema under
``docs/schemas``. Fields whose name contains one of :data:`TIMING_MARKERS`
are wall-clock measurements or derived from them (bench slopes and speedup);
everything else is reproducible for a fixed seed.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np
from scipy import stats

from . import bench, io, sweeps
from .baselines import ABSOLUTE, SQUARED, DtwParams
from .distance import DIRECT, SPLIT, Metric, OtwParams, pairwise_matrix
from .errors import OtwError
from .evaluation import (
    LINKAGES,
    HyperGrid,
    LabeledDataset,
    agglomerative_cluster,
    one_nn_classify,
    rand_index,
    select_params,
)
from .net import HISTORY_FIELDS, MlpModel, make_feature_layer, time_to_error, train
from .series import as_series, z_normalize
from .synthetic import SyntheticSpec, make_synthetic, stratified_split

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SWEEP = 0, 1, 2, 3
TIMING_MARKERS = ("seconds", "throughput", "slope", "speedup")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    out = []
    for x in text.split(","):
        x = x.strip()
        if not x:
            continue
        if x in ("n", "full"):
            out.append(None)
            continue
        try:
            out.append(int(x))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return out


def _words(choices):
    def parse(text):
        out = [x.strip() for x in text.split(",") if x.strip()]
        for x in out:
            if x not in choices:
                raise argparse.ArgumentTypeError(f"invalid choice {x!r} (choose from {', '.join(choices)})")
        return out

    return parse


def _add_metric_flags(p, multi=False):
    many = " (comma-separated list to sweep)" if multi else ""
    p.add_argument("--metric", type=_words(("otw", "dtw", "l1", "l2")), default=["otw"],
                   help="distance: otw, dtw, l1 or l2" + (" (comma list for cluster)" if multi else ""))
    p.add_argument("--m", type=_floats, default=None, help="OTW waste cost" + many)
    p.add_argument("--s", type=_ints, default=None, help="OTW window; 'n' for full" + many)
    p.add_argument("--beta", type=_floats, default=None, help="OTW smoothing" + many)
    p.add_argument("--sign", type=_words((DIRECT, SPLIT)), default=None, help="direct or split" + many)
    p.add_argument("--window", type=_ints, default=None, help="DTW band radius; 'n' for none" + many)
    p.add_argument("--local-cost", choices=(SQUARED, ABSOLUTE), default=SQUARED)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--normalize", action="store_true", help="z-normalise every series first")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--csv-input", action="store_true", help="inputs are comma-separated")


def build_parser():
    parser = _Parser(prog="otw", description="Optimal Transport Warping distances and experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="distance between two series")
    p.add_argument("--a", required=True, help="comma-separated values, or FILE:ROW (1-based) of a UCR file")
    p.add_argument("--b", required=True, help="as --a")
    _add_metric_flags(p)
    _add_common(p)

    p = sub.add_parser("knn", help="1-NN classification with validated parameters")
    p.add_argument("--train", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)
    p.add_argument("--repeats", type=int, default=10)
    _add_metric_flags(p, multi=True)
    _add_common(p)

    p = sub.add_parser("cluster", help="agglomerative clustering scored by Rand index")
    p.add_argument("data", type=Path, nargs="+", help="UCR files; several are concatenated")
    p.add_argument("--linkage", choices=LINKAGES, default="average")
    p.add_argument("--max-samples", type=int, default=500)
    _add_metric_flags(p, multi=True)
    _add_common(p)

    p = sub.add_parser("verify", help="randomised checks of the OTW bounds")
    p.add_argument("--theorem", type=int, default=1000, help="upper-bound instances")
    p.add_argument("--shift", type=int, default=500, help="shift-sensitivity instances")
    p.add_argument("--interp", type=int, default=1000, help="window-interpolation instances")
    p.add_argument("--balanced", type=int, default=500, help="balanced-equivalence instances")
    _add_common(p)

    p = sub.add_parser("bench", help="OTW vs DTW scaling study")
    p.add_argument("--min-n", type=int, default=64)
    p.add_argument("--max-n", type=int, default=8192)
    p.add_argument("--layer-max-n", type=int, default=1024)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--no-layers", action="store_true")
    _add_common(p)

    p = sub.add_parser("synth", help="write the synthetic 4-class dataset")
    p.add_argument("--length", type=int, default=128)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--left", type=int, default=16)
    p.add_argument("--right", type=int, default=96)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--train-frac", type=float, default=0.75)
    p.add_argument("--prefix", default="SYNTH", help="file name prefix inside --out directory")
    _add_common(p)

    p = sub.add_parser("train", help="train a feature-layer network, write history CSV")
    p.add_argument("--train", type=Path, default=None)
    p.add_argument("--test", type=Path, default=None)
    p.add_argument("--synthetic-noise", type=float, default=None,
                   help="train on the synthetic dataset with this noise instead of files")
    p.add_argument("--layer", choices=("otw", "dtw", "linear"), default="otw")
    p.add_argument("--k", type=int, default=1, help="number of reference series")
    p.add_argument("--hidden", type=_ints, default=[128, 128])
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--feature-scale", type=float, default=None, help="default 1/n for distance layers")
    p.add_argument("--stop-at-zero", action="store_true", help="stop once test error reaches 0")
    _add_metric_flags(p)
    _add_common(p)
    return parser


def _one(values, default, flag):
    if values is None:
        return default
    if len(values) != 1:
        raise UsageError(f"{flag} takes a single value for this command")
    return values[0]


def _single_metric(args, kind=None, beta_default=0.0):
    kind = kind or _one(args.metric, "otw", "--metric")
    if kind == "otw":
        return Metric("otw", OtwParams(
            m=_one(args.m, 1.0, "--m"),
            s=_one(args.s, None, "--s"),
            beta=_one(args.beta, beta_default, "--beta"),
            sign=_one(args.sign, DIRECT, "--sign"),
        ))
    if kind == "dtw":
        return Metric("dtw", dtw=DtwParams(window=_one(args.window, None, "--window"), local_cost=args.local_cost))
    return Metric(kind)


def _grid(args, kind, n):
    if kind == "otw":
        default = HyperGrid.otw(n).cells
        ms = args.m or sorted({c.otw.m for c in default})
        ss = args.s or list(dict.fromkeys(c.otw.s for c in default))
        betas = args.beta or [0.0]
        signs = args.sign or [DIRECT, SPLIT]
        return HyperGrid.otw(n, ms=ms, windows=ss, betas=betas, signs=signs)
    if kind == "dtw":
        if args.window is None:
            return HyperGrid.dtw(n, local_cost=args.local_cost)
        return HyperGrid.dtw(n, windows=args.window, local_cost=args.local_cost)
    return HyperGrid.single(Metric(kind))


def _load(path, args):
    data = io.read_ucr_tsv(path, delimiter="," if args.csv_input else "\t")
    return data.normalized() if args.normalize else data


def _series_arg(text, args):
    if ":" in text:
        path, _, row = text.rpartition(":")
        data = io.read_ucr_tsv(path, delimiter="," if args.csv_input else "\t")
        r = int(row)
        if not 1 <= r <= len(data):
            raise OtwError(f"row {r} outside 1..{len(data)} in {path}")
        values = data.series[r - 1]
    else:
        try:
            values = [float(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"cannot parse series {text!r}") from None
    values = as_series(values)
    return z_normalize(values) if args.normalize else values


def _emit(args, doc, rows=None, fields=None):
    if args.format == "csv" and rows is not None:
        text = io.write_csv(rows, fields, args.out)
    else:
        text = io.write_json(doc, args.out)
    if args.out is None:
        sys.stdout.write(text)


def cmd_dist(args):
    a = _series_arg(args.a, args)
    b = _series_arg(args.b, args)
    metric = _single_metric(args)
    t0 = time.perf_counter()
    value = float(metric(a, b))
    seconds = time.perf_counter() - t0
    doc = {"schema": "dist", "metric": metric.to_dict(), "metric_tag": metric.tag, "n": int(a.size),
           "value": value, "seconds": seconds}
    _emit(args, doc, [doc], ["metric_tag", "n", "value", "seconds"])
    return EXIT_OK


def _interval(errors):
    errors = np.asarray(errors, dtype=float)
    mean = float(errors.mean())
    if errors.size < 2:
        return mean, 0.0
    half = float(stats.t.ppf(0.975, errors.size - 1) * errors.std(ddof=1) / np.sqrt(errors.size))
    return mean, half


def cmd_knn(args):
    tr, te = _load(args.train, args), _load(args.test, args)
    kind = _one(args.metric, "otw", "--metric")
    grid = _grid(args, kind, tr.length)
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    t0 = time.perf_counter()
    runs = []
    for r in range(args.repeats):
        seed = args.seed + r
        best, scores = select_params(tr, grid, seed=seed, threads=args.threads, return_scores=True)
        _, err = one_nn_classify(tr, te, best, threads=args.threads)
        runs.append({"seed": seed, "metric": best.to_dict(), "metric_tag": best.tag,
                     "validation_accuracy": float(max(scores)), "test_error": err})
    mean, half = _interval([r["test_error"] for r in runs])
    doc = {"schema": "knn", "train": tr.name, "test": te.name, "grid_size": len(grid),
           "normalized": bool(args.normalize), "runs": runs, "test_error_mean": mean,
           "test_error_ci95_halfwidth": half, "seconds": time.perf_counter() - t0}
    _emit(args, doc, runs, ["seed", "metric_tag", "validation_accuracy", "test_error"])
    return EXIT_OK


def cmd_cluster(args):
    parts = [_load(p, args) for p in args.data]
    data = LabeledDataset(np.vstack([d.series for d in parts]), np.concatenate([d.labels for d in parts]),
                          "+".join(d.name for d in parts))
    if len(data) > args.max_samples:
        raise OtwError(f"{data.name} has {len(data)} series, above --max-samples {args.max_samples}")
    k = len(data.classes)
    rows = []
    for kind in args.metric:
        metric = _single_metric(args, kind)
        t0 = time.perf_counter()
        D = pairwise_matrix(data.series, metric, threads=args.threads)
        labels = agglomerative_cluster(D, k, args.linkage)
        seconds = time.perf_counter() - t0
        rows.append({"metric_tag": metric.tag, "metric": metric.to_dict(), "clusters": k,
                     "rand_index": rand_index(data.labels, labels), "wall_seconds": seconds})
    doc = {"schema": "cluster", "dataset": data.name, "size": len(data), "linkage": args.linkage,
           "normalized": bool(args.normalize), "results": rows}
    _emit(args, doc, rows, ["metric_tag", "clusters", "rand_index", "wall_seconds"])
    return EXIT_OK


def cmd_verify(args):
    reports = sweeps.run_all(args.seed, args.theorem, args.shift, args.interp, args.balanced)
    ok = all(r.ok for r in reports)
    doc = {"schema": "verify", "seed": args.seed, "ok": ok, "sweeps": [r.to_dict() for r in reports]}
    _emit(args, doc, [r.to_dict() for r in reports], ["name", "total", "passed", "ok", "max_violation"])
    return EXIT_OK if ok else EXIT_SWEEP


def cmd_bench(args):
    res = bench.run_bench(args.min_n, args.max_n, args.layer_max_n, args.reps, args.seed, not args.no_layers)
    records = [r.to_dict() for r in res["records"]]
    doc = {"schema": "bench", **{k: v for k, v in res.items() if k != "records"}, "records": records}
    _emit(args, doc, records, bench.RECORD_FIELDS)
    return EXIT_OK


def cmd_synth(args):
    spec = SyntheticSpec(args.length, args.per_class, args.width, args.left, args.right, args.noise, seed=args.seed)
    tr, te = stratified_split(make_synthetic(spec), args.train_frac, args.seed)
    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    paths = {"train": out / f"{args.prefix}_TRAIN.tsv", "test": out / f"{args.prefix}_TEST.tsv"}
    io.write_dataset(tr, paths["train"])
    io.write_dataset(te, paths["test"])
    sys.stdout.write(io.write_json({"schema": "synth", "train": str(paths["train"]), "test": str(paths["test"]),
                                    "train_size": len(tr), "test_size": len(te), "length": spec.length,
                                    "noise": spec.noise, "seed": spec.seed}))
    return EXIT_OK


def _remap(tr, te):
    classes = np.unique(np.concatenate([tr.labels, te.labels]))
    lookup = {c: i for i, c in enumerate(classes)}
    f = np.vectorize(lookup.get)
    return (LabeledDataset(tr.series, f(tr.labels), tr.name), LabeledDataset(te.series, f(te.labels), te.name),
            len(classes))


def cmd_train(args):
    if args.synthetic_noise is not None:
        spec = SyntheticSpec(noise=args.synthetic_noise, seed=args.seed)
        tr, te = stratified_split(make_synthetic(spec), 0.75, args.seed)
    elif args.train is not None and args.test is not None:
        tr, te = _load(args.train, args), _load(args.test, args)
    else:
        raise UsageError("train needs --train and --test, or --synthetic-noise")
    # network classes must be 0..C-1; original labels are not reported here
    tr, te, n_classes = _remap(tr, te)
    rng = np.random.default_rng(args.seed)
    n = tr.length
    if args.layer == "otw":
        params = _single_metric(args, "otw", beta_default=0.1).otw
    elif args.layer == "dtw":
        params = _single_metric(args, "dtw").dtw
    else:
        params = None
    layer = make_feature_layer(args.layer, args.k, n, rng, params)
    scale = args.feature_scale
    if scale is None:
        scale = 1.0 / n if args.layer != "linear" else 1.0
    model = MlpModel(layer, args.hidden, n_classes, rng, feature_scale=scale)
    history = train(model, tr, te, epochs=args.epochs, lr=args.lr, batch_size=args.batch_size,
                    seed=args.seed, target_error=0.0 if args.stop_at_zero else None)
    rows = [vars(h) for h in history]
    out = args.out or Path("history.csv")
    io.write_csv(rows, HISTORY_FIELDS, out)
    sys.stdout.write(io.write_json({"schema": "train", "history": str(out), "epochs_run": len(history),
                                    "final_test_error": history[-1].test_error,
                                    "min_test_error": history[-1].min_test_error,
                                    "seconds_to_zero_error": _finite_or_none(time_to_error(history)),
                                    "wall_seconds": history[-1].wall_seconds}))
    return EXIT_OK


def _finite_or_none(x):
    return None if not np.isfinite(x) else x


COMMANDS = {"dist": cmd_dist, "knn": cmd_knn, "cluster": cmd_cluster, "verify": cmd_verify,
            "bench": cmd_bench, "synth": cmd_synth, "train": cmd_train}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"otw {args.command}: {exc}\n")
        return EXIT_USAGE
    except (OtwError, OSError) as exc:
        sys.stderr.write(f"otw {args.command}: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
