"""Command-line front end.

Subcommands: ``cluster``, ``fit``, ``transform``, ``eval``, ``bench`` and
``oracle-check``. Every file written starts with ``# invocation:`` and
``# seed:`` lines, so a run can be repeated from its own output.

Exit codes:

=====  ==============================================
0      success
1      a structural check failed (``oracle-check``)
2      invalid arguments
3      data error (unreadable file, class too small, ...)
4      numerical failure (singular system, no convergence, ...)
=====  ==============================================
"""
import argparse
import json
import shlex
import sys
import time
from pathlib import Path

import numpy as np

from .clustering import cluster_within_classes
from .datasets import load_dataset
from .errors import FastSDAError, LayoutInvalid
from .evaluation import EvalConfig, benchmark_speed, run_experiment
from .kernels import KernelConfig, mean_distance_sigma
from .laplacian import build_lb_multiview, build_lb_single, structural_checks
from .layout import LabelLayout
from .pipeline import fit_fastsda, fit_mvsda
from .regression import MultiViewModel
from .serialize import load_model, save_model

FIT_METHODS = ("sv-linear", "sv-kernel", "sv-approx", "mv-linear", "mv-kernel")
EVAL_ALIASES = {
    "sv-linear": "fastsda-linear",
    "sv-kernel": "fastsda-kernel",
    "sv-approx": "fastsda-approx",
    "mv-linear": "mvsda-linear",
    "mv-kernel": "mvsda-kernel",
    "oracle-sda": "oracle-sda",
    "oracle-sorted": "oracle-sorted",
}
ORACLE_CONFIGS = {
    # two classes of 8 and 9 samples, two subclasses each
    "single": [[3, 5], [4, 5]],
    # two views, two classes, two subclasses; class 2 splits differently per view
    "multiview": [[[2, 2], [3, 4]], [[2, 2], [4, 3]]],
}
BENCH_COLUMNS = ("D", "N", "C", "Z", "t_oracle", "t_fast", "ratio")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"fastsda: error: {message}", file=sys.stderr)
        sys.exit(2)


def _header(args):
    return [f"invocation: {args.invocation}", f"seed: {args.seed}"]


def _write(path, lines, args):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = [f"# {h}" for h in _header(args)] + list(lines)
    path.write_text("\n".join(body) + "\n")


def _tsv(rows):
    return ["\t".join(str(v) for v in row) for row in rows]


def _subclasses(dataset, z, seed, per_view):
    """Per-view subclass labels (or one labelling of the concatenated views)."""
    rng = np.random.default_rng([seed, 11])
    if not per_view:
        return cluster_within_classes(dataset.concatenated().x, dataset.class_labels, z, rng)
    return [cluster_within_classes(v.x, dataset.class_labels, z, child)
            for v, child in zip(dataset.views, rng.spawn(dataset.n_views))]


def cmd_cluster(args):
    ds = load_dataset(args.dataset)
    subs = _subclasses(ds, args.z, args.seed, args.per_view)
    subs = subs if args.per_view else [subs]
    head = ["sample", "class"] + [f"view{i}" for i in range(len(subs))]
    rows = [[i, ds.class_labels[i]] + [s[i] for s in subs] for i in range(ds.n_samples)]
    _write(args.out, _tsv([head] + rows), args)
    return 0


def cmd_fit(args):
    ds = load_dataset(args.dataset)
    multiview = args.method.startswith("mv-")
    kind = args.method.split("-")[1]
    start = time.perf_counter()
    subs = _subclasses(ds, args.z, args.seed, multiview)
    t_cluster = time.perf_counter() - start
    rng = np.random.default_rng([args.seed, 21])
    start = time.perf_counter()
    if multiview:
        xs = [v.x for v in ds.views]
        sigmas = [args.sigma] * ds.n_views if args.sigma else None
        model = fit_mvsda(xs, ds.class_labels, subs, args.alpha, rng, kind=kind,
                          sigmas=sigmas, normalization=args.normalization)
    else:
        x = ds.concatenated().x
        kernel = None
        if kind != "linear":
            kernel = KernelConfig(args.sigma or mean_distance_sigma(x),
                                  "exact" if kind == "kernel" else "approximate",
                                  prototype_count=min(args.prototypes, ds.n_samples))
        model = fit_fastsda(x, ds.class_labels, subs, args.alpha, rng,
                            kind=kind, kernel=kernel, normalization=args.normalization)
    t_fit = time.perf_counter() - start
    d = model.info["d"]
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_model(model, args.out, _header(args) + [f"method: {args.method}", f"d: {d}"])
    log = [f"method: {args.method}", f"dataset: {args.dataset}", f"z: {args.z}",
           f"alpha: {args.alpha:g}", f"d: {d}",
           f"cluster_seconds: {t_cluster:.6f}", f"fit_seconds: {t_fit:.6f}"]
    _write(str(args.out) + ".log", log, args)
    print(f"saved {args.out} with d={d} directions")
    return 0


def cmd_transform(args):
    model = load_model(args.model)
    ds = load_dataset(args.dataset)
    if isinstance(model, MultiViewModel):
        if ds.n_views != model.n_views:
            raise LayoutInvalid(f"model has {model.n_views} views, dataset has {ds.n_views}")
        y = model.transform([v.x for v in ds.views])
    else:
        y = model.transform(ds.concatenated().x)
    head = ["sample", "class"] + [f"y{j}" for j in range(y.shape[0])]
    rows = [[i, ds.class_labels[i]] + ["%.17g" % v for v in y[:, i]]
            for i in range(y.shape[1])]
    _write(args.out, _tsv([head] + rows), args)
    return 0


def _stem(out):
    out = Path(out)
    return out.with_suffix("") if out.suffix in (".tsv", ".txt") else out


def cmd_eval(args):
    ds = load_dataset(args.dataset)
    cfg = EvalConfig(folds=args.folds, knn_k=args.knn_k, seed=args.seed,
                     pca_energy=args.pca_energy, prototype_count=args.prototypes,
                     timing_repeats=args.timing_repeats, sigma=args.sigma)
    if args.z:
        cfg.z_grid = tuple(args.z)
    if args.alpha:
        cfg.alpha_grid = tuple(args.alpha)
    method = EVAL_ALIASES.get(args.method, args.method)
    report = run_experiment(ds, method, cfg, name=args.dataset, jobs=args.jobs)
    stem = _stem(args.out)
    _write(f"{stem}.tsv", _tsv([report.TSV_COLUMNS] + report.tsv_rows()), args)
    _write(f"{stem}.txt", report.summary(timing=False).splitlines(), args)
    timing = [report.TIMING_COLUMNS] + report.timing_rows()
    machine = [f"# machine {k}: {v}" for k, v in report.machine.items()]
    _write(f"{stem}.timing.tsv", machine + _tsv(timing), args)
    print(report.summary())
    return 0


def cmd_bench(args):
    rows = benchmark_speed(args.d_grid, args.n_grid, args.c, args.z, args.seed,
                           repeats=args.repeats, alpha=args.alpha or 1.0)
    table = [BENCH_COLUMNS] + [
        [r.dim, r.n, r.c, r.z, "%.6f" % r.t_oracle, "%.6f" % r.t_fast, "%.3f" % r.ratio]
        for r in rows
    ]
    stem = _stem(args.out)
    _write(f"{stem}.tsv", _tsv(table), args)
    text = [f"D={r.dim} N={r.n}: oracle {r.t_oracle:.4f}s, fast {r.t_fast:.4f}s, "
            f"speed-up {r.ratio:.1f}x" for r in rows]
    _write(f"{stem}.txt", text, args)
    print("\n".join(text))
    return 0


def cmd_oracle_check(args):
    sizes = json.loads(args.sizes) if args.sizes else ORACLE_CONFIGS[args.config]
    layout = LabelLayout.from_sizes(sizes)
    lb = None
    if args.corrupt:
        built = build_lb_single(layout) if layout.n_views == 1 else build_lb_multiview(layout)
        lb = built.lb.copy()
        lb[0, -1] += args.corrupt
    checks = structural_checks(layout, rng=args.seed, lb=lb)
    rank = next(c for c in checks if c.name == "rank")
    lines = [f"views={layout.n_views} classes={layout.n_classes} "
             f"subclasses={layout.n_subclasses} samples={layout.n_samples}",
             f"rank {int(rank.value)} (expected {int(rank.limit)})"]
    lines += _tsv([("status", "check", "value", "limit")]) + [c.line() for c in checks]
    failed = [c.name for c in checks if not c.passed]
    lines.append("all checks passed" if not failed else "failed: " + ", ".join(failed))
    if args.out:
        _write(args.out, lines, args)
    print("\n".join(lines))
    return 1 if failed else 0


def build_parser():
    parser = _Parser(prog="fastsda", description="Fast subclass discriminant analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out_required=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=out_required)
        return p

    p = common(sub.add_parser("cluster", help="k-means subclass labels per class"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--per-view", action="store_true", help="cluster every view separately")
    p.set_defaults(func=cmd_cluster)

    p = common(sub.add_parser("fit", help="cluster, build targets, regress, save"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", choices=FIT_METHODS, default="sv-linear")
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--sigma", type=float)
    p.add_argument("--normalization", choices=("l2", "orthogonal", "none"), default="l2")
    p.add_argument("--prototypes", type=int, default=1000)
    p.set_defaults(func=cmd_fit)

    p = common(sub.add_parser("transform", help="embed a dataset with a saved model"))
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_transform)

    defaults = EvalConfig()
    p = common(sub.add_parser("eval", help="cross-validated kNN accuracy"))
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", choices=sorted(set(EVAL_ALIASES) | set(EVAL_ALIASES.values())),
                   default="sv-linear")
    p.add_argument("--z", type=int, nargs="+", help="restrict the Z grid")
    p.add_argument("--alpha", type=float, nargs="+", help="restrict the alpha grid")
    p.add_argument("--sigma", type=float)
    p.add_argument("--folds", type=int, default=defaults.folds)
    p.add_argument("--knn-k", type=int, default=defaults.knn_k)
    p.add_argument("--pca-energy", type=float, default=defaults.pca_energy)
    p.add_argument("--prototypes", type=int, default=defaults.prototype_count)
    p.add_argument("--timing-repeats", type=int, default=defaults.timing_repeats)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = common(sub.add_parser("bench", help="fit time of the eigen baseline vs the fast fit"))
    p.add_argument("--d-grid", type=int, nargs="+", default=[300, 600, 1200, 2400])
    p.add_argument("--n-grid", type=int, nargs="+", default=[600])
    p.add_argument("--c", type=int, default=7)
    p.add_argument("--z", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    p = common(sub.add_parser("oracle-check", help="Laplacian and target invariants"),
               out_required=False)
    p.add_argument("--config", choices=sorted(ORACLE_CONFIGS), default="single")
    p.add_argument("--sizes", help="JSON nested subclass sizes, [c][z] or [v][c][z]")
    p.add_argument("--corrupt", type=float, default=0.0,
                   help="add this amount to one off-diagonal entry of L_b")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.invocation = "fastsda " + shlex.join(argv)
    try:
        return args.func(args)
    except FastSDAError as exc:
        print(f"fastsda: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"fastsda: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"fastsda: invalid argument: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
