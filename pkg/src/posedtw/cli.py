"""Command-line interface.

Exit codes: 0 success (a REJECTED classification included), 1 data or
processing error, 2 usage error, 3 classification failed because no
dimension was salient.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .classify import PipelineParams, TemplateSet, classify
from .dtw import dtw_exact, fast_dtw
from .errors import ClassificationFailed, GestureError
from .evaluation import (
    build_templates, default_workers, load_corpus, run_protocol, sweep_t_var,
    write_confusion_csv, write_sweep_csv,
)
from .formats import (
    read_manifest, read_sequence, read_template_set, write_manifest, write_sequence,
    write_template_set,
)
from .keypoints import load_sequence, repair_missing
from .normalize import normalize_sequence
from .signals import gaussian_filter

logger = logging.getLogger("posedtw")

EXIT_OK, EXIT_DATA, EXIT_USAGE, EXIT_FAILED = 0, 1, 2, 3

# flag dest -> PipelineParams field
PARAM_FLAGS = {
    "median_radius": "median_radius",
    "sigma": "sigma",
    "t_var": "t_var",
    "dtw": "dtw_method",
    "radius": "dtw_radius",
    "reject_threshold": "reject_threshold",
    "aggregate": "aggregate",
}


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load_config(path: str | None) -> dict:
    path = path or os.environ.get("CONFIG")
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return cfg


def resolve_params(args, base: PipelineParams | None = None, only=None) -> PipelineParams:
    """Flags override the config file, which overrides ``base`` (or the defaults).

    ``only`` limits which parameters may be overridden.
    """
    cfg = _load_config(getattr(args, "config", None))
    values = (base or PipelineParams()).to_dict()
    for key in values:
        if key in cfg and (only is None or key in only):
            values[key] = cfg[key]
    for dest, key in PARAM_FLAGS.items():
        v = getattr(args, dest, None)
        if v is not None and (only is None or key in only):
            values[key] = v
    try:
        return PipelineParams(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))


def _threads(args) -> int:
    cfg = _load_config(getattr(args, "config", None))
    n = args.threads if args.threads is not None else cfg.get("threads", default_workers())
    return max(1, int(n))


def cmd_ingest(args) -> int:
    src = Path(args.openpose_dir)
    if not src.is_dir():
        raise UsageError(f"{src} is not a directory")
    raw = repair_missing(load_sequence(src))
    seq = normalize_sequence(raw, label=args.label, fps=args.fps)
    out = Path(args.out) if args.out else Path(f"{raw.source_id}.json")
    write_sequence(seq, out)
    print(f"{out}: {len(seq)} frames")
    if args.manifest:
        if args.label is None or args.subject is None or args.trial is None:
            raise UsageError("--manifest needs --label, --subject and --trial")
        mpath = Path(args.manifest)
        entries = [dict(e, path=os.path.relpath(e["path"], mpath.parent))
                   for e in read_manifest(mpath)] if mpath.exists() else []
        entries.append({"path": os.path.relpath(out, mpath.parent), "label": args.label,
                        "subject": args.subject, "trial": args.trial})
        write_manifest(entries, mpath)
    return EXIT_OK


def cmd_train(args) -> int:
    params = resolve_params(args)
    corpus = load_corpus(args.manifest)
    prepared = [(e, params.prepare(e.sequence)) for e in corpus.entries]
    templates = build_templates(prepared, corpus.gesture_ids, str(args.subject), params)
    write_template_set(templates, args.out)
    for gid, tpl in templates.templates.items():
        print(f"{gid}\t{tpl.source_id}\t{tpl.total_distance:.6f}")
    return EXIT_OK


def cmd_classify(args) -> int:
    stored = read_template_set(args.templates)
    # preparation must match the stored templates; only classification-time
    # parameters may be overridden
    params = resolve_params(
        args, stored.params, only={"t_var", "dtw_radius", "dtw_method", "reject_threshold",
                                    "aggregate"},
    )
    templates = TemplateSet(stored.templates, params)
    query = params.prepare(read_sequence(args.sequence))
    try:
        outcome = classify(query, templates)
    except ClassificationFailed as exc:
        print(json.dumps({"query_id": query.source_id, "predicted": None, "error": str(exc)}))
        return EXIT_FAILED
    print(json.dumps(outcome.to_dict(), indent=None if args.compact else 2))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    params = resolve_params(args)
    corpus = load_corpus(args.manifest)
    workers = _threads(args)
    if args.sweep:
        report = sweep_t_var(corpus, args.subject, params, args.sweep, workers)
        out = Path(args.out or "sweep.csv")
        write_sweep_csv(report, out)
        for row in report.rows:
            print("t_var={:g} accuracy={:.4f} ({}/{}) failed={}".format(*row))
        if not args.no_figures:
            from .plotting import plot_sweep
            plot_sweep(report, out.with_suffix(".png"))
    else:
        res = run_protocol(corpus, args.subject, params, workers)
        out = Path(args.out or "confusion.csv")
        write_confusion_csv(res.confusion, out)
        cm = res.confusion
        print(f"accuracy {cm.accuracy:.4f} ({cm.correct}/{cm.total}) failed={res.n_failed}")
        if not args.no_figures:
            from .plotting import plot_confusion_matrix
            plot_confusion_matrix(cm, out.with_suffix(".png"))
    print(f"wrote {out}")
    return EXIT_OK


BENCH_COLUMNS = ("length", "method", "radius", "mean_seconds", "mean_rel_error")


def run_bench(lengths, radii, repeats: int = 3, seed: int = 0) -> list[dict]:
    """Time exact and FastDTW on smoothed random walks of each length."""
    rng = np.random.default_rng(seed)
    rows = []
    for n in lengths:
        pairs = [(gaussian_filter(np.cumsum(rng.normal(size=n))),
                  gaussian_filter(np.cumsum(rng.normal(size=n)))) for _ in range(repeats)]
        exact, elapsed = [], 0.0
        for a, b in pairs:
            t0 = time.perf_counter()
            exact.append(dtw_exact(a, b)[0])
            elapsed += time.perf_counter() - t0
        rows.append({"length": n, "method": "exact", "radius": "",
                     "mean_seconds": elapsed / repeats, "mean_rel_error": 0.0})
        for r in radii:
            errs, elapsed = [], 0.0
            for (a, b), e in zip(pairs, exact):
                t0 = time.perf_counter()
                d = fast_dtw(a, b, r)[0]
                elapsed += time.perf_counter() - t0
                errs.append((d - e) / e if e > 0 else (0.0 if d == 0 else float("inf")))
            rows.append({"length": n, "method": "fast", "radius": r,
                         "mean_seconds": elapsed / repeats, "mean_rel_error": float(np.mean(errs))})
    return rows


def cmd_bench(args) -> int:
    if any(n < 1 for n in args.lengths) or any(r < 0 for r in args.radius):
        raise UsageError("lengths must be >= 1 and radii >= 0")
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    rows = run_bench(args.lengths, args.radius, args.repeats, args.seed)
    print(f"{'length':>8} {'method':>6} {'radius':>6} {'mean_s':>12} {'rel_err':>10}")
    for r in rows:
        print(f"{r['length']:>8} {r['method']:>6} {r['radius']!s:>6} "
              f"{r['mean_seconds']:>12.6f} {r['mean_rel_error']:>10.4%}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, BENCH_COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        if not args.no_figures:
            from .plotting import plot_bench
            plot_bench(rows, Path(args.csv).with_suffix(".png"))
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synthetic import CONFUSABLE_GESTURE, GeneratorSpec, SEPARABLE_GESTURES
    from .synthetic import generate_synthetic_corpus

    gestures = tuple(args.gestures.split(",")) if args.gestures else SEPARABLE_GESTURES
    if args.confusable and CONFUSABLE_GESTURE not in gestures:
        gestures += (CONFUSABLE_GESTURE,)
    spec = GeneratorSpec(gestures=gestures, n_subjects=args.subjects, n_trials=args.trials,
                         noise=args.noise)
    corpus = generate_synthetic_corpus(spec, args.seed if args.seed is not None else 0)
    out = Path(args.out_dir)
    (out / "sequences").mkdir(parents=True, exist_ok=True)
    entries = []
    for e in corpus.entries:
        rel = Path("sequences") / f"{e.sequence.source_id}.json"
        write_sequence(e.sequence, out / rel)
        entries.append({"path": str(rel), "label": e.label, "subject": e.subject, "trial": e.trial})
    write_manifest(entries, out / "manifest.json")
    print(f"{out / 'manifest.json'}: {len(entries)} sequences, {len(gestures)} gestures")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with pipeline parameters (or $CONFIG)")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--threads", type=int, help="worker processes (default: CPU count)")

    pipe = argparse.ArgumentParser(add_help=False)
    g = pipe.add_argument_group("pipeline parameters")
    g.add_argument("--median-radius", type=int, help="median filter radius (default 3)")
    g.add_argument("--sigma", type=float, help="Gaussian filter sigma (default 1.0)")
    g.add_argument("--t-var", type=float, help="variance threshold (default 0.10)")
    g.add_argument("--dtw", choices=("fast", "exact"), help="DTW variant (default fast)")
    g.add_argument("--radius", type=int, help="FastDTW radius (default 1)")
    g.add_argument("--reject-threshold", type=float, help="reject above this distance")
    g.add_argument("--aggregate", choices=("sum", "mean", "max"),
                   help="reduction over per-dimension distances (default sum)")

    p = argparse.ArgumentParser(prog="posedtw", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="OpenPose JSON directory -> sequence file")
    s.add_argument("openpose_dir")
    s.add_argument("-o", "--out")
    s.add_argument("--label")
    s.add_argument("--subject")
    s.add_argument("--trial", type=int)
    s.add_argument("--fps", type=float)
    s.add_argument("--manifest", help="append the written sequence to this manifest")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("train", parents=[common, pipe], help="select one template per gesture")
    s.add_argument("--manifest", required=True)
    s.add_argument("--subject", required=True)
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("classify", parents=[common, pipe], help="classify one sequence file")
    s.add_argument("sequence")
    s.add_argument("--templates", required=True)
    s.add_argument("--compact", action="store_true", help="single-line JSON")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("evaluate", parents=[common, pipe], help="run the evaluation protocol")
    s.add_argument("--manifest", required=True)
    s.add_argument("--subject", required=True, help="subject whose trials provide templates")
    s.add_argument("--sweep", type=_float_list, help="comma-separated t_var values")
    s.add_argument("-o", "--out", help="CSV path (default confusion.csv or sweep.csv)")
    s.add_argument("--no-figures", action="store_true")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("bench", parents=[common], help="exact DTW vs FastDTW timing")
    s.add_argument("--lengths", type=_int_list, default=[256, 1024])
    s.add_argument("--radius", type=_int_list, default=[1])
    s.add_argument("--repeats", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", help="also write the table as CSV (figure alongside)")
    s.add_argument("--no-figures", action="store_true")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("synth", parents=[common], help="write a synthetic corpus + manifest")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--gestures", help="comma-separated gesture names")
    s.add_argument("--confusable", action="store_true", help="add a near-duplicate class")
    s.add_argument("--subjects", type=int, default=8)
    s.add_argument("--trials", type=int, default=4)
    s.add_argument("--noise", type=float, default=2.0)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"posedtw {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GestureError, OSError, ValueError) as exc:
        print(f"posedtw {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
