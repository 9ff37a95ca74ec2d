"""Batch command-line front door.

Subcommands: ``synth`` (generate synthetic peak/label files), ``extract``
(peaks + labels -> feature CSV), ``train`` (feature CSVs -> model file),
``eval`` (model + feature CSVs -> metrics report), ``pd`` (series/cloud CSV
-> diagram CSV, or bottleneck distance between two diagram CSVs), ``serve``
(run the HTTP service).

Exit codes: 0 success, 1 usage error, 2 data error.  Every command is a pure
function of its input files, flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import learn, pipeline, synth
from .diagrams import INF, read_diagrams, write_diagrams
from .distance import bottleneck
from .rips import vr_pd
from .sublevel import sublevel_pd0, sublevel_pd0_at

TASKS = ("sleep-wake", "rem-nrem", "3-class")

EXIT_USAGE = 1
EXIT_DATA = 2


class CliError(Exception):
    """Data-level error: malformed file, bad contents (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; the contract is 1
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tophrv", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="key=value defaults file; flags win")
        sp.add_argument("--fs", type=float, default=4.0, help="IHR sampling rate (Hz)")
        sp.add_argument("--epoch", type=float, default=30.0, help="epoch length (s)")
        sp.add_argument("--window", type=int, default=3, help="epochs per window")
        sp.add_argument("--dim", type=int, default=120, help="embedding dimension")
        sp.add_argument("--lag", type=int, default=1, help="embedding lag")
        sp.add_argument("--seed", type=int, default=1, help="PRNG seed")
        sp.add_argument("--rr-low", type=float, default=pipeline.RR_LOW)
        sp.add_argument("--rr-high", type=float, default=pipeline.RR_HIGH)

    sp = sub.add_parser("synth", help="generate synthetic recordings")
    add_common(sp)
    sp.add_argument("--recordings", type=int, default=1)
    sp.add_argument("--minutes", type=float, default=30.0)
    sp.add_argument("--out-dir", required=True)

    sp = sub.add_parser("extract", help="extract features from peak/label files")
    add_common(sp)
    sp.add_argument("--peaks", action="append", required=True, help="peaks file (repeatable)")
    sp.add_argument("--labels", action="append", required=True, help="labels file (repeatable)")
    sp.add_argument("--out", required=True, help="output feature CSV")
    sp.add_argument("--jobs", type=int, default=1, help="worker threads per recording")

    sp = sub.add_parser("train", help="train a classifier on feature CSVs")
    add_common(sp)
    sp.add_argument("--features", action="append", required=True)
    sp.add_argument("--task", choices=TASKS, default="sleep-wake")
    sp.add_argument("--no-normalize", action="store_true")
    sp.add_argument("--out", required=True, help="output model file")

    sp = sub.add_parser("eval", help="evaluate a model on feature CSVs")
    add_common(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--features", action="append", required=True)
    sp.add_argument("--out", help="per-recording metrics CSV")

    sp = sub.add_parser("pd", help="compute a persistence diagram or a distance")
    add_common(sp)
    sp.add_argument("--input", help="series or point-cloud CSV")
    sp.add_argument("--filtration", choices=("sublevel", "vr"), default="sublevel")
    sp.add_argument("--thresholds", help="comma-separated sub-level thresholds")
    sp.add_argument("--threshold", type=float, default=INF, help="VR diameter cutoff")
    sp.add_argument("--distance", nargs=2, metavar=("A", "B"), help="two diagram CSVs")
    sp.add_argument("--out", help="output diagram CSV")

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    return p


# ---------------------------------------------------------------------------
# task label grouping
# ---------------------------------------------------------------------------


def task_labels(rows, task: str):
    """Group epoch labels per task; returns (kept rows, mapped labels, names).

    sleep-wake: wake=0 vs sleep=1 (REM and NREM together); rem-nrem: REM=0 vs
    NREM=1, wake excluded; 3-class: wake/REM/NREM as 0/1/2.
    """
    kept, ys = [], []
    if task == "sleep-wake":
        names = ["wake", "sleep"]
        for r in rows:
            kept.append(r)
            ys.append(0 if r.label == 0 else 1)
    elif task == "rem-nrem":
        names = ["rem", "nrem"]
        for r in rows:
            if r.label == 0:
                continue
            kept.append(r)
            ys.append(r.label - 1)
    elif task == "3-class":
        names = ["wake", "rem", "nrem"]
        for r in rows:
            kept.append(r)
            ys.append(r.label)
    else:
        raise CliError(f"unknown task {task!r}")
    return kept, ys, names


def _normalized_by_recording(rows):
    by_rec: dict[str, list] = {}
    for r in rows:
        by_rec.setdefault(r.recording_id, []).append(r)
    out = []
    for rec in sorted(by_rec):
        out.extend(pipeline.normalize_per_recording(by_rec[rec]))
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_synth(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k in range(args.recordings):
        peaks, labels = synth.synth_recording(args.seed + k, args.minutes, args.epoch)
        rec = f"rec{k + 1:03d}"
        with open(out / f"{rec}.peaks.txt", "w") as fh:
            fh.writelines(f"{float(t)!r}\n" for t in peaks)
        with open(out / f"{rec}.labels.txt", "w") as fh:
            fh.writelines(f"{lab}\n" for lab in labels)
        print(f"{rec}: {peaks.size} beats, {len(labels)} epochs")
    return 0


def cmd_extract(args) -> int:
    if len(args.peaks) != len(args.labels):
        raise CliError("--peaks and --labels must be given the same number of times")
    rows = []
    for peaks_path, labels_path in zip(args.peaks, args.labels):
        peaks = pipeline.read_peaks(peaks_path)
        labels = pipeline.read_labels(labels_path)
        rec_id = Path(peaks_path).name.removesuffix(".peaks.txt").removesuffix(".txt")
        rows.extend(
            pipeline.extract_recording(
                peaks,
                labels,
                rec_id,
                fs=args.fs,
                epoch_sec=args.epoch,
                window_epochs=args.window,
                embed_dim=args.dim,
                lag=args.lag,
                rr_low=args.rr_low,
                rr_high=args.rr_high,
                jobs=args.jobs,
            )
        )
    pipeline.write_features(args.out, rows)
    print(f"{args.out}: {len(rows)} feature rows")
    return 0


def _load_feature_files(paths):
    rows = []
    for path in paths:
        rows.extend(pipeline.read_features(path))
    return rows


def cmd_train(args) -> int:
    rows = _load_feature_files(args.features)
    normalize = not args.no_normalize
    if normalize:
        rows = _normalized_by_recording(rows)
    kept, ys, names = task_labels(rows, args.task)
    relabeled = [
        pipeline.FeatureRow(r.recording_id, r.epoch_index, y, r.features)
        for r, y in zip(kept, ys)
    ]
    balanced = learn.downsample_balance(relabeled, args.seed, classes=range(len(names)))
    X = np.stack([r.features for r in balanced])
    y = [r.label for r in balanced]
    ensemble = learn.train_ecoc_ovo(X, y, classes=range(len(names)))
    learn.save_model(args.out, ensemble, args.task, normalize)
    counts = {names[c]: y.count(c) for c in range(len(names))}
    print(f"{args.out}: trained on {len(balanced)} balanced epochs {counts}")
    return 0


def cmd_eval(args) -> int:
    ensemble, task, normalize = learn.load_model(args.model)
    rows = _load_feature_files(args.features)
    if normalize:
        rows = _normalized_by_recording(rows)
    kept, ys, names = task_labels(rows, task)
    m = len(names)
    binary = m == 2

    by_rec: dict[str, list[tuple]] = {}
    for r, y in zip(kept, ys):
        by_rec.setdefault(r.recording_id, []).append((r, y))

    per_rec = []
    for rec in sorted(by_rec):
        pairs = by_rec[rec]
        y_true = [y for _, y in pairs]
        y_pred = [learn.predict_ovo(ensemble, r.features) for r, _ in pairs]
        M = learn.confusion(y_true, y_pred, m)
        met = learn.metrics(M)
        row = {"recording_id": rec, "epochs": len(pairs), "acc": met["acc"],
               "kappa": met["kappa"]}
        for k, name in enumerate(names):
            row[f"se_{name}"] = float(met["se"][k])
            row[f"ppv_{name}"] = float(met["ppv"][k])
            row[f"f1_{name}"] = float(met["f1"][k])
        if binary:
            scores = [learn.decision_score(ensemble.models[0], r.features) for r, _ in pairs]
            pos = [1 if y == 1 else 0 for y in y_true]
            row["auc"] = learn.auc(scores, pos) if 0 < sum(pos) < len(pos) else math.nan
        per_rec.append(row)

    metric_names = [k for k in per_rec[0] if k not in ("recording_id", "epochs")]
    print(f"task: {task}  recordings: {len(per_rec)}")
    print(f"{'recording':<12}" + "".join(f"{k:>12}" for k in metric_names))
    for row in per_rec:
        print(
            f"{row['recording_id']:<12}"
            + "".join(f"{row[k]:>12.4f}" for k in metric_names)
        )
    print("mean +- std over recordings (undefined values excluded):")
    summary = {}
    for k in metric_names:
        vals = np.array([row[k] for row in per_rec], dtype=np.float64)
        vals = vals[np.isfinite(vals)]
        summary[k] = (
            (float(vals.mean()), float(vals.std(ddof=1)) if vals.size > 1 else 0.0)
            if vals.size
            else (math.nan, math.nan)
        )
        print(f"  {k}: {summary[k][0]:.4f} +- {summary[k][1]:.4f}")

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["recording_id", "epochs"] + metric_names)
            for row in per_rec:
                w.writerow(
                    [row["recording_id"], row["epochs"]]
                    + [repr(float(row[k])) for k in metric_names]
                )
    return 0


def _read_series_csv(path) -> np.ndarray:
    """Series or point-cloud CSV: one sample (or one point) per row, no header."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(csv.reader(fh), start=1):
            if not line:
                continue
            try:
                vals = [float(v) for v in line]
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: bad numeric row {line!r}") from exc
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise CliError(f"{path}:{lineno}: expected {width} columns")
            rows.append(vals)
    if not rows:
        raise CliError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=np.float64)
    return arr[:, 0] if arr.shape[1] == 1 else arr


def cmd_pd(args) -> int:
    if args.distance:
        da = read_diagrams(args.distance[0])
        db = read_diagrams(args.distance[1])
        from .diagrams import PersistenceDiagram

        dims = sorted(set(da) | set(db))
        for dim in dims:
            a = da.get(dim, PersistenceDiagram(dim))
            b = db.get(dim, PersistenceDiagram(dim))
            print(f"dim {dim}: {bottleneck(a, b)!r}")
        return 0
    if not args.input:
        raise CliError("pd needs --input or --distance")
    data = _read_series_csv(args.input)
    if args.filtration == "sublevel":
        if data.ndim != 1:
            raise CliError("sub-level filtration expects a single-column series CSV")
        if args.thresholds:
            try:
                th = [float(v) for v in args.thresholds.split(",")]
            except ValueError as exc:
                raise CliError(f"bad --thresholds {args.thresholds!r}") from exc
            diagrams = [sublevel_pd0_at(data, th)]
        else:
            diagrams = [sublevel_pd0(data)]
    else:
        cloud = data if data.ndim == 2 else data[:, None]
        diagrams = vr_pd(cloud, max_dim=1, threshold=args.threshold)
    if args.out:
        write_diagrams(args.out, diagrams)
    else:
        print("dim,birth,death")
        for d in diagrams:
            for b, dd in d:
                print(f"{d.dim},{b!r},{'inf' if dd == INF else repr(dd)}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "extract": cmd_extract,
    "train": cmd_train,
    "eval": cmd_eval,
    "pd": cmd_pd,
    "serve": cmd_serve,
}


def _read_config(path) -> dict:
    """key=value defaults file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace, argv) -> None:
    """Fill in config-file values for options not given explicitly on the line."""
    defaults = _read_config(args.config)
    explicit = {a.lstrip("-").split("=")[0].replace("-", "_") for a in (argv or []) if a.startswith("--")}
    for key, raw in defaults.items():
        if key in explicit or not hasattr(args, key):
            continue
        current = getattr(args, key)
        if isinstance(current, bool):
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, key, int(raw))
        elif isinstance(current, float):
            setattr(args, key, float(raw))
        else:
            setattr(args, key, raw)


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _apply_config(parser, args, argv)
        return _COMMANDS[args.command](args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
