"""Command-line frontend: synth, evaluate, reconstruct, sweep.

Every command is deterministic given its flags and seed: reports carry no
timestamps or scheduling information, and per-sample random streams make
results independent of --threads. Exit codes: 0 success, 1 runtime or
geometry failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Sequence

import numpy as np

from .camera import ImagePoint, calibration_from_json_dict
from .dataio import Dataset, assign_folds, read_dataset, split, write_dataset
from .errors import CourtliftError
from .metrics import (
    EvalReport,
    METRIC_NAMES,
    aggregate_repeats,
    evaluate_arrays,
    height_histogram,
)
from .predictors import PredictorSpec, predict_diameters, predict_heights
from .reconstruct import (
    pack_calibrations,
    reconstruct_from_diameter_batch,
    reconstruct_from_height,
    reconstruct_from_height_batch,
)
from .synth import ArenaSpec, BallSample, HeightDistSpec, generate_dataset

DEFAULT_HIST_EDGES = (0.0, 1.0, 2.0, 3.0)


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("COURTLIFT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# Evaluation pipeline shared by `evaluate` and `sweep`.


def _sample_arrays(samples: Sequence[BallSample]):
    """Pack per-sample arrays and one calibration row per arena."""
    arena_order = sorted({s.arena_id for s in samples})
    row_of = {arena: i for i, arena in enumerate(arena_order)}
    cal_by_arena = {}
    for s in samples:
        cal_by_arena.setdefault(s.arena_id, s.cal)
    packed = pack_calibrations([cal_by_arena[a] for a in arena_order])
    idx = np.array([row_of[s.arena_id] for s in samples], dtype=np.int64)
    px = np.array([[s.ball_px.x, s.ball_px.y] for s in samples], dtype=np.float64)
    truth = np.array(
        [[s.ball_3d.x, s.ball_3d.y, s.ball_3d.z] for s in samples], dtype=np.float64
    )
    h_true = np.array([s.h_true for s in samples], dtype=np.float64)
    return packed, idx, px, truth, h_true


def evaluate_once(
    samples: Sequence[BallSample],
    spec: PredictorSpec,
    method: str = "height",
    threads: int = 1,
    ball_diameter_m: float = 0.24,
    height_offset: float | None = None,
) -> tuple[EvalReport, int]:
    """One predict -> reconstruct -> evaluate pass.

    `height_offset` bypasses the predictor with a constant shift of the
    true height (the noise-sweep mode). Samples whose reconstruction is
    geometrically impossible (e.g. a foot pixel pushed past the horizon
    by an extreme prediction) are excluded from the metrics; the second
    return value counts them.
    """
    packed, idx, px, truth, h_true = _sample_arrays(samples)
    if method == "height":
        if height_offset is not None:
            preds = h_true + float(height_offset)
        else:
            preds = predict_heights(spec, samples)
        batch = reconstruct_from_height_batch(packed, idx, px, preds, threads=threads)
        ok = batch.ok
        report = evaluate_arrays(
            truth[ok],
            h_true[ok],
            preds[ok],
            batch.ball_3d[ok],
            batch.ground_projection[ok],
        )
    elif method == "diameter":
        preds = predict_diameters(spec, samples, ball_diameter_m)
        batch = reconstruct_from_diameter_batch(
            packed, idx, px, preds, ball_diameter_m, threads=threads
        )
        ok = batch.ok
        report = evaluate_arrays(
            truth[ok], None, None, batch.ball_3d[ok], batch.ground_projection[ok]
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return report, int((~ok).sum())


def run_evaluation(
    samples: Sequence[BallSample],
    spec: PredictorSpec,
    method: str = "height",
    repeats: int = 1,
    threads: int = 1,
    ball_diameter_m: float = 0.24,
) -> tuple[list[EvalReport], list[int]]:
    """k seeded repeats; repeat r uses predictor seed spec.seed + r."""
    reports: list[EvalReport] = []
    failed: list[int] = []
    for r in range(repeats):
        spec_r = PredictorSpec(
            kind=spec.kind,
            sigma=spec.sigma,
            nu=spec.nu,
            target_mae=spec.target_mae,
            seed=spec.seed + r,
        )
        report, n_failed = evaluate_once(
            samples, spec_r, method, threads, ball_diameter_m
        )
        reports.append(report)
        failed.append(n_failed)
    return reports, failed


# ---------------------------------------------------------------------------
# Subcommands.


def _load_samples(args, parser) -> list[BallSample]:
    if args.dataset is not None:
        ds = read_dataset(args.dataset)
        if getattr(args, "fold", None):
            _, test = split(ds, args.fold)
            return test.samples
        return ds.samples
    dist = HeightDistSpec(kind=args.synth_dist)
    return generate_dataset(
        seed=args.synth_seed, n=args.synth_n, dist=dist, n_arenas=args.synth_arenas
    )


def _add_input_args(sub) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--dataset", help="dataset file written by `courtlift synth`")
    group.add_argument(
        "--synth-n", type=int, metavar="N", help="generate N synthetic samples instead"
    )
    sub.add_argument("--synth-arenas", type=int, default=10, help="cameras for --synth-n")
    sub.add_argument("--synth-seed", type=int, default=0, help="seed for --synth-n")
    sub.add_argument(
        "--synth-dist",
        choices=["deepsport_like", "ballistic_like", "uniform"],
        default="deepsport_like",
        help="height distribution for --synth-n",
    )


def _add_predictor_args(sub) -> None:
    sub.add_argument(
        "--predictor",
        choices=["oracle", "gaussian", "heavy_tailed"],
        default="oracle",
        help="height/diameter predictor standing in for a trained model",
    )
    sub.add_argument("--sigma", type=float, default=0.0, help="raw noise scale")
    sub.add_argument("--nu", type=float, default=3.0, help="Student-t degrees of freedom")
    sub.add_argument(
        "--target-mae", type=float, default=None, help="calibrate noise to this MAE"
    )


def cmd_synth(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be >= 1")
    if args.arenas < 1:
        parser.error("--arenas must be >= 1")
    arena = ArenaSpec()
    if args.arena_json:
        with open(args.arena_json, "r", encoding="utf-8") as f:
            arena = ArenaSpec.from_json_dict(json.load(f))
    dist_kwargs = {}
    if args.p_above_3m is not None:
        dist_kwargs["p_above_3m"] = args.p_above_3m
    if args.max_height is not None:
        dist_kwargs["max_height"] = args.max_height
    dist = HeightDistSpec(kind=args.dist, **dist_kwargs)
    samples = generate_dataset(
        seed=args.seed, n=args.n, arena=arena, dist=dist, n_arenas=args.arenas
    )
    folds = assign_folds([s.arena_id for s in samples], args.n_folds)
    ds = Dataset(samples=samples, folds=folds)
    write_dataset(ds, args.out)
    counts = height_histogram(samples, DEFAULT_HIST_EDGES)
    print(f"wrote {len(samples)} samples / {args.arenas} arenas to {args.out}")
    edges = list(DEFAULT_HIST_EDGES)
    labels = [f"[{edges[i]:g},{edges[i + 1]:g})" for i in range(len(edges) - 1)]
    labels.append(f"[{edges[-1]:g},inf)")
    print("height histogram (m): " + "  ".join(f"{l}={c}" for l, c in zip(labels, counts)))
    return 0


def cmd_evaluate(args, parser) -> int:
    if args.repeats < 1:
        parser.error("--repeats must be >= 1")
    samples = _load_samples(args, parser)
    spec = PredictorSpec(
        kind=args.predictor,
        sigma=args.sigma,
        nu=args.nu,
        target_mae=args.target_mae,
        seed=args.seed,
    )
    threads = _resolve_threads(args.threads)
    reports, failed = run_evaluation(
        samples,
        spec,
        method=args.method,
        repeats=args.repeats,
        threads=threads,
        ball_diameter_m=args.ball_diameter,
    )
    agg = aggregate_repeats(reports)
    payload = {
        "schema_version": 1,
        "command": "evaluate",
        "config": {
            "dataset": args.dataset,
            "fold": args.fold,
            "method": args.method,
            "predictor": spec.to_json_dict(),
            "repeats": args.repeats,
        },
        "aggregate": agg.to_json_dict(),
        "repeats": [
            {**r.to_json_dict(), "n_failed": nf} for r, nf in zip(reports, failed)
        ],
    }
    _write_json(args.out + ".json", payload)
    with open(args.out + ".csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["metric", "mean", "std"])
        writer.writerows(agg.to_csv_rows())
    for name in METRIC_NAMES:
        m = agg.mean[name]
        s = agg.std[name]
        if m is None:
            print(f"{name}: n/a")
        else:
            print(f"{name}: {m:.6g} +/- {s:.6g}")
    print(f"wrote {args.out}.json and {args.out}.csv")
    return 0


def cmd_reconstruct(args, parser) -> int:
    with open(args.cal, "r", encoding="utf-8") as f:
        cal = calibration_from_json_dict(json.load(f))
    result = reconstruct_from_height(cal, ImagePoint(args.x, args.y), args.height)
    print(json.dumps(result.to_json_dict(), indent=2, sort_keys=True))
    return 0


def cmd_sweep(args, parser) -> int:
    try:
        grid = [float(tok) for tok in args.grid.split(",") if tok.strip()]
    except ValueError:
        parser.error(f"--grid must be a comma-separated number list, got {args.grid!r}")
    if not grid:
        parser.error("--grid must contain at least one noise level")
    samples = _load_samples(args, parser)
    threads = _resolve_threads(args.threads)
    oracle = PredictorSpec(kind="oracle")
    rows = []
    for level in grid:
        report, n_failed = evaluate_once(
            samples, oracle, method="height", threads=threads, height_offset=level
        )
        rows.append(
            {
                "level_px": level,
                "mae_px": report.mae_px,
                "mape_m": report.mape_m,
                "ma3de_m": report.ma3de_m,
                "n_samples": report.n_samples,
                "n_failed": n_failed,
            }
        )
    payload = {
        "schema_version": 1,
        "command": "sweep",
        "config": {"dataset": args.dataset, "grid_px": grid},
        "levels": rows,
    }
    _write_json(args.out + ".json", payload)
    with open(args.out + ".csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["level_px", "mae_px", "mape_m", "ma3de_m"])
        for row in rows:
            writer.writerow(
                [repr(row["level_px"]), repr(row["mae_px"]), repr(row["mape_m"]), repr(row["ma3de_m"])]
            )
    for row in rows:
        print(
            f"level {row['level_px']:g} px -> MAPE {row['mape_m']:.6g} m, "
            f"MA3DE {row['ma3de_m']:.6g} m"
        )
    print(f"wrote {args.out}.json and {args.out}.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="courtlift",
        description="Monocular 3D ball localization: synthetic datasets, "
        "reconstruction, and evaluation reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate an annotated synthetic dataset")
    p_synth.add_argument("--n", type=int, required=True, help="number of samples")
    p_synth.add_argument("--arenas", type=int, default=10, help="number of cameras")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="output dataset file")
    p_synth.add_argument(
        "--dist",
        choices=["deepsport_like", "ballistic_like", "uniform"],
        default="deepsport_like",
        help="ball height distribution",
    )
    p_synth.add_argument("--p-above-3m", type=float, default=None)
    p_synth.add_argument("--max-height", type=float, default=None)
    p_synth.add_argument("--n-folds", type=int, default=5, help="arena folds to assign")
    p_synth.add_argument("--arena-json", default=None, help="ArenaSpec overrides (JSON file)")
    p_synth.set_defaults(func=cmd_synth)

    p_eval = sub.add_parser("evaluate", help="run predict/reconstruct/evaluate repeats")
    _add_input_args(p_eval)
    p_eval.add_argument("--fold", default=None, help="restrict to this test fold")
    _add_predictor_args(p_eval)
    p_eval.add_argument("--method", choices=["height", "diameter"], default="height")
    p_eval.add_argument("--ball-diameter", type=float, default=0.24, help="real size (m)")
    p_eval.add_argument("--repeats", type=int, default=1, help="seeded repetitions")
    p_eval.add_argument("--seed", type=int, default=0, help="base predictor seed")
    p_eval.add_argument("--out", required=True, help="report path prefix (.json/.csv)")
    p_eval.add_argument(
        "--threads", type=int, default=None, help="worker threads (COURTLIFT_THREADS)"
    )
    p_eval.set_defaults(func=cmd_evaluate)

    p_rec = sub.add_parser("reconstruct", help="lift one pixel + height to 3D")
    p_rec.add_argument("--cal", required=True, help="calibration JSON file")
    p_rec.add_argument("--x", type=float, required=True, help="ball pixel x (raw image)")
    p_rec.add_argument("--y", type=float, required=True, help="ball pixel y (raw image)")
    p_rec.add_argument(
        "--height", "--h", dest="height", type=float, required=True, help="pixel height"
    )
    p_rec.set_defaults(func=cmd_reconstruct)

    p_sweep = sub.add_parser(
        "sweep", help="MAPE/MA3DE vs height-error level (constant px offsets)"
    )
    _add_input_args(p_sweep)
    p_sweep.add_argument(
        "--grid", required=True, help="comma-separated height offsets in px, e.g. 0,5,10"
    )
    p_sweep.add_argument("--out", required=True, help="report path prefix (.json/.csv)")
    p_sweep.add_argument("--threads", type=int, default=None)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except CourtliftError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
