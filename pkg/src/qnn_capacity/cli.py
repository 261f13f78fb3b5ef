"""Command-line entry point: ``qnn-capacity {train,eval,predict,sweep,synth}``.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .data import fit_bounds, load_csv, split, synthetic_fade, write_csv
from .exceptions import QnnError
from .model import build_model, load_model, predict_batch, save_model
from .training import TrainConfig, evaluate, train

log = logging.getLogger("qnn_capacity")

REPORT_SCHEMA_VERSION = 1
SWEEP_HEADER = ["qubits", "depth", "seed", "status", "train_rmse", "test_rmse",
                "train_mape", "test_mape", "iters", "seconds"]


class UsageError(Exception):
    """Bad flag values detected after argparse accepted them."""


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _fraction(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"fraction must lie in (0, 1), got {value}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _cycle_range(text):
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m or int(m.group(1)) > int(m.group(2)) or int(m.group(1)) < 1:
        raise argparse.ArgumentTypeError(f"expected a range like 1..200, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _add_split_flags(p):
    p.add_argument("--train-frac", type=_fraction, default=0.8)
    p.add_argument("--split-mode", choices=["chrono", "random"], default="chrono")


def _add_train_flags(p):
    p.add_argument("--encoding", choices=["arc", "simple"], default="arc")
    p.add_argument("--max-iters", type=_positive_int, default=200)
    p.add_argument("--grad-tol", type=float, default=1e-6)
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="worker processes for sweeps (default 1, deterministic)")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall-clock fields so outputs are byte-reproducible")


def build_parser():
    parser = argparse.ArgumentParser(prog="qnn-capacity",
                                     description="Quantum neural network capacity-fade regression.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on a capacity CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--qubits", type=_positive_int, default=4)
    p.add_argument("--depth", type=_positive_int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="model.json")
    p.add_argument("--report", default="report.json")
    _add_split_flags(p)
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="metrics of a saved model on the train/test slices")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--seed", type=int, default=0, help="seed of a random split")
    p.add_argument("--out", help="write metrics JSON here")
    p.add_argument("--qubits", type=_positive_int, help="ignored; the model file wins")
    p.add_argument("--depth", type=_positive_int, help="ignored; the model file wins")
    _add_split_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="predict capacities from a saved model")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--cycles", type=_cycle_range, help="inclusive range a..b")
    src.add_argument("--data", help="capacity CSV; measured values are echoed")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="grid over qubits x depth x seed")
    p.add_argument("--data", required=True)
    p.add_argument("--qubits", type=_int_list, default=[1, 2, 3, 4])
    p.add_argument("--depths", type=_int_list, default=[1, 2, 3])
    p.add_argument("--seeds", type=_int_list, default=[1, 2, 3])
    p.add_argument("--out", default="sweep.csv")
    p.add_argument("--max-runs", type=_positive_int, default=64)
    _add_split_flags(p)
    _add_train_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic exponential-fade CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--cycles", type=_positive_int, default=168)
    p.add_argument("--rated", type=float, default=2.0)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_synth)
    return parser


def _config(args):
    return TrainConfig(max_iters=args.max_iters, grad_tol=args.grad_tol, seed=args.seed)


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_training(series, qubits, depth, seed, train_frac, split_mode, encoding, cfg):
    train_data, test_data = split(series, train_frac, split_mode, seed)
    initial = build_model(qubits, depth, fit_bounds(train_data), mode=encoding, seed=seed,
                          capacities=train_data.capacities)
    return train(initial, train_data, test_data, cfg)


def cmd_train(args):
    series = load_csv(args.data)
    cfg = _config(args)
    model, report = run_training(series, args.qubits, args.depth, args.seed, args.train_frac,
                                 args.split_mode, args.encoding, cfg)
    save_model(model, args.out)
    doc = report.as_dict(timing=not args.no_timing)
    doc["schema_version"] = REPORT_SCHEMA_VERSION
    doc["config"] = {
        "data": args.data, "battery_id": series.battery_id, "qubits": args.qubits,
        "depth": args.depth, "train_frac": args.train_frac, "split_mode": args.split_mode,
        "encoding": args.encoding, "seed": args.seed, "max_iters": cfg.max_iters,
        "grad_tol": cfg.grad_tol, "armijo_c": cfg.armijo_c,
        "backtrack_factor": cfg.backtrack_factor, "max_backtracks": cfg.max_backtracks,
        "loss_kind": cfg.loss_kind, "readout_qubit": model.readout_qubit,
    }
    _write_json(args.report, doc)
    print(f"{series.battery_id}: {report.iterations} iterations ({report.stop_reason})")
    print(f"train RMSE {report.train_rmse:.6f} Ah  MAPE {report.train_mape:.4f} %")
    print(f"test  RMSE {report.test_rmse:.6f} Ah  MAPE {report.test_mape:.4f} %")
    return 0


def cmd_eval(args):
    model = load_model(args.model)
    if args.qubits is not None and args.qubits != model.n_qubits:
        log.warning("--qubits %d ignored, model has %d qubits", args.qubits, model.n_qubits)
    if args.depth is not None and args.depth != model.ansatz.depth:
        log.warning("--depth %d ignored, model has depth %d", args.depth, model.ansatz.depth)
    series = load_csv(args.data)
    train_data, test_data = split(series, args.train_frac, args.split_mode, args.seed)
    train_m, test_m = evaluate(model, train_data), evaluate(model, test_data)
    print(f"train RMSE {train_m.rmse:.6f} Ah  MAPE {train_m.mape:.4f} %")
    print(f"test  RMSE {test_m.rmse:.6f} Ah  MAPE {test_m.mape:.4f} %")
    if args.out:
        _write_json(args.out, {"schema_version": REPORT_SCHEMA_VERSION,
                               "train": train_m.as_dict(), "test": test_m.as_dict()})
    return 0


def cmd_predict(args):
    model = load_model(args.model)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if args.data:
        series = load_csv(args.data)
        writer.writerow(["cycle", "measured_ah", "predicted_ah"])
        preds = predict_batch(model, series.cycles)
        for rec, pred in zip(series.records, preds):
            writer.writerow([rec.cycle, repr(rec.capacity), repr(pred)])
    else:
        lo, hi = args.cycles
        cycles = list(range(lo, hi + 1))
        writer.writerow(["cycle", "predicted_ah"])
        for c, pred in zip(cycles, predict_batch(model, cycles)):
            writer.writerow([c, repr(pred)])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def _sweep_job(job):
    data_path, qubits, depth, seed, frac, split_mode, encoding, cfg = job
    start = time.perf_counter()
    try:
        series = load_csv(data_path)
        _, report = run_training(series, qubits, depth, seed, frac, split_mode, encoding, cfg)
    except (QnnError, ValueError, ArithmeticError) as exc:
        return {"qubits": qubits, "depth": depth, "seed": seed, "status": "failed",
                "error": str(exc), "seconds": time.perf_counter() - start}
    return {"qubits": qubits, "depth": depth, "seed": seed, "status": "ok",
            "train_rmse": report.train_rmse, "test_rmse": report.test_rmse,
            "train_mape": report.train_mape, "test_mape": report.test_mape,
            "iters": report.iterations, "seconds": report.wall_time}


def _cell(value):
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def cmd_sweep(args):
    n_runs = len(args.qubits) * len(args.depths) * len(args.seeds)
    if n_runs > args.max_runs:
        raise UsageError(f"grid has {n_runs} runs, above the cap of {args.max_runs} "
                         f"(raise --max-runs to allow it)")
    load_csv(args.data)  # fail fast on unreadable input
    jobs = [(args.data, q, d, s, args.train_frac, args.split_mode, args.encoding,
             TrainConfig(max_iters=args.max_iters, grad_tol=args.grad_tol, seed=s))
            for q in args.qubits for d in args.depths for s in args.seeds]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_sweep_job, jobs))
    else:
        rows = [_sweep_job(j) for j in jobs]
    rows.sort(key=lambda r: (r["qubits"], r["depth"], r["seed"]))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        if args.no_timing:
            row["seconds"] = None
        writer.writerow([_cell(row.get(k)) for k in SWEEP_HEADER])
        if row["status"] == "failed":
            log.error("run q=%d d=%d seed=%d failed: %s",
                      row["qubits"], row["depth"], row["seed"], row["error"])
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    n_ok = sum(r["status"] == "ok" for r in rows)
    print(f"{n_ok}/{len(rows)} runs succeeded -> {args.out}")
    return 0 if n_ok else 1


def cmd_synth(args):
    series = synthetic_fade(n_cycles=args.cycles, rated=args.rated, noise=args.noise,
                            seed=args.seed)
    write_csv(series, args.out)
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qnn-capacity: error: {exc}", file=sys.stderr)
        return 2
    except (QnnError, OSError, ValueError) as exc:
        print(f"qnn-capacity: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
