"""Headless command-line driver for pipelines and experiments.

Every command goes through the same session engine as the HTTP service, so
numbers printed here are the numbers the API serves. ``--json`` emits
canonical machine-readable output (sorted keys, timestamps omitted), which is
byte-stable for fixed seeds.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .augment import ConstraintSet
from .benchmark import (
    benchmark_csv,
    benchmark_schema,
    benchmark_session_config,
    ratio_group_means,
    run_ratio_sweep,
)
from .config import AppConfig, load_config
from .dataset import ingest, split
from .errors import WorkbenchError
from .model import train
from .schema import dump_schema, load_schema
from .session import Session, SessionConfig, SessionManager


def _stable(obj):
    """Drop volatile fields so --json output is byte-stable across runs."""
    if isinstance(obj, dict):
        return {k: _stable(v) for k, v in obj.items() if k != "timestamp"}
    if isinstance(obj, list):
        return [_stable(v) for v in obj]
    return obj


def _emit_json(obj) -> None:
    print(json.dumps(_stable(obj), sort_keys=True, indent=2))


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*headers), fmt.format(*["-" * w for w in widths])]
    lines.extend(fmt.format(*row) for row in rows)
    return "\n".join(lines)


def _manager(args) -> SessionManager:
    cfg = _app_config(args)
    return SessionManager(cfg.data_dir)


def _app_config(args) -> AppConfig:
    cfg = load_config(args.config) if args.config else load_config()
    if args.data_dir:
        cfg.data_dir = args.data_dir
    if getattr(args, "session", None):
        cfg.session_id = args.session
    return cfg


def _get_session(args) -> Session:
    cfg = _app_config(args)
    return SessionManager(cfg.data_dir).get(cfg.session_id)


# -- commands -------------------------------------------------------------

def cmd_ingest(args) -> int:
    cfg = _app_config(args)
    schema = load_schema(Path(args.schema).read_text())
    session_cfg = cfg.session
    if args.split is not None:
        session_cfg = SessionConfig.from_dict({**session_cfg.to_dict(), "heldout_fraction": args.split})
    if args.seed is not None:
        session_cfg = SessionConfig.from_dict({**session_cfg.to_dict(), "split_seed": args.seed})
    manager = SessionManager(cfg.data_dir)
    session = manager.create(Path(args.csv).read_bytes(), schema, session_cfg, cfg.session_id)
    out = session.overview()
    if args.json:
        _emit_json(out)
    else:
        print(f"session {session.session_id!r}: {out['train_rows']} train rows, "
              f"{out['heldout_rows']} heldout rows, accuracy {out['accuracy']:.4f}")
    return 0


def cmd_report(args) -> int:
    session = _get_session(args)
    if args.quality:
        report = session.quality()
        if args.json:
            _emit_json(report.to_dict())
        else:
            rows = [[k, f"{v:.4f}", f"{v * 100:.1f}%"] for k, v in report.severities().items()]
            print(_table(["issue", "severity", "pct"], rows))
            print(f"\noverall quality: {report.overall:.4f}")
        return 0

    report = session.bias()
    if args.segments:
        names = [args.segments]
    else:
        names = list(report.per_variable)
    if args.json:
        payload = report.to_dict()
        if args.segments:
            payload = {
                "variable": args.segments,
                "rr": report.variable_rr[args.segments],
                "segments": payload["variables"][args.segments]["segments"],
            }
        _emit_json(payload)
        return 0

    rows = []
    for name in names:
        for st in report.per_variable[name]:
            acc = " ".join(f"{cls}={v:.2f}" for cls, v in sorted(st.accuracy_by_outcome.items()))
            rows.append([
                name,
                st.segment.label,
                str(st.count),
                f"{st.representation_rate:.2f}",
                "yes" if st.covered else "NO",
                acc or "-",
            ])
    print(_table(["variable", "segment", "count", "rate", "covered", "heldout accuracy"], rows))
    print(f"\noverall RR {report.overall_rr:.4f}  CR {report.overall_cr:.4f}  "
          f"coverage threshold {report.coverage_threshold}")
    if report.quick_insights:
        print("\nquick insights:")
        for q in report.quick_insights:
            print(f"  {q.variable} / {q.segment}: {q.reason} (score {q.score:.3f})")
    return 0


def cmd_augment(args) -> int:
    session = _get_session(args)
    constraints = ConstraintSet.from_dict(json.loads(Path(args.constraints).read_text()))
    warnings = session.plan(constraints)
    batch = session.generate(constraints, backend=args.backend, seed=args.seed,
                             request_id=args.request_id)
    if args.json:
        _emit_json({
            "batch_id": batch.batch_id,
            "size": batch.size,
            "estimated_accuracy": batch.estimated_accuracy,
            "estimated_quality": batch.estimated_quality.to_dict() if batch.estimated_quality else None,
            "warnings": [w.to_dict() for w in warnings],
        })
        return 0
    for w in warnings:
        print(f"warning: {w.constraint.variable}: {w.existing_count} existing rows for "
              f"{w.requested_count} requested (ratio {w.ratio:.2f})")
    print(f"generated batch {batch.batch_id}: {batch.size} rows, "
          f"estimated accuracy {batch.estimated_accuracy:.4f}, "
          f"estimated quality {batch.estimated_quality.overall:.4f}")
    return 0


def cmd_retrain(args) -> int:
    session = _get_session(args)
    entry = session.merge_and_retrain(acknowledged=args.ack, request_id=args.request_id)
    payload = session.history_entries()[entry.index]
    if args.json:
        _emit_json(payload)
    else:
        d = payload["deltas"]
        print(f"retrained at history index {entry.index}: accuracy {entry.accuracy:.4f} "
              f"({d['accuracy']:+.4f}), RR {entry.overall_rr:.4f} ({d['rr']:+.4f}), "
              f"CR {entry.overall_cr:.4f} ({d['cr']:+.4f})")
    return 0


def cmd_revert(args) -> int:
    session = _get_session(args)
    entry = session.revert(args.index, request_id=args.request_id)
    if args.json:
        _emit_json(session.history_entries()[entry.index])
    else:
        print(f"reverted to history index {args.index} (new entry {entry.index})")
    return 0


def cmd_history(args) -> int:
    session = _get_session(args)
    entries = session.history_entries()
    if args.json:
        _emit_json({"entries": entries})
        return 0
    rows = []
    for e in entries:
        d = e["deltas"]
        rows.append([
            str(e["index"]), e["kind"], str(e["train_rows"]), str(e["batch_size"]),
            str(e["edit_count"]),
            f"{e['overall_rr']:.4f} ({d['rr']:+.4f})",
            f"{e['overall_cr']:.4f} ({d['cr']:+.4f})",
            f"{e['accuracy']:.4f} ({d['accuracy']:+.4f})",
            f"{e['quality_overall']:.4f} ({d['quality']:+.4f})",
        ])
    print(_table(["idx", "kind", "train", "batch", "edits", "RR (d)", "CR (d)",
                  "accuracy (d)", "quality (d)"], rows))
    return 0


def cmd_baseline(args) -> int:
    session = _get_session(args)
    before = session.history_entries()[-1]
    constraints = session.autotune(budget=args.budget)
    if not constraints.constraints:
        print("dataset already at maximal RR/CR; nothing to generate")
        return 0
    session.generate(constraints, seed=args.seed, request_id=args.request_id)
    entry = session.merge_and_retrain(acknowledged=True)
    after = session.history_entries()[entry.index]
    payload = {
        "constraints": constraints.to_dict(),
        "generated_rows": constraints.total_requested,
        "before": {"rr": before["overall_rr"], "cr": before["overall_cr"],
                   "accuracy": before["accuracy"]},
        "after": {"rr": after["overall_rr"], "cr": after["overall_cr"],
                  "accuracy": after["accuracy"]},
    }
    if args.json:
        _emit_json(payload)
        return 0
    rows = [
        ["RR", f"{payload['before']['rr']:.4f}", f"{payload['after']['rr']:.4f}"],
        ["CR", f"{payload['before']['cr']:.4f}", f"{payload['after']['cr']:.4f}"],
        ["accuracy", f"{payload['before']['accuracy']:.4f}", f"{payload['after']['accuracy']:.4f}"],
    ]
    print(f"grid-search baseline generated {payload['generated_rows']} rows "
          f"across {len(constraints.constraints)} segment constraints")
    print(_table(["metric", "before", "after"], rows))
    return 0


def cmd_ratio_bench(args) -> int:
    dataset = split(ingest(benchmark_csv(), benchmark_schema()), 0.25, 11)
    params = benchmark_session_config().model_params
    model = train(dataset, params, seed=0)
    sweep = run_ratio_sweep(dataset, model, seeds=list(range(args.seeds)))
    by_probe: dict[tuple, list] = {}
    for row in sweep:
        key = (row["log_ratio"], row["variable"], row["existing"], row["requested"])
        by_probe.setdefault(key, []).append(row["estimated_accuracy"])
    lo_mean, hi_mean = ratio_group_means(sweep)
    if args.json:
        _emit_json({
            "probes": [
                {"log_ratio": k[0], "variable": k[1], "existing": k[2], "requested": k[3],
                 "mean_estimated_accuracy": sum(v) / len(v)}
                for k, v in sorted(by_probe.items(), reverse=True)
            ],
            "mean_accuracy_ratio_below_1": lo_mean,
            "mean_accuracy_ratio_at_least_1": hi_mean,
        })
        return 0
    rows = [
        [f"{k[0]:+.3f}", k[1], str(k[2]), str(k[3]), f"{sum(v) / len(v):.4f}"]
        for k, v in sorted(by_probe.items(), reverse=True)
    ]
    print(_table(["log ratio", "variable", "existing", "requested", "est accuracy"], rows))
    print(f"\nmean estimated accuracy: ratio >= 1: {hi_mean:.4f}   ratio < 1: {lo_mean:.4f}")
    return 0


def cmd_make_benchmark(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "benchmark.csv").write_bytes(benchmark_csv())
    (out / "benchmark.schema.json").write_text(dump_schema(benchmark_schema()))
    (out / "benchmark.config.json").write_text(json.dumps(
        {"session": benchmark_session_config().to_dict()}, indent=2))
    print(f"wrote benchmark.csv, benchmark.schema.json, benchmark.config.json to {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _app_config(args)
    if args.host:
        cfg.host = args.host
    if args.port:
        cfg.port = args.port
    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="debiaswb",
        description="Representation-bias workbench: inspect, augment, curate, retrain.",
    )
    parser.add_argument("--config", help="path to the workbench JSON config file")
    parser.add_argument("--data-dir", help="session storage directory")
    parser.add_argument("--session", help="session id (default from config)")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a CSV, split it and train the first model")
    p.add_argument("csv")
    p.add_argument("--schema", required=True, help="schema sidecar JSON file")
    p.add_argument("--split", type=float, default=None, help="heldout fraction")
    p.add_argument("--seed", type=int, default=None, help="split seed")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("report", help="bias / quality / per-variable segment reports")
    p.add_argument("--bias", action="store_true", help="bias report (default)")
    p.add_argument("--quality", action="store_true")
    p.add_argument("--segments", metavar="VAR", help="restrict to one variable")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("augment", help="plan and generate a constrained batch")
    p.add_argument("--constraints", required=True, help="constraints JSON file")
    p.add_argument("--backend", default="nn", help="nn or module:attr of an external backend")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--request-id", default=None)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("retrain", help="merge the pending batch and retrain")
    p.add_argument("--ack", action="store_true",
                   help="acknowledge the interaction-bias warning")
    p.add_argument("--request-id", default=None)
    p.set_defaults(func=cmd_retrain)

    p = sub.add_parser("revert", help="restore a recorded history snapshot")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--request-id", default=None)
    p.set_defaults(func=cmd_revert)

    p = sub.add_parser("history", help="session trajectory (RR/CR/accuracy/quality)")
    p.set_defaults(func=cmd_history)

    p = sub.add_parser("baseline", help="naive grid-search debiasing baseline")
    p.add_argument("--budget", type=int, default=4, help="grid points per segment")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--request-id", default=None)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("ratio-bench",
                       help="existing/requested ratio vs estimated accuracy sweep")
    p.add_argument("--seeds", type=int, default=20)
    p.set_defaults(func=cmd_ratio_bench)

    p = sub.add_parser("make-benchmark", help="write the synthetic benchmark files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_benchmark)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except WorkbenchError as exc:
        if args.json:
            print(json.dumps(exc.to_dict(), sort_keys=True), file=sys.stderr)
        else:
            print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
