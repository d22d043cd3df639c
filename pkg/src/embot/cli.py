"""Command-line entry points: serve, replay, simulate, study."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .dialog import SentimentLabel
from .device import VirtualDevice, encode_command
from .gestures import JOINTS, default_table, load_table
from .persistence import PersistenceError, replay
from .study import (
    StudyError,
    counterbalance,
    ingest_csv,
    summarize,
)


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        config = load_config(args.config, stub_all=args.stub_all)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    try:
        history = replay(args.log)
    except PersistenceError as e:
        print(f"replay failed: {e}", file=sys.stderr)
        partial = getattr(e, "partial", None)
        if partial is not None:
            print(f"(recovered {len(partial)} turns before the bad line)",
                  file=sys.stderr)
        return 1
    print(f"session {history.session_id}: {history.exchange_count} exchanges")
    for turn in history.turns:
        tag = f" [{turn.sentiment.name.lower()}]" if turn.sentiment else ""
        print(f"{turn.timestamp_ms:>8} ms  {turn.role.value:>6}{tag}: {turn.text}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        label = SentimentLabel[args.gesture.upper()]
    except KeyError:
        choices = ", ".join(l.name.lower() for l in SentimentLabel)
        print(f"unknown gesture {args.gesture!r} (choose from: {choices})",
              file=sys.stderr)
        return 2
    table = load_table(args.table) if args.table else default_table()
    device = VirtualDevice(table=table, seed=args.seed)
    device.send(encode_command(label), now_ms=0.0)
    print("t_ms," + ",".join(j.value for j in JOINTS) + ",active")
    t = 0.0
    while True:
        for frame in device.step(t):
            angles = ",".join(f"{frame.angles[j]:.1f}" for j in JOINTS)
            active = frame.active_gesture.name.lower() if frame.active_gesture else ""
            print(f"{frame.t_ms:.0f},{angles},{active}")
        if not device.active:
            break
        t += 50.0
    return 0


def _cmd_study_summarize(args: argparse.Namespace) -> int:
    try:
        records = ingest_csv(args.csv)
        summary = summarize(records)
    except StudyError as e:
        print(f"study error: {e}", file=sys.stderr)
        return 1
    print(f"{summary.count} participants")
    for order, count in summary.order_counts.items():
        print(f"  {order.value}: {count}")
    width = max(len(item) for item in summary.items)
    print(f"{'item':<{width}}  mean   n  min max")
    for item in sorted(summary.items):
        s = summary.items[item]
        print(f"{item:<{width}}  {s.mean:>4.2f}  {s.count:>2}  {s.min:>3} {s.max:>3}")
    return 0


def _cmd_study_assign(args: argparse.Namespace) -> int:
    try:
        orders = counterbalance(args.n, seed=args.seed)
    except StudyError as e:
        print(f"study error: {e}", file=sys.stderr)
        return 1
    for i, order in enumerate(orders, start=1):
        print(f"p{i}: {order.value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embot",
        description="Embodied voice-assistant runtime and study tooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the console HTTP service")
    serve.add_argument("--config", default=None, help="JSON config file")
    serve.add_argument("--stub-all", action="store_true",
                       help="force stub adapters and the virtual device")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(func=_cmd_serve)

    rep = sub.add_parser("replay", help="print a session transcript log")
    rep.add_argument("log", help="path to a session .jsonl log")
    rep.set_defaults(func=_cmd_replay)

    sim = sub.add_parser("simulate",
                         help="run one gesture on the virtual device")
    sim.add_argument("--gesture", required=True,
                     help="greeting|happy|sad|serious|dance")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--table", default=None, help="gesture table file")
    sim.set_defaults(func=_cmd_simulate)

    study = sub.add_parser("study", help="pilot-study tooling")
    study_sub = study.add_subparsers(dest="study_command", required=True)

    summ = study_sub.add_parser("summarize", help="per-item Likert means")
    summ.add_argument("csv", help="survey CSV file")
    summ.set_defaults(func=_cmd_study_summarize)

    assign = study_sub.add_parser("assign", help="counterbalanced ordering")
    assign.add_argument("--n", type=int, required=True)
    assign.add_argument("--seed", type=int, default=0)
    assign.set_defaults(func=_cmd_study_assign)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
