"""Command line entry points: ingest, serve, simulate, eval-report."""

from __future__ import annotations

import argparse
import json
import logging
import socket
import sys
from pathlib import Path

from ..errors import BimnavError, ConfigError
from ..index import build_index, dump_store, load_store, manifest_digest
from ..ingest import extract_report
from ..spatial import build_nav_grid, dump_ascii
from .config import ServiceConfig, load_config
from .simulate import load_scenarios, render_report, run_scenarios

LOGGER = logging.getLogger(__name__)

# argparse itself exits 2 on usage errors, matching EXIT_CONFIG
EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_BIND = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bimnav", description="Indoor guide service")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse a model and build the search index cache")
    p_ingest.add_argument("--model", required=True, help="building model (.json manifest or .ifc)")
    p_ingest.add_argument("--cache", help="index cache path (default: <model>.index.json)")
    p_ingest.add_argument("--grid-preview", action="store_true", help="print the walkability grid")
    p_ingest.set_defaults(func=cmd_ingest)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", help="JSON config file")
    p_serve.add_argument("--model", help="building model path")
    p_serve.add_argument("--host")
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--cache", dest="cache_path")
    p_serve.add_argument("--llm-url", dest="llm_url")
    p_serve.add_argument("--encoder-url", dest="encoder_url")
    p_serve.add_argument("--log-dir", dest="log_dir")
    p_serve.add_argument("--tick-hz", dest="tick_hz", type=float)
    p_serve.add_argument(
        "--metric", dest="distance_metric", choices=["euclidean", "route"]
    )
    p_serve.set_defaults(func=cmd_serve)

    p_sim = sub.add_parser("simulate", help="run scripted scenarios headlessly")
    p_sim.add_argument("--model", help="building model path")
    p_sim.add_argument("--config", help="JSON config file")
    p_sim.add_argument("--scenarios", required=True, help="scenario JSON file")
    p_sim.add_argument("--report", help="write the JSON report here")
    p_sim.add_argument("--record", help="write a replayable session recording here")
    p_sim.add_argument("--llm-url", dest="llm_url")
    p_sim.add_argument(
        "--metric", dest="distance_metric", choices=["euclidean", "route"]
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_eval = sub.add_parser("eval-report", help="summarize a simulation report")
    p_eval.add_argument("--report", required=True, help="report JSON from simulate")
    p_eval.add_argument(
        "--min-pass", type=float, default=0.9, help="minimum pass rate (default 0.9)"
    )
    p_eval.set_defaults(func=cmd_eval_report)

    return parser


def cmd_ingest(args: argparse.Namespace) -> int:
    model_path = Path(args.model)
    cache_path = Path(args.cache) if args.cache else model_path.with_suffix(".index.json")

    from .sessions import load_model

    data = model_path.read_bytes()
    digest = manifest_digest(data)
    model = load_model(model_path)
    report = extract_report(model)
    entities = report.entities

    from ..index import ReferenceEncoder

    cached = None
    if cache_path.exists():
        cached = load_store(cache_path.read_bytes(), expected_digest=digest)
    if cached is not None:
        print(f"cache up to date: {cache_path} ({len(entities)} entities)")
        return EXIT_OK

    store = build_index(list(entities), ReferenceEncoder())
    payload = dump_store(store, digest)
    cache_path.parent.mkdir(parents=True, exist_ok=True)
    cache_path.write_bytes(payload)

    print(f"building: {model.building}")
    print(f"entities indexed: {len(entities)}")
    for dropped in report.dropped:
        print(f"dropped {dropped.id}: {dropped.reason}")
    print(f"index cache: {cache_path} ({len(payload)} bytes, source sha256 {digest[:12]}...)")

    if args.grid_preview:
        grid = build_nav_grid(model)
        print(dump_ascii(grid), end="")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    config = load_config(
        args.config,
        model_path=args.model,
        host=args.host,
        port=args.port,
        cache_path=args.cache_path,
        llm_url=args.llm_url,
        encoder_url=args.encoder_url,
        log_dir=args.log_dir,
        tick_hz=args.tick_hz,
        distance_metric=args.distance_metric,
    )

    # claim the port up front so a taken address is a clean, typed failure
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.host, config.port))
    except OSError as exc:
        print(f"cannot bind {config.host}:{config.port}: {exc}", file=sys.stderr)
        return EXIT_BIND
    finally:
        probe.close()

    import uvicorn

    from .app import create_app

    app = create_app(config)
    LOGGER.info("serving %s on %s:%d", config.model_path, config.host, config.port)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except OSError as exc:
        print(f"cannot bind {config.host}:{config.port}: {exc}", file=sys.stderr)
        return EXIT_BIND
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(
        args.config,
        model_path=args.model,
        llm_url=args.llm_url,
        distance_metric=args.distance_metric,
    )
    scenarios = load_scenarios(args.scenarios)
    report = run_scenarios(scenarios, config, record_path=args.record)
    print(render_report(report))
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), indent=1), encoding="utf-8"
        )
    return EXIT_OK if report.failed == 0 else EXIT_FAILURES


def cmd_eval_report(args: argparse.Namespace) -> int:
    raw = json.loads(Path(args.report).read_text("utf-8"))
    total = raw.get("total", 0)
    passed = raw.get("passed", 0)
    for case in raw.get("cases", ()):
        mark = "PASS" if case.get("passed") else "FAIL"
        extra = "" if case.get("passed") else " :: " + "; ".join(case.get("failures", ()))
        print(f"{mark} {case.get('name')}{extra}")
    rate = passed / total if total else 0.0
    print(f"pass rate: {passed}/{total} ({rate:.0%}), required {args.min_pass:.0%}")
    return EXIT_OK if rate >= args.min_pass else EXIT_FAILURES


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BimnavError as exc:
        print(f"data error ({exc.code}): {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
