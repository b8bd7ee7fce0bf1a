"""Command-line entry points: the evaluation harness and the service launchers."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .corpus import CorpusFormatError, load_dataset
from .database import DatabaseError, load_databases
from .evaluation import CoverageError, EvalConfig, EvaluationError, evaluate_run, render_report
from .replay import ReplayScript

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COVERAGE_GAP = 2


def eval_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dialight-eval",
        description="Evaluate a prediction file (or gold annotations) against a corpus.",
    )
    parser.add_argument("--corpus", required=True, help="corpus JSON file")
    parser.add_argument("--ontology", required=True, help="ontology JSON file")
    parser.add_argument("--db-dir", required=True, help="directory of <domain>_db.json files")
    parser.add_argument("--predictions", help="prediction file in replay-script format")
    parser.add_argument(
        "--mode",
        required=True,
        choices=["e2e", "oracle-dst", "oracle-rg", "gold-gold"],
    )
    parser.add_argument("--language", default=None, help="language tag override (defaults to the corpus tag)")
    parser.add_argument("--threshold", type=int, default=2, help="fuzzy-match Levenshtein threshold")
    parser.add_argument("--state-format", choices=["auto", "linear", "json"], default="auto")
    parser.add_argument("--out", help="write the JSON report here")
    args = parser.parse_args(argv)

    try:
        corpus, ontology = load_dataset(args.corpus, args.ontology)
        databases = load_databases(args.db_dir, ontology)
    except (CorpusFormatError, DatabaseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.language:
        corpus = type(corpus)(
            dialogues=corpus.dialogues, language=args.language, split=corpus.split, warnings=corpus.warnings
        )
    for warning in corpus.warnings:
        print(f"warning: {warning.dialogue_id} {warning.location}: {warning.message}", file=sys.stderr)

    predictions = None
    if args.predictions:
        try:
            predictions = ReplayScript.from_file(args.predictions)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read predictions: {exc}", file=sys.stderr)
            return EXIT_ERROR

    from dataclasses import replace

    config = EvalConfig(state_format=args.state_format)
    config = replace(config, match=replace(config.match, threshold=args.threshold))

    try:
        report = evaluate_run(corpus, predictions, args.mode, databases, ontology, config)
    except CoverageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COVERAGE_GAP
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    print(render_report(report))
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        print(f"report written to {args.out}")
    return EXIT_OK


def _serve_replay(args) -> int:
    from .replay import ReplayServer

    script = ReplayScript.from_file(args.script, on_missing=args.on_missing)
    server = ReplayServer(script=script, instance_id=args.instance_id, host=args.host, port=args.port)
    server.start()
    print(f"replay backend {args.instance_id} serving {len(script.outputs)} outputs at {server.url}")
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()
    return EXIT_OK


def _build_engine(config):
    import httpx

    from .corpus import load_dataset
    from .gateway import BackendDescriptor, ModelGateway, PromptFactory
    from .orchestrator import DialogueEngine
    from .realization import placeholder_inventory

    if not (config.corpus_path and config.ontology_path and config.db_dir):
        raise SystemExit("config must set data.corpus, data.ontology, and data.db_dir")
    corpus, ontology = load_dataset(config.corpus_path, config.ontology_path)
    databases = load_databases(config.db_dir, ontology)
    factory = PromptFactory(
        ontology=ontology,
        config=config.prompt,
        placeholders=placeholder_inventory(corpus),
        templates=config.prompt_templates,
    )
    gateway = ModelGateway(prompt_factory=factory, client=httpx.Client())
    for raw in config.backends:
        gateway.register_backend(
            BackendDescriptor(
                id=raw["id"],
                task=raw["task"],
                mode=raw.get("mode", "structured"),
                instances=tuple(raw["instances"]),
            )
        )
    return DialogueEngine(
        gateway,
        ontology,
        databases,
        match_config=config.match,
        summary_templates=config.summary_templates,
    )


def _serve_system(args) -> int:
    import uvicorn

    from .server import create_system_app

    config = load_config(args.config)
    app = create_system_app(_build_engine(config))
    uvicorn.run(app, host=args.host, port=args.port or config.ports.get("system", 8200))
    return EXIT_OK


def _serve_humaneval(args) -> int:
    import httpx
    import uvicorn

    from .humaneval.service import create_humaneval_app
    from .humaneval.store import EvalStore

    config = load_config(args.config)
    if config.humaneval is None:
        raise SystemExit("config has no humaneval section")
    store = EvalStore(args.storage) if args.storage else EvalStore(None)
    app = create_humaneval_app(
        config.humaneval,
        orchestrator=httpx.Client(base_url=config.orchestrator_url),
        store=store,
    )
    uvicorn.run(app, host=args.host, port=args.port or config.ports.get("humaneval", 8300))
    return EXIT_OK


def serve_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="dialight-serve", description="Run a dialight service.")
    sub = parser.add_subparsers(dest="command", required=True)

    replay = sub.add_parser("replay", help="scripted stateless model backend")
    replay.add_argument("--script", required=True)
    replay.add_argument("--instance-id", default="replay-0")
    replay.add_argument("--host", default="127.0.0.1")
    replay.add_argument("--port", type=int, default=8500)
    replay.add_argument("--on-missing", choices=["error", "empty"], default="error")
    replay.set_defaults(func=_serve_replay)

    system = sub.add_parser("system", help="model gateway + dialogue orchestrator")
    system.add_argument("--config", required=True)
    system.add_argument("--host", default="127.0.0.1")
    system.add_argument("--port", type=int, default=None)
    system.set_defaults(func=_serve_system)

    humaneval = sub.add_parser("humaneval", help="human evaluation REST service")
    humaneval.add_argument("--config", required=True)
    humaneval.add_argument("--storage", default=None, help="directory for the append-only stores")
    humaneval.add_argument("--host", default="127.0.0.1")
    humaneval.add_argument("--port", type=int, default=None)
    humaneval.set_defaults(func=_serve_humaneval)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(eval_main())
