import argparse
import logging
import sys

from dotenv import load_dotenv

from modules.errors import ConfigError, KGFError
from modules.pipeline.matrix import cmd_matrix
from modules.pipeline.run_config import load_config
from modules.pipeline.stages import cmd_audit, cmd_evaluate, cmd_extract, cmd_induce, cmd_ingest, cmd_run, cmd_verify
from utils.logger import setup_logging

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PIPELINE = 2

# CLI flag -> RunConfig field
CONFIG_FLAGS = {
    "document": "document_path",
    "fraction": "fraction",
    "chunk_size": "chunk_size",
    "overlap": "overlap",
    "ontology": "ontology",
    "gateway": "gateway",
    "provider": "provider",
    "cassette": "cassette",
    "mock_rules": "mock_rules",
    "drift_rate": "drift_rate",
    "verify": "verify",
    "label": "label",
    "model_label": "model_label",
    "max_in_flight": "max_in_flight",
    "seed": "seed",
    "out": "out",
}


class UsageErrorParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; usage errors share exit code 1 with config errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_flags(parser):
    parser.add_argument("--config", type=str, help="TOML or JSON run configuration; flags override it")
    parser.add_argument("--document", type=str, help="UTF-8 report (plain text, optional markdown)")
    parser.add_argument("--fraction", type=float, help="Share of the document to keep, in (0, 1] (default 1.0)")
    parser.add_argument("--chunk-size", dest="chunk_size", type=int, help="Sentences per chunk (default 5)")
    parser.add_argument("--overlap", type=int, help="Sentences shared by consecutive chunks (default 0)")
    parser.add_argument("--ontology", type=str, help="'manual:<path>' or 'auto' (default auto)")
    parser.add_argument("--gateway", choices=["live", "mock", "record", "replay"])
    parser.add_argument("--provider", choices=["http", "mock"], help="Provider behind record mode (default http)")
    parser.add_argument("--cassette", type=str, help="Cassette file for record/replay")
    parser.add_argument("--mock-rules", dest="mock_rules", type=str, help="Rules file for the mock provider")
    parser.add_argument("--drift-rate", dest="drift_rate", type=float,
                        help="Mock only: share of triplets given an out-of-ontology predicate")
    parser.add_argument("--verify", choices=["baseline", "hybrid"])
    parser.add_argument("--label", type=str, help="Configuration label in reports")
    parser.add_argument("--model-label", dest="model_label", type=str, help="Model column in reports")
    parser.add_argument("--max-in-flight", dest="max_in_flight", type=int, help="Concurrent provider calls")
    parser.add_argument("--seed", type=int, help="Seed for the mock provider and the audit sample")
    parser.add_argument("--out", type=str, help="Run directory (default runs/latest)")
    parser.add_argument("--verbose", action="store_true", help="Debug logging with prompt/response sizes")


def build_parser():
    parser = UsageErrorParser(description="Ontology-guided knowledge graph extraction with hallucination metrics.")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=UsageErrorParser)

    for name, help_text in [
        ("ingest", "Segment and chunk a document"),
        ("induce", "Induce a document-specific ontology chunk by chunk"),
        ("extract", "Extract triplets against the run's ontology"),
        ("verify", "Ground subjects and objects in their chunks"),
        ("audit", "Print the sampled judge decisions of a run"),
    ]:
        _add_run_flags(subparsers.add_parser(name, help=help_text))

    evaluate = subparsers.add_parser("evaluate", help="Compute OC/SH/OH/RH and render the report")
    _add_run_flags(evaluate)
    evaluate.add_argument("--compare", action="store_true", help="Baseline and hybrid rows on the same graph")
    evaluate.add_argument("--plot", action="store_true", help="Also save a bar chart of the report")

    run = subparsers.add_parser("run", help="ingest -> ontology -> extract -> verify -> evaluate")
    _add_run_flags(run)
    run.add_argument("--plot", action="store_true", help="Also save a bar chart of the report")

    matrix = subparsers.add_parser("matrix", help="Run a grid of configurations into one table")
    matrix.add_argument("matrix", type=str, help="Matrix file with [defaults] and [[runs]]")
    _add_run_flags(matrix)
    matrix.add_argument("--plot", action="store_true", help="Also save a bar chart of the combined table")
    return parser


def _overrides(args):
    return {field: getattr(args, flag, None) for flag, field in CONFIG_FLAGS.items()}


def dispatch(args):
    if args.command == "matrix":
        cmd_matrix(args.matrix, _overrides(args), out=args.out, plot=args.plot)
        return EXIT_OK

    config = load_config(args.config, _overrides(args))
    if args.command == "ingest":
        cmd_ingest(config)
    elif args.command == "induce":
        cmd_induce(config)
    elif args.command == "extract":
        cmd_extract(config)
    elif args.command == "verify":
        cmd_verify(config)
    elif args.command == "evaluate":
        cmd_evaluate(config, compare=args.compare, plot=args.plot)
    elif args.command == "run":
        cmd_run(config, plot=args.plot)
    elif args.command == "audit":
        cmd_audit(config)
    return EXIT_OK


def main(argv=None):
    load_dotenv()
    args = build_parser().parse_args(argv)
    logger = setup_logging(args.verbose)
    try:
        return dispatch(args)
    except ConfigError as exc:
        logger.error("stage=%s event=config_error reason=%s", args.command, exc)
        print(f"🚫 {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KGFError as exc:
        logger.error("stage=%s event=hard_failure kind=%s reason=%s", args.command, type(exc).__name__, exc)
        print(f"🚫 {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    logging.captureWarnings(True)
    sys.exit(main())
