"""Pipeline stages behind the CLI subcommands. Each one reads and writes its run directory."""
import json
import logging
import os
from collections import Counter

from modules.corpus.chunker import chunk_document, read_chunks, write_chunks
from modules.corpus.document_loader import load_document
from modules.errors import ConfigError
from modules.extraction.kg_store import read_knowledge_graph, write_failures, write_knowledge_graph
from modules.extraction.triplet_extractor import extract_document
from modules.llm_gateway.gateway import GatewayMode, LLMGateway
from modules.llm_gateway.http_provider import HttpChatProvider
from modules.llm_gateway.mock_provider import MockProvider, MockRules
from modules.metrics.evaluation_report import compute_report
from modules.metrics.report_renderer import ComparisonTable, TableFormat, write_report_files
from modules.ontology.ontology_inducer import induce_ontology
from modules.ontology.ontology_store import load_manual_ontology, ontology_summary, read_ontology, save_ontology
from modules.pipeline.run_config import OntologyStrategy, ProviderKind
from modules.verification.triplet_verifier import (
    VerifyMode,
    read_verdicts,
    sample_judge_decisions,
    verify_graph,
    write_verdicts,
)
from utils.logger import init_event_log, log_event

logger = logging.getLogger(__name__)

RUN_FILES = {
    "config": "config.json",
    "chunks": "chunks.jsonl",
    "manual_ontology": "ontology.json",
    "induced_ontology": "ontology.induced.json",
    "kg": "kg.jsonl",
    "failures": "failures.jsonl",
    "verdicts": "verdicts.jsonl",
    "audit": "judge_audit.jsonl",
    "events": "events.csv",
}
AUDIT_SAMPLE_SIZE = 10
AGGREGATE_CAPTION = "Aggregate performance metrics"
COMPARE_CAPTION = "Comparison of verification methods"


def run_path(config, name):
    return os.path.join(config.out, RUN_FILES[name])


def _require(config, name, hint):
    path = run_path(config, name)
    if not os.path.exists(path):
        raise ConfigError(f"{path} not found; {hint}")
    return path


def prepare_run_dir(config, fresh_events=False):
    os.makedirs(config.out, exist_ok=True)
    config.write(run_path(config, "config"))
    if fresh_events:
        init_event_log(config.out, RUN_FILES["events"])
    return run_path(config, "events")


def build_gateway(config):
    provider = None
    if config.provider_kind == ProviderKind.MOCK:
        rules = MockRules.from_file(config.mock_rules) if config.mock_rules else MockRules()
        if config.drift_rate is not None:
            rules = rules.model_copy(update={"drift_rate": config.drift_rate})
        if not rules.extraction_patterns:
            logger.warning("stage=gateway event=empty_mock_rules detail=mock emits no triplets")
        provider = MockProvider(rules, seed=config.seed)
    elif config.provider_kind == ProviderKind.HTTP:
        provider = HttpChatProvider.from_env()
    if config.gateway == GatewayMode.REPLAY and not os.path.exists(config.cassette):
        raise ConfigError(f"cassette {config.cassette} not found; record it first")
    return LLMGateway(config.gateway, provider=provider, cassette=config.cassette,
                      max_in_flight=config.max_in_flight)


def load_run_document(config):
    if not config.document_path:
        raise ConfigError("no document given; pass --document or set document_path in the config file")
    return load_document(config.document_path, config.fraction)


def cmd_ingest(config, doc=None):
    events = prepare_run_dir(config)
    doc = doc or load_run_document(config)
    chunks = chunk_document(doc, config.chunk_size, config.overlap)
    write_chunks(chunks, run_path(config, "chunks"))
    log_event(events, "ingest", "done", detail=f"sentences={len(doc.sentences)} chunks={len(chunks)}")
    print(f"📄 {doc.id}: {len(doc.sentences)} of {doc.total_sentences} sentences kept, {len(chunks)} chunks")
    return chunks


def cmd_induce(config, gateway=None, doc=None):
    events = prepare_run_dir(config)
    doc = doc or load_run_document(config)
    gateway = gateway or build_gateway(config)

    def on_step(chunk, proposal, current):
        detail = "parse_failed" if proposal.parse_failed else f"version={current.version}"
        log_event(events, "induce", "chunk_done", chunk.id, detail)

    ont = induce_ontology(doc, gateway, config.chunk_size, config.overlap, on_step=on_step)
    path = save_ontology(ont, run_path(config, "induced_ontology"))
    summary = ontology_summary(ont)
    log_event(events, "induce", "done", detail=f"concepts={summary['concepts']} relations={summary['relations']}")
    print(f"🧭 Induced ontology: |C|={summary['concepts']}, |R|={summary['relations']} -> {path}")
    return ont


def resolve_ontology(config, doc, gateway=None, reuse=True):
    """Manual ontologies are copied canonicalized into the run; induced ones are reused when they match `doc`."""
    if config.ontology_strategy == OntologyStrategy.MANUAL:
        ont = load_manual_ontology(config.ontology_path)
        save_ontology(ont, run_path(config, "manual_ontology"))
        return ont
    induced = run_path(config, "induced_ontology")
    if reuse and os.path.exists(induced):
        ont = read_ontology(induced)
        if ont.source_document_id == doc.id:
            logger.info("stage=induce event=reused path=%s version=%d", induced, ont.version)
            return ont
    return cmd_induce(config, gateway, doc)


def run_ontology(config):
    """The ontology a finished run extracted against."""
    if config.ontology_strategy == OntologyStrategy.MANUAL:
        copied = run_path(config, "manual_ontology")
        return read_ontology(copied) if os.path.exists(copied) else load_manual_ontology(config.ontology_path)
    return read_ontology(_require(config, "induced_ontology", "run induce or extract first"))


def cmd_extract(config, gateway=None, doc=None, ont=None, chunks=None):
    events = prepare_run_dir(config)
    doc = doc or load_run_document(config)
    gateway = gateway or build_gateway(config)
    chunks = chunks if chunks is not None else cmd_ingest(config, doc)
    ont = ont or resolve_ontology(config, doc, gateway)

    kg, failures = extract_document(
        doc, ont, gateway,
        exemplars=config.resolved_exemplars(),
        chunk_size=config.chunk_size,
        overlap=config.overlap,
        config_fingerprint=config.fingerprint(),
        chunks=chunks,
    )
    write_knowledge_graph(kg, run_path(config, "kg"))
    write_failures(failures, run_path(config, "failures"))

    per_chunk = Counter(t.chunk_id for t in kg.triplets)
    failed = {f.chunk_id: f.reason.value for f in failures}
    for chunk in chunks:
        if chunk.id in failed:
            log_event(events, "extract", "chunk_failed", chunk.id, failed[chunk.id])
        else:
            log_event(events, "extract", "chunk_done", chunk.id, f"triplets={per_chunk[chunk.id]}")
    print(f"🔗 Extracted {len(kg.triplets)} triplets from {len(chunks)} chunks ({len(failures)} failed)")
    return kg


def cmd_verify(config, gateway=None, kg=None, chunks=None):
    events = prepare_run_dir(config)
    kg = kg or read_knowledge_graph(_require(config, "kg", "run extract first"))
    chunks = chunks if chunks is not None else read_chunks(_require(config, "chunks", "run ingest first"))
    if config.verify == VerifyMode.HYBRID:
        gateway = gateway or build_gateway(config)

    verdicts = verify_graph(kg, chunks, config.verify, gateway)
    write_verdicts(verdicts, run_path(config, "verdicts"))
    decided = Counter()
    for verdict in verdicts:
        decided.update((verdict.subject_verdict.decided_by.value, verdict.object_verdict.decided_by.value))
    log_event(events, "verify", "done", detail=" ".join(f"{k}={decided[k]}" for k in sorted(decided)))

    if config.verify == VerifyMode.HYBRID:
        sample = sample_judge_decisions(verdicts, kg, n=AUDIT_SAMPLE_SIZE, seed=config.seed)
        with open(run_path(config, "audit"), "w", encoding="utf-8", newline="\n") as file:
            for record in sample:
                file.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"🔎 Verified {len(verdicts)} triplets ({config.verify.value}): "
          + ", ".join(f"{k}={decided[k]}" for k in sorted(decided)))
    return verdicts


def _report(config, kg, verdicts, ont, label, mode):
    return compute_report(
        kg, verdicts, ont, label,
        verify_mode=mode,
        model_label=config.model_column,
        ontology_strategy=config.ontology_strategy.value,
        ontology_size={k: v for k, v in ontology_summary(ont).items() if k in ("concepts", "relations")},
    )


def cmd_evaluate(config, gateway=None, kg=None, verdicts=None, ont=None, compare=False, plot=False):
    events = prepare_run_dir(config)
    kg = kg or read_knowledge_graph(_require(config, "kg", "run extract first"))
    ont = ont or run_ontology(config)

    if compare:
        chunks = read_chunks(_require(config, "chunks", "run ingest first"))
        gateway = gateway or build_gateway(config)
        rows = [
            _report(config, kg, verify_graph(kg, chunks, mode, gateway), ont,
                    f"{config.run_label} [{mode.value}]", mode)
            for mode in (VerifyMode.BASELINE, VerifyMode.HYBRID)
        ]
        table = ComparisonTable(rows, caption=COMPARE_CAPTION)
    else:
        if verdicts is None:
            verdicts = read_verdicts(_require(config, "verdicts", "run verify first"))
        table = ComparisonTable([_report(config, kg, verdicts, ont, config.run_label, config.verify)],
                                caption=AGGREGATE_CAPTION)

    paths = write_report_files(table, config.out)
    for report in table.rows:
        log_event(events, "evaluate", "report", detail=f"label={report.config_label} triplets={report.triplet_count}")
    print(table.render(TableFormat.TEXT))
    print(f"📁 Report saved to {paths['txt']}, {paths['csv']}, {paths['md']}, {paths['json']}")
    if plot:
        from utils.plotter import plot_comparison

        plot_comparison(paths["csv"])
    return table


def cmd_run(config, plot=False):
    """ingest -> (induce | manual) -> extract -> verify -> evaluate into one run directory."""
    events = prepare_run_dir(config, fresh_events=True)
    log_event(events, "run", "start", detail=f"fingerprint={config.fingerprint()}")
    gateway = build_gateway(config)
    doc = load_run_document(config)
    chunks = cmd_ingest(config, doc)
    ont = resolve_ontology(config, doc, gateway, reuse=False)
    kg = cmd_extract(config, gateway, doc, ont, chunks)
    verdicts = cmd_verify(config, gateway, kg, chunks)
    table = cmd_evaluate(config, gateway, kg, verdicts, ont, plot=plot)
    log_event(events, "run", "done")
    logger.info("stage=run event=done out=%s requests=%s", config.out, dict(sorted(gateway.stats.items())))
    print(f"✅ Run complete: {config.out}")
    return table


def cmd_audit(config):
    path = _require(config, "audit", "run verify in hybrid mode first")
    with open(path, encoding="utf-8") as file:
        records = [json.loads(line) for line in file if line.strip()]
    if not records:
        print("🧾 No judge decisions to audit: every slot was settled by the strict matcher")
    for record in records:
        verdict = "FAITHFUL" if record["faithful"] else "HALLUCINATED"
        print(f"🧾 #{record['triplet_index']} {record['slot']} {record['entity']!r} in {record['chunk_id']}: "
              f"{verdict} ({record['decided_by']}) {record['rationale'] or ''}".rstrip())
    return records
