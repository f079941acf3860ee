import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from modules.errors import PipelineError
from modules.ontology.label_normalizer import try_canonicalize

logger = logging.getLogger(__name__)

METRICS = ("oc_pct", "sh_pct", "oh_pct", "rh_pct")


@dataclass(frozen=True)
class MetricCounts:
    conformant: int = 0
    subj_hallucinated: int = 0
    obj_hallucinated: int = 0
    rel_hallucinated: int = 0


@dataclass(frozen=True)
class EvaluationReport:
    """Micro-averaged percentages over every extracted triplet; all None when the graph is empty."""

    config_label: str
    triplet_count: int
    counts: MetricCounts
    verify_mode: str
    ontology_version: int
    oc_pct: Optional[Fraction] = None
    sh_pct: Optional[Fraction] = None
    oh_pct: Optional[Fraction] = None
    rh_pct: Optional[Fraction] = None
    document_id: str = ""
    model_label: str = ""
    ontology_strategy: str = ""
    ontology_size: dict = field(default_factory=dict)

    @property
    def is_undefined(self):
        return self.triplet_count == 0


def relation_conformant(t, ont):
    return try_canonicalize(t.predicate) in ont.relation_labels


def _pct(count, total):
    return Fraction(100 * count, total)


def compute_report(kg, verdicts, ont, label, verify_mode=None, model_label="", ontology_strategy="",
                   ontology_size=None):
    """
    OC, SH, OH, RH over the union of all triplets. RH is the complement of OC and
    relation-hallucinated triplets stay in the SH/OH denominators.
    """
    triplets = kg.triplets
    if len(verdicts) != len(triplets):
        raise PipelineError(f"{len(verdicts)} verdicts for {len(triplets)} triplets")
    refs = sorted(v.triplet_ref for v in verdicts)
    if refs != list(range(len(triplets))):
        raise PipelineError("verdicts do not cover each triplet exactly once")

    modes = {v.mode.value for v in verdicts}
    if verify_mode is None:
        verify_mode = modes.pop() if len(modes) == 1 else "mixed"

    relations = ont.relation_labels
    conformant = sum(1 for t in triplets if try_canonicalize(t.predicate) in relations)
    counts = MetricCounts(
        conformant=conformant,
        subj_hallucinated=sum(1 for v in verdicts if not v.subject_verdict.faithful),
        obj_hallucinated=sum(1 for v in verdicts if not v.object_verdict.faithful),
        rel_hallucinated=len(triplets) - conformant,
    )
    common = dict(config_label=label, triplet_count=len(triplets), counts=counts,
                  verify_mode=getattr(verify_mode, "value", verify_mode), ontology_version=ont.version,
                  document_id=kg.document_id, model_label=model_label, ontology_strategy=ontology_strategy,
                  ontology_size=dict(ontology_size or {}))
    if not triplets:
        logger.warning("stage=evaluate event=empty_graph label=%s", label)
        return EvaluationReport(**common)

    oc = _pct(counts.conformant, len(triplets))
    report = EvaluationReport(
        oc_pct=oc,
        sh_pct=_pct(counts.subj_hallucinated, len(triplets)),
        oh_pct=_pct(counts.obj_hallucinated, len(triplets)),
        rh_pct=100 - oc,
        **common,
    )
    logger.info("stage=evaluate event=report label=%s triplets=%d oc=%.2f sh=%.2f oh=%.2f rh=%.2f",
                label, report.triplet_count, report.oc_pct, report.sh_pct, report.oh_pct, report.rh_pct)
    return report


def _ratio(value):
    return None if value is None else [value.numerator, value.denominator]


def report_to_dict(report):
    payload = {
        "config_label": report.config_label,
        "document_id": report.document_id,
        "model_label": report.model_label,
        "ontology_strategy": report.ontology_strategy,
        "ontology_version": report.ontology_version,
        "ontology_size": report.ontology_size,
        "verify_mode": report.verify_mode,
        "triplet_count": report.triplet_count,
        "counts": {
            "conformant": report.counts.conformant,
            "subj_hallucinated": report.counts.subj_hallucinated,
            "obj_hallucinated": report.counts.obj_hallucinated,
            "rel_hallucinated": report.counts.rel_hallucinated,
        },
    }
    for name in METRICS:
        payload[name] = _ratio(getattr(report, name))
    return payload


def report_from_dict(payload):
    metrics = {name: None if payload[name] is None else Fraction(*payload[name]) for name in METRICS}
    return EvaluationReport(
        config_label=payload["config_label"],
        triplet_count=payload["triplet_count"],
        counts=MetricCounts(**payload["counts"]),
        verify_mode=payload["verify_mode"],
        ontology_version=payload["ontology_version"],
        document_id=payload.get("document_id", ""),
        model_label=payload.get("model_label", ""),
        ontology_strategy=payload.get("ontology_strategy", ""),
        ontology_size=payload.get("ontology_size", {}),
        **metrics,
    )


def write_report_json(reports, path, caption="", cross_document=False):
    payload = {"caption": caption, "cross_document": cross_document,
               "rows": [report_to_dict(report) for report in reports]}
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n")
    return path


def read_report_json(path):
    with open(path, encoding="utf-8") as file:
        payload = json.load(file)
    return [report_from_dict(row) for row in payload["rows"]]
