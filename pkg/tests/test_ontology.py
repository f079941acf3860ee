import json

import numpy as np
import pytest

from modules.errors import LabelError, OntologyError
from modules.llm_gateway.gateway import LLMGateway
from modules.llm_gateway.provider_types import ProviderResponse
from modules.corpus.document_loader import load_document
from modules.ontology.label_normalizer import canonicalize_label, try_canonicalize
from modules.ontology.ontology_inducer import induce_step, iter_induction, parse_proposal
from modules.ontology.ontology_store import (
    Concept,
    Ontology,
    OntologyProposal,
    Provenance,
    Relation,
    load_manual_ontology,
    merge,
    read_ontology,
    save_ontology,
)

from conftest import build_chunk, build_gateway

WORDS = ["net", "cash", "has", "value", "reports", "metric", "segment", "located", "in", "driven", "by", "ebit"]


class SequenceProvider:
    """Answers with the given texts in order, repeating the last one."""

    provider_id = "sequence"

    def __init__(self, answers):
        self.answers = list(answers)
        self.requests = []

    def complete(self, request):
        self.requests.append(request)
        text = self.answers[min(len(self.requests), len(self.answers)) - 1]
        return ProviderResponse(text=text, provider_id=self.provider_id)


def _induced(concepts=(), relations=(), version=0):
    return Ontology(
        concepts=tuple(Concept(c) for c in concepts),
        relations=tuple(Relation(r) for r in relations),
        provenance=Provenance.INDUCED,
        source_document_id="doc",
        version=version,
    )


@pytest.mark.parametrize("raw,expected", [
    ("driven by", "driven_by"),
    ("Reports--Metric ", "reports_metric"),
    ("has_value", "has_value"),
    ("EBIT margin (%)", "ebit_margin"),
    ("  Net\tCash  ", "net_cash"),
    ("Årsredovisning", "arsredovisning"),
    ("Rörelseresultat före skatt", "rorelseresultat_fore_skatt"),
    ("Søndergaard Straße", "sondergaard_strasse"),
])
def test_canonicalize_label(raw, expected):
    assert canonicalize_label(raw) == expected


@pytest.mark.parametrize("raw", ["", "   ", "%%", "--", None])
def test_canonicalize_label_rejects_empty(raw):
    with pytest.raises(LabelError):
        canonicalize_label(raw)
    assert try_canonicalize(raw) is None


def test_canonicalize_is_idempotent_on_random_labels():
    rng = np.random.default_rng(3)
    alphabet = list("abcXYZ 09-_%.é\t")
    for _ in range(500):
        raw = "".join(rng.choice(alphabet, size=int(rng.integers(1, 20))))
        label = try_canonicalize(raw)
        if label is not None:
            assert canonicalize_label(label) == label


def test_merge_adds_new_labels_and_bumps_version():
    base = _induced(["company"], ["has_value"], version=3)
    proposal = OntologyProposal(proposed_concepts=(Concept("segment"),),
                                proposed_relations=(Relation("reports_metric"),))
    merged = merge(base, proposal)
    assert merged.concept_labels == {"company", "segment"}
    assert merged.relation_labels == {"has_value", "reports_metric"}
    assert merged.version == 4


def test_merge_with_nothing_new_returns_base_unchanged():
    base = _induced(["company"], ["has_value"], version=2)
    proposal = OntologyProposal(proposed_relations=(Relation("has_value"),))
    assert merge(base, proposal) is base
    assert merge(base, OntologyProposal()) is base


def test_merge_keeps_existing_descriptions_and_fills_gaps():
    base = Ontology(relations=(Relation("has_value", description="metric to amount"), Relation("driven_by")),
                    provenance=Provenance.INDUCED, source_document_id="doc")
    proposal = OntologyProposal(proposed_relations=(
        Relation("has_value", description="something else"),
        Relation("driven_by", description="cause of a change"),
    ))
    merged = merge(base, proposal)
    by_label = {r.canonical_label: r for r in merged.relations}
    assert by_label["has_value"].description == "metric to amount"
    assert by_label["driven_by"].description == "cause of a change"
    assert merged.version == base.version + 1


def test_merge_is_idempotent_and_monotone_on_random_proposals():
    rng = np.random.default_rng(42)
    base = _induced(["company"], ["has_value"])
    for _ in range(100):
        def entries(kind):
            count = int(rng.integers(0, 6))
            labels = ["_".join(rng.choice(WORDS, size=int(rng.integers(1, 3)))) for _ in range(count)]
            described = [None if rng.random() < 0.5 else f"desc {int(rng.integers(100))}" for _ in labels]
            return tuple(kind(label, description) for label, description in zip(labels, described))

        proposal = OntologyProposal(proposed_concepts=entries(Concept), proposed_relations=entries(Relation))
        once = merge(base, proposal)
        assert merge(once, proposal) == once
        assert base.concept_labels <= once.concept_labels
        assert base.relation_labels <= once.relation_labels
        assert once.version in (base.version, base.version + 1)
        base = once


def test_ontology_rejects_duplicates_and_non_canonical_labels():
    with pytest.raises(OntologyError):
        Ontology(relations=(Relation("has_value"), Relation("has_value")))
    with pytest.raises(OntologyError):
        Ontology(relations=(Relation("Has Value"),))
    with pytest.raises(OntologyError):
        Ontology(provenance=Provenance.INDUCED)


def test_manual_ontology_is_canonicalized(synthetic_dir):
    ont = load_manual_ontology(synthetic_dir / "manual_ontology.json")
    assert ont.provenance == Provenance.MANUAL
    assert ont.version == 0
    assert ont.relation_labels == {"reports_metric", "has_value", "located_in", "headed_by", "employs"}
    assert "business_segment" in ont.concept_labels
    company = next(c for c in ont.concepts if c.canonical_label == "company")
    assert company.aliases == {"the Group", "the company"}


def test_relation_aliases_are_loaded_and_saved(tmp_path):
    path = tmp_path / "ontology.json"
    path.write_text(json.dumps({
        "concepts": [{"label": "Company"}],
        "relations": [{"label": "has_value", "aliases": ["value of", "amounted to"]}],
    }))
    ont = load_manual_ontology(path)
    assert ont.relations[0].aliases == {"value of", "amounted to"}

    saved = save_ontology(ont, tmp_path / "saved.json")
    assert json.loads(saved.read_text(encoding="utf-8"))["relations"][0]["aliases"] == ["amounted to", "value of"]
    assert read_ontology(saved) == ont

    grown = merge(ont, OntologyProposal(proposed_relations=(Relation("has_value", aliases=frozenset({"worth"})),)))
    assert grown.relations[0].aliases == {"value of", "amounted to", "worth"}
    assert grown.version == ont.version + 1


def test_manual_ontology_file_errors(tmp_path):
    duplicate = tmp_path / "dup.json"
    duplicate.write_text(json.dumps({"relations": [{"label": "has value"}, {"label": "has_value"}]}))
    with pytest.raises(OntologyError, match="duplicate relation"):
        load_manual_ontology(duplicate)

    no_relations = tmp_path / "empty.json"
    no_relations.write_text(json.dumps({"concepts": [{"label": "company"}]}))
    with pytest.raises(OntologyError):
        load_manual_ontology(no_relations)

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(OntologyError):
        read_ontology(broken)


def test_saved_ontology_reads_back_identically(tmp_path):
    ont = Ontology(
        concepts=(Concept("company", "An organisation", frozenset({"the Group"})),),
        relations=(Relation("has_value", "metric to amount", "(Net cash, has_value, SEK 27.1 bn)"),),
        provenance=Provenance.INDUCED,
        source_document_id="volvo",
        version=7,
    )
    path = save_ontology(ont, tmp_path / "ontology.json")
    assert read_ontology(path) == ont
    assert path.read_text(encoding="utf-8").endswith("}\n")


def test_parse_proposal_accepts_fences_strings_and_objects():
    current = _induced(["company"], ["has_value"])
    text = ('Here you go:\n```json\n{"concepts": ["Company", "Business Segment"], '
            '"relations": [{"label": "Reports Metric", "description": "org reports a metric"}, "has value", "%%"]}\n```')
    proposal = parse_proposal(text, current, "doc:c0000")
    assert [c.canonical_label for c in proposal.proposed_concepts] == ["business_segment"]
    assert [r.canonical_label for r in proposal.proposed_relations] == ["reports_metric"]
    assert proposal.proposed_relations[0].description == "org reports a metric"
    assert parse_proposal("no json here", current, "doc:c0000") is None
    assert parse_proposal('{"relations": [42]}', current, "doc:c0000") is None


def test_induce_step_retries_then_gives_up_with_flagged_empty_proposal():
    provider = SequenceProvider(["I think the ontology is fine.", "Still prose.", "Nope."])
    gateway = LLMGateway("mock", provider=provider)
    current = _induced(["company"], ["has_value"])
    proposal = induce_step(current, build_chunk("Net cash was SEK 27.1 bn."), gateway, max_parse_retries=2)

    assert proposal.parse_failed and proposal.is_empty
    assert len(provider.requests) == 3
    assert [r.context["attempt"] for r in provider.requests] == ["0", "1", "2"]
    assert len(provider.requests[2].messages) == len(provider.requests[0].messages) + 2
    assert merge(current, proposal) is current


def test_induce_step_recovers_after_one_malformed_answer():
    provider = SequenceProvider(["prose first", '{"concepts": [], "relations": ["driven by"]}'])
    gateway = LLMGateway("mock", provider=provider)
    proposal = induce_step(_induced(), build_chunk("Growth was driven by demand."), gateway)
    assert not proposal.parse_failed
    assert [r.canonical_label for r in proposal.proposed_relations] == ["driven_by"]


def test_induction_grows_monotonically_from_the_empty_ontology(tmp_path):
    path = tmp_path / "report.txt"
    path.write_text(" ".join(f"Sentence {i} is about the Group." for i in range(12)), encoding="utf-8")
    doc = load_document(path)
    gateway = build_gateway(induction_script={
        "0": {"concepts": ["Company"], "relations": ["reports metric"]},
        "1": {"concepts": ["Financial Metric", "company"], "relations": ["has_value"]},
        "2": {"concepts": [], "relations": ["has value", "Reports_Metric"]},
    })

    steps = list(iter_induction(doc, gateway))
    assert len(steps) == 4
    assert steps[0].concepts == () and steps[0].relations == ()
    assert steps[0].source_document_id == doc.id
    for before, after in zip(steps, steps[1:]):
        assert before.concept_labels <= after.concept_labels
        assert before.relation_labels <= after.relation_labels
        assert after.version >= before.version
    assert [s.version for s in steps] == [0, 1, 2, 2]
    assert steps[-1].relation_labels == {"reports_metric", "has_value"}
    assert steps[-1].concept_labels == {"company", "financial_metric"}
    assert gateway.requests_for("induction") == 3
