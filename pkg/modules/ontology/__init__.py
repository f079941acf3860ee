from modules.ontology.label_normalizer import canonicalize_label
from modules.ontology.ontology_inducer import induce_ontology, induce_step, iter_induction
from modules.ontology.ontology_store import (
    Concept,
    Ontology,
    OntologyProposal,
    Provenance,
    Relation,
    load_manual_ontology,
    merge,
    ontology_summary,
    read_ontology,
    save_ontology,
)

__all__ = [
    "Concept", "Ontology", "OntologyProposal", "Provenance", "Relation",
    "canonicalize_label", "induce_ontology", "induce_step", "iter_induction",
    "load_manual_ontology", "merge", "ontology_summary", "read_ontology", "save_ontology",
]
