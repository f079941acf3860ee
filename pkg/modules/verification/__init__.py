from modules.verification.entity_matcher import normalize_for_match, regex_grounded
from modules.verification.llm_judge import (
    DecidedBy,
    JudgeCache,
    JudgeCacheEntry,
    Slot,
    SlotVerdict,
    judge_grounded,
)
from modules.verification.triplet_verifier import (
    TripletVerdict,
    VerifyMode,
    read_verdicts,
    sample_judge_decisions,
    verify_graph,
    verify_triplet,
    write_verdicts,
)

__all__ = [
    "DecidedBy", "JudgeCache", "JudgeCacheEntry", "Slot", "SlotVerdict", "TripletVerdict", "VerifyMode",
    "judge_grounded", "normalize_for_match", "read_verdicts", "regex_grounded", "sample_judge_decisions",
    "verify_graph", "verify_triplet", "write_verdicts",
]
