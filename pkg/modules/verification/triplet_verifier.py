import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from modules.errors import ConfigError, PipelineError
from modules.verification.entity_matcher import regex_grounded
from modules.verification.llm_judge import DecidedBy, JudgeCache, Slot, SlotVerdict, judge_grounded

logger = logging.getLogger(__name__)


class VerifyMode(str, Enum):
    BASELINE = "baseline"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class TripletVerdict:
    triplet_ref: int
    subject_verdict: SlotVerdict
    object_verdict: SlotVerdict
    mode: VerifyMode


def _verify_slot(entity, slot, chunk, mode, gateway, cache):
    if regex_grounded(entity, chunk):
        return SlotVerdict(slot=slot, faithful=True, decided_by=DecidedBy.REGEX)
    if mode == VerifyMode.BASELINE:
        return SlotVerdict(slot=slot, faithful=False, decided_by=DecidedBy.REGEX)
    return judge_grounded(entity, chunk, gateway, slot=slot, cache=cache)


def verify_triplet(t, chunk, mode, gateway=None, cache=None, triplet_ref=0):
    """
    Ground subject and object in the triplet's own chunk.

    baseline: strict match only. hybrid: strict match first, the judge only for slots
    the match missed. Predicates are not checked here.
    """
    mode = VerifyMode(mode)
    if mode == VerifyMode.HYBRID and gateway is None:
        raise ConfigError("hybrid verification needs a gateway for the judge")
    if chunk.id != t.chunk_id:
        raise PipelineError(f"triplet from {t.chunk_id} verified against chunk {chunk.id}")
    return TripletVerdict(
        triplet_ref=triplet_ref,
        subject_verdict=_verify_slot(t.subject, Slot.SUBJECT, chunk, mode, gateway, cache),
        object_verdict=_verify_slot(t.object, Slot.OBJECT, chunk, mode, gateway, cache),
        mode=mode,
    )


def verify_graph(kg, chunks, mode, gateway=None, cache=None, max_workers=None):
    """Verify every triplet of `kg`; verdicts come back in triplet order."""
    mode = VerifyMode(mode)
    chunks_by_id = {chunk.id: chunk for chunk in chunks}
    missing = {t.chunk_id for t in kg.triplets} - chunks_by_id.keys()
    if missing:
        raise PipelineError(f"triplets reference unknown chunks: {sorted(missing)[:5]}")
    if mode == VerifyMode.HYBRID and cache is None:
        cache = JudgeCache()
    workers = 1 if mode == VerifyMode.BASELINE else (max_workers or getattr(gateway, "max_in_flight", 1))

    def run(indexed):
        index, t = indexed
        return verify_triplet(t, chunks_by_id[t.chunk_id], mode, gateway, cache, triplet_ref=index)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        verdicts = list(executor.map(run, enumerate(kg.triplets)))
    logger.info("stage=verify event=done mode=%s triplets=%d judged_pairs=%d",
                mode.value, len(verdicts), len(cache) if cache is not None else 0)
    return verdicts


def _slot_record(verdict):
    return {"faithful": verdict.faithful, "decided_by": verdict.decided_by.value,
            "rationale": verdict.judge_rationale}


def write_verdicts(verdicts, path):
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        for verdict in verdicts:
            record = {
                "triplet_index": verdict.triplet_ref,
                "mode": verdict.mode.value,
                "subject": _slot_record(verdict.subject_verdict),
                "object": _slot_record(verdict.object_verdict),
            }
            file.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return path


def read_verdicts(path):
    verdicts = []
    with open(path, encoding="utf-8") as file:
        for line in file:
            if not line.strip():
                continue
            record = json.loads(line)
            slots = {}
            for slot in Slot:
                data = record[slot.value]
                slots[slot] = SlotVerdict(slot=slot, faithful=data["faithful"],
                                          decided_by=DecidedBy(data["decided_by"]),
                                          judge_rationale=data.get("rationale"))
            verdicts.append(TripletVerdict(triplet_ref=record["triplet_index"],
                                           subject_verdict=slots[Slot.SUBJECT],
                                           object_verdict=slots[Slot.OBJECT],
                                           mode=VerifyMode(record["mode"])))
    return verdicts


def sample_judge_decisions(verdicts, kg, n=10, seed=0):
    """Seeded sample of judge-decided slots for manual audit of the fallback."""
    decisions = []
    for verdict in verdicts:
        t = kg.triplets[verdict.triplet_ref]
        for slot_verdict, entity in ((verdict.subject_verdict, t.subject), (verdict.object_verdict, t.object)):
            if slot_verdict.decided_by != DecidedBy.REGEX:
                decisions.append({
                    "triplet_index": verdict.triplet_ref,
                    "slot": slot_verdict.slot.value,
                    "entity": entity,
                    "chunk_id": t.chunk_id,
                    "faithful": slot_verdict.faithful,
                    "decided_by": slot_verdict.decided_by.value,
                    "rationale": slot_verdict.judge_rationale,
                })
    if len(decisions) <= n:
        return decisions
    picked = sorted(random.Random(seed).sample(range(len(decisions)), n))
    return [decisions[i] for i in picked]
