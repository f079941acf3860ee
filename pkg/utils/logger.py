import csv
import logging
import os

EVENT_COLUMNS = ["stage", "event", "chunk_id", "detail"]


def setup_logging(verbose=False):
    """Configure root logging once; DEBUG adds prompt/response sizes, never bodies."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        force=True,
    )
    # urllib3 is chatty at DEBUG and logs request lines
    logging.getLogger("urllib3").setLevel(logging.WARNING)
    return logging.getLogger("kgfaith")


def init_event_log(run_dir, filename="events.csv"):
    os.makedirs(run_dir, exist_ok=True)
    filepath = os.path.join(run_dir, filename)
    with open(filepath, mode="w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(EVENT_COLUMNS)
    return filepath


def log_event(filepath, stage, event, chunk_id="", detail=""):
    if filepath is None:
        return
    if not os.path.exists(filepath):
        init_event_log(os.path.dirname(filepath) or ".", os.path.basename(filepath))
    with open(filepath, mode="a", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow([stage, event, chunk_id, detail])
