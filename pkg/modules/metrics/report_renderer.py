import os
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from enum import Enum

import pandas as pd

from modules.errors import PipelineError
from modules.metrics.evaluation_report import write_report_json

UNDEFINED = "undefined"
COLUMNS = ["Configuration", "Report", "Model", "Ontology", "Verification",
           "OC (↑)", "SH (↓)", "OH (↓)", "RH (↓)", "Triplets"]
METRIC_COLUMNS = {"OC (↑)": "oc_pct", "SH (↓)": "sh_pct", "OH (↓)": "oh_pct", "RH (↓)": "rh_pct"}


class TableFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    MARKDOWN = "markdown"


def format_pct(value):
    """
    '92.7 %', '0.24 %' below one percent, 'undefined' for empty reports. Rounds half up.

    A nonzero rate that would round to 0.00 renders as '<0.01 %'.
    """
    if value is None:
        return UNDEFINED
    with localcontext() as ctx:
        ctx.prec = 60
        exact = Decimal(value.numerator) / Decimal(value.denominator)
        places = Decimal("0.01") if 0 < exact < 1 else Decimal("0.1")
        rounded = exact.quantize(places, rounding=ROUND_HALF_UP)
        if exact and not rounded:
            return f"<{places} %"
        return f"{rounded} %"


def _frame(rows):
    records = []
    for report in rows:
        record = {
            "Configuration": report.config_label,
            "Report": report.document_id or "-",
            "Model": report.model_label or "-",
            "Ontology": report.ontology_strategy or "-",
            "Verification": report.verify_mode,
            "Triplets": report.triplet_count,
        }
        for column, attribute in METRIC_COLUMNS.items():
            record[column] = format_pct(getattr(report, attribute))
        records.append(record)
    return pd.DataFrame.from_records(records, columns=COLUMNS)


def render_table(rows, fmt=TableFormat.TEXT):
    if not rows:
        raise PipelineError("cannot render a report table without rows")
    fmt = TableFormat(fmt)
    df = _frame(rows)
    if fmt == TableFormat.CSV:
        return df.to_csv(index=False, lineterminator="\n")
    if fmt == TableFormat.MARKDOWN:
        return df.to_markdown(index=False, disable_numparse=True) + "\n"
    return df.to_string(index=False) + "\n"


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple
    caption: str = ""
    cross_document: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        documents = {report.document_id for report in self.rows}
        if len(documents) > 1 and not self.cross_document:
            raise PipelineError(f"rows span documents {sorted(documents)}; label the table cross-document")

    def render(self, fmt=TableFormat.TEXT):
        fmt = TableFormat(fmt)
        body = render_table(self.rows, fmt)
        if not self.caption or fmt == TableFormat.CSV:
            return body
        if fmt == TableFormat.MARKDOWN:
            return f"**{self.caption}**\n\n{body}"
        return f"{self.caption}\n\n{body}"


def write_report_files(table, run_dir, stem="report"):
    os.makedirs(run_dir, exist_ok=True)
    paths = {}
    for fmt, suffix in ((TableFormat.TEXT, "txt"), (TableFormat.CSV, "csv"), (TableFormat.MARKDOWN, "md")):
        path = os.path.join(run_dir, f"{stem}.{suffix}")
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            file.write(table.render(fmt))
        paths[suffix] = path
    paths["json"] = write_report_json(table.rows, os.path.join(run_dir, f"{stem}.json"),
                                      caption=table.caption, cross_document=table.cross_document)
    return paths
