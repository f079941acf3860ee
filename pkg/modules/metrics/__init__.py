from modules.metrics.evaluation_report import (
    EvaluationReport,
    MetricCounts,
    compute_report,
    read_report_json,
    relation_conformant,
    report_to_dict,
    write_report_json,
)
from modules.metrics.report_renderer import ComparisonTable, TableFormat, format_pct, render_table, write_report_files

__all__ = [
    "ComparisonTable", "EvaluationReport", "MetricCounts", "TableFormat", "compute_report", "format_pct",
    "read_report_json", "relation_conformant", "render_table", "report_to_dict", "write_report_files",
    "write_report_json",
]
