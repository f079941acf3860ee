import logging
import os
import re
from contextlib import redirect_stdout
from io import StringIO

from modules.errors import ConfigError
from modules.metrics.report_renderer import ComparisonTable, TableFormat, write_report_files
from modules.pipeline.run_config import build_config, read_config_file
from modules.pipeline.stages import cmd_run

logger = logging.getLogger(__name__)

DEFAULT_MATRIX_CAPTION = "Aggregate performance metrics across all experimental configurations"


def _slug(label):
    return re.sub(r"[^A-Za-z0-9._-]+", "-", label).strip("-") or "run"


def expand_matrix(matrix_path, overrides=None, out=None):
    """
    One RunConfig per `[[runs]]` entry: `[defaults]` first, then the entry, then CLI overrides.
    Each run writes to `<out>/<label>` unless the entry names its own `out`.
    """
    data = read_config_file(matrix_path)
    runs = data.get("runs") or []
    if not runs:
        raise ConfigError(f"matrix {matrix_path} defines no [[runs]]")
    defaults = data.get("defaults", {})
    out = out or data.get("out") or "runs/matrix"
    cli = {key: value for key, value in (overrides or {}).items() if value is not None and key != "out"}

    configs = []
    for index, entry in enumerate(runs):
        values = {**defaults, **entry, **cli}
        values.setdefault("label", entry.get("label") or f"run{index}")
        values.setdefault("out", os.path.join(out, _slug(values["label"])))
        configs.append(build_config(values))

    labels = [config.run_label for config in configs]
    duplicates = sorted({label for label in labels if labels.count(label) > 1})
    if duplicates:
        raise ConfigError(f"matrix run labels must be unique, repeated: {duplicates}")
    return configs, data.get("caption", DEFAULT_MATRIX_CAPTION), out


def cmd_matrix(matrix_path, overrides=None, out=None, plot=False, quiet=True):
    configs, caption, out = expand_matrix(matrix_path, overrides, out)
    rows = []
    for config in configs:
        print(f"🧪 {config.run_label}: {config.document_path} / {config.ontology} / {config.verify.value}")
        if quiet:
            with redirect_stdout(StringIO()):
                table = cmd_run(config)
        else:
            table = cmd_run(config)
        rows.extend(table.rows)

    documents = {row.document_id for row in rows}
    table = ComparisonTable(rows, caption=caption, cross_document=len(documents) > 1)
    paths = write_report_files(table, out)
    logger.info("stage=matrix event=done runs=%d documents=%d out=%s", len(configs), len(documents), out)
    print(table.render(TableFormat.TEXT))
    print(f"📁 Matrix report saved to {paths['txt']}, {paths['csv']}, {paths['md']}, {paths['json']}")
    if plot:
        from utils.plotter import plot_comparison

        plot_comparison(paths["csv"])
    return table
