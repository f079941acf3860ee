from modules.pipeline.matrix import cmd_matrix, expand_matrix
from modules.pipeline.run_config import OntologyStrategy, ProviderKind, RunConfig, build_config, load_config
from modules.pipeline.stages import (
    build_gateway,
    cmd_audit,
    cmd_evaluate,
    cmd_extract,
    cmd_induce,
    cmd_ingest,
    cmd_run,
    cmd_verify,
)

__all__ = [
    "OntologyStrategy", "ProviderKind", "RunConfig", "build_config", "build_gateway", "cmd_audit",
    "cmd_evaluate", "cmd_extract", "cmd_induce", "cmd_ingest", "cmd_matrix", "cmd_run", "cmd_verify",
    "expand_matrix", "load_config",
]
