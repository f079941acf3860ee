import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Optional

import toml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from modules.corpus.chunker import DEFAULT_CHUNK_SIZE, DEFAULT_OVERLAP
from modules.errors import ConfigError
from modules.extraction.prompt_builder import DEFAULT_EXEMPLARS, Exemplar
from modules.llm_gateway.gateway import DEFAULT_MAX_IN_FLIGHT, GatewayMode
from modules.verification.triplet_verifier import VerifyMode

DEFAULT_OUT = "runs/latest"
# Fields that locate outputs rather than shape them; excluded from the fingerprint.
UNFINGERPRINTED = frozenset({"out"})


class OntologyStrategy(str, Enum):
    MANUAL = "manual"
    AUTO = "auto"


class ProviderKind(str, Enum):
    HTTP = "http"
    MOCK = "mock"


class TripletEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    subject: str
    predicate: str
    object: str


class ExemplarEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    text: str
    triplets: list[TripletEntry] = Field(default_factory=list)


class RunConfig(BaseModel):
    """
    Resolved settings of one run. Defaults: whole document, five-sentence chunks without
    overlap, the mock gateway and hybrid verification.
    """

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    document_path: Optional[str] = None
    fraction: float = Field(default=1.0, gt=0.0, le=1.0)
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)
    overlap: int = Field(default=DEFAULT_OVERLAP, ge=0)
    ontology: str = "auto"
    gateway: GatewayMode = GatewayMode.MOCK
    provider: Optional[ProviderKind] = None
    cassette: Optional[str] = None
    mock_rules: Optional[str] = None
    # overrides the rules file: a weaker mock model drifting off the ontology
    drift_rate: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    verify: VerifyMode = VerifyMode.HYBRID
    exemplars: list[ExemplarEntry] = Field(default_factory=list)
    label: Optional[str] = None
    model_label: Optional[str] = None
    max_in_flight: int = Field(default=DEFAULT_MAX_IN_FLIGHT, ge=1)
    seed: int = 0
    out: str = DEFAULT_OUT

    @field_validator("ontology")
    @classmethod
    def _check_ontology(cls, value):
        value = value.strip()
        if value == OntologyStrategy.AUTO.value:
            return value
        prefix = f"{OntologyStrategy.MANUAL.value}:"
        if value.startswith(prefix) and value[len(prefix):].strip():
            return prefix + value[len(prefix):].strip()
        raise ValueError("ontology must be 'auto' or 'manual:<path>'")

    @model_validator(mode="after")
    def _check_combinations(self):
        if self.overlap >= self.chunk_size:
            raise ValueError(f"overlap ({self.overlap}) must be smaller than chunk_size ({self.chunk_size})")
        if self.gateway in (GatewayMode.RECORD, GatewayMode.REPLAY) and not self.cassette:
            raise ValueError(f"gateway {self.gateway.value} needs a cassette path")
        if self.gateway == GatewayMode.MOCK and self.provider == ProviderKind.HTTP:
            raise ValueError("gateway mock cannot use the http provider")
        if self.gateway == GatewayMode.LIVE and self.provider == ProviderKind.MOCK:
            raise ValueError("gateway live cannot use the mock provider; use gateway mock")
        return self

    @property
    def ontology_strategy(self):
        return OntologyStrategy(self.ontology.split(":", 1)[0])

    @property
    def ontology_path(self):
        if self.ontology_strategy == OntologyStrategy.MANUAL:
            return self.ontology.split(":", 1)[1]
        return None

    @property
    def provider_kind(self):
        if self.gateway == GatewayMode.REPLAY:
            return None
        if self.provider is not None:
            return self.provider
        return ProviderKind.MOCK if self.gateway == GatewayMode.MOCK else ProviderKind.HTTP

    @property
    def run_label(self):
        return self.label or f"{self.ontology_strategy.value}-{self.verify.value}"

    @property
    def model_column(self):
        return self.model_label or (self.provider_kind.value if self.provider_kind else "replay")

    def resolved_exemplars(self):
        if not self.exemplars:
            return DEFAULT_EXEMPLARS
        return tuple(Exemplar.from_dict(entry.model_dump()) for entry in self.exemplars)

    def fingerprint(self):
        payload = self.model_dump(mode="json", exclude=set(UNFINGERPRINTED))
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def to_record(self):
        return {"config": self.model_dump(mode="json"), "fingerprint": self.fingerprint()}

    def write(self, path):
        text = json.dumps(self.to_record(), indent=2, sort_keys=True, ensure_ascii=False)
        Path(path).write_text(text + "\n", encoding="utf-8")
        return path


def read_config_file(path):
    """TOML or JSON by suffix; a run directory's config.json is accepted as well."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text) if path.suffix.lower() == ".json" else toml.loads(text)
    except (json.JSONDecodeError, toml.TomlDecodeError) as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if isinstance(data, dict) and "config" in data and "fingerprint" in data:
        data = data["config"]
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a table of settings")
    return data


def build_config(values):
    try:
        return RunConfig.model_validate(values)
    except ValidationError as exc:
        messages = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"invalid run configuration: {messages}") from exc


def load_config(path=None, overrides=None, base=None):
    """File values (if any) on top of `base`, then every non-None override on top."""
    values = dict(base or {})
    if path is not None:
        values.update(read_config_file(path))
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return build_config(values)
