import json
from itertools import product
from pathlib import Path

import pytest

from modules.errors import ConfigError
from modules.llm_gateway.gateway import GatewayMode
from modules.pipeline.matrix import expand_matrix
from modules.pipeline.run_config import OntologyStrategy, ProviderKind, build_config, load_config, read_config_file
from modules.pipeline.stages import build_gateway
from modules.verification.triplet_verifier import VerifyMode

from conftest import ROOT


def test_defaults_follow_the_reference_setup():
    config = build_config({})
    assert (config.fraction, config.chunk_size, config.overlap) == (1.0, 5, 0)
    assert config.gateway == GatewayMode.MOCK
    assert config.verify == VerifyMode.HYBRID
    assert config.ontology_strategy == OntologyStrategy.AUTO
    assert config.provider_kind == ProviderKind.MOCK
    assert config.run_label == "auto-hybrid"


def test_flags_override_file_values(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('chunk_size = 4\nverify = "baseline"\nlabel = "from-file"\n', encoding="utf-8")
    config = load_config(path, {"chunk_size": 6, "label": None, "out": str(tmp_path / "out")})
    assert config.chunk_size == 6
    assert config.verify == VerifyMode.BASELINE
    assert config.label == "from-file"


@pytest.mark.parametrize("values", [
    {"fraction": 0},
    {"chunk_size": 0},
    {"chunk_size": 2, "overlap": 2},
    {"ontology": "manual:"},
    {"gateway": "replay"},
    {"gateway": "mock", "provider": "http"},
    {"gateway": "live", "provider": "mock"},
    {"temperature": 0.3},
])
def test_invalid_values_are_config_errors(values):
    with pytest.raises(ConfigError):
        build_config(values)


def test_manual_ontology_path_and_record_provider():
    config = build_config({"ontology": "manual: ontologies/volvo.json", "gateway": "record", "cassette": "c.jsonl"})
    assert config.ontology_strategy == OntologyStrategy.MANUAL
    assert config.ontology_path == "ontologies/volvo.json"
    assert config.provider_kind == ProviderKind.HTTP
    assert build_config({"gateway": "replay", "cassette": "c.jsonl"}).provider_kind is None


def test_fingerprint_ignores_the_output_directory(tmp_path):
    a = build_config({"out": "runs/a", "seed": 1})
    b = build_config({"out": "runs/b", "seed": 1})
    c = build_config({"out": "runs/a", "seed": 2})
    assert a.fingerprint() == b.fingerprint() != c.fingerprint()

    path = a.write(tmp_path / "config.json")
    record = json.loads(path.read_text(encoding="utf-8"))
    assert record["fingerprint"] == a.fingerprint()
    assert build_config(read_config_file(path)) == a


def test_config_exemplars_replace_the_defaults():
    config = build_config({"exemplars": [{"text": "Dividend SEK 7.50 per share.",
                                          "triplets": [{"subject": "dividend", "predicate": "has_value",
                                                        "object": "SEK 7.50 per share"}]}]})
    exemplars = config.resolved_exemplars()
    assert len(exemplars) == 1
    assert exemplars[0].text == "Dividend SEK 7.50 per share."


def test_malformed_config_files(tmp_path):
    broken = tmp_path / "broken.toml"
    broken.write_text("chunk_size = = 5\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_config_file(broken)
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "missing.toml")


def test_bundled_configurations_validate():
    for path in sorted((ROOT / "simulations" / "configs").glob("*.toml")):
        config = build_config(read_config_file(path))
        assert config.document_path
        assert config.label


def test_bundled_matrix_covers_report_model_ontology_grid(tmp_path):
    configs, caption, out = expand_matrix(ROOT / "simulations" / "matrix.toml", {"seed": 7, "verify": None},
                                          out=str(tmp_path / "grid"))
    assert caption.startswith("Aggregate performance metrics")
    assert len(configs) == 8
    grid = {(Path(c.document_path).name, c.model_column, c.ontology_strategy.value) for c in configs}
    assert grid == set(product(["annual_report_mini.txt", "medtech_report_mini.txt"],
                               ["mock", "mock-drift"], ["manual", "auto"]))
    for config in configs:
        assert (ROOT / config.document_path).exists()
        assert config.drift_rate == (0.3 if config.model_column == "mock-drift" else None)
    assert {c.verify for c in configs} == {VerifyMode.HYBRID}
    assert {c.seed for c in configs} == {7}
    assert configs[0].run_label == "nordvik-mock-manual"
    assert configs[0].out == str(tmp_path / "grid" / "nordvik-mock-manual")
    assert out == str(tmp_path / "grid")


def test_drift_rate_overrides_the_mock_rules_file(synthetic_dir):
    base = {"mock_rules": str(synthetic_dir / "mock_rules.json")}
    assert build_gateway(build_config(base)).provider.rules.drift_rate == 0.0
    drifted = build_gateway(build_config({**base, "drift_rate": 0.3}))
    assert drifted.provider.rules.drift_rate == 0.3
    assert drifted.provider.rules.extraction_patterns
    with pytest.raises(ConfigError):
        build_config({"drift_rate": 1.5})


def test_matrix_rejects_duplicate_labels(tmp_path):
    path = tmp_path / "matrix.toml"
    path.write_text('[[runs]]\nlabel = "a"\n\n[[runs]]\nlabel = "a"\n', encoding="utf-8")
    with pytest.raises(ConfigError, match="unique"):
        expand_matrix(path)
    empty = tmp_path / "empty.toml"
    empty.write_text('caption = "nothing"\n', encoding="utf-8")
    with pytest.raises(ConfigError):
        expand_matrix(empty)


def test_replay_without_a_recorded_cassette_is_a_config_error(tmp_path):
    config = build_config({"gateway": "replay", "cassette": str(tmp_path / "none.jsonl")})
    with pytest.raises(ConfigError, match="record it first"):
        build_gateway(config)
