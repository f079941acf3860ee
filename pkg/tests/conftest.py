import socket
from pathlib import Path

import pytest

from modules.corpus.chunker import Chunk
from modules.corpus.sentence_segmenter import Sentence
from modules.llm_gateway.gateway import LLMGateway
from modules.llm_gateway.mock_provider import MockProvider, MockRules

ROOT = Path(__file__).resolve().parent.parent
SYNTHETIC = ROOT / "datasets" / "synthetic"

NET_CASH_TEXT = "Net cash was SEK 27.1 (27.5) bn, which was largely driven by investing activities."


def build_chunk(text, chunk_id="doc:c0000", index=0):
    sentence = Sentence(index=0, text=text, char_span=(0, len(text)))
    return Chunk(id=chunk_id, index=index, sentences=(sentence,), text=text)


def build_gateway(rules=None, seed=0, max_in_flight=4, **rule_fields):
    if rules is None:
        rules = MockRules.model_validate(rule_fields)
    return LLMGateway("mock", provider=MockProvider(rules, seed=seed), max_in_flight=max_in_flight)


@pytest.fixture
def synthetic_dir():
    return SYNTHETIC


@pytest.fixture
def net_cash_chunk():
    return build_chunk(NET_CASH_TEXT, chunk_id="volvo:c0000")


@pytest.fixture
def mock_rules():
    return MockRules.from_file(SYNTHETIC / "mock_rules.json")


@pytest.fixture
def run_dir(tmp_path):
    path = tmp_path / "run"
    path.mkdir()
    return path


@pytest.fixture
def no_network(monkeypatch):
    """Any socket creation fails, so a test passes only if nothing touches the network."""

    def guard(*args, **kwargs):
        raise OSError("network access disabled in tests")

    monkeypatch.setattr(socket, "socket", guard)
    monkeypatch.setattr(socket, "create_connection", guard)
