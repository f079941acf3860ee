from modules.llm_gateway.cassette import Cassette, CassetteEntry
from modules.llm_gateway.gateway import GatewayMode, LLMGateway
from modules.llm_gateway.http_provider import HttpChatProvider
from modules.llm_gateway.mock_provider import MockProvider, MockRules
from modules.llm_gateway.provider_types import (
    Message,
    ProviderRequest,
    ProviderResponse,
    RequestTag,
    Role,
    fingerprint,
)

__all__ = [
    "Cassette", "CassetteEntry", "GatewayMode", "HttpChatProvider", "LLMGateway", "Message",
    "MockProvider", "MockRules", "ProviderRequest", "ProviderResponse", "RequestTag", "Role",
    "fingerprint",
]
